#include "sbmsdp/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <stdexcept>
#include <thread>

namespace sbmsdp {
namespace {

constexpr int kEnumerationBudget = 16;

void validate(int r, int s, int m, bool exploratory, const char* who) {
  const int m_min = exploratory ? 1 : 2;
  if (!(s >= 2 && r > s && m >= m_min)) {
    throw std::invalid_argument(std::string(who) +
                                ": requires r > s >= 2 and m >= 2 (m >= 1 when exploratory)");
  }
}

Eigen::MatrixXd block_indicator(const std::vector<int>& labels) {
  const Eigen::Index n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j && labels[i] == labels[j]) out(i, j) = 1.0;
    }
  }
  return out;
}

void extend(std::vector<int>& labels, std::vector<int>& fill, int pos, int opened,
            int cap, const std::function<void(const std::vector<int>&)>& visit) {
  const int n = static_cast<int>(labels.size());
  if (pos == n) {
    visit(labels);
    return;
  }
  const int groups = static_cast<int>(fill.size());
  const int limit = std::min(opened + 1, groups);
  for (int g = 0; g < limit; ++g) {
    if (fill[g] == cap) continue;
    labels[pos] = g;
    ++fill[g];
    extend(labels, fill, pos + 1, std::max(opened, g + 1), cap, visit);
    --fill[g];
  }
}

}  // namespace

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::kSNotDivides: return "S_NOT_DIVIDES";
    case CaseId::kDivOddRatio: return "DIV_ODD_RATIO";
    case CaseId::kDivEvenRatio: return "DIV_EVEN_RATIO";
    case CaseId::kDivFar: return "DIV_FAR";
  }
  return "UNKNOWN";
}

BoundCase closed_form_bound(int r, int s, int m, bool exploratory) {
  validate(r, s, m, exploratory, "closed_form_bound");
  BoundCase bc;
  bc.r = r;
  bc.s = s;
  bc.m = m;
  bc.t = r % s;
  const double R = r, S = s, M = m, T = bc.t;
  if (bc.t != 0) {
    bc.coefficients.emplace_back(CaseId::kSNotDivides, (S * S * T - S * T * T) * M * M);
  } else if ((r / s) % 2 == 1) {
    bc.coefficients.emplace_back(CaseId::kDivOddRatio,
                                 R * S * S * M * M - S * S * S * M * M + 4.0 * S * M - 4.0);
  } else {
    bc.coefficients.emplace_back(CaseId::kDivEvenRatio, (R * S * S - 4.0) * M * M);
  }
  if (bc.t == 0) {
    bc.coefficients.emplace_back(CaseId::kDivFar, 4.0 * (S - 1.0) * M * M);
  }
  const auto best = std::min_element(
      bc.coefficients.begin(), bc.coefficients.end(),
      [](const auto& a, const auto& b) { return a.second < b.second; });
  bc.case_id = best->first;
  bc.bound_coeff = best->second;
  bc.overall_coeff = 2.0 * M * M;
  return bc;
}

SymmetricMatrix witness_block_Z(int r, int s, int m, bool exploratory) {
  validate(r, s, m, exploratory, "witness_block_Z");
  const int block = s * m;
  const int n = r * block;
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < r; ++b) z.block(b * block, b * block, block, block).setOnes();
  return SymmetricMatrix(std::move(z));
}

SymmetricMatrix witness_alternating_Ztilde(int r, int s, int m, bool exploratory) {
  validate(r, s, m, exploratory, "witness_alternating_Ztilde");
  if (r % s != 0) throw std::invalid_argument("witness_alternating_Ztilde: requires s | r");
  const int sub = s * m;
  const int per_big = r / s;
  const int big = per_big * sub;
  const int n = r * s * m;
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, n);
  // Each big block is u u^T with u alternating +1 / -1 per sub-block.
  for (int g = 0; g < s; ++g) {
    Eigen::VectorXd u(big);
    for (int k = 0; k < per_big; ++k) u.segment(k * sub, sub).setConstant(k % 2 == 0 ? 1.0 : -1.0);
    z.block(g * big, g * big, big, big) = u * u.transpose();
  }
  return SymmetricMatrix(std::move(z));
}

void for_each_balanced_partition(int n, int s,
                                 const std::function<void(const std::vector<int>&)>& visit) {
  if (s < 1 || n % s != 0) {
    throw std::invalid_argument("for_each_balanced_partition: s must divide n");
  }
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<int> fill(static_cast<std::size_t>(s), 0);
  if (n == 0) {
    visit(labels);
    return;
  }
  extend(labels, fill, 0, 0, n / s, visit);
}

EnumerationResult enumerate_min_sdp_diff(int r, int s, int m, const SolverOptions& opts,
                                         bool exploratory) {
  validate(r, s, m, exploratory, "enumerate_min_sdp_diff");
  const int n = r * s * m;
  if (n > kEnumerationBudget) {
    throw std::invalid_argument("enumerate_min_sdp_diff: n = r s m exceeds the budget of 16");
  }
  opts.validate();

  std::vector<int> canonical(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) canonical[i] = i / (s * m);
  const Eigen::MatrixXd M_r = block_indicator(canonical);

  std::vector<std::vector<int>> partitions;
  for_each_balanced_partition(n, s, [&](const std::vector<int>& p) { partitions.push_back(p); });

  const std::size_t count = partitions.size();
  std::vector<double> values(count, 0.0);
  std::vector<std::string> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < count; idx = next++) {
      try {
        values[idx] = sdp_psd1(SymmetricMatrix(M_r - block_indicator(partitions[idx])), opts)
                          .objective;
      } catch (const std::exception& e) {
        errors[idx] = e.what();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, count));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (const std::string& e : errors) {
    if (!e.empty()) throw SolverError("enumerate_min_sdp_diff: " + e);
  }
  // Lowest index wins ties so the argmin does not depend on scheduling.
  std::size_t best = 0;
  for (std::size_t i = 1; i < count; ++i) {
    if (values[i] < values[best]) best = i;
  }
  EnumerationResult res;
  res.min_value = values[best];
  res.argmin = CommunityAssignment(partitions[best], s);
  res.partitions = static_cast<long long>(count);
  return res;
}

}  // namespace sbmsdp
