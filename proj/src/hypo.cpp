#include "sbmsdp/hypo.hpp"

#include "sbmsdp/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sbmsdp {
namespace {

// Running moments of the nonzero entries of one pair class.
struct ClassStats {
  long long count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double v) {
    ++count;
    sum += v;
    sum_sq += v * v;
  }
  double mean() const { return count > 0 ? sum / count : 0.0; }
  double sd() const {
    if (count < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, sum_sq / count - m * m));
  }
};

}  // namespace

double test_threshold(Eigen::Index n, double w_plus, double delta) {
  return 2.0 * static_cast<double>(n) * (1.0 + delta) * std::sqrt(w_plus);
}

TestOutcome test_statistic(const SymmetricMatrix& W,
                           const SymmetricMatrix& M_candidate, double w_plus,
                           double delta, const SolverOptions& opts, int K0) {
  require_same_dim(W.n(), M_candidate.n(), "test_statistic");
  if (!(w_plus > 0.0)) throw std::invalid_argument("test_statistic: w_plus must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("test_statistic: delta must be positive");
  const SdpSolution sol = sdp_psd1(W - M_candidate, opts);
  TestOutcome out;
  out.statistic = sol.objective;
  out.threshold = test_threshold(W.n(), w_plus, delta);
  out.reject = out.statistic > out.threshold;
  out.delta = delta;
  out.w_plus_used = w_plus;
  out.K0 = K0;
  out.solver_converged = sol.converged;
  return out;
}

MeanEstimate estimate_means(const SymmetricMatrix& W,
                            const CommunityAssignment& labels) {
  const int n = static_cast<int>(W.n());
  if (labels.n() != n) throw DimensionError("estimate_means: labels length differs from n");
  long double in_sum = 0.0L, out_sum = 0.0L;
  long long in_count = 0, out_count = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      if (labels[i] == labels[j]) {
        in_sum += W(i, j);
        ++in_count;
      } else {
        out_sum += W(i, j);
        ++out_count;
      }
    }
  }
  if (in_count == 0) throw std::invalid_argument("estimate_means: no within-community pairs");
  if (labels.K() >= 2 && out_count == 0) {
    throw std::invalid_argument("estimate_means: no between-community pairs");
  }
  MeanEstimate est;
  est.m_in = static_cast<double>(in_sum / in_count);
  if (out_count > 0) est.m_out = static_cast<double>(out_sum / out_count);
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m(i, j) = i == j ? 0.0 : (labels[i] == labels[j] ? est.m_in : *est.m_out);
    }
  }
  est.M_hat = SymmetricMatrix(std::move(m));
  return est;
}

WPlusEstimate w_plus_plugin(const SymmetricMatrix& W,
                            const CommunityAssignment& labels) {
  const int n = static_cast<int>(W.n());
  if (labels.n() != n) throw DimensionError("w_plus_plugin: labels length differs from n");
  if (n < 2) throw std::invalid_argument("w_plus_plugin: requires n >= 2");
  ClassStats in, out;
  long long in_pairs = 0, out_pairs = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const bool same = labels[i] == labels[j];
      (same ? in_pairs : out_pairs) += 1;
      const double v = W(i, j);
      if (v == 0.0) continue;
      (same ? in : out).add(v);
    }
  }
  const long long nnz = in.count + out.count;
  if (nnz == 0) throw std::invalid_argument("w_plus_plugin: matrix has no nonzero off-diagonal entry");
  WPlusEstimate est;
  const double pairs = 0.5 * n * (n - 1.0);
  est.rho_hat = static_cast<double>(nnz) / pairs;
  est.mu_in = in.mean();
  est.mu_out = out.mean();
  est.tau_in = in.sd();
  est.tau_out = out.sd();
  const double a = std::abs(est.mu_in) + est.tau_in;
  const double b = std::abs(est.mu_out) + est.tau_out;
  est.w_plus = 4.0 * est.rho_hat * n * std::max(a * a, b * b);
  est.low_sample = (in_pairs > 0 && in.count < WPlusEstimate::kLowSample) ||
                   (out_pairs > 0 && out.count < WPlusEstimate::kLowSample);
  return est;
}

bool SequentialTrace::coherent() const {
  for (const StageRecord& st : stages) {
    if (!st.outcome) continue;
    const bool at_khat = k_hat && st.K0 == *k_hat;
    if (!st.outcome->reject && !at_khat) return false;
    if (at_khat && st.outcome->reject) return false;
    if (k_hat && st.K0 > *k_hat) return false;
  }
  return true;
}

StageRecord plugin_stage(const SymmetricMatrix& W, int K0,
                         const SequentialOptions& opts) {
  const int n = static_cast<int>(W.n());
  StageRecord st;
  st.K0 = K0;
  const std::uint64_t stage_seed = split_seed(opts.seed, static_cast<std::uint64_t>(K0));
  try {
    if (K0 < 1 || K0 > n) throw std::invalid_argument("plugin_stage: K0 must lie in [1, n]");
    CommunityAssignment labels(std::vector<int>(static_cast<std::size_t>(n), 0), K0);
    if (K0 > 1) {
      if (opts.labels == LabelMethod::kSpectral) {
        labels = spectral_clustering(W, K0, stage_seed);
      } else {
        MembershipOptions mo;
        mo.solver = opts.solver;
        mo.solver.seed = stage_seed;
        const MembershipEstimate me = estimate_membership(W, K0, mo);
        labels = spectral_clustering(
            SymmetricMatrix(Eigen::MatrixXd(0.5 * (me.Z_hat + me.Z_hat.transpose()))), K0,
            stage_seed);
      }
    }
    st.labels = labels;
    const MeanEstimate means = estimate_means(W, labels);
    const double w_plus = opts.w_plus.kind == WPlusMode::Kind::kKnown
                              ? opts.w_plus.value
                              : w_plus_plugin(W, labels).w_plus;
    SolverOptions so = opts.solver;
    so.seed = split_seed(stage_seed, 1);
    st.outcome = test_statistic(W, means.M_hat, w_plus, opts.epsilon, so, K0);
  } catch (const std::exception& e) {
    st.error = e.what();
  }
  return st;
}

SequentialTrace sequential_estimate_k(const SymmetricMatrix& W,
                                      const SequentialOptions& opts) {
  if (opts.K_max < 1) throw std::invalid_argument("sequential_estimate_k: K_max must be >= 1");
  if (!(opts.epsilon > 0.0)) throw std::invalid_argument("sequential_estimate_k: epsilon must be positive");
  if (opts.w_plus.kind == WPlusMode::Kind::kKnown && !(opts.w_plus.value > 0.0)) {
    throw std::invalid_argument("sequential_estimate_k: known w_plus must be positive");
  }
  const int n = static_cast<int>(W.n());
  SequentialTrace trace;
  for (int K0 = 1; K0 <= std::min(opts.K_max, n); ++K0) {
    StageRecord st = plugin_stage(W, K0, opts);
    const bool stop = st.outcome && !st.outcome->reject;
    trace.stages.push_back(std::move(st));
    if (stop) {
      trace.k_hat = K0;
      break;
    }
  }
  return trace;
}

bool check_theorem2(double n, double m_in, double m_out, double w_plus,
                    double delta) {
  return 0.5 * n * n * (m_in - m_out) > 4.0 * n * (1.0 + delta) * std::sqrt(w_plus);
}

bool check_theorem4(double n, int r, int s, double m_in, double m_out,
                    double w_plus, double delta) {
  const double rs = static_cast<double>(r) * s;
  return 2.0 * n * n / (rs * rs) * (m_in - m_out) >
         4.0 * n * (1.0 + delta) * std::sqrt(w_plus);
}

bool check_theorem7(double n, int K, double m_in, double m_out, double w_plus,
                    double epsilon) {
  const double k = K;
  const double root = std::sqrt(w_plus);
  double bound = 2.0 * std::pow(k, 4) * (k + 1) * (k + 1) * (1.0 + epsilon) * root / n;
  if (K >= 2) {
    bound = std::min(bound, k * (k - 1) * std::log(2.0 * (k - 1)) * root / n);
  }
  return m_in - m_out > bound;
}

}  // namespace sbmsdp
