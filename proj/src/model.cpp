#include "sbmsdp/model.hpp"

#include "sbmsdp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sbmsdp {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

// Stream ids for the per-edge Philox counters.
constexpr std::uint64_t kCoinStream = 0;
constexpr std::uint64_t kGaussStream = 1;
constexpr std::uint64_t kMixtureStream = 2;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void validate_law(int n, const WeightLaw& law) {
  std::visit(
      Overloaded{
          [n](const ZeroInflatedGaussian& z) {
            for (double v : {z.a_n, z.b_n, z.mu_in, z.mu_out, z.tau1, z.tau2}) {
              require(std::isfinite(v), "ZIG law: non-finite parameter");
            }
            require(z.a_n >= 0 && z.a_n <= n, "ZIG law: a_n must lie in [0, n]");
            require(z.b_n >= 0 && z.b_n <= n, "ZIG law: b_n must lie in [0, n]");
            require(z.tau1 >= 0 && z.tau2 >= 0, "ZIG law: negative tau");
          },
          [](const BernoulliLaw& b) {
            require(b.p_in >= 0 && b.p_in <= 1 && b.p_out >= 0 && b.p_out <= 1,
                    "Bernoulli law: probabilities must lie in [0, 1]");
          },
          [](const GaussianLaw& g) {
            require(std::isfinite(g.mu_in) && std::isfinite(g.mu_out) &&
                        std::isfinite(g.sigma) && g.sigma >= 0,
                    "Gaussian law: invalid parameters");
          }},
      law);
}

// One edge weight from the in-law (same == true) or out-law.
double draw_edge(const WeightLaw& law, int n, bool same, const Philox& gen,
                 std::uint64_t index) {
  return std::visit(
      Overloaded{
          [&](const ZeroInflatedGaussian& z) {
            const double p = (same ? z.a_n : z.b_n) / n;
            if (gen.uniform(kCoinStream, index) >= p) return 0.0;
            const double mu = same ? z.mu_in : z.mu_out;
            const double tau = same ? z.tau1 : z.tau2;
            return mu + tau * gen.normal(kGaussStream, index);
          },
          [&](const BernoulliLaw& b) {
            const double p = same ? b.p_in : b.p_out;
            return gen.uniform(kCoinStream, index) < p ? 1.0 : 0.0;
          },
          [&](const GaussianLaw& g) {
            return (same ? g.mu_in : g.mu_out) +
                   g.sigma * gen.normal(kGaussStream, index);
          }},
      law);
}

std::uint64_t edge_index(int n, int i, int j) {
  return static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) +
         static_cast<std::uint64_t>(j);
}

}  // namespace

SbmModel::SbmModel(int n, int K, WeightLaw law)
    : n_(n), K_(K), law_(std::move(law)) {
  require(n >= 1, "SbmModel: n must be positive");
  require(K >= 1 && K <= n, "SbmModel: K must lie in [1, n]");
  require(n % K == 0, "SbmModel: K must divide n");
  validate_law(n, law_);
}

SbmModel SbmModel::zig_dense(int n, int K, double rho, double mu_in,
                             double mu_out, double tau) {
  require(rho >= 0 && rho <= 1, "zig_dense: rho must lie in [0, 1]");
  return SbmModel(n, K,
                  ZeroInflatedGaussian{rho * n, rho * n, mu_in, mu_out, tau,
                                       tau});
}

double SbmModel::m_in() const {
  return std::visit(
      Overloaded{[this](const ZeroInflatedGaussian& z) {
                   return z.a_n / n_ * z.mu_in;
                 },
                 [](const BernoulliLaw& b) { return b.p_in; },
                 [](const GaussianLaw& g) { return g.mu_in; }},
      law_);
}

double SbmModel::m_out() const {
  return std::visit(
      Overloaded{[this](const ZeroInflatedGaussian& z) {
                   return z.b_n / n_ * z.mu_out;
                 },
                 [](const BernoulliLaw& b) { return b.p_out; },
                 [](const GaussianLaw& g) { return g.mu_out; }},
      law_);
}

std::vector<std::string> SbmModel::assumption_violations() const {
  std::vector<std::string> out;
  if (!(m_in() > m_out())) out.push_back("mean separation m_in > m_out fails");
  if (std::holds_alternative<ZeroInflatedGaussian>(law_) &&
      !(zig_subgamma(*this).w_plus > 4.0)) {
    out.push_back("w_plus > 4 fails");
  }
  return out;
}

CommunityAssignment::CommunityAssignment(std::vector<int> labels, int K)
    : labels_(std::move(labels)), K_(K) {
  require(K >= 1, "CommunityAssignment: K must be positive");
  for (int l : labels_) {
    require(l >= 0 && l < K, "CommunityAssignment: label out of range");
  }
}

std::vector<int> CommunityAssignment::sizes() const {
  std::vector<int> s(static_cast<std::size_t>(K_), 0);
  for (int l : labels_) ++s[static_cast<std::size_t>(l)];
  return s;
}

bool CommunityAssignment::balanced() const {
  if (n() % K_ != 0) return false;
  const auto s = sizes();
  return std::all_of(s.begin(), s.end(),
                     [&](int c) { return c == n() / K_; });
}

SymmetricMatrix CommunityAssignment::membership_matrix() const {
  const int nn = n();
  Eigen::MatrixXd z(nn, nn);
  for (int j = 0; j < nn; ++j) {
    for (int i = 0; i < nn; ++i) z(i, j) = labels_[i] == labels_[j] ? 1.0 : 0.0;
  }
  return SymmetricMatrix(std::move(z));
}

std::vector<int> CommunityAssignment::sign_vector() const {
  require(K_ == 2, "sign_vector: requires K == 2");
  std::vector<int> x(labels_.size());
  std::transform(labels_.begin(), labels_.end(), x.begin(),
                 [](int l) { return l == 0 ? 1 : -1; });
  return x;
}

CommunityAssignment balanced_assignment(int n, int K,
                                        std::optional<std::uint64_t> seed) {
  require(n >= 1 && K >= 1 && n % K == 0,
          "balanced_assignment: K must divide n");
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[i] = i / (n / K);
  if (seed) {
    PhiloxStream rng(*seed);
    std::shuffle(labels.begin(), labels.end(), rng);
  }
  return CommunityAssignment(std::move(labels), K);
}

SymmetricMatrix mean_matrix(int n, int K, double m_in, double m_out,
                            const CommunityAssignment& assignment) {
  require_same_dim(assignment.n(), n, "mean_matrix");
  require(assignment.K() == K, "mean_matrix: assignment K differs");
  require(assignment.balanced(), "mean_matrix: assignment is not balanced");
  require(std::isfinite(m_in) && std::isfinite(m_out),
          "mean_matrix: non-finite mean");
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m(i, j) = i == j ? 0.0 : (assignment[i] == assignment[j] ? m_in : m_out);
    }
  }
  return SymmetricMatrix(std::move(m));
}

SymmetricMatrix sample_sbm(const SbmModel& model,
                           const CommunityAssignment& assignment,
                           std::uint64_t seed) {
  const int n = model.n();
  require_same_dim(assignment.n(), n, "sample_sbm");
  const Philox gen(seed);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const double v = draw_edge(model.law(), n, assignment[i] == assignment[j],
                                 gen, edge_index(n, i, j));
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return SymmetricMatrix(std::move(w));
}

SymmetricMatrix sample_null_mixture(const SbmModel& model, std::uint64_t seed) {
  const int n = model.n();
  const Philox gen(seed);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const std::uint64_t idx = edge_index(n, i, j);
      const bool in_law = gen.uniform(kMixtureStream, idx) < 0.5;
      const double v = draw_edge(model.law(), n, in_law, gen, idx);
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return SymmetricMatrix(std::move(w));
}

SubGammaParams zig_subgamma(const SbmModel& model) {
  const auto* z = std::get_if<ZeroInflatedGaussian>(&model.law());
  require(z != nullptr, "zig_subgamma: model law is not zero-inflated Gaussian");
  const double n = model.n();
  const double s_in = std::abs(z->mu_in) + z->tau1;
  const double s_out = std::abs(z->mu_out) + z->tau2;
  SubGammaParams p;
  p.nu_in = 4.0 * (z->a_n / n) * s_in * s_in;
  p.nu_out = 4.0 * (z->b_n / n) * s_out * s_out;
  p.c_in = std::sqrt(2.0) * s_in;
  p.c_out = std::sqrt(2.0) * s_out;
  p.w_plus = std::max(4.0 * z->a_n * s_in * s_in, 4.0 * z->b_n * s_out * s_out);
  p.theta = p.w_plus > 0 ? std::max(p.c_in, p.c_out) / std::sqrt(p.w_plus)
                         : std::numeric_limits<double>::infinity();
  return p;
}

SubGammaParams subgamma(const SbmModel& model) {
  if (std::holds_alternative<ZeroInflatedGaussian>(model.law())) {
    return zig_subgamma(model);
  }
  SubGammaParams p;
  if (const auto* b = std::get_if<BernoulliLaw>(&model.law())) {
    p.nu_in = b->p_in * (1.0 - b->p_in);
    p.nu_out = b->p_out * (1.0 - b->p_out);
    p.c_in = p.c_out = 1.0 / 3.0;
  } else {
    const auto& g = std::get<GaussianLaw>(model.law());
    p.nu_in = p.nu_out = g.sigma * g.sigma;
    p.c_in = p.c_out = 0.0;
  }
  p.w_plus = model.n() * std::max(p.nu_in, p.nu_out);
  const double c = std::max(p.c_in, p.c_out);
  p.theta = p.w_plus > 0 ? c / std::sqrt(p.w_plus)
                         : (c > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  return p;
}

SymmetricMatrix sample_goe(int n, std::uint64_t seed) {
  require(n >= 1, "sample_goe: n must be positive");
  const Philox gen(seed);
  const double off = 1.0 / std::sqrt(static_cast<double>(n));
  const double diag = std::sqrt(2.0 / n);
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double z = gen.normal(kGaussStream, edge_index(n, i, j));
      g(i, j) = (i == j ? diag : off) * z;
      g(j, i) = g(i, j);
    }
  }
  return SymmetricMatrix(std::move(g));
}

}  // namespace sbmsdp
