#pragma once

#include "sbmsdp/matrix.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sbmsdp {

// Edge weight Ber(a_n/n) * N(mu, tau^2); a_n and b_n are expected-degree
// scales, so the Bernoulli probability is a_n / n.
struct ZeroInflatedGaussian {
  double a_n = 0.0;
  double b_n = 0.0;
  double mu_in = 0.0;
  double mu_out = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
};

struct BernoulliLaw {
  double p_in = 0.0;
  double p_out = 0.0;
};

struct GaussianLaw {
  double mu_in = 0.0;
  double mu_out = 0.0;
  double sigma = 1.0;
};

using WeightLaw = std::variant<ZeroInflatedGaussian, BernoulliLaw, GaussianLaw>;

// Variance factor / scale bookkeeping for sub-gamma edge weights.
struct SubGammaParams {
  double nu_in = 0.0;
  double nu_out = 0.0;
  double c_in = 0.0;
  double c_out = 0.0;
  double w_plus = 0.0;
  double theta = 0.0;
};

// Balanced weighted SBM: n nodes, K communities of size n / K.
class SbmModel {
 public:
  // Throws std::invalid_argument when K does not divide n or the law has
  // out-of-range parameters (probabilities outside [0, 1], negative scales).
  SbmModel(int n, int K, WeightLaw law);

  // Zero-inflated Gaussian with a_n = b_n = rho * n and tau1 = tau2 = tau.
  static SbmModel zig_dense(int n, int K, double rho, double mu_in,
                            double mu_out, double tau);

  int n() const { return n_; }
  int K() const { return K_; }
  const WeightLaw& law() const { return law_; }

  double m_in() const;
  double m_out() const;

  // Assumption checks that a model may legitimately violate (e.g. zero
  // separation in diagnostics). Empty result means all hold.
  std::vector<std::string> assumption_violations() const;

 private:
  int n_;
  int K_;
  WeightLaw law_;
};

// Labels in [0, K). Not necessarily balanced: estimators may return
// unbalanced partitions.
class CommunityAssignment {
 public:
  CommunityAssignment(std::vector<int> labels, int K);

  int n() const { return static_cast<int>(labels_.size()); }
  int K() const { return K_; }
  const std::vector<int>& labels() const { return labels_; }
  int operator[](int i) const { return labels_[static_cast<std::size_t>(i)]; }

  bool balanced() const;
  std::vector<int> sizes() const;

  // Z0_ij = 1 iff labels agree (unit diagonal).
  SymmetricMatrix membership_matrix() const;
  // +1 for label 0, -1 for label 1. Requires K == 2.
  std::vector<int> sign_vector() const;

  friend bool operator==(const CommunityAssignment&,
                         const CommunityAssignment&) = default;

 private:
  std::vector<int> labels_;
  int K_;
};

// Canonical mode (no seed): consecutive blocks of size n / K. With a seed:
// a uniformly random balanced labelling.
CommunityAssignment balanced_assignment(int n, int K,
                                        std::optional<std::uint64_t> seed = {});

// Entry (i, j) = m_in if labels agree else m_out; zero diagonal.
SymmetricMatrix mean_matrix(int n, int K, double m_in, double m_out,
                            const CommunityAssignment& assignment);

// Draws W with independent upper-triangle entries from the in/out law;
// zero diagonal. Deterministic in `seed`.
SymmetricMatrix sample_sbm(const SbmModel& model,
                           const CommunityAssignment& assignment,
                           std::uint64_t seed);

// Null-hypothesis draw: each pair independently uses the in-law or the
// out-law with probability 1/2, so E[W] = (m_in + m_out) / 2 off-diagonal.
SymmetricMatrix sample_null_mixture(const SbmModel& model, std::uint64_t seed);

// Sub-gamma parameters of the zero-inflated Gaussian law. Throws
// std::invalid_argument for other laws.
SubGammaParams zig_subgamma(const SbmModel& model);

// Sub-gamma parameters for any supported law (Gaussian: nu = sigma^2, c = 0;
// Bernoulli: nu = p(1-p), c = 1/3).
SubGammaParams subgamma(const SbmModel& model);

// GOE: off-diagonal variance 1/n, diagonal variance 2/n.
SymmetricMatrix sample_goe(int n, std::uint64_t seed);

}  // namespace sbmsdp
