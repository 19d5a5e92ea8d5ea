#pragma once

#include "sbmsdp/detect.hpp"
#include "sbmsdp/matrix.hpp"
#include "sbmsdp/model.hpp"
#include "sbmsdp/sdp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sbmsdp {

struct TestOutcome {
  double statistic = 0.0;  // SDP(W - M_candidate) over PSD1
  double threshold = 0.0;  // 2 n (1 + delta) sqrt(w_plus)
  bool reject = false;
  double delta = 0.0;
  double w_plus_used = 0.0;
  int K0 = 0;
  bool solver_converged = true;
};

double test_threshold(Eigen::Index n, double w_plus, double delta);

// Rejects iff SDP(W - M_candidate) > 2 n (1 + delta) sqrt(w_plus).
TestOutcome test_statistic(const SymmetricMatrix& W,
                           const SymmetricMatrix& M_candidate, double w_plus,
                           double delta, const SolverOptions& opts = {},
                           int K0 = 0);

struct MeanEstimate {
  double m_in = 0.0;
  std::optional<double> m_out;  // absent when every pair shares a label
  SymmetricMatrix M_hat;
};

// Averages W over unordered pairs i != j by label agreement.
MeanEstimate estimate_means(const SymmetricMatrix& W,
                            const CommunityAssignment& labels);

struct WPlusEstimate {
  double w_plus = 0.0;
  double rho_hat = 0.0;
  double mu_in = 0.0;
  double mu_out = 0.0;
  double tau_in = 0.0;
  double tau_out = 0.0;
  // Fewer than `kLowSample` nonzero entries in some populated class.
  bool low_sample = false;
  static constexpr int kLowSample = 10;
};

// Zero-inflated Gaussian plug-in: rho from the nonzero fraction, mu and tau
// from nonzero entries within / between the given communities.
WPlusEstimate w_plus_plugin(const SymmetricMatrix& W,
                            const CommunityAssignment& labels);

struct WPlusMode {
  enum class Kind { kKnown, kPlugin } kind = Kind::kPlugin;
  double value = 0.0;

  static WPlusMode known(double v) { return {Kind::kKnown, v}; }
  static WPlusMode plugin() { return {Kind::kPlugin, 0.0}; }
};

enum class LabelMethod { kSpectral, kSdpMembership };

struct SequentialOptions {
  double epsilon = 0.1;
  int K_max = 8;
  WPlusMode w_plus = WPlusMode::plugin();
  std::uint64_t seed = 0;
  LabelMethod labels = LabelMethod::kSpectral;
  SolverOptions solver;
};

struct StageRecord {
  int K0 = 0;
  std::optional<TestOutcome> outcome;  // absent if the stage failed
  std::optional<CommunityAssignment> labels;
  std::string error;
};

struct SequentialTrace {
  std::vector<StageRecord> stages;
  std::optional<int> k_hat;  // absent: every K0 <= K_max rejected or failed

  // Non-rejections among completed stages occur only at k_hat.
  bool coherent() const;
};

// One stage at candidate K0: labels, plug-in means, w_plus, then the test.
// Failures are captured in StageRecord::error.
StageRecord plugin_stage(const SymmetricMatrix& W, int K0,
                         const SequentialOptions& opts);

SequentialTrace sequential_estimate_k(const SymmetricMatrix& W,
                                      const SequentialOptions& opts);

// (n^2 / 2)(M_in - M_out) > 4 n (1 + delta) sqrt(w_plus).
bool check_theorem2(double n, double m_in, double m_out, double w_plus,
                    double delta);
// 2 n^2 / (r^2 s^2) (M_in - M_out) > 4 n (1 + delta) sqrt(w_plus).
bool check_theorem4(double n, int r, int s, double m_in, double m_out,
                    double w_plus, double delta);
// M_in - M_out > min{2 K^4 (K+1)^2 (1+eps) sqrt(w_plus) / n,
//                    K (K-1) log(2(K-1)) sqrt(w_plus) / n}.
// For K = 1 only the first expression applies.
bool check_theorem7(double n, int K, double m_in, double m_out, double w_plus,
                    double epsilon);

}  // namespace sbmsdp
