#pragma once

#include "sbmsdp/matrix.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sbmsdp {

struct SolverOptions {
  // Factor rank; 0 selects ceil(sqrt(2n)) + 1.
  int rank = 0;
  int max_sweeps = 2000;
  // Relative objective gain below which a window of `stall_sweeps` sweeps
  // counts as converged.
  double tol_obj = 1e-7;
  int stall_sweeps = 10;
  double tol_feas = 1e-6;
  int restarts = 3;
  std::uint64_t seed = 0;
  bool record_trace = false;
  // Computes the dual bound of the low-rank solution (one eigensolve).
  bool certify = true;

  // Splitting solver for the constrained sets.
  int max_iterations = 4000;
  // Relative primal/dual residual target.
  double admm_tol = 1e-5;

  void validate() const;
};

// Constraint violations of a returned point. Linear constraints are
// evaluated in extended precision.
struct Residuals {
  double diag = 0.0;        // max |X_ii - 1|
  double psd = 0.0;         // max(0, -lambda_min(X))
  double sum = 0.0;         // |sum_ij X_ij - target| (D and C only)
  double negativity = 0.0;  // max(0, -min X_ij) (C only)
};

enum class ConstraintSet { kPsd1, kBalanced, kMembership };

struct SdpSolution {
  double objective = 0.0;
  // n x k factor with unit rows (low-rank form); empty in full form.
  Eigen::MatrixXd factor;
  // n x n feasible matrix (full form); empty in low-rank form.
  Eigen::MatrixXd matrix;
  int iterations = 0;
  Residuals residuals;
  bool converged = false;
  // Upper bound on the optimum from the dual certificate (low-rank form).
  std::optional<double> dual_bound;
  // Objective after every sweep of the winning restart, if requested.
  std::vector<double> trace;

  bool low_rank() const { return factor.size() > 0; }
  // X = V V^T in low-rank form, the stored matrix otherwise.
  Eigen::MatrixXd gram() const;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int default_rank(Eigen::Index n);

// max <M, X> over X >= 0, X_ii = 1. The returned factor is feasible, so the
// objective is a certified lower bound.
SdpSolution sdp_psd1(const SymmetricMatrix& M, const SolverOptions& opts = {});

// Same problem restricted to rank <= k (2 <= k <= n).
SdpSolution opt_k(const SymmetricMatrix& M, int k,
                  const SolverOptions& opts = {});

// opt_k for k = 2..k_max where each level is also warm-started from the
// previous level's best factor, so values are non-decreasing in k.
std::vector<SdpSolution> opt_k_ladder(const SymmetricMatrix& M, int k_max,
                                      const SolverOptions& opts = {});

// max <M, X> over PSD1 intersected with {sum_ij X_ij = 0}.
SdpSolution sdp_balanced(const SymmetricMatrix& M,
                         const SolverOptions& opts = {});

// max <W, Z> over Z >= 0 (PSD), Z_ij >= 0, Z_ii = 1, sum_ij Z_ij = lambda.
// Requires n <= lambda <= n^2. `warm_start`, if given, is an n x n starting
// point (e.g. a membership matrix from a cheaper estimator); it affects only
// the iteration count.
SdpSolution sdp_membership(const SymmetricMatrix& W, double lambda,
                           const SolverOptions& opts = {},
                           const Eigen::MatrixXd* warm_start = nullptr);

// Independent feasibility check of X against the given set; `target_sum` is
// the required total (0 for D, lambda for C).
Residuals check_feasibility(const Eigen::MatrixXd& X, ConstraintSet set,
                            double target_sum = 0.0);

// Exact ||M||_{inf->1} by enumeration; n <= 22.
double norm_inf_to_one(const SymmetricMatrix& M);

// M11 + M22 + 2|M12|.
double sdp_2x2_closed_form(const SymmetricMatrix& M);

}  // namespace sbmsdp
