#include "sbmsdp/rng.hpp"
#include "sbmsdp/sdp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace sbmsdp {
namespace {

// One restart of row-wise coordinate ascent. Vt is k x n, columns are the
// unit vectors v_i.
struct Run {
  Eigen::MatrixXd Vt;
  double objective = -std::numeric_limits<double>::infinity();
  int sweeps = 0;
  bool converged = false;
  std::vector<double> trace;
};

double objective_of(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Vt) {
  return (Vt * M).cwiseProduct(Vt).sum();
}

Run mix(const Eigen::MatrixXd& M, Eigen::MatrixXd Vt,
        const SolverOptions& opts) {
  const Eigen::Index n = M.rows();
  Run run;
  double f = objective_of(M, Vt);
  std::vector<double> history{f};
  Eigen::VectorXd g(Vt.rows());
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (Eigen::Index i = 0; i < n; ++i) {
      g.noalias() = Vt * M.col(i);
      g -= M(i, i) * Vt.col(i);
      const double norm = g.norm();
      if (norm == 0.0) continue;
      const double gain = norm - g.dot(Vt.col(i));
      // Skip updates that rounding would turn into a (tiny) loss.
      if (!(gain > 0.0)) continue;
      Vt.col(i) = g / norm;
      f += 2.0 * gain;
    }
    history.push_back(f);
    run.sweeps = sweep;
    if (sweep >= opts.stall_sweeps &&
        f - history[static_cast<std::size_t>(sweep - opts.stall_sweeps)] <=
            opts.tol_obj * std::max(1.0, std::abs(f))) {
      run.converged = true;
      break;
    }
  }
  if (opts.record_trace) run.trace = std::move(history);
  run.objective = objective_of(M, Vt);
  run.Vt = std::move(Vt);
  return run;
}

Eigen::MatrixXd random_unit_rows(Eigen::Index n, int k, std::uint64_t seed) {
  PhiloxStream rng(seed);
  Eigen::MatrixXd Vt(k, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      for (int r = 0; r < k; ++r) Vt(r, i) = rng.normal();
      norm = Vt.col(i).norm();
    } while (norm == 0.0);
    Vt.col(i) /= norm;
  }
  return Vt;
}

SdpSolution finish(const Eigen::MatrixXd& M, Run best, int total_iterations,
                   const SolverOptions& opts) {
  SdpSolution sol;
  sol.objective = best.objective;
  sol.factor = best.Vt.transpose();
  sol.iterations = total_iterations;
  sol.converged = best.converged;
  sol.trace = std::move(best.trace);
  double diag = 0.0;
  for (Eigen::Index i = 0; i < sol.factor.rows(); ++i) {
    diag = std::max(diag, std::abs(sol.factor.row(i).squaredNorm() - 1.0));
  }
  sol.residuals.diag = diag;
  if (opts.certify) {
    // y_i = (M X)_ii; Diag(y) - M is the dual slack.
    const Eigen::MatrixXd MV = M * sol.factor;
    const Eigen::VectorXd y = MV.cwiseProduct(sol.factor).rowwise().sum();
    Eigen::MatrixXd S = -M;
    S.diagonal() += y;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues()(0);
    sol.dual_bound = y.sum() + static_cast<double>(M.rows()) * std::max(0.0, -lmin);
  }
  return sol;
}

// Handles n <= 1 and M == 0 without iterating.
std::optional<SdpSolution> trivial(const SymmetricMatrix& M, int k) {
  const Eigen::Index n = M.n();
  if (n > 1 && !M.is_zero()) return std::nullopt;
  SdpSolution sol;
  sol.factor = Eigen::MatrixXd::Zero(n, std::max(k, 1));
  if (n > 0) sol.factor.col(0).setOnes();
  sol.objective = M.trace();
  sol.converged = true;
  sol.dual_bound = sol.objective;
  return sol;
}

SdpSolution solve_rank(const SymmetricMatrix& M, int k,
                       const SolverOptions& opts,
                       const Eigen::MatrixXd* warm_start) {
  if (auto t = trivial(M, k)) return *t;
  const Eigen::MatrixXd& A = M.dense();
  Run best;
  int total = 0;
  const int restarts = std::max(1, opts.restarts);
  for (int r = 0; r < restarts; ++r) {
    Run run = mix(A, random_unit_rows(M.n(), k, split_seed(opts.seed, r)), opts);
    total += run.sweeps;
    if (run.objective > best.objective) best = std::move(run);
  }
  if (warm_start != nullptr) {
    Run run = mix(A, *warm_start, opts);
    total += run.sweeps;
    if (run.objective >= best.objective) best = std::move(run);
  }
  return finish(A, std::move(best), total, opts);
}

}  // namespace

void SolverOptions::validate() const {
  if (rank != 0 && rank < 2) throw std::invalid_argument("SolverOptions: rank must be >= 2");
  if (!(tol_obj > 0) || !(tol_feas > 0) || !(admm_tol > 0)) {
    throw std::invalid_argument("SolverOptions: tolerances must be positive");
  }
  if (max_sweeps < 1 || stall_sweeps < 1 || max_iterations < 1) {
    throw std::invalid_argument("SolverOptions: iteration limits must be positive");
  }
  if (restarts < 1) throw std::invalid_argument("SolverOptions: restarts must be >= 1");
}

Eigen::MatrixXd SdpSolution::gram() const {
  return low_rank() ? Eigen::MatrixXd(factor * factor.transpose()) : matrix;
}

int default_rank(Eigen::Index n) {
  const int k = static_cast<int>(std::ceil(std::sqrt(2.0 * static_cast<double>(n)))) + 1;
  return static_cast<int>(std::max<Eigen::Index>(1, std::min<Eigen::Index>(n, k)));
}

SdpSolution sdp_psd1(const SymmetricMatrix& M, const SolverOptions& opts) {
  opts.validate();
  const int k = opts.rank == 0 ? default_rank(M.n()) : opts.rank;
  return solve_rank(M, static_cast<int>(std::min<Eigen::Index>(k, std::max<Eigen::Index>(M.n(), 1))),
                    opts, nullptr);
}

SdpSolution opt_k(const SymmetricMatrix& M, int k, const SolverOptions& opts) {
  opts.validate();
  if (k < 2 || k > M.n()) {
    throw std::invalid_argument("opt_k: k must satisfy 2 <= k <= n");
  }
  return solve_rank(M, k, opts, nullptr);
}

std::vector<SdpSolution> opt_k_ladder(const SymmetricMatrix& M, int k_max,
                                      const SolverOptions& opts) {
  opts.validate();
  if (k_max < 2 || k_max > M.n()) {
    throw std::invalid_argument("opt_k_ladder: k_max must satisfy 2 <= k_max <= n");
  }
  std::vector<SdpSolution> out;
  for (int k = 2; k <= k_max; ++k) {
    if (out.empty()) {
      out.push_back(solve_rank(M, k, opts, nullptr));
      continue;
    }
    const SdpSolution& prev = out.back();
    Eigen::MatrixXd warm = Eigen::MatrixXd::Zero(k, M.n());
    warm.topRows(k - 1) = prev.factor.transpose();
    SdpSolution sol = solve_rank(M, k, opts, &warm);
    if (sol.objective < prev.objective) {
      // Only reachable through rounding in the final recomputation.
      sol.factor = warm.transpose();
      sol.objective = prev.objective;
    }
    out.push_back(std::move(sol));
  }
  return out;
}

double sdp_2x2_closed_form(const SymmetricMatrix& M) {
  if (M.n() != 2) throw DimensionError("sdp_2x2_closed_form: n must be 2");
  return M(0, 0) + M(1, 1) + 2.0 * std::abs(M(0, 1));
}

double norm_inf_to_one(const SymmetricMatrix& M) {
  const Eigen::Index n = M.n();
  if (n > 22) throw std::invalid_argument("norm_inf_to_one: n > 22 is beyond exhaustive mode");
  if (n == 0) return 0.0;
  const Eigen::MatrixXd& A = M.dense();
  // Gray-code walk over x with x_0 = +1 (x and -x give the same value);
  // Mx is updated by one column per step.
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd Mx = A * x;
  double best = Mx.cwiseAbs().sum();
  const std::uint64_t steps = std::uint64_t{1} << (n - 1);
  for (std::uint64_t s = 1; s < steps; ++s) {
    const int bit = std::countr_zero(s) + 1;
    x(bit) = -x(bit);
    Mx += 2.0 * x(bit) * A.col(bit);
    best = std::max(best, Mx.cwiseAbs().sum());
  }
  return best;
}

}  // namespace sbmsdp
