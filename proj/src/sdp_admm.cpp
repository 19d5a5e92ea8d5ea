#include "sbmsdp/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace sbmsdp {
namespace {

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  Eigen::Index first = 0;
  while (first < lam.size() && lam(first) <= 0.0) ++first;
  const Eigen::Index pos = lam.size() - first;
  if (pos == 0) return Eigen::MatrixXd::Zero(A.rows(), A.cols());
  const auto Q = eig.eigenvectors().rightCols(pos);
  return Q * lam.tail(pos).asDiagonal() * Q.transpose();
}

double min_eigenvalue(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

void project_unit_diagonal(Eigen::MatrixXd& Z) {
  Z = 0.5 * (Z + Z.transpose()).eval();
  Z.diagonal().setOnes();
}

// Removes the all-ones direction: A -> P A P with P = I - 11^T/n.
Eigen::MatrixXd center(const Eigen::MatrixXd& A) {
  Eigen::MatrixXd B = A.rowwise() - A.colwise().mean();
  B = B.colwise() - B.rowwise().mean();
  return B;
}

// Euclidean projection of a onto {y >= 0, sum y = total}.
void project_simplex(std::vector<double>& a, double total) {
  std::vector<double> s(a);
  std::sort(s.begin(), s.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    cumsum += s[j];
    const double t = (cumsum - total) / static_cast<double>(j + 1);
    if (s[j] - t > 0.0) tau = t;
  }
  for (double& v : a) v = std::max(v - tau, 0.0);
}

// Unit diagonal, nonnegative off-diagonal entries summing to lambda - n.
void project_membership(Eigen::MatrixXd& Z, double lambda) {
  const Eigen::Index n = Z.rows();
  std::vector<double> a;
  a.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) a.push_back(0.5 * (Z(i, j) + Z(j, i)));
  }
  project_simplex(a, 0.5 * (lambda - static_cast<double>(n)));
  std::size_t p = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Z(j, j) = 1.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      Z(i, j) = a[p];
      Z(j, i) = a[p];
      ++p;
    }
  }
}

// Strictly feasible interior points used to start and to repair.
Eigen::MatrixXd balanced_center(Eigen::Index n) {
  const double nd = static_cast<double>(n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Constant(n, n, -1.0 / (nd - 1.0));
  B.diagonal().setOnes();
  return B;
}

Eigen::MatrixXd membership_center(Eigen::Index n, double lambda) {
  const double nd = static_cast<double>(n);
  const double c = (lambda - nd) / (nd * nd - nd);
  Eigen::MatrixXd B = Eigen::MatrixXd::Constant(n, n, c);
  B.diagonal().setOnes();
  return B;
}

struct AdmmResult {
  Eigen::MatrixXd Y;
  int iterations = 0;
  bool converged = false;
};

using Projector = std::function<void(Eigen::MatrixXd&)>;

// Splitting for max <C, X> over cone ∩ affine: X-step projects onto the
// cone, Y-step onto the affine/box set, U is the scaled dual.
AdmmResult admm(const Eigen::MatrixXd& C, Eigen::MatrixXd Y,
                const Projector& cone, const Projector& affine,
                const SolverOptions& opts,
                const Eigen::MatrixXd* warm = nullptr) {
  const Eigen::Index n = C.rows();
  const double cnorm = C.norm();
  AdmmResult res;
  if (cnorm == 0.0) {
    res.Y = std::move(Y);
    res.converged = true;
    return res;
  }
  // Scale the cost to the size of a feasible point.
  const Eigen::MatrixXd Cs = C * (static_cast<double>(n) / cnorm);
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd X;
  double rho = 4.0;
  if (warm != nullptr) {
    // Dual guess from the primal point: y_i = (C X)_ii.
    Y = *warm;
    U.diagonal() = (Cs * Y).diagonal() / rho;
  }
  const double nd = static_cast<double>(n);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    X = Y - U + Cs / rho;
    cone(X);
    Eigen::MatrixXd Y_prev = Y;
    Y = X + U;
    affine(Y);
    U += X - Y;
    res.iterations = it;

    const double r = (X - Y).norm();
    const double s = rho * (Y - Y_prev).norm();
    const double eps_pri = nd * opts.tol_feas + opts.admm_tol * std::max(X.norm(), Y.norm());
    const double eps_dual = nd * opts.tol_feas + opts.admm_tol * rho * U.norm();
    if (r <= eps_pri && s <= eps_dual) {
      res.converged = true;
      break;
    }
    // Infrequent residual balancing; frequent updates make the iteration
    // cycle on degenerate instances.
    if (it % 200 == 0 && r > 0 && s > 0) {
      const double rel_p = r / std::max(X.norm(), Y.norm());
      const double rel_d = s / (rho * U.norm());
      const double factor = std::clamp(std::sqrt(rel_p / rel_d), 0.2, 5.0);
      if (factor > 2.0 || factor < 0.5) {
        rho *= factor;
        U /= factor;
      }
    }
  }
  res.Y = std::move(Y);
  return res;
}

SdpSolution package(const SymmetricMatrix& M, Eigen::MatrixXd X,
                    const AdmmResult& run, ConstraintSet set, double target) {
  SdpSolution sol;
  sol.objective = M.inner(X);
  sol.residuals = check_feasibility(X, set, target);
  sol.matrix = std::move(X);
  sol.iterations = run.iterations;
  sol.converged = run.converged;
  return sol;
}

}  // namespace

Residuals check_feasibility(const Eigen::MatrixXd& X, ConstraintSet set,
                            double target_sum) {
  Residuals r;
  const Eigen::Index n = X.rows();
  long double total = 0.0L;
  double min_entry = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    r.diag = std::max(r.diag, std::abs(X(j, j) - 1.0));
    for (Eigen::Index i = 0; i < n; ++i) {
      total += static_cast<long double>(X(i, j));
      if (i != j) min_entry = std::min(min_entry, X(i, j));
    }
  }
  r.psd = std::max(0.0, -min_eigenvalue(0.5 * (X + X.transpose())));
  if (set != ConstraintSet::kPsd1) {
    r.sum = static_cast<double>(std::abs(total - static_cast<long double>(target_sum)));
  }
  if (set == ConstraintSet::kMembership) r.negativity = -min_entry;
  return r;
}

SdpSolution sdp_balanced(const SymmetricMatrix& M, const SolverOptions& opts) {
  opts.validate();
  const Eigen::Index n = M.n();
  if (n < 2) throw std::invalid_argument("sdp_balanced: requires n >= 2");
  // A PSD matrix with 1^T X 1 = 0 has X 1 = 0, so D is the unit-diagonal
  // slice of the PSD cone on the complement of 1. Working in that cone keeps
  // a strictly feasible point (the full PSD cone has none), and the cost can
  // be centered the same way.
  const Projector cone = [](Eigen::MatrixXd& A) { A = project_psd(center(A)); };
  const Eigen::MatrixXd cost = center(M.dense());
  // Warm start: low-rank solution of the penalized problem over PSD1, which
  // lands close to D.
  Eigen::MatrixXd warm = balanced_center(n);
  if (cost.norm() > 0.0) {
    const double t = cost.norm() / static_cast<double>(n);
    Eigen::MatrixXd pen = cost.array() - t;
    pen = 0.5 * (pen + pen.transpose()).eval();
    SolverOptions low = opts;
    low.certify = false;
    low.record_trace = false;
    warm = sdp_psd1(SymmetricMatrix(std::move(pen)), low).gram();
  }
  AdmmResult run = admm(cost, balanced_center(n), cone, project_unit_diagonal,
                        opts, &warm);

  // Repair: cone part of Y rescaled to unit diagonal. PSD and diagonal hold
  // to rounding; the sum constraint holds up to the solver accuracy.
  Eigen::MatrixXd X = run.Y;
  cone(X);
  const Eigen::VectorXd d = X.diagonal();
  if ((d.array() <= 1e-12).any()) {
    X = balanced_center(n);
  } else {
    const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
    X = s.asDiagonal() * X * s.asDiagonal();
    X = 0.5 * (X + X.transpose()).eval();
    X.diagonal().setOnes();
  }
  SdpSolution sol = package(M, std::move(X), run, ConstraintSet::kBalanced, 0.0);
  if (sol.residuals.sum > opts.tol_feas * static_cast<double>(n * n)) {
    sol.converged = false;
  }
  return sol;
}

SdpSolution sdp_membership(const SymmetricMatrix& W, double lambda,
                           const SolverOptions& opts,
                           const Eigen::MatrixXd* warm_start) {
  opts.validate();
  const Eigen::Index n = W.n();
  const double nd = static_cast<double>(n);
  if (n < 1) throw std::invalid_argument("sdp_membership: empty matrix");
  if (!std::isfinite(lambda) || lambda < nd || lambda > nd * nd) {
    throw std::invalid_argument(
        "sdp_membership: lambda must lie in [n, n^2] for the set to be feasible");
  }
  const Eigen::MatrixXd B = membership_center(n, lambda);
  if (n == 1 || lambda == nd || lambda == nd * nd) {
    // Single feasible point (I or the all-ones matrix).
    AdmmResult run;
    run.converged = true;
    return package(W, B, run, ConstraintSet::kMembership, lambda);
  }
  // With the diagonal and the total fixed, shifting all off-diagonal costs
  // by a constant changes the objective by a constant.
  Eigen::MatrixXd cost = W.dense();
  cost.diagonal().setZero();
  cost.array() -= cost.sum() / (nd * nd - nd);
  cost.diagonal().setZero();
  AdmmResult run = admm(
      cost, B, [](Eigen::MatrixXd& A) { A = project_psd(A); },
      [lambda](Eigen::MatrixXd& Z) { project_membership(Z, lambda); }, opts,
      warm_start);

  // Repair: mix with the interior point B (min eigenvalue 1 - c) just enough
  // to cancel the negative eigenvalue; linear and sign constraints survive.
  Eigen::MatrixXd X = std::move(run.Y);
  const double e = std::max(0.0, -min_eigenvalue(X));
  if (e > 0.0) {
    const double c = (lambda - nd) / (nd * nd - nd);
    const double theta = e / (e + 1.0 - c);
    X = (1.0 - theta) * X + theta * B;
    X.diagonal().setOnes();
  }
  return package(W, std::move(X), run, ConstraintSet::kMembership, lambda);
}

}  // namespace sbmsdp
