#include "sbmsdp/detect.hpp"

#include "sbmsdp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sbmsdp {
namespace {

struct KMeansResult {
  std::vector<int> labels;
  double wcss = std::numeric_limits<double>::infinity();
};

double sq_dist(const Eigen::MatrixXd& pts, Eigen::Index i,
               const Eigen::MatrixXd& centers, Eigen::Index c) {
  return (pts.row(i) - centers.row(c)).squaredNorm();
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& pts, int K,
                              PhiloxStream& rng) {
  const Eigen::Index n = pts.rows();
  Eigen::MatrixXd centers(K, pts.cols());
  centers.row(0) = pts.row(static_cast<Eigen::Index>(rng.below(n)));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = sq_dist(pts, i, centers, 0);
  for (int c = 1; c < K; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        u -= d2(i);
        if (u <= 0.0 && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(n));
    }
    centers.row(c) = pts.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), sq_dist(pts, i, centers, c));
    }
  }
  return centers;
}

KMeansResult lloyd(const Eigen::MatrixXd& pts, Eigen::MatrixXd centers,
                   int max_iterations) {
  const Eigen::Index n = pts.rows();
  const int K = static_cast<int>(centers.rows());
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(pts, i, centers, 0);
      for (int c = 1; c < K; ++c) {
        const double d = sq_dist(pts, i, centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(K, pts.cols());
    std::vector<int> counts(static_cast<std::size_t>(K), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[i]) += pts.row(i);
      ++counts[labels[i]];
    }
    for (int c = 0; c < K; ++c) {
      if (counts[c] > 0) {
        centers.row(c) = sums.row(c) / counts[c];
        continue;
      }
      // Empty cluster: move its center to the point farthest from its own.
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = sq_dist(pts, i, centers, labels[i]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers.row(c) = pts.row(far);
    }
  }
  KMeansResult res;
  res.wcss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) res.wcss += sq_dist(pts, i, centers, labels[i]);
  res.labels = std::move(labels);
  return res;
}

}  // namespace

std::vector<int> sign_vector(const Eigen::VectorXd& v) {
  std::vector<int> s(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) s[i] = v(i) >= 0.0 ? 1 : -1;
  return s;
}

TwoCommunityEstimate estimate_two(const SymmetricMatrix& W,
                                  const SolverOptions& opts) {
  const Eigen::Index n = W.n();
  if (n < 2) throw std::invalid_argument("estimate_two: requires n >= 2");
  TwoCommunityEstimate est;
  est.solution = sdp_balanced(W, opts);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(est.solution.matrix);
  Eigen::VectorXd u = eig.eigenvectors().col(n - 1);
  // Fix the arbitrary eigenvector sign for reproducibility.
  Eigen::Index lead = 0;
  u.cwiseAbs().maxCoeff(&lead);
  if (u(lead) < 0) u = -u;
  est.v_hat = std::sqrt(static_cast<double>(n)) * u.normalized();
  est.signs = sign_vector(est.v_hat);
  est.xi_proxy = 1.0 - eig.eigenvalues()(n - 1) / static_cast<double>(n);
  return est;
}

double overlap_error(const std::vector<int>& signs, const std::vector<int>& x0) {
  if (signs.size() != x0.size()) {
    throw DimensionError("overlap_error: length mismatch");
  }
  long long dot = 0;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (std::abs(signs[i]) != 1 || std::abs(x0[i]) != 1) {
      throw std::invalid_argument("overlap_error: entries must be +1 or -1");
    }
    dot += signs[i] * x0[i];
  }
  return static_cast<double>(signs.size()) - std::abs(static_cast<double>(dot));
}

Eigen::MatrixXi round_membership(const Eigen::MatrixXd& Z) {
  return (Z.array() > 0.5).cast<int>().matrix();
}

Eigen::MatrixXi to_binary(const SymmetricMatrix& Z0) {
  const Eigen::MatrixXd& d = Z0.dense();
  if (!((d.array() == 0.0) || (d.array() == 1.0)).all()) {
    throw std::invalid_argument("to_binary: matrix is not 0/1");
  }
  return d.cast<int>();
}

MembershipEstimate estimate_membership(const SymmetricMatrix& W, int K,
                                       const MembershipOptions& opts) {
  const Eigen::Index n = W.n();
  if (K < 1 || n % K != 0) {
    throw std::invalid_argument("estimate_membership: K must divide n");
  }
  const double lambda = static_cast<double>(n) * static_cast<double>(n) / K;
  MembershipEstimate est;
  Eigen::MatrixXd warm;
  if (opts.spectral_warm_start && K > 1 && n > 2) {
    const CommunityAssignment sc = spectral_clustering(W, K, opts.solver.seed);
    if (sc.balanced()) warm = sc.membership_matrix().dense();
  }
  est.solution = sdp_membership(W, lambda, opts.solver,
                                warm.size() > 0 ? &warm : nullptr);
  est.Z_hat = est.solution.matrix;
  est.Z_rounded = round_membership(est.Z_hat);
  return est;
}

long long membership_error(const Eigen::MatrixXi& Z_rounded,
                           const Eigen::MatrixXi& Z0) {
  if (Z_rounded.rows() != Z0.rows() || Z_rounded.cols() != Z0.cols()) {
    throw DimensionError("membership_error: shape mismatch");
  }
  return (Z_rounded - Z0).cwiseAbs().cast<long long>().sum();
}

CommunityAssignment spectral_clustering(const SymmetricMatrix& W, int K,
                                        std::uint64_t seed,
                                        const SpectralOptions& opts) {
  const Eigen::Index n = W.n();
  if (K < 1 || K > n) {
    throw std::invalid_argument("spectral_clustering: K must lie in [1, n]");
  }
  if (K == 1) return CommunityAssignment(std::vector<int>(n, 0), 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(W.dense());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(lam(a)) > std::abs(lam(b));
  });
  Eigen::MatrixXd pts(n, K);
  for (int c = 0; c < K; ++c) pts.col(c) = eig.eigenvectors().col(order[c]);

  KMeansResult best;
  for (int init = 0; init < opts.inits; ++init) {
    PhiloxStream rng(split_seed(seed, static_cast<std::uint64_t>(init)));
    KMeansResult run = lloyd(pts, kmeanspp_seed(pts, K, rng), opts.max_iterations);
    if (run.wcss < best.wcss) best = std::move(run);
  }
  return CommunityAssignment(std::move(best.labels), K);
}

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  // Shortest augmenting path with potentials; 1-based internally.
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw DimensionError("hungarian: cost must be square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

LabelAlignment align_labels(const CommunityAssignment& est,
                            const CommunityAssignment& truth) {
  if (est.K() != truth.K()) throw std::invalid_argument("align_labels: K mismatch");
  if (est.n() != truth.n()) throw DimensionError("align_labels: length mismatch");
  const int K = est.K();
  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(K, K);
  for (int i = 0; i < est.n(); ++i) confusion(est[i], truth[i]) += 1.0;
  LabelAlignment out;
  out.permutation = hungarian(-confusion);
  int matched = 0;
  for (int a = 0; a < K; ++a) {
    matched += static_cast<int>(confusion(a, out.permutation[a]));
  }
  out.mismatches = est.n() - matched;
  return out;
}

}  // namespace sbmsdp
