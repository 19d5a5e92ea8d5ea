#pragma once

#include "sbmsdp/matrix.hpp"
#include "sbmsdp/model.hpp"
#include "sbmsdp/sdp.hpp"

#include <cstdint>
#include <vector>

namespace sbmsdp {

struct TwoCommunityEstimate {
  Eigen::VectorXd v_hat;  // top eigenvector of the SDP solution, |v|^2 = n
  std::vector<int> signs;
  // 1 - lambda_1(X)/n, a computable lower bound on the optimality gap proxy.
  double xi_proxy = 0.0;
  SdpSolution solution;
};

struct MembershipEstimate {
  Eigen::MatrixXd Z_hat;
  Eigen::MatrixXi Z_rounded;
  SdpSolution solution;
};

// Entrywise sign with sign(0) = +1.
std::vector<int> sign_vector(const Eigen::VectorXd& v);

TwoCommunityEstimate estimate_two(const SymmetricMatrix& W,
                                  const SolverOptions& opts = {});

// n - |<signs, x0>|.
double overlap_error(const std::vector<int>& signs, const std::vector<int>& x0);

struct MembershipOptions {
  SolverOptions solver;
  // Start the solver from the spectral-clustering membership matrix.
  bool spectral_warm_start = true;
};

MembershipEstimate estimate_membership(const SymmetricMatrix& W, int K,
                                       const MembershipOptions& opts = {});

// 1 iff Z_ij > 1/2.
Eigen::MatrixXi round_membership(const Eigen::MatrixXd& Z);

// Entrywise L1 distance between binary matrices.
long long membership_error(const Eigen::MatrixXi& Z_rounded,
                           const Eigen::MatrixXi& Z0);
Eigen::MatrixXi to_binary(const SymmetricMatrix& Z0);

struct SpectralOptions {
  int inits = 10;
  int max_iterations = 100;
};

// Rows of the top-K eigenvectors (by |eigenvalue|) clustered by k-means++ /
// Lloyd, best of `inits` by within-cluster sum of squares. Labels may be
// unbalanced.
CommunityAssignment spectral_clustering(const SymmetricMatrix& W, int K,
                                        std::uint64_t seed,
                                        const SpectralOptions& opts = {});

struct LabelAlignment {
  // permutation[est_label] = truth_label.
  std::vector<int> permutation;
  int mismatches = 0;
};

LabelAlignment align_labels(const CommunityAssignment& est,
                            const CommunityAssignment& truth);

// Minimum-cost perfect matching on a square cost matrix; returns the column
// assigned to each row.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

}  // namespace sbmsdp
