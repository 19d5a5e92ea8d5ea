#pragma once

#include "sbmsdp/matrix.hpp"
#include "sbmsdp/model.hpp"
#include "sbmsdp/sdp.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace sbmsdp {

// Lower bounds on SDP(M_r - M_s) in units of (M_in - M_out), n = r s m.
enum class CaseId { kSNotDivides, kDivOddRatio, kDivEvenRatio, kDivFar };

std::string to_string(CaseId id);

struct BoundCase {
  int r = 0;
  int s = 0;
  int m = 0;
  int t = 0;  // r mod s
  CaseId case_id = CaseId::kSNotDivides;  // case attaining bound_coeff
  double bound_coeff = 0.0;  // minimum over the applicable cases
  std::vector<std::pair<CaseId, double>> coefficients;  // every applicable case
  double overall_coeff = 0.0;  // 2 m^2
};

// Requires r > s >= 2 and m >= 2; m = 1 is accepted only with `exploratory`
// (no bound guarantee).
BoundCase closed_form_bound(int r, int s, int m, bool exploratory = false);

// Block diagonal with r all-ones blocks of size s m.
SymmetricMatrix witness_block_Z(int r, int s, int m, bool exploratory = false);

// s diagonal blocks of size r m, each made of (r/s)^2 sub-blocks of size s m
// with signs alternating like a checkerboard. Requires s | r.
SymmetricMatrix witness_alternating_Ztilde(int r, int s, int m,
                                           bool exploratory = false);

struct EnumerationResult {
  double min_value = 0.0;  // min SDP(M_r - M_s) / (M_in - M_out)
  CommunityAssignment argmin{{}, 1};
  long long partitions = 0;
};

// Every balanced partition of [n] into s groups of size r m, one per
// relabeling orbit (element 0 in group 0, groups opened in order).
void for_each_balanced_partition(int n, int s,
                                 const std::function<void(const std::vector<int>&)>& visit);

// Brute force over all such partitions against the canonical M_r, with
// unit separation (M_in = 1, M_out = 0). n = r s m <= 16.
EnumerationResult enumerate_min_sdp_diff(int r, int s, int m,
                                         const SolverOptions& opts = {},
                                         bool exploratory = false);

}  // namespace sbmsdp
