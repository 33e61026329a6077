#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "secagg/field.hpp"

namespace secagg {

// random balanced split of clients into c clusters (sizes differ by at
// most one)
struct ClusterPlan {
  std::vector<std::vector<uint32_t>> members;
};
ClusterPlan cluster_assign(const std::vector<uint32_t> &clients, uint32_t c,
                           uint64_t seed);

// per-coordinate lower median across cluster means
std::vector<double> lower_median(const std::vector<std::vector<double>> &means);

// Bound derivation: lambda is the coordinate-wise median of cluster
// means, theta = eta * sigma_mu with sigma_mu the sample standard
// deviation of the means.  Under honest data the central limit theorem
// gives sigma_mu ~ sigma / sqrt(n_c), so eta = z * sqrt(n_c) prices the
// bound at about z raw-update standard deviations.
struct RobustnessBounds {
  FixedVec lambda;
  FixedVec theta;                 // strictly positive field values
  std::vector<double> lambda_real;
  std::vector<double> sigma_mu;
  double eta = 0.0;
};

// floor for theta in quantization units, keeps degenerate coordinates
// provable: 2^(scale-2) ... i.e. 4 field units = 2^-(f-2) in real terms
inline constexpr uint64_t kThetaFloorUnits = 4;

RobustnessBounds derive_threshold(const std::vector<std::vector<double>> &means,
                                  double eta, int scale_bits);

inline double default_eta(double z, double n_c) {
  return z * std::sqrt(n_c);
}

// post-hoc check of the benign-population bound: with at most a phi_max
// fraction malicious, more than (1 - phi_max) * n passing proofs means
// the bound let some tampering through
struct EtaMonitor {
  bool flagged = false;
  double bound = 0.0;
};
EtaMonitor tune_eta(double phi_max, uint32_t n, uint32_t pass_count);

// minimal number of sampled coordinates q such that tampering an s_m
// fraction of l coordinates is caught with probability above 1 - delta:
//   p(q) = 1 - prod_{i<q} (l (1 - s_m) - i) / (l - i)
struct CheckBudget {
  uint32_t q = 0;
  uint32_t l = 0;
  double s_m_assumed = 0.0;
  double delta = 0.0;
  double p_detect = 0.0;
};
CheckBudget compute_q(uint32_t l, double s_m, double delta);
double detect_prob(uint32_t l, double s_m, uint32_t q);

// the q coordinates checked for one client, pinned by (seed, client)
std::vector<uint32_t> sample_indices(uint32_t l, uint32_t q, uint64_t seed,
                                     uint32_t client_id);

}  // namespace secagg
