#include "secagg/robustness.hpp"

#include <algorithm>
#include <cmath>

#include "secagg/errors.hpp"
#include "secagg/rng.hpp"

namespace secagg {

ClusterPlan cluster_assign(const std::vector<uint32_t> &clients, uint32_t c,
                           uint64_t seed) {
  if (c == 0 || c > clients.size())
    throw ParamError("cluster count out of range");
  std::vector<uint32_t> order = clients;
  Rng rng(seed);
  rng.shuffle(order);
  ClusterPlan plan;
  plan.members.assign(c, {});
  for (size_t i = 0; i < order.size(); ++i)
    plan.members[i % c].push_back(order[i]);
  for (auto &m : plan.members) std::sort(m.begin(), m.end());
  return plan;
}

std::vector<double> lower_median(
    const std::vector<std::vector<double>> &means) {
  if (means.empty()) throw ParamError("no cluster means");
  size_t l = means[0].size();
  for (const auto &m : means)
    if (m.size() != l) throw ParamError("cluster mean length mismatch");
  std::vector<double> out(l);
  std::vector<double> col(means.size());
  for (size_t k = 0; k < l; ++k) {
    for (size_t j = 0; j < means.size(); ++j) col[j] = means[j][k];
    size_t pos = (means.size() - 1) / 2;  // lower median
    std::nth_element(col.begin(), col.begin() + pos, col.end());
    out[k] = col[pos];
  }
  return out;
}

RobustnessBounds derive_threshold(const std::vector<std::vector<double>> &means,
                                  double eta, int scale_bits) {
  if (means.size() < 2) throw ParamError("need at least two cluster means");
  if (!(eta > 0)) throw ParamError("eta must be positive");
  size_t c = means.size();
  size_t l = means[0].size();

  RobustnessBounds out;
  out.eta = eta;
  out.lambda_real = lower_median(means);
  out.sigma_mu.resize(l);
  out.lambda.scale_bits = scale_bits;
  out.theta.scale_bits = scale_bits;
  out.lambda.coords.resize(l);
  out.theta.coords.resize(l);

  for (size_t k = 0; k < l; ++k) {
    double mean = 0;
    for (size_t j = 0; j < c; ++j) mean += means[j][k];
    mean /= static_cast<double>(c);
    double ss = 0;
    for (size_t j = 0; j < c; ++j) {
      double d = means[j][k] - mean;
      ss += d * d;
    }
    out.sigma_mu[k] = std::sqrt(ss / static_cast<double>(c - 1));

    out.lambda.coords[k] = fp_encode(out.lambda_real[k], scale_bits);
    Fp th = fp_encode(eta * out.sigma_mu[k], scale_bits);
    if (th.v < kThetaFloorUnits) th = Fp{kThetaFloorUnits};
    out.theta.coords[k] = th;
  }
  return out;
}

EtaMonitor tune_eta(double phi_max, uint32_t n, uint32_t pass_count) {
  if (!(phi_max >= 0.0 && phi_max < 1.0))
    throw ParamError("phi_max must be in [0, 1)");
  EtaMonitor m;
  m.bound = (1.0 - phi_max) * static_cast<double>(n);
  m.flagged = static_cast<double>(pass_count) > m.bound;
  return m;
}

double detect_prob(uint32_t l, double s_m, uint32_t q) {
  if (l == 0) throw ParamError("vector length must be positive");
  if (!(s_m > 0.0 && s_m <= 1.0))
    throw ParamError("undetectable: tamper fraction must be in (0, 1]");
  if (q > l) q = l;
  double clean = static_cast<double>(l) * (1.0 - s_m);
  double prod = 1.0;
  for (uint32_t i = 0; i < q; ++i) {
    double num = clean - static_cast<double>(i);
    if (num <= 0.0) return 1.0;
    prod *= num / static_cast<double>(l - i);
  }
  return 1.0 - prod;
}

CheckBudget compute_q(uint32_t l, double s_m, double delta) {
  if (l == 0) throw ParamError("vector length must be positive");
  if (!(s_m > 0.0 && s_m <= 1.0))
    throw ParamError("undetectable: tamper fraction must be in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0))
    throw ParamError("delta must be in (0, 1)");
  CheckBudget b;
  b.l = l;
  b.s_m_assumed = s_m;
  b.delta = delta;
  double clean = static_cast<double>(l) * (1.0 - s_m);
  double prod = 1.0;
  for (uint32_t q = 1; q <= l; ++q) {
    double num = clean - static_cast<double>(q - 1);
    prod = num <= 0.0 ? 0.0 : prod * num / static_cast<double>(l - (q - 1));
    if (prod < delta || q == l) {
      b.q = q;
      b.p_detect = 1.0 - prod;
      return b;
    }
  }
  b.q = l;  // unreachable, loop always returns
  return b;
}

std::vector<uint32_t> sample_indices(uint32_t l, uint32_t q, uint64_t seed,
                                     uint32_t client_id) {
  if (q == 0 || q > l) throw ParamError("sample count out of range");
  Rng rng(derive_seed(seed, 0x51d8, client_id));
  return rng.distinct(l, q);
}

}  // namespace secagg
