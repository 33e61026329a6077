#include "secagg/adversary.hpp"

#include <cmath>

#include "secagg/errors.hpp"

namespace secagg {

bool is_update_attack(AttackKind k) {
  return k == AttackKind::sign_flip || k == AttackKind::scale ||
         k == AttackKind::non_omniscient;
}

bool is_deviation(AttackKind k) {
  return k == AttackKind::wrong_masked_compute ||
         k == AttackKind::inconsistent_update || k == AttackKind::wrong_seed;
}

std::vector<uint32_t> attacked_coords(const AttackSpec &spec, size_t l) {
  if (l == 0) throw ParamError("empty update");
  if (!(spec.s_m > 0.0 && spec.s_m <= 1.0))
    throw ParamError("tamper fraction must be in (0, 1]");
  uint64_t count = static_cast<uint64_t>(
      std::llround(spec.s_m * static_cast<double>(l)));
  if (count < 1) count = 1;
  if (count > l) count = l;
  Rng rng(derive_seed(spec.seed, 0xa77acc, 0));
  return rng.distinct(static_cast<uint32_t>(l), static_cast<uint32_t>(count));
}

std::vector<double> apply_update_attack(const AttackSpec &spec,
                                        const std::vector<double> &u) {
  if (!is_update_attack(spec.kind)) return u;
  std::vector<double> out = u;
  auto coords = attacked_coords(spec, u.size());
  switch (spec.kind) {
    case AttackKind::sign_flip:
      for (uint32_t k : coords) out[k] = -spec.kappa * u[k];
      break;
    case AttackKind::scale:
      for (uint32_t k : coords) out[k] = spec.kappa * u[k];
      break;
    case AttackKind::non_omniscient: {
      if (u.size() < 2) throw ParamError("need at least two coordinates");
      double mu = 0;
      for (double x : u) mu += x;
      mu /= static_cast<double>(u.size());
      double ss = 0;
      for (double x : u) ss += (x - mu) * (x - mu);
      double sigma = std::sqrt(ss / static_cast<double>(u.size() - 1));
      double crafted = mu - spec.kappa * sigma;
      for (uint32_t k : coords) out[k] = crafted;
      break;
    }
    default:
      break;
  }
  return out;
}

Fp nonzero_field_offset(Rng &rng) {
  uint64_t v;
  do {
    v = rng.below(kPrime);
  } while (v == 0);
  return Fp{v};
}

}  // namespace secagg
