#pragma once

#include <cstdint>
#include <vector>

#include "secagg/field.hpp"
#include "secagg/rng.hpp"

namespace secagg {

// Byzantine behaviors.  The first three tamper with the update values
// and keep the protocol honest; the last three deviate from the masking
// protocol itself.
enum class AttackKind : uint8_t {
  none = 0,
  sign_flip,             // u <- -kappa * u on chosen coordinates
  scale,                 // u <- kappa * u
  non_omniscient,        // u <- mu - kappa * sigma from own statistics
  wrong_masked_compute,  // perturb the masked vector after honest masking
  inconsistent_update,   // present different values to the bound check
  wrong_seed,            // mask with a seed other than the shared one
};

struct AttackSpec {
  AttackKind kind = AttackKind::none;
  double kappa = 1.0;
  double s_m = 1.0;   // fraction of coordinates touched
  uint64_t seed = 0;  // attacker-private randomness
};

bool is_update_attack(AttackKind k);
bool is_deviation(AttackKind k);

// sorted choice of round(s_m * l) coordinates, at least one
std::vector<uint32_t> attacked_coords(const AttackSpec &spec, size_t l);

// value attacks, applied to the real update before encoding
std::vector<double> apply_update_attack(const AttackSpec &spec,
                                        const std::vector<double> &u);

Fp nonzero_field_offset(Rng &rng);

}  // namespace secagg
