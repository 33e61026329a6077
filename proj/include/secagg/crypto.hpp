#pragma once

#include <cstdint>

#include "secagg/field.hpp"
#include "secagg/rng.hpp"

namespace secagg {

// Mask expansion PRG over the field: prg_eval(seed, k) = (seed + k + 1)^5.
// Degree 5 keeps in-circuit re-evaluation at three multiplication gates
// (square, square, multiply); 5 is coprime to p - 1 so the map is a
// bijection per shift.
using Seed = Fp;

inline Fp prg_eval(Seed seed, uint64_t k) {
  Fp s = seed + Fp{(k + 1) % kPrime};
  Fp s2 = s * s;
  return s2 * s2 * s;
}

// Pairwise seed agreement in the multiplicative group mod a fixed safe
// prime (62 bits, independent of the arithmetic field).  g = 2 generates
// the quadratic-residue subgroup.
inline constexpr uint64_t kDhPrime = 2305843009213699919ULL;
inline constexpr uint64_t kDhGen = 2;

struct KeyPair {
  Fp sk;        // secret exponent, nonzero field element
  uint64_t pk;  // g^sk mod kDhPrime
};

KeyPair keygen(Rng &rng);

// shared seed: reduce pk_other^sk mod kDhPrime into the field.  Symmetric
// in the two parties.  Rejects out-of-range and identity public keys.
Seed key_agree(Fp sk, uint64_t pk_other);

}  // namespace secagg
