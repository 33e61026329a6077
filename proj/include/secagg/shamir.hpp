#pragma once

#include <cstdint>
#include <vector>

#include "secagg/field.hpp"
#include "secagg/rng.hpp"

namespace secagg {

struct ShamirShare {
  uint32_t index = 0;  // evaluation point, nonzero
  Fp value;
};

// t-of-n sharing of a field element: random polynomial of degree t - 1
// with constant term secret, evaluated at the given indices.
std::vector<ShamirShare> shamir_share(Fp secret, uint32_t t,
                                      const std::vector<uint32_t> &indices,
                                      Rng &rng);

// same, but with the polynomial coefficients pinned by the caller
// (coeffs[0] is the secret).  Used by tests that need a known polynomial.
std::vector<ShamirShare> shamir_share_poly(
    const std::vector<Fp> &coeffs, const std::vector<uint32_t> &indices);

// Lagrange interpolation at zero from the first t of the given shares.
// Needs at least t shares with distinct nonzero indices.
Fp shamir_reconstruct(const std::vector<ShamirShare> &shares, uint32_t t);

}  // namespace secagg
