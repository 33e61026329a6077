#include "secagg/shamir.hpp"

#include <unordered_set>

#include "secagg/errors.hpp"

namespace secagg {

namespace {

void check_indices(const std::vector<uint32_t> &indices) {
  std::unordered_set<uint32_t> seen;
  for (uint32_t x : indices) {
    if (x == 0) throw MalformedSharesError("share index zero");
    if (!seen.insert(x).second)
      throw MalformedSharesError("duplicate share index");
  }
}

Fp poly_eval(const std::vector<Fp> &coeffs, Fp x) {
  Fp acc{0};
  for (size_t i = coeffs.size(); i > 0; --i) acc = acc * x + coeffs[i - 1];
  return acc;
}

}  // namespace

std::vector<ShamirShare> shamir_share_poly(
    const std::vector<Fp> &coeffs, const std::vector<uint32_t> &indices) {
  if (coeffs.empty()) throw ParamError("empty polynomial");
  check_indices(indices);
  if (indices.size() < coeffs.size())
    throw ParamError("fewer recipients than threshold");
  std::vector<ShamirShare> out;
  out.reserve(indices.size());
  for (uint32_t x : indices)
    out.push_back(ShamirShare{x, poly_eval(coeffs, Fp{x})});
  return out;
}

std::vector<ShamirShare> shamir_share(Fp secret, uint32_t t,
                                      const std::vector<uint32_t> &indices,
                                      Rng &rng) {
  if (t == 0 || t > indices.size())
    throw ParamError("threshold out of range");
  std::vector<Fp> coeffs(t);
  coeffs[0] = secret;
  for (uint32_t i = 1; i < t; ++i) coeffs[i] = Fp{rng.below(kPrime)};
  return shamir_share_poly(coeffs, indices);
}

Fp shamir_reconstruct(const std::vector<ShamirShare> &shares, uint32_t t) {
  if (t == 0) throw ParamError("threshold zero");
  if (shares.size() < t)
    throw MalformedSharesError("fewer shares than threshold");
  std::vector<uint32_t> idx;
  idx.reserve(shares.size());
  for (const auto &s : shares) idx.push_back(s.index);
  check_indices(idx);

  // Lagrange basis at zero over the first t shares
  Fp acc{0};
  for (uint32_t j = 0; j < t; ++j) {
    Fp xj{shares[j].index};
    Fp num{1}, den{1};
    for (uint32_t m = 0; m < t; ++m) {
      if (m == j) continue;
      Fp xm{shares[m].index};
      num = num * xm;
      den = den * (xm - xj);
    }
    acc = acc + shares[j].value * num * fp_inv(den);
  }
  return acc;
}

}  // namespace secagg
