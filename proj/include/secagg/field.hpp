#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "secagg/errors.hpp"

namespace secagg {

// All protocol arithmetic happens in the prime field mod p = 2^61 - 1.
// Mersenne shape keeps reduction to a shift and an add, and products of
// two 61-bit values fit a 128-bit word.
inline constexpr uint64_t kPrime = (1ULL << 61) - 1;
inline constexpr uint64_t kHalfPrime = (kPrime - 1) / 2;
inline constexpr int kDefaultScaleBits = 16;

// client-side cost instrumentation: every field multiplication bumps this.
// thread_local so parallel per-client work keeps separate tallies.
inline thread_local uint64_t fp_mul_count = 0;

struct Fp {
  uint64_t v = 0;

  constexpr Fp() = default;
  constexpr explicit Fp(uint64_t x) : v(x % kPrime) {}

  friend constexpr bool operator==(Fp a, Fp b) { return a.v == b.v; }
  friend constexpr bool operator!=(Fp a, Fp b) { return a.v != b.v; }
  friend constexpr bool operator<(Fp a, Fp b) { return a.v < b.v; }
};

inline Fp fp_add(Fp a, Fp b) {
  uint64_t s = a.v + b.v;
  if (s >= kPrime) s -= kPrime;
  return Fp{s};
}

inline Fp fp_sub(Fp a, Fp b) {
  return Fp{a.v >= b.v ? a.v - b.v : a.v + kPrime - b.v};
}

inline Fp fp_neg(Fp a) { return Fp{a.v == 0 ? 0 : kPrime - a.v}; }

inline Fp fp_mul(Fp a, Fp b) {
  ++fp_mul_count;
  unsigned __int128 t = static_cast<unsigned __int128>(a.v) * b.v;
  uint64_t lo = static_cast<uint64_t>(t) & kPrime;
  uint64_t hi = static_cast<uint64_t>(t >> 61);
  uint64_t s = lo + hi;
  if (s >= kPrime) s -= kPrime;
  if (s >= kPrime) s -= kPrime;
  return Fp{s};
}

inline Fp operator+(Fp a, Fp b) { return fp_add(a, b); }
inline Fp operator-(Fp a, Fp b) { return fp_sub(a, b); }
inline Fp operator*(Fp a, Fp b) { return fp_mul(a, b); }
inline Fp operator-(Fp a) { return fp_neg(a); }

inline Fp fp_pow(Fp base, uint64_t e) {
  Fp acc{1};
  Fp b = base;
  while (e > 0) {
    if (e & 1) acc = acc * b;
    b = b * b;
    e >>= 1;
  }
  return acc;
}

inline Fp fp_inv(Fp a) {
  if (a.v == 0) throw ParamError("field inverse of zero");
  return fp_pow(a, kPrime - 2);
}

// signed lift: residues up to (p-1)/2 map to themselves, the upper half
// maps to negatives.  The boundary (p-1)/2 stays on the non-negative side.
inline int64_t lift_signed(Fp e) {
  if (e.v <= kHalfPrime) return static_cast<int64_t>(e.v);
  return -static_cast<int64_t>(kPrime - e.v);
}

// fixed point: x is carried as round(x * 2^f) mod p, half rounds away
// from zero.  Encodable range is |x * 2^f| < p/2.
inline Fp fp_encode(double x, int f = kDefaultScaleBits) {
  double scaled = std::ldexp(x, f);
  if (!(std::fabs(scaled) < static_cast<double>(kHalfPrime)))
    throw EncodingError("value out of fixed-point range");
  long long r = std::llround(scaled);
  if (r >= 0) return Fp{static_cast<uint64_t>(r)};
  return Fp{kPrime - static_cast<uint64_t>(-r)};
}

inline double fp_decode(Fp e, int f = kDefaultScaleBits) {
  return std::ldexp(static_cast<double>(lift_signed(e)), -f);
}

// fixed-point vector with the scale it was encoded at
struct FixedVec {
  std::vector<Fp> coords;
  int scale_bits = kDefaultScaleBits;

  size_t size() const { return coords.size(); }
};

inline FixedVec encode_vec(const std::vector<double> &xs,
                           int f = kDefaultScaleBits) {
  FixedVec out;
  out.scale_bits = f;
  out.coords.reserve(xs.size());
  for (double x : xs) out.coords.push_back(fp_encode(x, f));
  return out;
}

inline std::vector<double> decode_vec(const FixedVec &v) {
  std::vector<double> out;
  out.reserve(v.coords.size());
  for (Fp e : v.coords) out.push_back(fp_decode(e, v.scale_bits));
  return out;
}

inline void vec_add_inplace(FixedVec &a, const FixedVec &b) {
  if (a.coords.size() != b.coords.size() || a.scale_bits != b.scale_bits)
    throw ParamError("vector shape mismatch in field add");
  for (size_t i = 0; i < a.coords.size(); ++i)
    a.coords[i] = a.coords[i] + b.coords[i];
}

inline void vec_sub_inplace(FixedVec &a, const FixedVec &b) {
  if (a.coords.size() != b.coords.size() || a.scale_bits != b.scale_bits)
    throw ParamError("vector shape mismatch in field sub");
  for (size_t i = 0; i < a.coords.size(); ++i)
    a.coords[i] = a.coords[i] - b.coords[i];
}

}  // namespace secagg
