#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace secagg {

// splitmix64 step, used to derive independent stream seeds from one master
// seed.  Raw mt19937_64 output is pinned by the standard, but the std
// distributions are not, so every bounded draw below is hand-rolled.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t master, uint64_t tag, uint64_t id = 0) {
  return mix64(mix64(master ^ mix64(tag)) + id);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next() { return gen_(); }

  // unbiased draw from [0, n) by rejection
  uint64_t below(uint64_t n) {
    assert(n > 0);
    uint64_t lim = (0 - n) % n;  // 2^64 mod n
    uint64_t r;
    do {
      r = gen_();
    } while (r < lim);
    return r % n;
  }

  // uniform in [0, 1) with 53 random bits
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // standard normal, Box-Muller with a cached spare
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = unit();
    } while (u1 == 0.0);
    u2 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  template <typename T>
  void shuffle(std::vector<T> &v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // q distinct values from [0, n), returned sorted
  std::vector<uint32_t> distinct(uint32_t n, uint32_t q);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline std::vector<uint32_t> Rng::distinct(uint32_t n, uint32_t q) {
  assert(q <= n);
  std::vector<uint32_t> out;
  out.reserve(q);
  if (q * 3ULL >= n) {
    // dense case: shuffle the whole range and truncate
    std::vector<uint32_t> all(n);
    for (uint32_t i = 0; i < n; ++i) all[i] = i;
    shuffle(all);
    out.assign(all.begin(), all.begin() + q);
  } else {
    while (out.size() < q) {
      uint32_t c = static_cast<uint32_t>(below(n));
      bool dup = false;
      for (uint32_t x : out) dup |= (x == c);
      if (!dup) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace secagg
