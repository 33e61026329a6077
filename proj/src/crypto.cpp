#include "secagg/crypto.hpp"

#include "secagg/errors.hpp"

namespace secagg {

namespace {

uint64_t mulmod_dh(uint64_t a, uint64_t b) {
  ++fp_mul_count;  // counted as client work like any other modular multiply
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b %
                               kDhPrime);
}

uint64_t powmod_dh(uint64_t base, uint64_t e) {
  uint64_t acc = 1;
  uint64_t b = base % kDhPrime;
  while (e > 0) {
    if (e & 1) acc = mulmod_dh(acc, b);
    b = mulmod_dh(b, b);
    e >>= 1;
  }
  return acc;
}

}  // namespace

KeyPair keygen(Rng &rng) {
  uint64_t sk;
  do {
    sk = rng.below(kPrime);
  } while (sk == 0);
  return KeyPair{Fp{sk}, powmod_dh(kDhGen, sk)};
}

Seed key_agree(Fp sk, uint64_t pk_other) {
  if (pk_other == 0 || pk_other >= kDhPrime)
    throw InvalidKeyError("public key outside group range");
  if (pk_other == 1) throw InvalidKeyError("identity public key");
  if (sk.v == 0) throw ParamError("zero secret key");
  return Fp{powmod_dh(pk_other, sk.v) % kPrime};
}

}  // namespace secagg
