#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "secagg/field.hpp"
#include "secagg/rng.hpp"

namespace secagg {

// One authenticated value x in the information-theoretic MAC scheme
//   M[x] = K[x] + delta * x
// where delta is global to the verifier and never leaves it.  The
// simulator keeps both views side by side; the prover half is (value,
// mac), the verifier half is key.
struct AuthValue {
  Fp value;  // prover
  Fp mac;    // prover
  Fp key;    // verifier
};

struct AuthTriple {
  AuthValue a, b, c;  // c = a * b
};

struct ProofVerdict {
  bool passed = true;
  std::string failed_check;  // circuit name plus the index that failed
};

inline bool mac_holds(const AuthValue &av, Fp delta) {
  return av.mac == av.key + delta * av.value;
}

// Per-client proof session.  A trusted dealer (stand-in for a VOLE-style
// preprocessing phase) hands out delta-correlated randomness from a
// seeded stream; budgets bound how much a session may consume.
class ZkSession {
 public:
  ZkSession(uint64_t dealer_seed, uint64_t max_auths, uint64_t max_triples);

  Fp delta() const { return delta_; }  // verifier state; tests may peek
  uint64_t auths_used() const { return auths_used_; }
  uint64_t triples_used() const { return triples_used_; }

  // bind a private value; consumes one dealer authentication
  AuthValue authenticate(Fp x);

  // public constant as an authenticated value; free
  AuthValue constant(Fp c) const;

  // linear layer: macs and keys combine coefficient-wise, no dealer use
  AuthValue add(const AuthValue &a, const AuthValue &b) const;
  AuthValue sub(const AuthValue &a, const AuthValue &b) const;
  AuthValue scale(const AuthValue &a, Fp pub) const;
  AuthValue add_public(const AuthValue &a, Fp c) const;

  // reveal a value; returns nothing when the mac relation fails.
  // Appends the claimed (value, mac) pair to the transcript either way.
  std::optional<Fp> open(const AuthValue &av);
  bool open_expect_zero(const AuthValue &av);

  // prove value(z) = value(x) * value(y) by sacrificing one triple
  bool mult_check(const AuthValue &x, const AuthValue &y, const AuthValue &z);

  // prove 0 <= value(d) <= bound via two-sided bit decomposition
  bool range_proof(const AuthValue &d, uint64_t bound);

  // round store: update coordinates bind once and survive for every
  // later circuit in the round, so a client cannot swap values between
  // the aggregation proof and the bound proof
  const AuthValue &bind_update_coord(uint32_t k, Fp value);
  const AuthValue *update_coord(uint32_t k) const;
  AuthValue *tamper_update_coord(uint32_t k);  // adversarial client hook
  std::vector<uint32_t> bound_coords() const;

  // seed store, namespaced by aggregation run
  const AuthValue &bind_seed(const std::string &tag, Fp value);
  const AuthValue *seed(const std::string &tag) const;

  // transcript of authentications and openings, in field words
  const std::vector<Fp> &transcript() const { return transcript_; }
  size_t transcript_mark() const { return transcript_.size(); }
  std::vector<uint64_t> transcript_since(size_t mark) const;

 private:
  friend struct DealerPeek;
  AuthValue fresh_auth();
  AuthTriple fresh_triple();

  Rng rng_;
  Fp delta_;
  uint64_t max_auths_, max_triples_;
  uint64_t auths_used_ = 0, triples_used_ = 0;
  std::vector<Fp> transcript_;
  std::map<uint32_t, AuthValue> update_coords_;
  std::map<std::string, AuthValue> seeds_;
};

// length-prefixed little-endian serialization of a word sequence
std::vector<uint8_t> serialize_words(const std::vector<uint64_t> &words);
std::vector<uint64_t> deserialize_words(const uint8_t *data, size_t len);

// dealer cost of the aggregation-consistency circuit: three gates per
// in-circuit PRG evaluation, one evaluation per seed, k + 1 seeds per
// sampled index
struct DealerBudget {
  uint64_t auths = 0;
  uint64_t triples = 0;
};
DealerBudget correctness_budget(uint32_t q, uint32_t k);
DealerBudget range_budget(uint64_t bound);

// Re-derives every mask from the seeds bound at run_tag and checks the
// published masked coordinates at the sampled indices.
struct MaskCheckInput {
  uint32_t client_id = 0;
  std::vector<uint32_t> neighbors;  // global ids
  std::string run_tag;
  std::vector<uint32_t> indices;  // sampled coordinates
  const FixedVec *masked = nullptr;  // public v_i, full vector
};
ProofVerdict correctness_circuit(ZkSession &s, const MaskCheckInput &in);

// Checks |u_k - lambda_k| < theta_k at every sampled index against the
// coordinates bound in the round store.  theta must be strictly positive
// in field units.
ProofVerdict robustness_circuit(ZkSession &s,
                                const std::vector<uint32_t> &indices,
                                const FixedVec &lambda,
                                const FixedVec &theta);

}  // namespace secagg
