#include "secagg/zk.hpp"

#include <cstring>

#include "secagg/errors.hpp"

namespace secagg {

ZkSession::ZkSession(uint64_t dealer_seed, uint64_t max_auths,
                     uint64_t max_triples)
    : rng_(dealer_seed), max_auths_(max_auths), max_triples_(max_triples) {
  delta_ = Fp{rng_.below(kPrime)};
}

AuthValue ZkSession::fresh_auth() {
  if (auths_used_ >= max_auths_)
    throw SetupError("dealer authentication budget exhausted");
  ++auths_used_;
  Fp r{rng_.below(kPrime)};
  Fp key{rng_.below(kPrime)};
  return AuthValue{r, key + delta_ * r, key};
}

AuthTriple ZkSession::fresh_triple() {
  if (triples_used_ >= max_triples_)
    throw SetupError("dealer triple budget exhausted");
  ++triples_used_;
  Fp a{rng_.below(kPrime)}, b{rng_.below(kPrime)};
  Fp c = a * b;
  auto wrap = [&](Fp x) {
    Fp key{rng_.below(kPrime)};
    return AuthValue{x, key + delta_ * x, key};
  };
  return AuthTriple{wrap(a), wrap(b), wrap(c)};
}

AuthValue ZkSession::authenticate(Fp x) {
  AuthValue masked = fresh_auth();
  // prover publishes the correction d = x - r; verifier shifts its key
  Fp d = x - masked.value;
  transcript_.push_back(d);
  return AuthValue{x, masked.mac, masked.key - delta_ * d};
}

AuthValue ZkSession::constant(Fp c) const {
  return AuthValue{c, Fp{0}, fp_neg(delta_ * c)};
}

AuthValue ZkSession::add(const AuthValue &a, const AuthValue &b) const {
  return AuthValue{a.value + b.value, a.mac + b.mac, a.key + b.key};
}

AuthValue ZkSession::sub(const AuthValue &a, const AuthValue &b) const {
  return AuthValue{a.value - b.value, a.mac - b.mac, a.key - b.key};
}

AuthValue ZkSession::scale(const AuthValue &a, Fp pub) const {
  return AuthValue{a.value * pub, a.mac * pub, a.key * pub};
}

AuthValue ZkSession::add_public(const AuthValue &a, Fp c) const {
  return AuthValue{a.value + c, a.mac, a.key - delta_ * c};
}

std::optional<Fp> ZkSession::open(const AuthValue &av) {
  transcript_.push_back(av.value);
  transcript_.push_back(av.mac);
  if (!mac_holds(av, delta_)) return std::nullopt;
  return av.value;
}

bool ZkSession::open_expect_zero(const AuthValue &av) {
  auto got = open(av);
  return got.has_value() && got->v == 0;
}

bool ZkSession::mult_check(const AuthValue &x, const AuthValue &y,
                           const AuthValue &z) {
  AuthTriple t = fresh_triple();
  auto e = open(sub(x, t.a));
  auto f = open(sub(y, t.b));
  if (!e || !f) return false;
  // z - c - e*b - f*a - e*f must authenticate as zero
  AuthValue acc = sub(z, t.c);
  acc = sub(acc, scale(t.b, *e));
  acc = sub(acc, scale(t.a, *f));
  acc = add_public(acc, fp_neg(*e * *f));
  return open_expect_zero(acc);
}

namespace {

int bit_width(uint64_t bound) {
  int b = 0;
  while (bound > 0) {
    ++b;
    bound >>= 1;
  }
  return b < 1 ? 1 : b;
}

}  // namespace

bool ZkSession::range_proof(const AuthValue &d, uint64_t bound) {
  if (bound >= kHalfPrime) throw ParamError("range bound too wide");
  int nbits = bit_width(bound);
  bool ok = true;

  // prove a value sits in [0, 2^nbits) from boolean bit commitments;
  // the prover decomposes whatever it actually holds, so an out-of-range
  // value breaks the recomposition open
  auto decompose = [&](const AuthValue &x) {
    AuthValue recomposed = constant(Fp{0});
    for (int j = 0; j < nbits; ++j) {
      Fp bit{(x.value.v >> j) & 1};
      AuthValue bv = authenticate(bit);
      ok = mult_check(bv, bv, bv) && ok;  // b^2 = b
      recomposed = add(recomposed, scale(bv, Fp{1ULL << j}));
    }
    ok = open_expect_zero(sub(recomposed, x)) && ok;
  };

  decompose(d);
  decompose(sub(constant(Fp{bound}), d));
  return ok;
}

const AuthValue &ZkSession::bind_update_coord(uint32_t k, Fp value) {
  auto it = update_coords_.find(k);
  if (it != update_coords_.end()) return it->second;  // already bound
  return update_coords_.emplace(k, authenticate(value)).first->second;
}

const AuthValue *ZkSession::update_coord(uint32_t k) const {
  auto it = update_coords_.find(k);
  return it == update_coords_.end() ? nullptr : &it->second;
}

AuthValue *ZkSession::tamper_update_coord(uint32_t k) {
  auto it = update_coords_.find(k);
  return it == update_coords_.end() ? nullptr : &it->second;
}

std::vector<uint32_t> ZkSession::bound_coords() const {
  std::vector<uint32_t> out;
  out.reserve(update_coords_.size());
  for (const auto &kv : update_coords_) out.push_back(kv.first);
  return out;
}

const AuthValue &ZkSession::bind_seed(const std::string &tag, Fp value) {
  auto it = seeds_.find(tag);
  if (it != seeds_.end()) return it->second;
  return seeds_.emplace(tag, authenticate(value)).first->second;
}

const AuthValue *ZkSession::seed(const std::string &tag) const {
  auto it = seeds_.find(tag);
  return it == seeds_.end() ? nullptr : &it->second;
}

std::vector<uint64_t> ZkSession::transcript_since(size_t mark) const {
  std::vector<uint64_t> out;
  out.reserve(transcript_.size() - mark);
  for (size_t i = mark; i < transcript_.size(); ++i)
    out.push_back(transcript_[i].v);
  return out;
}

std::vector<uint8_t> serialize_words(const std::vector<uint64_t> &words) {
  std::vector<uint8_t> out(8 + 8 * words.size());
  uint64_t n = words.size();
  std::memcpy(out.data(), &n, 8);
  for (size_t i = 0; i < words.size(); ++i)
    std::memcpy(out.data() + 8 + 8 * i, &words[i], 8);
  return out;
}

std::vector<uint64_t> deserialize_words(const uint8_t *data, size_t len) {
  if (len < 8) throw ParseError("word array shorter than its count field");
  uint64_t n;
  std::memcpy(&n, data, 8);
  if (len < 8 + 8 * n) throw ParseError("word array truncated");
  std::vector<uint64_t> out(n);
  for (uint64_t i = 0; i < n; ++i)
    std::memcpy(&out[i], data + 8 + 8 * i, 8);
  return out;
}

DealerBudget correctness_budget(uint32_t q, uint32_t k) {
  DealerBudget b;
  b.triples = 3ULL * q * (k + 1);
  b.auths = 3ULL * q * (k + 1);
  return b;
}

DealerBudget range_budget(uint64_t bound) {
  DealerBudget b;
  b.auths = 2ULL * bit_width(bound);
  b.triples = b.auths;
  return b;
}

namespace {

// in-circuit PRG step: authenticate the powers of (seed + k + 1) and tie
// them together with three multiplication gates
AuthValue prg_in_circuit(ZkSession &s, const AuthValue &seed, uint64_t k,
                         bool &ok) {
  AuthValue x = s.add_public(seed, Fp{(k + 1) % kPrime});
  AuthValue x2 = s.authenticate(x.value * x.value);
  ok = s.mult_check(x, x, x2) && ok;
  AuthValue x4 = s.authenticate(x2.value * x2.value);
  ok = s.mult_check(x2, x2, x4) && ok;
  AuthValue x5 = s.authenticate(x4.value * x.value);
  ok = s.mult_check(x4, x, x5) && ok;
  return x5;
}

}  // namespace

ProofVerdict correctness_circuit(ZkSession &s, const MaskCheckInput &in) {
  if (in.masked == nullptr) throw ParamError("masked vector missing");
  const AuthValue *own = s.seed(in.run_tag + ":b");
  if (own == nullptr) throw ParamError("own seed not bound for run");
  std::vector<const AuthValue *> pair_seeds;
  pair_seeds.reserve(in.neighbors.size());
  for (uint32_t j : in.neighbors) {
    const AuthValue *a = s.seed(in.run_tag + ":a:" + std::to_string(j));
    if (a == nullptr) throw ParamError("pairwise seed not bound for run");
    pair_seeds.push_back(a);
  }

  for (uint32_t k : in.indices) {
    if (k >= in.masked->coords.size())
      throw ParamError("sampled index out of range");
    const AuthValue *u = s.update_coord(k);
    if (u == nullptr) throw ParamError("update coordinate not bound");

    bool ok = true;
    AuthValue vhat = s.add(*u, prg_in_circuit(s, *own, k, ok));
    for (size_t t = 0; t < in.neighbors.size(); ++t) {
      AuthValue m = prg_in_circuit(s, *pair_seeds[t], k, ok);
      if (in.neighbors[t] > in.client_id)
        vhat = s.add(vhat, m);
      else
        vhat = s.sub(vhat, m);
    }
    ok = s.open_expect_zero(
             s.add_public(vhat, fp_neg(in.masked->coords[k]))) &&
         ok;
    if (!ok)
      return ProofVerdict{false, "correctness@" + std::to_string(k)};
  }
  return ProofVerdict{true, ""};
}

ProofVerdict robustness_circuit(ZkSession &s,
                                const std::vector<uint32_t> &indices,
                                const FixedVec &lambda,
                                const FixedVec &theta) {
  for (uint32_t k : indices) {
    if (k >= lambda.coords.size() || k >= theta.coords.size())
      throw ParamError("sampled index out of range");
    uint64_t th = theta.coords[k].v;
    if (th == 0 || th > kHalfPrime / 2)
      throw ParamError("threshold must be a positive in-range field value");
    const AuthValue *u = s.update_coord(k);
    if (u == nullptr) throw ParamError("update coordinate not bound");

    // |u - lambda| < theta  <=>  u - lambda + theta - 1 in [0, 2 theta - 2]
    Fp shift = Fp{th - 1} - lambda.coords[k];
    AuthValue d = s.add_public(*u, shift);
    if (!s.range_proof(d, 2 * th - 2))
      return ProofVerdict{false, "robustness@" + std::to_string(k)};
  }
  return ProofVerdict{true, ""};
}

}  // namespace secagg
