#include "secagg/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "secagg/errors.hpp"
#include "secagg/robustness.hpp"

namespace secagg {

void PrivacyLedger::note(uint32_t client, ShareKind kind) {
  auto it = asked.find(client);
  if (it != asked.end() && it->second != kind)
    throw std::logic_error(
        "privacy ledger: both share kinds requested for client " +
        std::to_string(client));
  asked[client] = kind;
}

DealerBudget epoch_budget(uint32_t q, uint32_t k1, uint32_t k3) {
  DealerBudget b;
  DealerBudget c1 = correctness_budget(q, k1), c3 = correctness_budget(q, k3);
  uint64_t range = 2ULL * 63 * q;  // worst-case bound width per coordinate
  b.auths = (k1 + 1) + (k3 + 1) + q + c1.auths + c3.auths + range + 64;
  b.triples = c1.triples + c3.triples + range + 64;
  return b;
}

namespace {

struct ClientState {
  uint32_t id = 0;
  std::vector<uint32_t> neighbors;  // global ids, sorted
  KeyPair kp;
  Fp seed_self;  // shared and bound in the proof session
  Fp seed_mask;  // actually expanded into the self mask
  std::map<uint32_t, uint64_t> neighbor_pk;
  std::map<uint32_t, Fp> pair_seed;
  // shares held for a neighbor: neighbor id -> (key share, seed share)
  std::map<uint32_t, std::pair<ShamirShare, ShamirShare>> held;
  const FixedVec *input = nullptr;
  FixedVec masked;
  AttackSpec attack;
  DropPoint drop = DropPoint::none;
  ZkSession *session = nullptr;
  Rng rng{0};
  Rng attack_rng{0};
  uint64_t mults = 0;
};

// run fn(i) for every client, one task per client so the thread-local
// multiplication counter attributes work correctly
template <typename Fn>
void for_each_client(std::vector<ClientState> &cs, int threads, Fn fn) {
  auto task = [&](size_t i) {
    uint64_t before = fp_mul_count;
    fn(cs[i]);
    cs[i].mults += fp_mul_count - before;
  };
  if (threads <= 1 || cs.size() <= 1) {
    for (size_t i = 0; i < cs.size(); ++i) task(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  size_t nt = std::min(static_cast<size_t>(threads), cs.size());
  for (size_t t = 0; t < nt; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= cs.size()) return;
        task(i);
      }
    });
  for (auto &th : pool) th.join();
}

Fp expand_self_mask(const ClientState &c, uint64_t k) {
  return prg_eval(c.seed_mask, k);
}

}  // namespace

RoundTranscript run_aggregation(
    const AggregationParams &params,
    const std::map<uint32_t, FixedVec> &updates, SessionMap *sessions,
    const std::map<uint32_t, std::vector<uint32_t>> *sample_override) {
  if (updates.size() < 2)
    throw ParamError("aggregation needs at least two clients");

  RoundTranscript tr;
  for (const auto &kv : updates) {
    if (kv.first == 0) throw ParamError("client id 0 is reserved");
    tr.particip.push_back(kv.first);
  }
  const size_t n = tr.particip.size();
  const size_t l = updates.begin()->second.coords.size();
  const int scale = updates.begin()->second.scale_bits;
  if (l == 0) throw ParamError("empty update vectors");
  for (const auto &kv : updates)
    if (kv.second.coords.size() != l || kv.second.scale_bits != scale)
      throw ParamError("update shape mismatch across clients");
  if (params.zk_checks && (params.q == 0 || params.q > l))
    throw ParamError("sampled coordinate count out of range");

  tr.graph = build_neighbor_graph(static_cast<uint32_t>(n), params.mode,
                                  params.degree, derive_seed(params.seed, 'G'));
  const uint32_t k = tr.graph.degree;
  const uint32_t t = params.threshold ? params.threshold : (2 * k) / 3 + 1;
  if (t == 0 || t > k) throw ParamError("reconstruction threshold out of range");
  tr.threshold = t;

  // local position <-> global id
  std::map<uint32_t, size_t> pos_of;
  for (size_t i = 0; i < n; ++i) pos_of[tr.particip[i]] = i;

  std::vector<ClientState> cs(n);
  std::map<uint32_t, size_t> marks;  // proof transcript start per client
  for (size_t i = 0; i < n; ++i) {
    ClientState &c = cs[i];
    c.id = tr.particip[i];
    for (uint32_t w : tr.graph.adj[i]) c.neighbors.push_back(tr.particip[w]);
    std::sort(c.neighbors.begin(), c.neighbors.end());
    c.input = &updates.at(c.id);
    c.rng = Rng(derive_seed(params.seed, 0xc11e47, c.id));
    auto att = params.attacks.find(c.id);
    if (att != params.attacks.end()) c.attack = att->second;
    c.attack_rng = Rng(derive_seed(c.attack.seed, 0xbadc0de, c.id));
    auto dit = params.dropouts.find(c.id);
    if (dit != params.dropouts.end()) c.drop = dit->second;
    if (params.zk_checks) {
      if (sessions == nullptr)
        throw ParamError("mask proofs need a session map");
      auto sit = sessions->find(c.id);
      if (sit == sessions->end()) {
        DealerBudget budget = epoch_budget(params.q, k, k);
        sit = sessions
                  ->emplace(c.id, std::make_shared<ZkSession>(
                                      derive_seed(params.seed, 0xdea1e4, c.id),
                                      budget.auths, budget.triples))
                  .first;
      }
      c.session = sit->second.get();
      marks[c.id] = c.session->transcript_mark();
    }
  }

  // round 1: keys out, pairwise seeds, masking seed, share distribution
  for_each_client(cs, params.threads, [&](ClientState &c) {
    c.kp = keygen(c.rng);
  });
  for (ClientState &c : cs)
    tr.messages.push_back(Message{MsgKind::pubkey, c.id, 0, {c.kp.pk}});
  for (ClientState &c : cs)
    for (uint32_t j : c.neighbors) cs[pos_of[j]].neighbor_pk[c.id] = c.kp.pk;

  std::vector<std::vector<Message>> share_out(n);
  for_each_client(cs, params.threads, [&](ClientState &c) {
    for (uint32_t j : c.neighbors)
      c.pair_seed[j] = key_agree(c.kp.sk, c.neighbor_pk[j]);
    c.seed_self = Fp{c.rng.below(kPrime)};
    c.seed_mask = c.attack.kind == AttackKind::wrong_seed
                      ? c.seed_self + nonzero_field_offset(c.attack_rng)
                      : c.seed_self;
    auto key_shares = shamir_share(c.kp.sk, t, c.neighbors, c.rng);
    auto seed_shares = shamir_share(c.seed_self, t, c.neighbors, c.rng);
    size_t pos = pos_of.at(c.id);
    for (size_t s = 0; s < c.neighbors.size(); ++s)
      share_out[pos].push_back(
          Message{MsgKind::shares,
                  c.id,
                  c.neighbors[s],
                  {c.neighbors[s], key_shares[s].value.v,
                   seed_shares[s].value.v}});
    if (c.session != nullptr) {
      c.session->bind_seed(params.run_tag + ":b", c.seed_self);
      for (uint32_t j : c.neighbors)
        c.session->bind_seed(params.run_tag + ":a:" + std::to_string(j),
                             c.pair_seed[j]);
    }
  });
  for (size_t i = 0; i < n; ++i)
    for (auto &m : share_out[i]) {
      ClientState &to = cs[pos_of[m.receiver]];
      to.held[m.sender] = {
          ShamirShare{m.receiver, Fp{m.payload[1]}},
          ShamirShare{m.receiver, Fp{m.payload[2]}}};
      tr.messages.push_back(std::move(m));
    }

  // round 2: mask and publish
  for_each_client(cs, params.threads, [&](ClientState &c) {
    if (c.drop == DropPoint::after_r1) return;
    c.masked.scale_bits = scale;
    c.masked.coords.resize(l);
    for (size_t x = 0; x < l; ++x) {
      Fp v = c.input->coords[x] + expand_self_mask(c, x);
      for (uint32_t j : c.neighbors) {
        Fp m = prg_eval(c.pair_seed[j], x);
        v = j > c.id ? v + m : v - m;
      }
      c.masked.coords[x] = v;
    }
    if (c.attack.kind == AttackKind::wrong_masked_compute)
      for (uint32_t x : attacked_coords(c.attack, l))
        c.masked.coords[x] =
            c.masked.coords[x] + nonzero_field_offset(c.attack_rng);
  });

  std::vector<uint32_t> senders;
  for (ClientState &c : cs)
    if (c.drop != DropPoint::after_r1) {
      senders.push_back(c.id);
      tr.messages.push_back(Message{MsgKind::masked, c.id, 0, {}});
      auto &payload = tr.messages.back().payload;
      payload.reserve(l);
      for (Fp w : c.masked.coords) payload.push_back(w.v);
    }

  // checked coordinates, then the mask consistency proofs
  if (params.zk_checks) {
    for (uint32_t id : senders) {
      std::vector<uint32_t> s_i;
      if (sample_override != nullptr && sample_override->count(id))
        s_i = sample_override->at(id);
      else
        s_i = sample_indices(static_cast<uint32_t>(l), params.q, params.seed,
                             id);
      tr.samples[id] = s_i;
      Message m{MsgKind::sample, 0, id, {}};
      for (uint32_t x : s_i) m.payload.push_back(x);
      tr.messages.push_back(std::move(m));
    }
    for_each_client(cs, params.threads, [&](ClientState &c) {
      if (c.drop == DropPoint::after_r1) return;
      for (uint32_t x : tr.samples[c.id])
        c.session->bind_update_coord(x, c.input->coords[x]);
      MaskCheckInput in;
      in.client_id = c.id;
      in.neighbors = c.neighbors;
      in.run_tag = params.run_tag;
      in.indices = tr.samples[c.id];
      in.masked = &c.masked;
      tr.verdicts[c.id] = correctness_circuit(*c.session, in);
    });
    for (ClientState &c : cs) {
      if (c.drop == DropPoint::after_r1) continue;
      tr.messages.push_back(Message{MsgKind::proof, c.id, 0,
                                    c.session->transcript_since(marks[c.id])});
    }
    for (ClientState &c : cs) {
      if (c.drop == DropPoint::after_r1) continue;
      tr.messages.push_back(
          Message{MsgKind::verdict, 0, c.id,
                  {tr.verdicts[c.id].passed ? 1ULL : 0ULL}});
    }
  }

  for (ClientState &c : cs) {
    bool in = c.drop != DropPoint::after_r1 &&
              (!params.zk_checks || tr.verdicts[c.id].passed);
    (in ? tr.survivors : tr.excluded).push_back(c.id);
  }
  if (tr.survivors.empty()) throw ProtocolError("no surviving clients");

  // round 3: strip self masks of survivors, rebuild pairwise masks of
  // the rest from their key shares
  std::vector<uint32_t> alive;
  for (ClientState &c : cs)
    if (c.drop == DropPoint::none) alive.push_back(c.id);
  auto is_alive = [&](uint32_t id) {
    return std::binary_search(alive.begin(), alive.end(), id);
  };
  auto is_survivor = [&](uint32_t id) {
    return std::find(tr.survivors.begin(), tr.survivors.end(), id) !=
           tr.survivors.end();
  };

  FixedVec agg;
  agg.scale_bits = scale;
  agg.coords.assign(l, Fp{0});
  for (uint32_t id : tr.survivors)
    for (size_t x = 0; x < l; ++x)
      agg.coords[x] = agg.coords[x] + cs[pos_of[id]].masked.coords[x];

  PrivacyLedger ledger;
  auto gather_shares = [&](const ClientState &target, ShareKind kind) {
    ledger.note(target.id, kind);
    std::vector<ShamirShare> got;
    for (uint32_t j : target.neighbors) {
      if (!is_alive(j)) continue;
      tr.messages.push_back(
          Message{MsgKind::share_request, 0, j,
                  {target.id, static_cast<uint64_t>(kind)}});
      const auto &held = cs[pos_of[j]].held.at(target.id);
      const ShamirShare &sh =
          kind == ShareKind::key_share ? held.first : held.second;
      tr.messages.push_back(Message{
          MsgKind::share_response, j, 0,
          {target.id, static_cast<uint64_t>(kind), sh.index, sh.value.v}});
      got.push_back(sh);
    }
    if (got.size() < t)
      throw InsufficientSharesError(
          "cannot recover shares for client " + std::to_string(target.id),
          target.id);
    return got;
  };

  for (uint32_t id : tr.survivors) {
    const ClientState &c = cs[pos_of[id]];
    auto shares = gather_shares(c, ShareKind::seed_share);
    Fp b = shamir_reconstruct(shares, t);
    for (size_t x = 0; x < l; ++x)
      agg.coords[x] = agg.coords[x] - prg_eval(b, x);
  }
  for (uint32_t id : tr.excluded) {
    const ClientState &c = cs[pos_of[id]];
    bool touches_survivor = false;
    for (uint32_t j : c.neighbors) touches_survivor |= is_survivor(j);
    if (!touches_survivor) continue;
    auto shares = gather_shares(c, ShareKind::key_share);
    Fp sk = shamir_reconstruct(shares, t);
    for (uint32_t j : c.neighbors) {
      if (!is_survivor(j)) continue;
      Fp a = key_agree(sk, cs[pos_of[j]].kp.pk);
      // v_j carried +m if this client sorts above j, else -m; remove it
      for (size_t x = 0; x < l; ++x) {
        Fp m = prg_eval(a, x);
        agg.coords[x] =
            id > j ? agg.coords[x] - m : agg.coords[x] + m;
      }
    }
  }

  tr.aggregate = agg;
  tr.ledger = ledger.asked;
  Message fin{MsgKind::aggregate, 0, 0, {}};
  for (Fp w : agg.coords) fin.payload.push_back(w.v);
  tr.messages.push_back(std::move(fin));

  if (params.g_max > 0.0)
    for (Fp w : agg.coords)
      if (std::fabs(fp_decode(w, scale)) > params.g_max) {
        tr.magnitude_flag = true;
        break;
      }

  for (ClientState &c : cs) tr.client_mults[c.id] = c.mults;
  return tr;
}

}  // namespace secagg
