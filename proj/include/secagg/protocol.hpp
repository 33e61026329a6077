#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "secagg/adversary.hpp"
#include "secagg/crypto.hpp"
#include "secagg/field.hpp"
#include "secagg/graph.hpp"
#include "secagg/messages.hpp"
#include "secagg/shamir.hpp"
#include "secagg/zk.hpp"

namespace secagg {

// when a scripted client goes silent, relative to what it already sent
enum class DropPoint : uint8_t {
  none = 0,
  after_r1 = 1,     // shares distributed, no masked update
  after_r2 = 2,     // masked update sent, silent afterwards
  after_proof = 3,  // proof sent, silent during recovery
};

enum class ShareKind : uint8_t { none = 0, seed_share = 1, key_share = 2 };

// Records which kind of share the server requested per client.  Asking
// for both would let the server unmask an individual update, so that is
// a hard programming error, not a recoverable condition.
struct PrivacyLedger {
  std::map<uint32_t, ShareKind> asked;
  void note(uint32_t client, ShareKind kind);
};

struct AggregationParams {
  GraphMode mode = GraphMode::full;
  uint32_t degree = 0;     // 0 = default for the mode
  uint32_t threshold = 0;  // 0 = floor(2k/3) + 1
  uint64_t seed = 1;
  bool zk_checks = false;
  uint32_t q = 1;          // sampled coordinates per client
  double g_max = 0.0;      // aggregate plausibility bound, 0 disables
  int threads = 1;
  std::string run_tag = "s1";
  std::map<uint32_t, DropPoint> dropouts;
  std::map<uint32_t, AttackSpec> attacks;
};

struct RoundTranscript {
  std::vector<uint32_t> particip;
  NeighborGraph graph;  // over local positions, particip[pos] is the id
  uint32_t threshold = 0;
  std::vector<Message> messages;
  FixedVec aggregate;
  std::vector<uint32_t> survivors;  // updates included in the aggregate
  std::vector<uint32_t> excluded;   // dropped or failed the mask proof
  std::map<uint32_t, ProofVerdict> verdicts;
  std::map<uint32_t, std::vector<uint32_t>> samples;
  std::map<uint32_t, ShareKind> ledger;
  bool magnitude_flag = false;  // aggregate exceeded g_max somewhere
  std::map<uint32_t, uint64_t> client_mults;
};

using SessionMap = std::map<uint32_t, std::shared_ptr<ZkSession>>;

// dealer material one client needs for an epoch: seed and coordinate
// bindings plus mask proofs over two aggregation runs of degrees k1 and
// k3, plus one bound proof per sampled coordinate
DealerBudget epoch_budget(uint32_t q, uint32_t k1, uint32_t k3);

// One full masking round over the clients in `updates` (ids are the map
// keys, all >= 1).  Returns the message log, the unmasked aggregate and
// the bookkeeping around it.  `sessions` carries proof sessions across
// runs of the same round; entries are created on demand.
// `sample_override` pins per-client checked coordinates (otherwise they
// are derived from the run seed).
RoundTranscript run_aggregation(
    const AggregationParams &params,
    const std::map<uint32_t, FixedVec> &updates,
    SessionMap *sessions = nullptr,
    const std::map<uint32_t, std::vector<uint32_t>> *sample_override =
        nullptr);

}  // namespace secagg
