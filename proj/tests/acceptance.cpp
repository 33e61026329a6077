// Acceptance gate: eight end-to-end properties, one verdict line each.
// Exits nonzero when any criterion fails; tolerances are pinned below.
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "secagg/errors.hpp"
#include "secagg/harness.hpp"
#include "secagg/protocol.hpp"
#include "secagg/robustness.hpp"
#include "secagg/zk.hpp"

using namespace secagg;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// criterion 6 audit: share-kind requests across every transcript produced here
struct LedgerAudit {
  uint64_t seed_requests = 0;
  uint64_t key_requests = 0;
  uint64_t mixed = 0;
  void add(const RoundTranscript &tr) {
    for (const auto &[id, kind] : tr.ledger) {
      (void)id;
      if (kind == ShareKind::seed_share) ++seed_requests;
      if (kind == ShareKind::key_share) ++key_requests;
    }
  }
  void add(const LedgerTotals &t) {
    seed_requests += t.seed_requests;
    key_requests += t.key_requests;
    mixed += t.mixed;
  }
} g_audit;

std::map<uint32_t, FixedVec> random_updates(Rng &rng, uint32_t n, size_t l) {
  std::map<uint32_t, FixedVec> out;
  for (uint32_t id = 1; id <= n; ++id) {
    std::vector<double> u(l);
    for (double &x : u) x = (rng.unit() - 0.5) * 10.0;
    out[id] = encode_vec(u);
  }
  return out;
}

FixedVec field_sum(const std::map<uint32_t, FixedVec> &updates,
                   const std::vector<uint32_t> &ids) {
  FixedVec acc;
  acc.scale_bits = updates.begin()->second.scale_bits;
  acc.coords.assign(updates.begin()->second.coords.size(), Fp{0});
  for (uint32_t id : ids) vec_add_inplace(acc, updates.at(id));
  return acc;
}

// ---------------------------------------------------------------- criterion 1
Verdict criterion_q_table() {
  auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<double, uint32_t>> table = {
      {0.1, 51}, {0.3, 15}, {0.5, 8}, {0.7, 5}, {1.0, 1}};
  for (auto [s_m, want] : table) {
    CheckBudget b = compute_q(60000, s_m, 0.005);
    if (b.q != want)
      return {false, "compute_q(60000, " + std::to_string(s_m) +
                         ", 0.005) = " + std::to_string(b.q) + ", want " +
                         std::to_string(want)};
  }
  double dt = seconds_since(t0);
  if (dt >= 1.0) return {false, "took " + std::to_string(dt) + " s (limit 1)"};
  char buf[96];
  std::snprintf(buf, sizeof buf,
                "check counts (51,15,8,5,1) reproduced in %.3f s", dt);
  return {true, buf};
}

// ---------------------------------------------------------------- criterion 2
Verdict criterion_aggregation_exact() {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(0xacce57);
  const DropPoint points[3] = {DropPoint::after_r1, DropPoint::after_r2,
                               DropPoint::after_proof};
  for (int trial = 0; trial < 200; ++trial) {
    uint32_t n = 2 + static_cast<uint32_t>(rng.below(63));  // [2, 64]
    AggregationParams p;
    p.seed = rng.next();
    p.mode = (n >= 8 && rng.below(2) == 0) ? GraphMode::neighbor
                                           : GraphMode::full;

    // scripted silence stays inside what recovery tolerates: every
    // dropped client must keep >= threshold live neighbors
    uint32_t lg = 0;
    while ((1u << lg) < n) ++lg;
    uint32_t ring = std::max(2u, 2 * lg);
    uint32_t degree =
        (p.mode == GraphMode::full || ring >= n - 1) ? n - 1 : ring;
    uint32_t threshold = (2 * degree) / 3 + 1;
    uint32_t head = degree > threshold ? degree - threshold : 0;
    uint32_t max_drops = std::min<uint32_t>({head, 2, n / 4});
    uint32_t drops = max_drops > 0
                         ? static_cast<uint32_t>(rng.below(max_drops + 1))
                         : 0;
    std::set<uint32_t> dropped;
    while (dropped.size() < drops)
      dropped.insert(1 + static_cast<uint32_t>(rng.below(n)));
    for (uint32_t id : dropped)
      p.dropouts[id] = points[rng.below(3)];

    auto updates = random_updates(rng, n, 8 + rng.below(25));
    RoundTranscript tr = run_aggregation(p, updates);
    g_audit.add(tr);

    std::vector<uint32_t> expect;
    for (uint32_t id = 1; id <= n; ++id)
      if (!(p.dropouts.count(id) &&
            p.dropouts.at(id) == DropPoint::after_r1))
        expect.push_back(id);
    if (tr.survivors != expect)
      return {false, "trial " + std::to_string(trial) +
                         ": survivor set mismatch (n=" + std::to_string(n) +
                         ")"};
    if (tr.aggregate.coords != field_sum(updates, expect).coords)
      return {false, "trial " + std::to_string(trial) +
                         ": aggregate != plaintext field sum (n=" +
                         std::to_string(n) + ", drops=" +
                         std::to_string(drops) + ")"};
  }
  double dt = seconds_since(t0);
  if (dt >= 60.0)
    return {false, "took " + std::to_string(dt) + " s (limit 60)"};
  char buf[96];
  std::snprintf(buf, sizeof buf,
                "200 randomized configurations exact in %.1f s", dt);
  return {true, buf};
}

// ---------------------------------------------------------------- criterion 3
Verdict criterion_zk() {
  auto t0 = std::chrono::steady_clock::now();

  // completeness: every honest proof of both circuits accepts
  uint32_t honest_pass = 0, honest_total = 0;
  {
    Rng rng(0x30a1);
    for (int run = 0; run < 250; ++run) {
      AggregationParams p;
      p.seed = rng.next();
      p.zk_checks = true;
      p.q = 4;
      auto updates = random_updates(rng, 4, 32);
      SessionMap sessions;
      RoundTranscript tr = run_aggregation(p, updates, &sessions);
      g_audit.add(tr);
      for (const auto &[id, v] : tr.verdicts) {
        (void)id;
        ++honest_total;
        honest_pass += v.passed ? 1 : 0;
      }
    }
    for (int run = 0; run < 1000; ++run) {
      ZkSession s(rng.next(), 4096, 4096);
      std::vector<uint32_t> idx = {1, 4, 7, 9};
      FixedVec lambda, theta;
      lambda.coords.assign(16, Fp{0});
      theta.coords.assign(16, Fp{0});
      for (uint32_t k : idx) {
        uint64_t u = 500 + rng.below(1000);
        uint64_t off = rng.below(200);  // |u - lambda| < theta holds
        s.bind_update_coord(k, Fp{u});
        lambda.coords[k] = Fp{u - off};
        theta.coords[k] = Fp{off + 1 + rng.below(64)};
      }
      ++honest_total;
      honest_pass += robustness_circuit(s, idx, lambda, theta).passed ? 1 : 0;
    }
  }
  if (honest_pass != honest_total)
    return {false, std::to_string(honest_total - honest_pass) + " of " +
                       std::to_string(honest_total) +
                       " honest proofs rejected"};

  // soundness, sampled tampering: S_m = 0.5 of l = 1000 coordinates,
  // q = 8 checks; detection matches 1 - prod (500-i)/(1000-i) ~ 0.9961
  constexpr double kDetectFloor = 0.9929;  // 0.995 - 3 sigma at 10^4 trials
  uint32_t detected = 0;
  const int kTrials = 10000;
  {
    Rng rng(0x30a2);
    for (int trial = 0; trial < kTrials; ++trial) {
      AggregationParams p;
      p.seed = rng.next();
      p.zk_checks = true;
      p.q = 8;
      AttackSpec atk;
      atk.kind = AttackKind::wrong_masked_compute;
      atk.s_m = 0.5;
      atk.seed = rng.next();
      p.attacks[2] = atk;
      auto updates = random_updates(rng, 3, 1000);
      SessionMap sessions;
      RoundTranscript tr = run_aggregation(p, updates, &sessions);
      g_audit.add(tr);
      if (!tr.verdicts.at(2).passed) ++detected;
      if (!tr.verdicts.at(1).passed || !tr.verdicts.at(3).passed)
        return {false, "honest bystander rejected in tamper trial " +
                           std::to_string(trial)};
    }
  }
  double rate = double(detected) / kTrials;
  if (rate < kDetectFloor)
    return {false, "tamper detection rate " + std::to_string(rate) +
                       " below " + std::to_string(kDetectFloor)};

  // forgery: random macs never satisfy M = K + delta * x
  uint64_t forgeries_ok = 0;
  {
    Rng rng(0x30a3);
    for (int i = 0; i < 100000; ++i) {
      Fp delta{rng.next() % kPrime};
      AuthValue av;
      av.value = Fp{rng.next() % kPrime};
      av.key = Fp{rng.next() % kPrime};
      av.mac = Fp{rng.next() % kPrime};  // forged
      if (mac_holds(av, delta)) ++forgeries_ok;
    }
  }
  if (forgeries_ok != 0)
    return {false, std::to_string(forgeries_ok) +
                       " random forgeries accepted of 100000"};

  double dt = seconds_since(t0);
  if (dt >= 300.0)
    return {false, "took " + std::to_string(dt) + " s (limit 300)"};
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "honest %u/%u, tamper detection %.4f (floor %.4f), 0/100000 "
                "forgeries, %.1f s",
                honest_pass, honest_total, rate, kDetectFloor, dt);
  return {true, buf};
}

// ---------------------------------------------------------------- criterion 4
Verdict criterion_clt() {
  auto t0 = std::chrono::steady_clock::now();
  const int kReps = 200, kClusters = 20, kNc = 10;
  Rng rng(0xc17);
  double acc = 0.0;
  for (int rep = 0; rep < kReps; ++rep) {
    std::vector<std::vector<double>> means;
    for (int c = 0; c < kClusters; ++c) {
      double sum = 0.0;
      for (int i = 0; i < kNc; ++i) sum += rng.normal();
      means.push_back({sum / kNc});
    }
    RobustnessBounds b = derive_threshold(means, 1.0, 16);
    acc += b.sigma_mu[0];
  }
  double avg = acc / kReps;
  double want = 1.0 / std::sqrt(double(kNc));
  double rel = std::fabs(avg - want) / want;
  double dt = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "mean sigma_mu %.4f vs 1/sqrt(10) %.4f (rel %.3f, tol 0.05), "
                "%.2f s",
                avg, want, rel, dt);
  if (rel >= 0.05) return {false, buf};
  if (dt >= 30.0)
    return {false, "took " + std::to_string(dt) + " s (limit 30)"};
  return {true, buf};
}

// ---------------------------------------------------------------- criterion 5
ExperimentConfig linear_task() {
  ExperimentConfig cfg;
  cfg.epochs = 30;
  cfg.seed = 11;
  cfg.dim = 20;
  cfg.per_client = 40;
  cfg.separation = 4.0;
  cfg.test_count = 1000;
  cfg.model_kind = ModelKind::logreg;
  cfg.lr = 0.2;
  cfg.n = 50;
  cfg.clusters = 7;
  cfg.z = 1.2;
  cfg.s_m_assumed = 0.3;
  cfg.delta = 0.005;
  cfg.g_max = 10.0;
  return cfg;
}

ExperimentConfig mlp_task() {
  ExperimentConfig cfg = linear_task();
  cfg.separation = 2.0;
  cfg.model_kind = ModelKind::mlp;
  cfg.hidden = 8;
  cfg.lr = 2.5;
  cfg.batch = 5;
  return cfg;
}

ExperimentConfig with_attack(ExperimentConfig cfg, AttackKind kind,
                             double kappa, bool defended) {
  cfg.attack.kind = kind;
  cfg.attack.kappa = kappa;
  cfg.attack.s_m = 1.0;
  cfg.attack.seed = 7;
  cfg.byz_fraction = 0.25;
  cfg.defense = defended;
  return cfg;
}

TrainingResult run_and_audit(const ExperimentConfig &cfg) {
  TrainingResult r = run_training(cfg);
  g_audit.add(r.ledger);
  return r;
}

Verdict criterion_defense() {
  auto t0 = std::chrono::steady_clock::now();
  constexpr double kBenignFloor = 0.99;  // linear task, honest run
  constexpr uint32_t kWarmup = 5;        // flag coverage counts rounds after 5
  constexpr double kCoverage = 0.95;

  // sign-flip suite: collapse >= 20 points, recovery within 2
  TrainingResult benign = run_and_audit(linear_task());
  if (benign.final_accuracy < kBenignFloor)
    return {false, "benign accuracy " + std::to_string(benign.final_accuracy) +
                       " below 0.99"};
  TrainingResult sf_open = run_and_audit(
      with_attack(linear_task(), AttackKind::sign_flip, 5.0, false));
  if (sf_open.final_accuracy > benign.final_accuracy - 0.20)
    return {false, "undefended sign-flip only reached " +
                       std::to_string(sf_open.final_accuracy)};
  TrainingResult sf_def = run_and_audit(
      with_attack(linear_task(), AttackKind::sign_flip, 5.0, true));
  if (sf_def.final_accuracy < benign.final_accuracy - 0.02)
    return {false, "defended sign-flip accuracy " +
                       std::to_string(sf_def.final_accuracy) +
                       " not within 2 points of benign"};

  // every Byzantine client is flagged in >= 95% of post-warmup rounds
  uint32_t scored = 0;
  double worst = 1.0;
  {
    std::set<uint32_t> byz(sf_def.byzantine.begin(), sf_def.byzantine.end());
    std::map<uint32_t, uint32_t> hits;
    for (const RoundMetrics &r : sf_def.rounds) {
      if (r.epoch <= kWarmup) continue;
      ++scored;
      for (uint32_t id : r.flagged_ids)
        if (byz.count(id)) ++hits[id];
    }
    if (byz.size() != 12)
      return {false, "expected 12 byzantine clients, got " +
                         std::to_string(byz.size())};
    for (uint32_t id : byz)
      worst = std::min(worst, double(hits[id]) / scored);
    if (worst < kCoverage)
      return {false, "a byzantine client was flagged in only " +
                         std::to_string(worst * 100) + "% of rounds after " +
                         std::to_string(kWarmup)};
  }

  // scaling and statistics-aware suites on the overlapping-class task:
  // collapse >= 10 points, recovery within 3
  TrainingResult mlp_benign = run_and_audit(mlp_task());
  struct Suite {
    AttackKind kind;
    double kappa;
    const char *name;
  } suites[2] = {{AttackKind::scale, 10.0, "scale"},
                 {AttackKind::non_omniscient, 1.5, "non-omniscient"}};
  double drops[2] = {0, 0}, gaps[2] = {0, 0};
  for (int i = 0; i < 2; ++i) {
    TrainingResult open = run_and_audit(
        with_attack(mlp_task(), suites[i].kind, suites[i].kappa, false));
    TrainingResult def = run_and_audit(
        with_attack(mlp_task(), suites[i].kind, suites[i].kappa, true));
    drops[i] = mlp_benign.final_accuracy - open.final_accuracy;
    gaps[i] = mlp_benign.final_accuracy - def.final_accuracy;
    if (drops[i] < 0.10)
      return {false, std::string("undefended ") + suites[i].name +
                         " dropped only " + std::to_string(drops[i] * 100) +
                         " points"};
    if (gaps[i] > 0.03)
      return {false, std::string("defended ") + suites[i].name + " ended " +
                         std::to_string(gaps[i] * 100) +
                         " points below benign (limit 3)"};
  }

  double dt = seconds_since(t0);
  if (dt >= 300.0)
    return {false, "took " + std::to_string(dt) + " s (limit 300)"};
  char buf[224];
  std::snprintf(
      buf, sizeof buf,
      "benign %.3f; sign-flip %.3f/%.3f cover %.2f; scale drop %.1f/gap %.1f; "
      "stats drop %.1f/gap %.1f pts; %.0f s",
      benign.final_accuracy, sf_open.final_accuracy, sf_def.final_accuracy,
      worst, drops[0] * 100, gaps[0] * 100, drops[1] * 100, gaps[1] * 100, dt);
  return {true, buf};
}

// ---------------------------------------------------------------- criterion 7
Verdict criterion_wrong_seed() {
  auto t0 = std::chrono::steady_clock::now();
  const int kTrials = 1000;
  uint32_t rejected = 0, flagged = 0;
  Rng rng(0x7005eed);
  for (int trial = 0; trial < kTrials; ++trial) {
    auto updates = random_updates(rng, 5, 100);
    AttackSpec atk;
    atk.kind = AttackKind::wrong_seed;
    atk.s_m = 1.0;
    atk.seed = rng.next();

    AggregationParams checked;
    checked.seed = rng.next();
    checked.zk_checks = true;
    checked.q = 4;
    checked.attacks[3] = atk;
    SessionMap sessions;
    RoundTranscript tr = run_aggregation(checked, updates, &sessions);
    g_audit.add(tr);
    bool caught = !tr.verdicts.at(3).passed &&
                  tr.verdicts.at(3).failed_check.find("correctness") !=
                      std::string::npos;
    if (caught) {
      ++rejected;
      // the exclusion keeps the surviving sum exact
      std::vector<uint32_t> expect = {1, 2, 4, 5};
      if (tr.survivors != expect ||
          tr.aggregate.coords != field_sum(updates, expect).coords)
        return {false, "trial " + std::to_string(trial) +
                           ": survivor aggregate not exact after exclusion"};
    }

    AggregationParams open = checked;
    open.zk_checks = false;
    open.g_max = 10.0;
    RoundTranscript tr2 = run_aggregation(open, updates);
    g_audit.add(tr2);
    if (tr2.magnitude_flag) ++flagged;
  }
  if (rejected != kTrials)
    return {false, std::to_string(kTrials - rejected) + " of " +
                       std::to_string(kTrials) +
                       " wrong-seed runs escaped the correctness circuit"};
  double flag_rate = double(flagged) / kTrials;
  if (flag_rate < 0.999)
    return {false, "magnitude flag rate " + std::to_string(flag_rate) +
                       " below 0.999 with checks disabled"};
  double dt = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "1000/1000 rejected with checks, flag rate %.4f without, "
                "%.1f s",
                flag_rate, dt);
  return {true, buf};
}

// ---------------------------------------------------------------- criterion 8
Verdict criterion_scaling() {
  auto t0 = std::chrono::steady_clock::now();
  const size_t l = 64;
  double lo = 1e300, hi = 0.0;
  std::string per_n;
  Rng rng(0x5ca1e);
  for (uint32_t n : {32u, 64u, 128u, 256u}) {
    AggregationParams p;
    p.seed = rng.next();
    p.mode = GraphMode::neighbor;
    p.zk_checks = true;
    p.q = 4;
    auto updates = random_updates(rng, n, l);
    SessionMap sessions;
    RoundTranscript tr = run_aggregation(p, updates, &sessions);
    g_audit.add(tr);
    if (tr.survivors.size() != n)
      return {false, "n=" + std::to_string(n) + ": unexpected dropout"};
    double total = 0.0;
    for (const auto &[id, m] : tr.client_mults) {
      (void)id;
      total += double(m);
    }
    double per_client = total / n;
    double ratio = per_client / (double(l) * std::log2(double(n)));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    per_n += (per_n.empty() ? "" : ", ") + std::to_string(n) + ":" +
             std::to_string(per_client / 1000.0).substr(0, 5) + "k";
  }
  double spread = hi / lo;
  double dt = seconds_since(t0);
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "mults/client (%s), cost ratio spread %.2fx (limit 1.5), "
                "%.1f s",
                per_n.c_str(), spread, dt);
  if (spread > 1.5) return {false, buf};
  return {true, buf};
}

}  // namespace

int main() {
  struct Entry {
    const char *name;
    Verdict (*fn)();
  };
  // criterion 6 consumes the audit the others feed, so it runs last
  Entry entries[] = {
      {"1 check-count table", criterion_q_table},
      {"2 exact aggregation", criterion_aggregation_exact},
      {"3 proof completeness and soundness", criterion_zk},
      {"4 threshold concentration", criterion_clt},
      {"5 defense efficacy", criterion_defense},
      {"7 wrong-seed detection", criterion_wrong_seed},
      {"8 client cost scaling", criterion_scaling},
  };

  std::map<int, std::pair<std::string, Verdict>> results;
  for (const Entry &e : entries) {
    Verdict v;
    try {
      v = e.fn();
    } catch (const std::exception &ex) {
      v = {false, std::string("exception: ") + ex.what()};
    }
    results[e.name[0] - '0'] = {e.name + 2, v};
  }

  // privacy ledger audit over everything the criteria above executed
  {
    Verdict v;
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "%" PRIu64 " seed-share and %" PRIu64
                  " key-share requests, %" PRIu64 " mixed",
                  g_audit.seed_requests, g_audit.key_requests, g_audit.mixed);
    v.pass = g_audit.mixed == 0 && g_audit.seed_requests > 0 &&
             g_audit.key_requests > 0;
    v.detail = buf;
    results[6] = {"privacy ledger audit", v};
  }

  bool all = true;
  for (const auto &[num, entry] : results) {
    const auto &[name, v] = entry;
    std::printf("CRITERION %d (%s): %s — %s\n", num, name.c_str(),
                v.pass ? "PASS" : "FAIL", v.detail.c_str());
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
