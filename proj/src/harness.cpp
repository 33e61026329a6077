#include "secagg/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "secagg/errors.hpp"

namespace secagg {

namespace {

const char *attack_kind_name(AttackKind k) {
  switch (k) {
    case AttackKind::none: return "none";
    case AttackKind::sign_flip: return "sign_flip";
    case AttackKind::scale: return "scale";
    case AttackKind::non_omniscient: return "non_omniscient";
    case AttackKind::wrong_masked_compute: return "wrong_masked_compute";
    case AttackKind::inconsistent_update: return "inconsistent_update";
    case AttackKind::wrong_seed: return "wrong_seed";
  }
  return "none";
}

AttackKind attack_kind_from(const std::string &s) {
  for (AttackKind k :
       {AttackKind::none, AttackKind::sign_flip, AttackKind::scale,
        AttackKind::non_omniscient, AttackKind::wrong_masked_compute,
        AttackKind::inconsistent_update, AttackKind::wrong_seed})
    if (s == attack_kind_name(k)) return k;
  throw ParamError("unknown attack kind '" + s + "'");
}

const char *drop_point_name(DropPoint p) {
  switch (p) {
    case DropPoint::none: return "none";
    case DropPoint::after_r1: return "after_r1";
    case DropPoint::after_r2: return "after_r2";
    case DropPoint::after_proof: return "after_proof";
  }
  return "none";
}

DropPoint drop_point_from(const std::string &s) {
  for (DropPoint p : {DropPoint::after_r1, DropPoint::after_r2,
                      DropPoint::after_proof})
    if (s == drop_point_name(p)) return p;
  throw ParamError("unknown dropout point '" + s + "'");
}

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch())
      .count();
}

struct PhaseTimer {
  bool enabled;
  double start = 0.0;
  explicit PhaseTimer(bool on) : enabled(on) {
    if (enabled) start = now_ms();
  }
  double stop() const { return enabled ? now_ms() - start : 0.0; }
};

const std::set<std::string> &known_keys() {
  static const std::set<std::string> keys = {
      "experiment.epochs", "experiment.seed", "experiment.threads",
      "experiment.timing",
      "data.source", "data.classes", "data.dim", "data.per_client",
      "data.separation", "data.heterogeneity", "data.test_count",
      "data.csv_path", "data.csv_header",
      "model.kind", "model.hidden", "model.lr", "model.batch",
      "clients.n", "clients.clusters", "clients.graph", "clients.degree",
      "clients.threshold",
      "defense.enabled", "defense.z", "defense.eta", "defense.phi_max",
      "defense.delta", "defense.s_m_assumed", "defense.g_max",
      "attack.kind", "attack.kappa", "attack.s_m", "attack.fraction",
      "attack.seed",
  };
  return keys;
}

}  // namespace

ExperimentConfig experiment_from_config(const ConfigMap &raw) {
  for (const auto &kv : raw) {
    if (kv.first.rfind("dropouts.", 0) == 0) continue;
    if (!known_keys().count(kv.first))
      throw ParamError("unknown config key '" + kv.first + "'");
  }

  ExperimentConfig c;
  c.epochs = static_cast<uint32_t>(cfg_u64_or(raw, "experiment.epochs", c.epochs));
  c.seed = cfg_u64_or(raw, "experiment.seed", c.seed);
  c.threads = static_cast<int>(cfg_u64_or(raw, "experiment.threads", 1));
  c.timing = cfg_bool_or(raw, "experiment.timing", false);

  c.source = cfg_str_or(raw, "data.source", c.source);
  c.classes = static_cast<uint32_t>(cfg_u64_or(raw, "data.classes", c.classes));
  c.dim = static_cast<uint32_t>(cfg_u64_or(raw, "data.dim", c.dim));
  c.per_client = cfg_u64_or(raw, "data.per_client", c.per_client);
  c.separation = cfg_f64_or(raw, "data.separation", c.separation);
  c.heterogeneity = cfg_f64_or(raw, "data.heterogeneity", c.heterogeneity);
  c.test_count = cfg_u64_or(raw, "data.test_count", c.test_count);
  c.csv_path = cfg_str_or(raw, "data.csv_path", "");
  c.csv_header = cfg_bool_or(raw, "data.csv_header", false);

  std::string mk = cfg_str_or(raw, "model.kind", "logreg");
  if (mk == "logreg") c.model_kind = ModelKind::logreg;
  else if (mk == "mlp") c.model_kind = ModelKind::mlp;
  else throw ParamError("model.kind must be logreg or mlp, got '" + mk + "'");
  c.hidden = static_cast<uint32_t>(cfg_u64_or(raw, "model.hidden", c.hidden));
  c.lr = cfg_f64_or(raw, "model.lr", c.lr);
  c.batch = static_cast<uint32_t>(cfg_u64_or(raw, "model.batch", 0));

  c.n = static_cast<uint32_t>(cfg_u64_or(raw, "clients.n", c.n));
  c.clusters = static_cast<uint32_t>(cfg_u64_or(raw, "clients.clusters", c.clusters));
  std::string gm = cfg_str_or(raw, "clients.graph", "full");
  if (gm == "full") c.mode = GraphMode::full;
  else if (gm == "neighbor") c.mode = GraphMode::neighbor;
  else throw ParamError("clients.graph must be full or neighbor, got '" + gm + "'");
  c.degree = static_cast<uint32_t>(cfg_u64_or(raw, "clients.degree", 0));
  c.threshold = static_cast<uint32_t>(cfg_u64_or(raw, "clients.threshold", 0));

  c.defense = cfg_bool_or(raw, "defense.enabled", true);
  c.z = cfg_f64_or(raw, "defense.z", c.z);
  c.eta_override = cfg_f64_or(raw, "defense.eta", 0.0);
  c.phi_max = cfg_f64_or(raw, "defense.phi_max", c.phi_max);
  c.delta = cfg_f64_or(raw, "defense.delta", c.delta);
  c.s_m_assumed = cfg_f64_or(raw, "defense.s_m_assumed", c.s_m_assumed);
  c.g_max = cfg_f64_or(raw, "defense.g_max", c.g_max);

  c.attack.kind = attack_kind_from(cfg_str_or(raw, "attack.kind", "none"));
  c.attack.kappa = cfg_f64_or(raw, "attack.kappa", 1.0);
  c.attack.s_m = cfg_f64_or(raw, "attack.s_m", 1.0);
  c.attack.seed = cfg_u64_or(raw, "attack.seed", 0);
  c.byz_fraction = cfg_f64_or(raw, "attack.fraction", c.byz_fraction);

  for (const auto &kv : raw) {
    if (kv.first.rfind("dropouts.", 0) != 0) continue;
    std::istringstream ss(kv.second);
    std::string e_s, id_s, pt_s;
    if (!std::getline(ss, e_s, ',') || !std::getline(ss, id_s, ',') ||
        !std::getline(ss, pt_s))
      throw ParamError("config key '" + kv.first +
                       "' must be epoch,client,point");
    try {
      uint32_t e = static_cast<uint32_t>(std::stoul(e_s));
      uint32_t id = static_cast<uint32_t>(std::stoul(id_s));
      c.dropouts[e][id] = drop_point_from(pt_s);
    } catch (const std::invalid_argument &) {
      throw ParamError("config key '" + kv.first + "' has a bad number");
    }
  }

  // cross-field validation, named by the offending key
  if (c.epochs == 0) throw ParamError("experiment.epochs must be positive");
  if (c.threads < 1) throw ParamError("experiment.threads must be positive");
  if (c.n < 4) throw ParamError("clients.n must be at least 4");
  if (c.clusters < 2) throw ParamError("clients.clusters must be at least 2");
  if (c.clusters > c.n / 2)
    throw ParamError("clients.clusters too large: clusters must be at most n/2 "
                     "so every cluster can mask");
  if (c.source != "synthetic" && c.source != "csv")
    throw ParamError("data.source must be synthetic or csv");
  if (c.source == "csv" && c.csv_path.empty())
    throw ParamError("data.csv_path required when data.source = csv");
  if (!(c.lr > 0.0)) throw ParamError("model.lr must be positive");
  if (c.model_kind == ModelKind::mlp && c.hidden == 0)
    throw ParamError("model.hidden must be positive for mlp");
  if (c.defense) {
    if (!(c.delta > 0.0 && c.delta < 1.0))
      throw ParamError("defense.delta must be in (0, 1)");
    if (!(c.s_m_assumed > 0.0 && c.s_m_assumed <= 1.0))
      throw ParamError("defense.s_m_assumed must be in (0, 1]");
    if (!(c.phi_max >= 0.0 && c.phi_max < 1.0))
      throw ParamError("defense.phi_max must be in [0, 1)");
    if (c.eta_override == 0.0 && !(c.z > 0.0))
      throw ParamError("defense.z must be positive");
    if (c.eta_override < 0.0)
      throw ParamError("defense.eta must be non-negative");
  }
  if (!(c.byz_fraction >= 0.0 && c.byz_fraction <= 0.5))
    throw ParamError("attack.fraction must be in [0, 0.5]");
  if (c.attack.kind != AttackKind::none) {
    if (is_update_attack(c.attack.kind) || is_deviation(c.attack.kind)) {
      if (!(c.attack.s_m > 0.0 && c.attack.s_m <= 1.0))
        throw ParamError("attack.s_m must be in (0, 1]");
    }
  }
  if (c.g_max < 0.0) throw ParamError("defense.g_max must be non-negative");
  return c;
}

ConfigMap experiment_echo(const ExperimentConfig &c) {
  ConfigMap m;
  m["experiment.epochs"] = std::to_string(c.epochs);
  m["experiment.seed"] = std::to_string(c.seed);
  m["experiment.threads"] = std::to_string(c.threads);
  m["experiment.timing"] = c.timing ? "true" : "false";
  m["data.source"] = c.source;
  m["data.classes"] = std::to_string(c.classes);
  m["data.dim"] = std::to_string(c.dim);
  m["data.per_client"] = std::to_string(c.per_client);
  m["data.separation"] = fmt_double(c.separation);
  m["data.heterogeneity"] = fmt_double(c.heterogeneity);
  m["data.test_count"] = std::to_string(c.test_count);
  if (!c.csv_path.empty()) m["data.csv_path"] = c.csv_path;
  m["data.csv_header"] = c.csv_header ? "true" : "false";
  m["model.kind"] = c.model_kind == ModelKind::logreg ? "logreg" : "mlp";
  m["model.hidden"] = std::to_string(c.hidden);
  m["model.lr"] = fmt_double(c.lr);
  m["model.batch"] = std::to_string(c.batch);
  m["clients.n"] = std::to_string(c.n);
  m["clients.clusters"] = std::to_string(c.clusters);
  m["clients.graph"] = c.mode == GraphMode::full ? "full" : "neighbor";
  m["clients.degree"] = std::to_string(c.degree);
  m["clients.threshold"] = std::to_string(c.threshold);
  m["defense.enabled"] = c.defense ? "true" : "false";
  m["defense.z"] = fmt_double(c.z);
  m["defense.eta"] = fmt_double(c.eta_override);
  m["defense.phi_max"] = fmt_double(c.phi_max);
  m["defense.delta"] = fmt_double(c.delta);
  m["defense.s_m_assumed"] = fmt_double(c.s_m_assumed);
  m["defense.g_max"] = fmt_double(c.g_max);
  m["attack.kind"] = attack_kind_name(c.attack.kind);
  m["attack.kappa"] = fmt_double(c.attack.kappa);
  m["attack.s_m"] = fmt_double(c.attack.s_m);
  m["attack.fraction"] = fmt_double(c.byz_fraction);
  m["attack.seed"] = std::to_string(c.attack.seed);
  uint32_t i = 0;
  for (const auto &ep : c.dropouts)
    for (const auto &d : ep.second)
      m["dropouts.d" + std::to_string(i++)] =
          std::to_string(ep.first) + "," + std::to_string(d.first) + "," +
          drop_point_name(d.second);
  return m;
}

TrainingResult run_training(const ExperimentConfig &cfg, TranscriptSink *sink) {
  // data first: a csv source decides the real feature/class shape
  std::vector<Dataset> shards;
  Dataset test;
  uint32_t dim = cfg.dim, classes = cfg.classes;
  if (cfg.source == "synthetic") {
    shards = gen_synthetic_shards(classes, dim, cfg.n, cfg.per_client,
                                  cfg.separation, cfg.heterogeneity,
                                  derive_seed(cfg.seed, 0xda7a, 0));
    test = gen_blobs(classes, dim, cfg.test_count, cfg.separation,
                     derive_seed(cfg.seed, 0x7e57, 0));
  } else {
    Dataset all = load_csv_dataset(cfg.csv_path, cfg.csv_header);
    dim = all.dim;
    classes = all.classes;
    size_t test_n = std::min(cfg.test_count, all.size() / 5);
    if (test_n == 0) test_n = 1;
    if (all.size() - test_n < cfg.n)
      throw ParamError("dataset too small for clients.n after the test split");
    std::vector<uint32_t> order(all.size());
    for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng split_rng(derive_seed(cfg.seed, 0x5e71, 0));
    split_rng.shuffle(order);
    Dataset train;
    train.dim = test.dim = dim;
    train.classes = test.classes = classes;
    for (size_t i = 0; i < order.size(); ++i) {
      Dataset &dst = i < test_n ? test : train;
      dst.x.push_back(all.x[order[i]]);
      dst.y.push_back(all.y[order[i]]);
    }
    shards = shard_dataset(train, cfg.n, cfg.heterogeneity,
                           derive_seed(cfg.seed, 0x5a4d, 1));
  }

  ModelSpec spec;
  spec.kind = cfg.model_kind;
  spec.in_dim = dim;
  spec.classes = classes;
  spec.hidden = cfg.model_kind == ModelKind::mlp ? cfg.hidden : 0;
  const uint32_t l = static_cast<uint32_t>(param_count(spec));
  const uint32_t q =
      cfg.defense ? compute_q(l, cfg.s_m_assumed, cfg.delta).q : 1;
  Model model = init_model(spec, derive_seed(cfg.seed, 0x30de1, 0));

  std::vector<uint32_t> ids(cfg.n);
  for (uint32_t i = 0; i < cfg.n; ++i) ids[i] = i + 1;

  // seed-deterministic choice of which clients misbehave
  std::set<uint32_t> byz;
  TrainingResult res;
  if (cfg.attack.kind != AttackKind::none) {
    auto order = ids;
    Rng pick(derive_seed(cfg.seed, 0xb42a, 0));
    pick.shuffle(order);
    size_t count = static_cast<size_t>(cfg.byz_fraction *
                                       static_cast<double>(cfg.n));
    byz.insert(order.begin(), order.begin() + count);
  }
  res.byzantine.assign(byz.begin(), byz.end());

  const double n_c = static_cast<double>(cfg.n) / cfg.clusters;
  const double eta =
      cfg.eta_override > 0.0 ? cfg.eta_override : default_eta(cfg.z, n_c);
  res.l = l;
  res.q = q;
  res.eta = eta;

  std::vector<Rng> batch_rng;
  for (uint32_t id : ids)
    batch_rng.emplace_back(derive_seed(cfg.seed, 0xba7c, id));

  DealerBudget budget = epoch_budget(q, cfg.n, cfg.n);

  for (uint32_t e = 0; e < cfg.epochs; ++e) {
    uint64_t es = derive_seed(cfg.seed, 0xe90c, e);
    RoundMetrics rm;
    rm.epoch = e;
    std::map<uint32_t, DropPoint> edrops;
    if (auto it = cfg.dropouts.find(e); it != cfg.dropouts.end())
      edrops = it->second;

    // local updates
    PhaseTimer t_local(cfg.timing);
    std::map<uint32_t, FixedVec> enc;
    for (uint32_t id : ids) {
      const Dataset &shard = shards[id - 1];
      std::vector<uint32_t> batch;
      if (cfg.batch == 0 || cfg.batch >= shard.size()) {
        batch.resize(shard.size());
        for (uint32_t i = 0; i < batch.size(); ++i) batch[i] = i;
      } else {
        batch = batch_rng[id - 1].distinct(shard.size(), cfg.batch);
      }
      std::vector<double> u = local_step(model, shard, batch, cfg.lr);
      if (byz.count(id) && is_update_attack(cfg.attack.kind))
        u = apply_update_attack(cfg.attack, u);
      enc[id] = encode_vec(u);
    }
    rm.phase_ms_local = t_local.stop();

    // the coordinates checked for a client stay fixed across the epoch
    std::map<uint32_t, std::vector<uint32_t>> samples;
    for (uint32_t id : ids) samples[id] = sample_indices(l, q, es, id);

    SessionMap sessions;
    if (cfg.defense)
      for (uint32_t id : ids)
        sessions[id] = std::make_shared<ZkSession>(
            derive_seed(es, 0xdea1e4, id), budget.auths, budget.triples);

    // step 1: per-cluster aggregation under mask-correctness checks
    PhaseTimer t_s1(cfg.timing);
    ClusterPlan plan = cluster_assign(ids, cfg.clusters,
                                      derive_seed(es, 0xc105, 0));
    std::vector<std::vector<double>> cluster_means;
    std::vector<bool> cluster_flagged;
    std::set<uint32_t> s1_survivors;
    std::set<uint32_t> flagged;
    for (size_t ci = 0; ci < plan.members.size(); ++ci) {
      const auto &members = plan.members[ci];
      AggregationParams ap;
      ap.mode = GraphMode::full;
      ap.seed = derive_seed(es, 0x51c1, static_cast<uint32_t>(ci));
      ap.zk_checks = cfg.defense;
      ap.q = q;
      ap.g_max = cfg.g_max;
      ap.threads = cfg.threads;
      ap.run_tag = "e" + std::to_string(e) + "s1";
      std::map<uint32_t, FixedVec> sub;
      for (uint32_t id : members) {
        sub[id] = enc.at(id);
        if (auto it = edrops.find(id); it != edrops.end())
          ap.dropouts[id] = it->second;
        if (byz.count(id)) ap.attacks[id] = cfg.attack;
      }
      RoundTranscript tr = run_aggregation(ap, sub, &sessions, &samples);
      if (sink)
        sink->on_aggregation(e, "s1c" + std::to_string(ci), ap, members, tr);

      for (const auto &v : tr.verdicts)
        if (!v.second.passed) {
          ++rm.flagged_correctness;
          flagged.insert(v.first);
        }
      s1_survivors.insert(tr.survivors.begin(), tr.survivors.end());
      std::vector<double> mean = decode_vec(tr.aggregate);
      for (double &x : mean) x /= static_cast<double>(tr.survivors.size());
      cluster_means.push_back(std::move(mean));
      cluster_flagged.push_back(tr.magnitude_flag);
      if (tr.magnitude_flag)
        rm.flagged_magnitude += static_cast<uint32_t>(tr.survivors.size());
      for (const auto &kv : tr.ledger)
        (kv.second == ShareKind::seed_share ? res.ledger.seed_requests
                                            : res.ledger.key_requests)++;
      for (const auto &kv : tr.client_mults)
        res.total_client_mults += kv.second;
    }
    rm.phase_ms_step1 = t_s1.stop();

    // step 2: per-coordinate bound proofs against the cluster spread
    PhaseTimer t_s2(cfg.timing);
    std::set<uint32_t> benign = s1_survivors;
    if (cfg.defense) {
      std::vector<std::vector<double>> usable;
      for (size_t ci = 0; ci < cluster_means.size(); ++ci)
        if (!cluster_flagged[ci]) usable.push_back(cluster_means[ci]);
      if (usable.size() < 2) usable = cluster_means;
      RobustnessBounds bounds =
          derive_threshold(usable, eta, kDefaultScaleBits);

      uint32_t proofs = 0, passes = 0;
      for (uint32_t id : s1_survivors) {
        ZkSession &s = *sessions.at(id);
        if (byz.count(id) &&
            cfg.attack.kind == AttackKind::inconsistent_update) {
          // swap in different values after authentication; the stored
          // macs no longer match, which the opening will expose
          Rng forge(derive_seed(cfg.attack.seed, 0x7a3b, id));
          for (uint32_t k : attacked_coords(cfg.attack, l))
            if (AuthValue *av = s.tamper_update_coord(k))
              av->value = fp_add(av->value, nonzero_field_offset(forge));
        }
        ProofVerdict v =
            robustness_circuit(s, samples.at(id), bounds.lambda, bounds.theta);
        ++proofs;
        if (v.passed) {
          ++passes;
        } else {
          ++rm.flagged_robustness;
          flagged.insert(id);
          benign.erase(id);
        }
      }
      rm.eta_alarm = proofs > 0 && tune_eta(cfg.phi_max, proofs, passes).flagged;
    }
    rm.phase_ms_step2 = t_s2.stop();
    // a client that already went silent cannot join the final round
    for (const auto &d : edrops) benign.erase(d.first);
    rm.flagged_ids.assign(flagged.begin(), flagged.end());

    // step 3: one aggregation over everyone still considered honest
    PhaseTimer t_s3(cfg.timing);
    if (benign.size() < 2) {
      rm.skipped = true;
      rm.accuracy = model_accuracy(model, test);
      rm.phase_ms_step3 = t_s3.stop();
      res.rounds.push_back(std::move(rm));
      continue;
    }
    AggregationParams ap3;
    ap3.mode = cfg.mode;
    ap3.degree = cfg.degree;
    ap3.threshold = cfg.threshold;
    ap3.seed = derive_seed(es, 0x53a6, 0);
    ap3.zk_checks = cfg.defense;
    ap3.q = q;
    ap3.g_max = cfg.g_max;
    ap3.threads = cfg.threads;
    ap3.run_tag = "e" + std::to_string(e) + "s3";
    std::map<uint32_t, FixedVec> sub3;
    for (uint32_t id : benign) {
      sub3[id] = enc.at(id);
      if (byz.count(id)) ap3.attacks[id] = cfg.attack;
    }
    std::vector<uint32_t> members3(benign.begin(), benign.end());
    RoundTranscript tr3 = run_aggregation(ap3, sub3, &sessions, &samples);
    if (sink) sink->on_aggregation(e, "s3", ap3, members3, tr3);

    for (const auto &v : tr3.verdicts)
      if (!v.second.passed) {
        ++rm.flagged_correctness;
        flagged.insert(v.first);
      }
    rm.flagged_ids.assign(flagged.begin(), flagged.end());
    rm.contributors = tr3.survivors;
    for (const auto &kv : tr3.ledger)
      (kv.second == ShareKind::seed_share ? res.ledger.seed_requests
                                          : res.ledger.key_requests)++;
    for (const auto &kv : tr3.client_mults)
      res.total_client_mults += kv.second;

    std::vector<double> mean_update = decode_vec(tr3.aggregate);
    double norm = 0.0;
    for (double &x : mean_update) {
      x /= static_cast<double>(tr3.survivors.size());
      norm += x * x;
    }
    rm.agg_norm = std::sqrt(norm);
    for (size_t i = 0; i < model.w.size(); ++i) model.w[i] += mean_update[i];
    for (double w : model.w)
      if (!std::isfinite(w)) throw DivergenceError("model parameters diverged");
    rm.phase_ms_step3 = t_s3.stop();

    rm.accuracy = model_accuracy(model, test);
    res.rounds.push_back(std::move(rm));
  }

  res.final_accuracy = res.rounds.empty() ? 0.0 : res.rounds.back().accuracy;
  return res;
}

std::string metrics_csv(const std::vector<RoundMetrics> &rounds) {
  std::string out =
      "epoch,accuracy,flagged_correctness,flagged_robustness,"
      "flagged_magnitude,agg_norm,phase_ms_local,phase_ms_step1,"
      "phase_ms_step2,phase_ms_step3\n";
  char buf[256];
  for (const RoundMetrics &r : rounds) {
    std::snprintf(buf, sizeof buf,
                  "%u,%.6f,%u,%u,%u,%.9e,%.3f,%.3f,%.3f,%.3f\n", r.epoch,
                  r.accuracy, r.flagged_correctness, r.flagged_robustness,
                  r.flagged_magnitude, r.agg_norm, r.phase_ms_local,
                  r.phase_ms_step1, r.phase_ms_step2, r.phase_ms_step3);
    out += buf;
  }
  return out;
}

std::string summary_json(const ExperimentConfig &cfg,
                         const TrainingResult &res) {
  nlohmann::json j;
  j["schema_version"] = 1;
  nlohmann::json cfgj = nlohmann::json::object();
  for (const auto &kv : experiment_echo(cfg)) cfgj[kv.first] = kv.second;
  j["config"] = cfgj;
  j["vector_length"] = res.l;
  j["checks_per_client"] = res.q;
  j["eta"] = res.eta;
  j["final_accuracy"] = res.final_accuracy;
  j["epochs_run"] = res.rounds.size();
  j["byzantine"] = res.byzantine;

  uint64_t fc = 0, fr = 0, fm = 0, alarms = 0, skipped = 0;
  for (const RoundMetrics &r : res.rounds) {
    fc += r.flagged_correctness;
    fr += r.flagged_robustness;
    fm += r.flagged_magnitude;
    alarms += r.eta_alarm ? 1 : 0;
    skipped += r.skipped ? 1 : 0;
  }
  j["totals"] = {
      {"flagged_correctness", fc},
      {"flagged_robustness", fr},
      {"flagged_magnitude", fm},
      {"eta_alarms", alarms},
      {"skipped_rounds", skipped},
      {"ledger_seed_requests", res.ledger.seed_requests},
      {"ledger_key_requests", res.ledger.key_requests},
      {"ledger_mixed_requests", res.ledger.mixed},
      {"client_field_mults", res.total_client_mults},
  };
  nlohmann::json rounds = nlohmann::json::array();
  for (const RoundMetrics &r : res.rounds)
    rounds.push_back({{"epoch", r.epoch},
                      {"accuracy", r.accuracy},
                      {"flagged_correctness", r.flagged_correctness},
                      {"flagged_robustness", r.flagged_robustness},
                      {"flagged_magnitude", r.flagged_magnitude},
                      {"agg_norm", r.agg_norm},
                      {"contributors", r.contributors.size()},
                      {"flagged", r.flagged_ids},
                      {"eta_alarm", r.eta_alarm},
                      {"skipped", r.skipped}});
  j["rounds"] = rounds;
  return j.dump(2) + "\n";
}

}  // namespace secagg
