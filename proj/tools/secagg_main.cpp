#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "secagg/errors.hpp"
#include "secagg/harness.hpp"
#include "secagg/transcript.hpp"

using namespace secagg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitProtocolAbort = 3;

int cmd_run(const std::string &config_path, const std::string &out_dir,
            bool quiet, long seed_override, long epochs_override,
            long threads_override) {
  ExperimentConfig cfg;
  try {
    cfg = experiment_from_config(load_config_file(config_path));
    if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
    if (epochs_override > 0) cfg.epochs = static_cast<uint32_t>(epochs_override);
    if (threads_override > 0) cfg.threads = static_cast<int>(threads_override);
  } catch (const Error &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    std::filesystem::create_directories(out_dir);
    TranscriptWriter writer(out_dir);
    TrainingResult res = run_training(cfg, &writer);
    writer.finalize(cfg);

    std::ofstream mcsv(out_dir + "/metrics.csv", std::ios::trunc);
    mcsv << metrics_csv(res.rounds);
    std::ofstream sj(out_dir + "/summary.json", std::ios::trunc);
    sj << summary_json(cfg, res);

    if (!quiet) {
      for (const RoundMetrics &r : res.rounds)
        std::printf(
            "epoch %3u  accuracy %.4f  flagged c/r/m %u/%u/%u  benign %zu%s\n",
            r.epoch, r.accuracy, r.flagged_correctness, r.flagged_robustness,
            r.flagged_magnitude, r.contributors.size(),
            r.skipped ? "  [skipped]" : "");
      std::printf("final accuracy %.4f  (l=%u, q=%u, eta=%.3f)\n",
                  res.final_accuracy, res.l, res.q, res.eta);
      std::printf("wrote %s/{metrics.csv,summary.json,transcript.bin,transcript.json}\n",
                  out_dir.c_str());
    }
    return kExitOk;
  } catch (const ParamError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error &e) {
    std::cerr << "protocol abort: " << e.what() << "\n";
    return kExitProtocolAbort;
  }
}

int cmd_qcalc(uint64_t l, double s_m, double delta) {
  try {
    CheckBudget b = compute_q(static_cast<uint32_t>(l), s_m, delta);
    std::printf("minimal q: %u\n", b.q);
    std::printf("q,p_detect\n");
    for (uint32_t q = 1; q <= b.q; ++q)
      std::printf("%u,%.6f\n", q, detect_prob(static_cast<uint32_t>(l), s_m, q));
    return kExitOk;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_selftest(bool inject_fault) {
  struct Check {
    const char *name;
    bool ok;
  };
  std::vector<Check> checks;
  auto record = [&](const char *name, bool ok) {
    checks.push_back({name, ok});
  };

  try {
    {  // field arithmetic axioms on a pinned sample
      Rng rng(0x5e1f);
      bool ok = true;
      for (int i = 0; i < 2000 && ok; ++i) {
        Fp a{rng.below(kPrime)}, b{rng.below(kPrime)}, c{rng.below(kPrime)};
        ok = (a + b) * c == a * c + b * c && a * b == b * a;
        if (a.v != 0) ok = ok && a * fp_inv(a) == Fp{1};
      }
      record("field axioms", ok);
    }
    {  // mask expansion examples
      record("prg examples",
             prg_eval(Fp{0}, 0) == Fp{1} && prg_eval(Fp{1}, 1) == Fp{243});
    }
    {  // share and rebuild round trips
      Rng rng(0x5e1f + 1);
      bool ok = true;
      for (int i = 0; i < 50 && ok; ++i) {
        Fp secret{rng.below(kPrime)};
        std::vector<uint32_t> idx = {1, 2, 3, 4, 5, 6, 7};
        auto shares = shamir_share(secret, 5, idx, rng);
        rng.shuffle(shares);
        shares.resize(5);
        ok = shamir_reconstruct(shares, 5) == secret;
      }
      record("secret sharing round trip", ok);
    }
    {  // authenticated-value relation and forgery rejection
      ZkSession s(0x5e1f + 2, 64, 64);
      AuthValue a = s.authenticate(Fp{12345});
      if (inject_fault) a.mac = fp_add(a.mac, Fp{1});
      bool ok = s.open(a).has_value();
      AuthValue b = s.authenticate(Fp{777});
      b.value = fp_add(b.value, Fp{3});  // tampered, must be rejected
      ok = ok && !s.open(b).has_value();
      record("mac binding", ok);
    }
    {  // masks cancel in a small full round
      std::map<uint32_t, FixedVec> updates;
      for (uint32_t id = 1; id <= 8; ++id) {
        FixedVec z;
        z.coords.assign(8, Fp{0});
        updates[id] = z;
      }
      AggregationParams p;
      p.seed = 0x5e1f + 3;
      auto tr = run_aggregation(p, updates);
      bool ok = true;
      for (Fp w : tr.aggregate.coords) ok = ok && w == Fp{0};
      record("mask cancellation n=8", ok);
    }
    {  // neighbor graphs stay regular and connected
      auto g = build_neighbor_graph(24, GraphMode::neighbor, 6, 0x5e1f + 4);
      bool ok = graph_connected(g);
      for (const auto &adj : g.adj) ok = ok && adj.size() == 6;
      record("regular graph", ok);
    }
  } catch (const std::exception &e) {
    std::cerr << "selftest aborted: " << e.what() << "\n";
    return kExitCheckFailed;
  }

  bool all = true;
  for (const Check &c : checks) {
    std::printf("%-28s %s\n", c.name, c.ok ? "ok" : "FAIL");
    all = all && c.ok;
  }
  return all ? kExitOk : kExitCheckFailed;
}

int cmd_replay(const std::string &dir) {
  ReplayReport rep = replay_run(dir);
  if (rep.ok) {
    std::printf("%s\n", rep.diagnostic.c_str());
    return kExitOk;
  }
  std::cerr << "replay failed at aggregation " << rep.aggregation;
  if (rep.message >= 0) std::cerr << ", message " << rep.message;
  std::cerr << ": " << rep.diagnostic << "\n";
  return rep.config_error ? kExitUsage : kExitCheckFailed;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Byzantine-robust secure aggregation sandbox"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", replay_dir;
  bool quiet = false, inject_fault = false;
  long seed_override = -1, epochs_override = -1, threads_override = -1;
  uint64_t qc_l = 60000;
  double qc_sm = 1.0, qc_delta = 0.005;

  CLI::App *run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("--config", config_path, "experiment config file")
      ->required();
  run->add_option("--out", out_dir, "output directory (default: out)");
  run->add_option("--seed", seed_override, "override experiment.seed");
  run->add_option("--epochs", epochs_override, "override experiment.epochs");
  run->add_option("--threads", threads_override, "override experiment.threads");
  run->add_flag("--quiet", quiet, "suppress progress output");

  CLI::App *qcalc = app.add_subcommand(
      "qcalc", "minimal checks per client for a detection target");
  qcalc->add_option("--l", qc_l, "vector length")->required();
  qcalc->add_option("--sm", qc_sm, "assumed tampered fraction")->required();
  qcalc->add_option("--delta", qc_delta, "allowed miss probability")
      ->required();

  CLI::App *selftest =
      app.add_subcommand("selftest", "fast invariant checks of the primitives");
  selftest->add_flag("--inject-fault", inject_fault)->group("");  // hidden

  CLI::App *replay =
      app.add_subcommand("replay", "re-execute and verify a recorded run");
  replay->add_option("--dir", replay_dir, "directory with transcript.{bin,json}")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  if (run->parsed())
    return cmd_run(config_path, out_dir, quiet, seed_override, epochs_override,
                   threads_override);
  if (qcalc->parsed()) return cmd_qcalc(qc_l, qc_sm, qc_delta);
  if (selftest->parsed()) return cmd_selftest(inject_fault);
  if (replay->parsed()) return cmd_replay(replay_dir);
  return kExitUsage;
}
