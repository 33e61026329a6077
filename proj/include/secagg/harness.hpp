#pragma once

#include <map>
#include <string>
#include <vector>

#include "secagg/config.hpp"
#include "secagg/data.hpp"
#include "secagg/model.hpp"
#include "secagg/protocol.hpp"
#include "secagg/robustness.hpp"

namespace secagg {

// Everything a training run depends on; two equal configs produce
// byte-identical metrics and transcripts.
struct ExperimentConfig {
  // experiment
  uint32_t epochs = 20;
  uint64_t seed = 1;
  int threads = 1;
  bool timing = false;  // off keeps the metrics file reproducible

  // data
  std::string source = "synthetic";  // or "csv"
  uint32_t classes = 2;
  uint32_t dim = 20;
  size_t per_client = 40;
  double separation = 6.0;
  double heterogeneity = 0.0;
  size_t test_count = 1000;
  std::string csv_path;
  bool csv_header = false;

  // model
  ModelKind model_kind = ModelKind::logreg;
  uint32_t hidden = 8;
  double lr = 0.5;
  uint32_t batch = 0;  // 0 = full shard

  // clients and the step-3 graph
  uint32_t n = 50;
  uint32_t clusters = 7;
  GraphMode mode = GraphMode::full;
  uint32_t degree = 0;
  uint32_t threshold = 0;

  // defense
  bool defense = true;
  double z = 3.0;
  double eta_override = 0.0;  // > 0 wins over z * sqrt(n_c)
  double phi_max = 0.25;
  double delta = 0.005;
  double s_m_assumed = 1.0;
  double g_max = 10.0;

  // adversary
  AttackSpec attack;
  double byz_fraction = 0.25;  // applies when attack.kind != none

  // scripted silence: epoch -> client -> point
  std::map<uint32_t, std::map<uint32_t, DropPoint>> dropouts;
};

// parse + validate; ParamError messages name the config key.
ExperimentConfig experiment_from_config(const ConfigMap &raw);
// resolved key=value echo; parses back to an equivalent config
ConfigMap experiment_echo(const ExperimentConfig &cfg);

struct RoundMetrics {
  uint32_t epoch = 0;
  double accuracy = 0.0;
  uint32_t flagged_correctness = 0;
  uint32_t flagged_robustness = 0;
  uint32_t flagged_magnitude = 0;  // members of clusters over g_max
  double agg_norm = 0.0;
  double phase_ms_local = 0.0;
  double phase_ms_step1 = 0.0;
  double phase_ms_step2 = 0.0;
  double phase_ms_step3 = 0.0;
  std::vector<uint32_t> flagged_ids;   // failed a proof this round
  std::vector<uint32_t> contributors;  // made it into the step-3 sum
  bool skipped = false;     // fewer than two benign clients
  bool eta_alarm = false;   // pass rate exceeded the benign budget
};

struct LedgerTotals {
  uint64_t seed_requests = 0;
  uint64_t key_requests = 0;
  uint64_t mixed = 0;  // share-kind conflicts observed (always 0)
};

// observes every aggregation a training run executes, in order
class TranscriptSink {
 public:
  virtual ~TranscriptSink() = default;
  virtual void on_aggregation(uint32_t epoch, const std::string &tag,
                              const AggregationParams &params,
                              const std::vector<uint32_t> &members,
                              const RoundTranscript &tr) = 0;
};

struct TrainingResult {
  std::vector<RoundMetrics> rounds;
  double final_accuracy = 0.0;
  uint32_t l = 0;
  uint32_t q = 0;
  double eta = 0.0;
  std::vector<uint32_t> byzantine;  // sorted ids
  LedgerTotals ledger;
  uint64_t total_client_mults = 0;
};

TrainingResult run_training(const ExperimentConfig &cfg,
                            TranscriptSink *sink = nullptr);

// fixed-header CSV, one row per round
std::string metrics_csv(const std::vector<RoundMetrics> &rounds);
// config echo + totals; schema_version pins the layout
std::string summary_json(const ExperimentConfig &cfg,
                         const TrainingResult &result);

}  // namespace secagg
