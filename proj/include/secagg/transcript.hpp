#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "secagg/harness.hpp"

namespace secagg {

// Captures a run as dir/transcript.bin (all message logs, back to back)
// plus dir/transcript.json (index with offsets, participants, aggregates
// and the resolved config, which makes the pair replayable).
class TranscriptWriter : public TranscriptSink {
 public:
  explicit TranscriptWriter(const std::string &dir);
  void on_aggregation(uint32_t epoch, const std::string &tag,
                      const AggregationParams &params,
                      const std::vector<uint32_t> &members,
                      const RoundTranscript &tr) override;
  // writes the index; call once after the run
  void finalize(const ExperimentConfig &cfg);

 private:
  std::string dir_;
  std::ofstream bin_;
  uint64_t offset_ = 0;
  nlohmann::json index_ = nlohmann::json::array();
};

struct ReplayReport {
  bool ok = false;
  bool config_error = false;  // transcript unusable rather than divergent
  std::string diagnostic;
  size_t aggregation = 0;  // first divergent aggregation, when known
  long message = -1;       // first divergent message within it
};

// Re-executes the run recorded in `dir` from its embedded config and
// compares every aggregation byte for byte against the stored log.
ReplayReport replay_run(const std::string &dir);

}  // namespace secagg
