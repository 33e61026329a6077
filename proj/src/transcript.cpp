#include "secagg/transcript.hpp"

#include <filesystem>

#include "secagg/errors.hpp"

namespace secagg {

namespace {

std::vector<uint64_t> words_of(const FixedVec &v) {
  std::vector<uint64_t> out(v.coords.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = v.coords[i].v;
  return out;
}

}  // namespace

TranscriptWriter::TranscriptWriter(const std::string &dir) : dir_(dir) {
  std::filesystem::create_directories(dir_);
  bin_.open(dir_ + "/transcript.bin", std::ios::binary | std::ios::trunc);
  if (!bin_) throw ParamError("cannot write transcript in " + dir_);
}

void TranscriptWriter::on_aggregation(uint32_t epoch, const std::string &tag,
                                      const AggregationParams &params,
                                      const std::vector<uint32_t> &members,
                                      const RoundTranscript &tr) {
  std::vector<uint8_t> bytes = serialize_log(tr.messages);
  bin_.write(reinterpret_cast<const char *>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  nlohmann::json ent;
  ent["epoch"] = epoch;
  ent["tag"] = tag;
  ent["seed"] = params.seed;
  ent["q"] = params.q;
  ent["zk_checks"] = params.zk_checks;
  ent["run_tag"] = params.run_tag;
  ent["members"] = members;
  ent["offset"] = offset_;
  ent["bytes"] = bytes.size();
  ent["messages"] = tr.messages.size();
  ent["aggregate"] = words_of(tr.aggregate);
  ent["survivors"] = tr.survivors;
  ent["magnitude_flag"] = tr.magnitude_flag;
  index_.push_back(std::move(ent));
  offset_ += bytes.size();
}

void TranscriptWriter::finalize(const ExperimentConfig &cfg) {
  bin_.flush();
  nlohmann::json j;
  j["schema_version"] = 1;
  nlohmann::json cfgj = nlohmann::json::object();
  for (const auto &kv : experiment_echo(cfg)) cfgj[kv.first] = kv.second;
  j["config"] = cfgj;
  j["aggregations"] = index_;
  std::ofstream out(dir_ + "/transcript.json", std::ios::trunc);
  if (!out) throw ParamError("cannot write transcript index in " + dir_);
  out << j.dump(2) << "\n";
}

namespace {

class ReplayComparer : public TranscriptSink {
 public:
  ReplayComparer(const nlohmann::json &index, std::vector<uint8_t> bin)
      : index_(index), bin_(std::move(bin)) {}

  ReplayReport report;
  size_t consumed() const { return next_; }

  void on_aggregation(uint32_t epoch, const std::string &tag,
                      const AggregationParams &, const std::vector<uint32_t> &,
                      const RoundTranscript &tr) override {
    if (next_ >= index_.size())
      fail("run produced more aggregations than the transcript holds");
    const nlohmann::json &ent = index_[next_];
    if (ent.at("epoch").get<uint32_t>() != epoch ||
        ent.at("tag").get<std::string>() != tag)
      fail("aggregation order diverged: transcript has epoch " +
           ent.at("epoch").dump() + " " +
           ent.at("tag").get<std::string>() + ", run produced epoch " +
           std::to_string(epoch) + " " + tag);

    uint64_t off = ent.at("offset").get<uint64_t>();
    uint64_t len = ent.at("bytes").get<uint64_t>();
    if (off + len > bin_.size())
      fail("transcript truncated: index expects bytes " + std::to_string(off) +
           ".." + std::to_string(off + len) + " but the log holds " +
           std::to_string(bin_.size()));

    std::vector<uint8_t> fresh = serialize_log(tr.messages);
    bool same = fresh.size() == len &&
                std::equal(fresh.begin(), fresh.end(), bin_.begin() + off);
    if (!same) {
      long at = -1;
      try {
        std::vector<uint8_t> slice(bin_.begin() + off, bin_.begin() + off + len);
        std::vector<Message> logged = parse_log(slice);
        size_t m = std::min(logged.size(), tr.messages.size());
        at = static_cast<long>(m);
        for (size_t i = 0; i < m; ++i)
          if (!(logged[i] == tr.messages[i])) {
            at = static_cast<long>(i);
            break;
          }
      } catch (const ParseError &e) {
        fail(std::string("stored message log unreadable: ") + e.what());
      }
      report.message = at;
      fail("message log diverged at message " + std::to_string(at));
    }
    if (ent.at("aggregate").get<std::vector<uint64_t>>() !=
        words_of(tr.aggregate))
      fail("aggregate diverged");
    if (ent.at("survivors").get<std::vector<uint32_t>>() != tr.survivors)
      fail("survivor set diverged");
    ++next_;
  }

 private:
  [[noreturn]] void fail(const std::string &why) {
    report.ok = false;
    report.aggregation = next_;
    report.diagnostic = why;
    throw DivergenceError(why);
  }

  const nlohmann::json &index_;
  std::vector<uint8_t> bin_;
  size_t next_ = 0;
};

}  // namespace

ReplayReport replay_run(const std::string &dir) {
  ReplayReport rep;
  nlohmann::json j;
  {
    std::ifstream in(dir + "/transcript.json");
    if (!in) {
      rep.config_error = true;
      rep.diagnostic = "missing " + dir + "/transcript.json";
      return rep;
    }
    try {
      in >> j;
    } catch (const std::exception &e) {
      rep.diagnostic = std::string("transcript index unreadable: ") + e.what();
      return rep;
    }
  }
  std::vector<uint8_t> bin;
  {
    std::ifstream in(dir + "/transcript.bin", std::ios::binary);
    if (!in) {
      rep.config_error = true;
      rep.diagnostic = "missing " + dir + "/transcript.bin";
      return rep;
    }
    bin.assign(std::istreambuf_iterator<char>(in),
               std::istreambuf_iterator<char>());
  }

  ExperimentConfig cfg;
  try {
    ConfigMap raw;
    for (const auto &kv : j.at("config").items())
      raw[kv.key()] = kv.value().get<std::string>();
    cfg = experiment_from_config(raw);
  } catch (const std::exception &e) {
    rep.config_error = true;
    rep.diagnostic = std::string("embedded config invalid: ") + e.what();
    return rep;
  }

  ReplayComparer cmp(j.at("aggregations"), std::move(bin));
  try {
    run_training(cfg, &cmp);
  } catch (const DivergenceError &) {
    return cmp.report;  // fail() filled in the details
  } catch (const std::exception &e) {
    rep.diagnostic = std::string("replay aborted: ") + e.what();
    rep.aggregation = cmp.consumed();
    return rep;
  }
  if (cmp.consumed() != j.at("aggregations").size()) {
    rep.diagnostic = "transcript holds " +
                     std::to_string(j.at("aggregations").size()) +
                     " aggregations, the run produced " +
                     std::to_string(cmp.consumed());
    rep.aggregation = cmp.consumed();
    return rep;
  }
  rep.ok = true;
  rep.diagnostic = "replay matched " + std::to_string(cmp.consumed()) +
                   " aggregations";
  return rep;
}

}  // namespace secagg
