#include "secagg/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>

#include "secagg/errors.hpp"

namespace secagg {

namespace {

void check_blob_params(uint32_t classes, uint32_t dim) {
  if (dim < 2) throw ParamError("need at least two feature dimensions");
  if (classes < 2) throw ParamError("need at least two classes");
}

void blob_sample(Rng &rng, uint32_t cls, uint32_t dim, double separation,
                 std::vector<double> &out) {
  out.assign(dim, 0.0);
  for (double &v : out) v = rng.normal();
  out[cls % dim] += separation;
}

}  // namespace

Dataset gen_blobs(uint32_t classes, uint32_t dim, size_t count,
                  double separation, uint64_t seed) {
  check_blob_params(classes, dim);
  if (count == 0) throw ParamError("sample count must be positive");
  Dataset d;
  d.dim = dim;
  d.classes = classes;
  d.x.resize(count);
  d.y.resize(count);
  Rng rng(derive_seed(seed, 0xb10b, 0));
  for (size_t i = 0; i < count; ++i) {
    uint32_t cls = static_cast<uint32_t>(rng.below(classes));
    blob_sample(rng, cls, dim, separation, d.x[i]);
    d.y[i] = static_cast<uint8_t>(cls);
  }
  return d;
}

std::vector<Dataset> gen_synthetic_shards(uint32_t classes, uint32_t dim,
                                          uint32_t n_clients,
                                          size_t per_client,
                                          double separation,
                                          double heterogeneity,
                                          uint64_t seed) {
  check_blob_params(classes, dim);
  if (n_clients == 0) throw ParamError("need at least one client");
  if (per_client == 0) throw ParamError("per-client sample count must be positive");
  if (!(heterogeneity >= 0.0 && heterogeneity < 1.0))
    throw ParamError("heterogeneity must be in [0, 1)");
  std::vector<Dataset> shards(n_clients);
  for (uint32_t i = 0; i < n_clients; ++i) {
    Dataset &d = shards[i];
    d.dim = dim;
    d.classes = classes;
    d.x.resize(per_client);
    d.y.resize(per_client);
    Rng rng(derive_seed(seed, 0xb10b, i + 1));
    uint32_t dominant = i % classes;
    for (size_t s = 0; s < per_client; ++s) {
      uint32_t cls = rng.unit() < heterogeneity
                         ? dominant
                         : static_cast<uint32_t>(rng.below(classes));
      blob_sample(rng, cls, dim, separation, d.x[s]);
      d.y[s] = static_cast<uint8_t>(cls);
    }
  }
  return shards;
}

Dataset load_csv_dataset(const std::string &path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw ParamError("cannot open dataset file: " + path);
  Dataset d;
  std::string line;
  uint32_t line_no = 0;
  long max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (has_header && line_no == 1) continue;
    // tolerate trailing carriage returns and blank lines
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty()) continue;

    std::vector<double> cells;
    size_t pos = 0;
    while (pos <= line.size()) {
      size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      std::string cell = line.substr(pos, comma - pos);
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception &) {
        throw ParseError("non-numeric value '" + cell + "'", line_no);
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
        ++used;
      if (used != cell.size())
        throw ParseError("non-numeric value '" + cell + "'", line_no);
      cells.push_back(v);
      pos = comma + 1;
      if (comma == line.size()) break;
    }
    if (cells.size() < 2)
      throw ParseError("row needs features and a label", line_no);

    if (d.x.empty()) {
      d.dim = static_cast<uint32_t>(cells.size() - 1);
    } else if (cells.size() - 1 != d.dim) {
      throw ParseError("row has " + std::to_string(cells.size() - 1) +
                           " features, expected " + std::to_string(d.dim),
                       line_no);
    }
    double lab = cells.back();
    cells.pop_back();
    if (lab != std::floor(lab) || lab < 0.0 || lab > 255.0)
      throw ParseError("label must be a small non-negative integer", line_no);
    max_label = std::max(max_label, static_cast<long>(lab));
    d.x.push_back(std::move(cells));
    d.y.push_back(static_cast<uint8_t>(lab));
  }
  if (d.x.empty()) throw ParseError("dataset has no rows", line_no);
  d.classes = static_cast<uint32_t>(max_label + 1);
  if (d.classes < 2) throw ParseError("need at least two classes", line_no);

  // min-max normalize each feature column
  for (uint32_t j = 0; j < d.dim; ++j) {
    double lo = d.x[0][j], hi = d.x[0][j];
    for (const auto &row : d.x) {
      lo = std::min(lo, row[j]);
      hi = std::max(hi, row[j]);
    }
    double span = hi - lo;
    for (auto &row : d.x) row[j] = span > 0.0 ? (row[j] - lo) / span : 0.0;
  }
  return d;
}

std::vector<Dataset> shard_dataset(const Dataset &data, uint32_t n_clients,
                                   double heterogeneity, uint64_t seed) {
  if (n_clients == 0) throw ParamError("need at least one client");
  if (data.size() < n_clients)
    throw ParamError("fewer samples than clients");
  if (!(heterogeneity >= 0.0 && heterogeneity < 1.0))
    throw ParamError("heterogeneity must be in [0, 1)");

  std::vector<uint32_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 0x5a4d, 0));
  rng.shuffle(order);

  // a label-sorted prefix dealt in contiguous blocks skews each shard
  // toward few labels; the shuffled remainder keeps shards nonempty
  size_t skewed = static_cast<size_t>(heterogeneity * static_cast<double>(order.size()));
  std::stable_sort(order.begin(), order.begin() + skewed,
                   [&](uint32_t a, uint32_t b) { return data.y[a] < data.y[b]; });

  std::vector<Dataset> shards(n_clients);
  for (auto &s : shards) {
    s.dim = data.dim;
    s.classes = data.classes;
  }
  size_t block = skewed / n_clients;
  for (size_t i = 0; i < order.size(); ++i) {
    uint32_t owner;
    if (i < skewed && block > 0)
      owner = std::min<uint32_t>(static_cast<uint32_t>(i / block), n_clients - 1);
    else
      owner = static_cast<uint32_t>(i % n_clients);
    shards[owner].x.push_back(data.x[order[i]]);
    shards[owner].y.push_back(data.y[order[i]]);
  }
  for (const auto &s : shards)
    if (s.x.empty()) throw ParamError("sharding produced an empty shard");
  return shards;
}

}  // namespace secagg
