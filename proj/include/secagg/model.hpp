#pragma once

#include <cstdint>
#include <vector>

#include "secagg/rng.hpp"

namespace secagg {

struct Dataset {
  uint32_t dim = 0;
  uint32_t classes = 0;
  std::vector<std::vector<double>> x;
  std::vector<uint8_t> y;
  size_t size() const { return x.size(); }
};

enum class ModelKind : uint8_t { logreg = 0, mlp = 1 };

struct ModelSpec {
  ModelKind kind = ModelKind::logreg;
  uint32_t in_dim = 0;
  uint32_t classes = 2;
  uint32_t hidden = 0;  // mlp only
};

// flat parameter count; this is the protocol vector length l
size_t param_count(const ModelSpec &spec);

// Parameter layout, row major:
//   logreg: W [classes x in_dim], b [classes]
//   mlp:    W1 [hidden x in_dim], b1 [hidden], W2 [classes x hidden],
//           b2 [classes], hidden layer is ReLU
struct Model {
  ModelSpec spec;
  std::vector<double> w;
};

Model init_model(const ModelSpec &spec, uint64_t seed);

// class scores before softmax
std::vector<double> model_logits(const Model &m, const std::vector<double> &x);

// mean softmax cross-entropy and its gradient over the index subset
// of the dataset; throws DivergenceError on non-finite results
double model_loss_grad(const Model &m, const Dataset &data,
                       const std::vector<uint32_t> &idx,
                       std::vector<double> &grad);

double model_accuracy(const Model &m, const Dataset &data);

// one local update: u = -lr * mean gradient over the batch, clipped
// coordinate-wise into safely encodable range
std::vector<double> local_step(const Model &m, const Dataset &shard,
                               const std::vector<uint32_t> &batch, double lr);

}  // namespace secagg
