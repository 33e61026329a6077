#include "secagg/model.hpp"

#include <algorithm>
#include <cmath>

#include "secagg/errors.hpp"

namespace secagg {

namespace {

constexpr double kUpdateClip = 1e9;  // far inside fixed-point range

void softmax_inplace(std::vector<double> &z) {
  double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double &v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double &v : z) v /= sum;
}

}  // namespace

size_t param_count(const ModelSpec &spec) {
  if (spec.in_dim == 0 || spec.classes < 2)
    throw ParamError("model needs inputs and at least two classes");
  if (spec.kind == ModelKind::logreg)
    return static_cast<size_t>(spec.classes) * (spec.in_dim + 1);
  if (spec.hidden == 0) throw ParamError("mlp needs a hidden width");
  return static_cast<size_t>(spec.hidden) * (spec.in_dim + 1) +
         static_cast<size_t>(spec.classes) * (spec.hidden + 1);
}

Model init_model(const ModelSpec &spec, uint64_t seed) {
  Model m;
  m.spec = spec;
  m.w.assign(param_count(spec), 0.0);
  if (spec.kind == ModelKind::mlp) {
    // small random init breaks hidden-unit symmetry; biases stay zero
    Rng rng(derive_seed(seed, 0x1417, 0));
    double scale = 1.0 / std::sqrt(static_cast<double>(spec.in_dim));
    size_t w1 = static_cast<size_t>(spec.hidden) * spec.in_dim;
    for (size_t i = 0; i < w1; ++i) m.w[i] = rng.normal() * scale;
    size_t w2_at = w1 + spec.hidden;
    size_t w2 = static_cast<size_t>(spec.classes) * spec.hidden;
    double scale2 = 1.0 / std::sqrt(static_cast<double>(spec.hidden));
    for (size_t i = 0; i < w2; ++i) m.w[w2_at + i] = rng.normal() * scale2;
  }
  return m;
}

std::vector<double> model_logits(const Model &m, const std::vector<double> &x) {
  const ModelSpec &s = m.spec;
  if (x.size() != s.in_dim) throw ParamError("feature length mismatch");
  if (s.kind == ModelKind::logreg) {
    std::vector<double> z(s.classes);
    const double *b = m.w.data() + static_cast<size_t>(s.classes) * s.in_dim;
    for (uint32_t c = 0; c < s.classes; ++c) {
      const double *row = m.w.data() + static_cast<size_t>(c) * s.in_dim;
      double acc = b[c];
      for (uint32_t j = 0; j < s.in_dim; ++j) acc += row[j] * x[j];
      z[c] = acc;
    }
    return z;
  }
  const double *w1 = m.w.data();
  const double *b1 = w1 + static_cast<size_t>(s.hidden) * s.in_dim;
  const double *w2 = b1 + s.hidden;
  const double *b2 = w2 + static_cast<size_t>(s.classes) * s.hidden;
  std::vector<double> h(s.hidden);
  for (uint32_t u = 0; u < s.hidden; ++u) {
    const double *row = w1 + static_cast<size_t>(u) * s.in_dim;
    double acc = b1[u];
    for (uint32_t j = 0; j < s.in_dim; ++j) acc += row[j] * x[j];
    h[u] = acc > 0.0 ? acc : 0.0;
  }
  std::vector<double> z(s.classes);
  for (uint32_t c = 0; c < s.classes; ++c) {
    const double *row = w2 + static_cast<size_t>(c) * s.hidden;
    double acc = b2[c];
    for (uint32_t u = 0; u < s.hidden; ++u) acc += row[u] * h[u];
    z[c] = acc;
  }
  return z;
}

double model_loss_grad(const Model &m, const Dataset &data,
                       const std::vector<uint32_t> &idx,
                       std::vector<double> &grad) {
  const ModelSpec &s = m.spec;
  if (idx.empty()) throw ParamError("empty batch");
  if (data.dim != s.in_dim || data.classes != s.classes)
    throw ParamError("dataset does not match model shape");
  grad.assign(m.w.size(), 0.0);
  double loss = 0.0;
  double inv = 1.0 / static_cast<double>(idx.size());

  std::vector<double> h(s.hidden), pre(s.hidden);
  for (uint32_t i : idx) {
    if (i >= data.size()) throw ParamError("batch index out of range");
    const std::vector<double> &x = data.x[i];
    uint8_t y = data.y[i];

    if (s.kind == ModelKind::logreg) {
      std::vector<double> p = model_logits(m, x);
      softmax_inplace(p);
      loss -= std::log(std::max(p[y], 1e-300)) * inv;
      double *gw = grad.data();
      double *gb = gw + static_cast<size_t>(s.classes) * s.in_dim;
      for (uint32_t c = 0; c < s.classes; ++c) {
        double dz = (p[c] - (c == y ? 1.0 : 0.0)) * inv;
        double *row = gw + static_cast<size_t>(c) * s.in_dim;
        for (uint32_t j = 0; j < s.in_dim; ++j) row[j] += dz * x[j];
        gb[c] += dz;
      }
      continue;
    }

    const double *w1 = m.w.data();
    const double *b1 = w1 + static_cast<size_t>(s.hidden) * s.in_dim;
    const double *w2 = b1 + s.hidden;
    const double *b2 = w2 + static_cast<size_t>(s.classes) * s.hidden;
    for (uint32_t u = 0; u < s.hidden; ++u) {
      const double *row = w1 + static_cast<size_t>(u) * s.in_dim;
      double acc = b1[u];
      for (uint32_t j = 0; j < s.in_dim; ++j) acc += row[j] * x[j];
      pre[u] = acc;
      h[u] = acc > 0.0 ? acc : 0.0;
    }
    std::vector<double> p(s.classes);
    for (uint32_t c = 0; c < s.classes; ++c) {
      const double *row = w2 + static_cast<size_t>(c) * s.hidden;
      double acc = b2[c];
      for (uint32_t u = 0; u < s.hidden; ++u) acc += row[u] * h[u];
      p[c] = acc;
    }
    softmax_inplace(p);
    loss -= std::log(std::max(p[y], 1e-300)) * inv;

    size_t g_w1 = 0, g_b1 = static_cast<size_t>(s.hidden) * s.in_dim;
    size_t g_w2 = g_b1 + s.hidden;
    size_t g_b2 = g_w2 + static_cast<size_t>(s.classes) * s.hidden;
    std::vector<double> dh(s.hidden, 0.0);
    for (uint32_t c = 0; c < s.classes; ++c) {
      double dz = (p[c] - (c == y ? 1.0 : 0.0)) * inv;
      for (uint32_t u = 0; u < s.hidden; ++u) {
        grad[g_w2 + static_cast<size_t>(c) * s.hidden + u] += dz * h[u];
        dh[u] += dz * w2[static_cast<size_t>(c) * s.hidden + u];
      }
      grad[g_b2 + c] += dz;
    }
    for (uint32_t u = 0; u < s.hidden; ++u) {
      if (pre[u] <= 0.0) continue;  // ReLU gate
      for (uint32_t j = 0; j < s.in_dim; ++j)
        grad[g_w1 + static_cast<size_t>(u) * s.in_dim + j] += dh[u] * x[j];
      grad[g_b1 + u] += dh[u];
    }
  }

  if (!std::isfinite(loss)) throw DivergenceError("training loss diverged");
  for (double g : grad)
    if (!std::isfinite(g)) throw DivergenceError("gradient diverged");
  return loss;
}

double model_accuracy(const Model &m, const Dataset &data) {
  if (data.size() == 0) throw ParamError("empty dataset");
  size_t hits = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    auto z = model_logits(m, data.x[i]);
    size_t best = std::max_element(z.begin(), z.end()) - z.begin();
    if (best == data.y[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

std::vector<double> local_step(const Model &m, const Dataset &shard,
                               const std::vector<uint32_t> &batch, double lr) {
  std::vector<double> grad;
  model_loss_grad(m, shard, batch, grad);
  for (double &g : grad) {
    g = -lr * g;
    g = std::clamp(g, -kUpdateClip, kUpdateClip);
  }
  return grad;
}

}  // namespace secagg
