#pragma once

#include <vector>

#include "caerl/nn/activations.hpp"
#include "caerl/nn/linear.hpp"

namespace caerl::nn {

/// Fully connected stack with ReLU between layers; the final layer is left
/// linear (callers add tanh or nothing).
struct MlpParams {
  std::vector<LinearParams> layers;

  MlpParams() = default;
  MlpParams(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
    std::size_t prev = in;
    for (std::size_t h : hidden) {
      layers.emplace_back(h, prev);
      prev = h;
    }
    layers.emplace_back(out, prev);
  }

  std::size_t in_dim() const { return layers.front().in_dim(); }
  std::size_t out_dim() const { return layers.back().out_dim(); }

  void init(Rng& rng) {
    for (auto& l : layers) l.init(rng);
  }
};

struct MlpCache {
  std::vector<Tensor> inputs;    // input to each linear layer
  std::vector<Tensor> preacts;   // linear outputs before ReLU
  bool valid = false;
};

inline Tensor mlp_forward(const MlpParams& p, const Tensor& x,
                          MlpCache* cache = nullptr) {
  Tensor h = x;
  if (cache) {
    cache->inputs.clear();
    cache->preacts.clear();
  }
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    if (cache) cache->inputs.push_back(h);
    Tensor z = linear_forward(p.layers[i], h, "mlp layer " + std::to_string(i));
    if (cache) cache->preacts.push_back(z);
    h = (i + 1 < p.layers.size()) ? relu_forward(z) : z;
  }
  if (cache) cache->valid = true;
  return h;
}

struct MlpGrads {
  std::vector<LinearGrads> layers;

  explicit MlpGrads(const MlpParams& p) {
    layers.reserve(p.layers.size());
    for (const auto& l : p.layers) layers.emplace_back(l);
  }
};

inline Tensor mlp_backward(const MlpParams& p, const MlpCache& cache,
                           const Tensor& dy, MlpGrads& g) {
  if (!cache.valid) throw state_error("mlp backward: missing forward cache");
  Tensor d = dy;
  for (std::size_t i = p.layers.size(); i-- > 0;) {
    if (i + 1 < p.layers.size()) d = relu_backward(cache.preacts[i], d);
    d = linear_backward(p.layers[i], cache.inputs[i], d, g.layers[i]);
  }
  return d;
}

}  // namespace caerl::nn
