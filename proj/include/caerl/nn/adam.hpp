#pragma once

#include <cmath>

#include "caerl/nn/params.hpp"

namespace caerl::nn {

/// Adam with bias correction. Moments are kept per parameter tensor, aligned
/// with the ParamRefs order the state was built from.
struct AdamState {
  long step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double learning_rate = 1e-3;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;

  AdamState() = default;
  explicit AdamState(const ParamRefs& params, double lr = 1e-3) : learning_rate(lr) {
    for (const auto& [name, t] : params) {
      first_moment.push_back(Tensor::zeros(t->shape));
      second_moment.push_back(Tensor::zeros(t->shape));
    }
  }
};

/// One optimizer step; params and grads must align with the state.
inline void adam_step(ParamRefs params, const ParamRefs& grads, AdamState& st) {
  check_aligned(params, grads, "adam_step");
  if (params.size() != st.first_moment.size())
    throw structural_error("adam_step: state built for a different collection");
  st.step_count += 1;
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step_count));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step_count));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i].second;
    const Tensor& g = *grads[i].second;
    Tensor& m = st.first_moment[i];
    Tensor& v = st.second_moment[i];
    for (std::size_t j = 0; j < p.numel(); ++j) {
      m[j] = st.beta1 * m[j] + (1.0 - st.beta1) * g[j];
      v[j] = st.beta2 * v[j] + (1.0 - st.beta2) * g[j] * g[j];
      const double mh = m[j] / bc1;
      const double vh = v[j] / bc2;
      p[j] -= st.learning_rate * mh / (std::sqrt(vh) + st.eps);
    }
  }
}

}  // namespace caerl::nn
