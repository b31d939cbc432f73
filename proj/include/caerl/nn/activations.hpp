#pragma once

#include <cmath>

#include "caerl/tensor.hpp"

namespace caerl::nn {

inline Tensor relu_forward(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data) v = v > 0.0 ? v : 0.0;
  return y;
}

inline Tensor relu_backward(const Tensor& x, const Tensor& dy) {
  Tensor dx = dy;
  for (std::size_t i = 0; i < x.numel(); ++i)
    if (x[i] <= 0.0) dx[i] = 0.0;
  return dx;
}

inline Tensor tanh_forward(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data) v = std::tanh(v);
  return y;
}

/// Takes the forward *output* y = tanh(x): d/dx = 1 - y^2.
inline Tensor tanh_backward_from_output(const Tensor& y, const Tensor& dy) {
  Tensor dx = dy;
  for (std::size_t i = 0; i < y.numel(); ++i) dx[i] *= 1.0 - y[i] * y[i];
  return dx;
}

}  // namespace caerl::nn
