#pragma once

#include "caerl/tensor.hpp"

namespace caerl::nn {

/// Mean over the time axis of an [L x D] matrix.
inline Tensor average_pool(const Tensor& x) {
  if (x.rank() != 2 || x.shape[0] == 0)
    throw dim_error("average_pool: need a non-empty [L x D] input, got " +
                    x.shape_str());
  const std::size_t L = x.shape[0], D = x.shape[1];
  Tensor y({D});
  for (std::size_t t = 0; t < L; ++t)
    for (std::size_t d = 0; d < D; ++d) y[d] += x.at(t, d);
  for (std::size_t d = 0; d < D; ++d) y[d] /= static_cast<double>(L);
  return y;
}

/// Constant Jacobian 1/L spread back over the time axis.
inline Tensor average_pool_backward(std::size_t L, const Tensor& dy) {
  const std::size_t D = dy.numel();
  Tensor dx({L, D});
  for (std::size_t t = 0; t < L; ++t)
    for (std::size_t d = 0; d < D; ++d)
      dx.at(t, d) = dy[d] / static_cast<double>(L);
  return dx;
}

}  // namespace caerl::nn
