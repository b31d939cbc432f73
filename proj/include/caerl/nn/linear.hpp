#pragma once

#include <string>

#include "caerl/rng.hpp"
#include "caerl/tensor.hpp"

namespace caerl::nn {

/// Affine layer y = W x + b, weight stored [out x in].
struct LinearParams {
  Tensor weight;
  Tensor bias;

  LinearParams() = default;
  LinearParams(std::size_t out, std::size_t in)
      : weight({out, in}), bias({out}) {}

  std::size_t in_dim() const { return weight.shape[1]; }
  std::size_t out_dim() const { return weight.shape[0]; }

  /// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero bias.
  void init(Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim()));
    for (double& w : weight.data) w = uniform(rng, -bound, bound);
    for (double& b : bias.data) b = 0.0;
  }
};

inline Tensor linear_forward(const LinearParams& p, const Tensor& x,
                             const std::string& name = "linear") {
  if (x.rank() != 1 || x.numel() != p.in_dim())
    throw dim_error(name + ": input " + x.shape_str() + " does not match in dim " +
                    std::to_string(p.in_dim()));
  const std::size_t out = p.out_dim(), in = p.in_dim();
  Tensor y({out});
  for (std::size_t o = 0; o < out; ++o) {
    double acc = p.bias[o];
    for (std::size_t i = 0; i < in; ++i) acc += p.weight.at(o, i) * x[i];
    y[o] = acc;
  }
  return y;
}

/// Apply the layer to every row of a 2-D input.
inline Tensor linear_forward_rows(const LinearParams& p, const Tensor& x,
                                  const std::string& name = "linear") {
  if (x.rank() != 2 || x.shape[1] != p.in_dim())
    throw dim_error(name + ": row input " + x.shape_str() + " does not match in dim " +
                    std::to_string(p.in_dim()));
  const std::size_t rows = x.shape[0], out = p.out_dim(), in = p.in_dim();
  Tensor y({rows, out});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t o = 0; o < out; ++o) {
      double acc = p.bias[o];
      for (std::size_t i = 0; i < in; ++i) acc += p.weight.at(o, i) * x.at(r, i);
      y.at(r, o) = acc;
    }
  return y;
}

/// Gradients of a linear layer; shaped like the parameters.
struct LinearGrads {
  Tensor weight;
  Tensor bias;

  explicit LinearGrads(const LinearParams& p)
      : weight(Tensor::zeros(p.weight.shape)), bias(Tensor::zeros(p.bias.shape)) {}
};

/// Backward for a 1-D application; accumulates into `g`, returns d loss / d x.
inline Tensor linear_backward(const LinearParams& p, const Tensor& x,
                              const Tensor& dy, LinearGrads& g) {
  const std::size_t out = p.out_dim(), in = p.in_dim();
  Tensor dx({in});
  for (std::size_t o = 0; o < out; ++o) {
    g.bias[o] += dy[o];
    for (std::size_t i = 0; i < in; ++i) {
      g.weight.at(o, i) += dy[o] * x[i];
      dx[i] += p.weight.at(o, i) * dy[o];
    }
  }
  return dx;
}

/// Backward for the row-wise application.
inline Tensor linear_backward_rows(const LinearParams& p, const Tensor& x,
                                   const Tensor& dy, LinearGrads& g) {
  const std::size_t rows = x.shape[0], out = p.out_dim(), in = p.in_dim();
  Tensor dx({rows, in});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t o = 0; o < out; ++o) {
      const double d = dy.at(r, o);
      g.bias[o] += d;
      for (std::size_t i = 0; i < in; ++i) {
        g.weight.at(o, i) += d * x.at(r, i);
        dx.at(r, i) += p.weight.at(o, i) * d;
      }
    }
  return dx;
}

}  // namespace caerl::nn
