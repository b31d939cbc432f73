#pragma once

#include <string>

#include "caerl/rng.hpp"
#include "caerl/tensor.hpp"

namespace caerl::nn {

/// Depthwise separable convolution over a [T x D] history matrix.
///
/// Each channel owns one 1-D kernel per axis; the time-axis pass runs first
/// and the observation-axis pass runs on its result, both with zero
/// same-padding so spatial dims are preserved. A pointwise 1x1 convolution
/// then mixes channels. Kernel lengths must be odd so padding is symmetric.
struct DepthwiseSeparableParams {
  Tensor depthwise_time_kernel;  // [channels x k_t]
  Tensor depthwise_obs_kernel;   // [channels x k_o]
  Tensor pointwise_weight;       // [out_ch x channels]
  Tensor pointwise_bias;         // [out_ch]

  DepthwiseSeparableParams() = default;
  DepthwiseSeparableParams(std::size_t channels, std::size_t k_t, std::size_t k_o,
                           std::size_t out_ch)
      : depthwise_time_kernel({channels, k_t}),
        depthwise_obs_kernel({channels, k_o}),
        pointwise_weight({out_ch, channels}),
        pointwise_bias({out_ch}) {
    validate();
  }

  std::size_t channels() const { return depthwise_time_kernel.shape[0]; }
  std::size_t out_channels() const { return pointwise_weight.shape[0]; }
  std::size_t k_time() const { return depthwise_time_kernel.shape[1]; }
  std::size_t k_obs() const { return depthwise_obs_kernel.shape[1]; }

  void validate() const {
    if (k_time() % 2 == 0 || k_obs() % 2 == 0)
      throw config_error("depthwise kernels must have odd length");
    if (out_channels() < 1) throw config_error("pointwise out_ch must be >= 1");
    if (depthwise_obs_kernel.shape[0] != channels() ||
        pointwise_weight.shape[1] != channels())
      throw config_error("depthwise/pointwise channel counts disagree");
  }

  void init(Rng& rng) {
    const double bt = 1.0 / std::sqrt(static_cast<double>(k_time()));
    for (double& v : depthwise_time_kernel.data) v = uniform(rng, -bt, bt);
    const double bo = 1.0 / std::sqrt(static_cast<double>(k_obs()));
    for (double& v : depthwise_obs_kernel.data) v = uniform(rng, -bo, bo);
    const double bp = 1.0 / std::sqrt(static_cast<double>(channels()));
    for (double& v : pointwise_weight.data) v = uniform(rng, -bp, bp);
    for (double& v : pointwise_bias.data) v = 0.0;
  }

  /// Delta kernels + identity pointwise: output reproduces the input exactly.
  static DepthwiseSeparableParams identity(std::size_t channels, std::size_t k_t,
                                           std::size_t k_o) {
    DepthwiseSeparableParams p(channels, k_t, k_o, channels);
    for (std::size_t c = 0; c < channels; ++c) {
      p.depthwise_time_kernel.at(c, k_t / 2) = 1.0;
      p.depthwise_obs_kernel.at(c, k_o / 2) = 1.0;
      p.pointwise_weight.at(c, c) = 1.0;
    }
    return p;
  }
};

/// Intermediate activations kept for the backward pass.
struct ConvCache {
  Tensor x;           // [T x D]
  Tensor after_time;  // [C x T x D]
  Tensor after_obs;   // [C x T x D]
  bool valid = false;
};

namespace detail {

inline void check_conv_axis(std::size_t axis_len, std::size_t k, const char* axis) {
  // Same-padding adds (k-1)/2 zeros on each side; only an empty axis is too short.
  if (k > axis_len + k - 1 || axis_len == 0)
    throw config_error(std::string("depthwise conv: kernel of length ") +
                       std::to_string(k) + " longer than padded " + axis + " axis (" +
                       std::to_string(axis_len) + ")");
}

}  // namespace detail

inline Tensor depthwise_separable_forward(const DepthwiseSeparableParams& p,
                                          const Tensor& x,
                                          ConvCache* cache = nullptr) {
  if (x.rank() != 2) throw dim_error("depthwise conv: input must be [T x D]");
  p.validate();
  const std::size_t T = x.shape[0], D = x.shape[1];
  const std::size_t C = p.channels(), OC = p.out_channels();
  const std::size_t kt = p.k_time(), ko = p.k_obs();
  detail::check_conv_axis(T, kt, "time");
  detail::check_conv_axis(D, ko, "observation");
  const std::ptrdiff_t ht = static_cast<std::ptrdiff_t>(kt / 2);
  const std::ptrdiff_t ho = static_cast<std::ptrdiff_t>(ko / 2);

  Tensor u({C, T, D});  // after time-axis pass
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t d = 0; d < D; ++d) {
        double acc = 0.0;
        for (std::size_t i = 0; i < kt; ++i) {
          const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) +
                                     static_cast<std::ptrdiff_t>(i) - ht;
          if (src >= 0 && src < static_cast<std::ptrdiff_t>(T))
            acc += p.depthwise_time_kernel.at(c, i) *
                   x.at(static_cast<std::size_t>(src), d);
        }
        u.at(c, t, d) = acc;
      }

  Tensor w({C, T, D});  // after observation-axis pass
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t d = 0; d < D; ++d) {
        double acc = 0.0;
        for (std::size_t j = 0; j < ko; ++j) {
          const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(d) +
                                     static_cast<std::ptrdiff_t>(j) - ho;
          if (src >= 0 && src < static_cast<std::ptrdiff_t>(D))
            acc += p.depthwise_obs_kernel.at(c, j) *
                   u.at(c, t, static_cast<std::size_t>(src));
        }
        w.at(c, t, d) = acc;
      }

  Tensor y({OC, T, D});
  for (std::size_t o = 0; o < OC; ++o)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t d = 0; d < D; ++d) {
        double acc = p.pointwise_bias[o];
        for (std::size_t c = 0; c < C; ++c)
          acc += p.pointwise_weight.at(o, c) * w.at(c, t, d);
        y.at(o, t, d) = acc;
      }

  if (cache) {
    cache->x = x;
    cache->after_time = std::move(u);
    cache->after_obs = std::move(w);
    cache->valid = true;
  }
  return y;
}

struct ConvGrads {
  Tensor depthwise_time_kernel;
  Tensor depthwise_obs_kernel;
  Tensor pointwise_weight;
  Tensor pointwise_bias;

  explicit ConvGrads(const DepthwiseSeparableParams& p)
      : depthwise_time_kernel(Tensor::zeros(p.depthwise_time_kernel.shape)),
        depthwise_obs_kernel(Tensor::zeros(p.depthwise_obs_kernel.shape)),
        pointwise_weight(Tensor::zeros(p.pointwise_weight.shape)),
        pointwise_bias(Tensor::zeros(p.pointwise_bias.shape)) {}
};

inline Tensor depthwise_separable_backward(const DepthwiseSeparableParams& p,
                                           const ConvCache& cache, const Tensor& dy,
                                           ConvGrads& g) {
  if (!cache.valid)
    throw state_error("depthwise conv backward: missing forward cache");
  const std::size_t T = cache.x.shape[0], D = cache.x.shape[1];
  const std::size_t C = p.channels(), OC = p.out_channels();
  const std::size_t kt = p.k_time(), ko = p.k_obs();
  require_shape(dy, {OC, T, D}, "depthwise conv backward: output gradient");
  const std::ptrdiff_t ht = static_cast<std::ptrdiff_t>(kt / 2);
  const std::ptrdiff_t ho = static_cast<std::ptrdiff_t>(ko / 2);

  // Through the pointwise mix.
  Tensor dw({C, T, D});
  for (std::size_t o = 0; o < OC; ++o)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t d = 0; d < D; ++d) {
        const double dv = dy.at(o, t, d);
        g.pointwise_bias[o] += dv;
        for (std::size_t c = 0; c < C; ++c) {
          g.pointwise_weight.at(o, c) += dv * cache.after_obs.at(c, t, d);
          dw.at(c, t, d) += p.pointwise_weight.at(o, c) * dv;
        }
      }

  // Through the observation-axis pass.
  Tensor du({C, T, D});
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t d = 0; d < D; ++d) {
        const double dv = dw.at(c, t, d);
        for (std::size_t j = 0; j < ko; ++j) {
          const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(d) +
                                     static_cast<std::ptrdiff_t>(j) - ho;
          if (src >= 0 && src < static_cast<std::ptrdiff_t>(D)) {
            g.depthwise_obs_kernel.at(c, j) +=
                dv * cache.after_time.at(c, t, static_cast<std::size_t>(src));
            du.at(c, t, static_cast<std::size_t>(src)) +=
                p.depthwise_obs_kernel.at(c, j) * dv;
          }
        }
      }

  // Through the time-axis pass, accumulating over channels into the input.
  Tensor dx({T, D});
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t d = 0; d < D; ++d) {
        const double dv = du.at(c, t, d);
        for (std::size_t i = 0; i < kt; ++i) {
          const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) +
                                     static_cast<std::ptrdiff_t>(i) - ht;
          if (src >= 0 && src < static_cast<std::ptrdiff_t>(T)) {
            g.depthwise_time_kernel.at(c, i) +=
                dv * cache.x.at(static_cast<std::size_t>(src), d);
            dx.at(static_cast<std::size_t>(src), d) +=
                p.depthwise_time_kernel.at(c, i) * dv;
          }
        }
      }
  return dx;
}

}  // namespace caerl::nn
