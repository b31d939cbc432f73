#pragma once

#include "caerl/nn/attention.hpp"
#include "caerl/nn/conv.hpp"
#include "caerl/nn/linear.hpp"
#include "caerl/nn/pooling.hpp"

namespace caerl {

/// History encoder: depthwise separable convolution over the [rows x D]
/// window, a learned projection of each time step's stacked channel features
/// to d_model, multi-head self-attention across time, then average pooling
/// into a single d_model vector. Output width is d_model for any row count.
struct EncoderParams {
  nn::DepthwiseSeparableParams conv;
  nn::LinearParams input_projection;  // [channels*D -> d_model]
  nn::AttentionParams attention;
  std::size_t d_model = 0;

  EncoderParams() = default;
  EncoderParams(std::size_t feature_dim, std::size_t dm, std::size_t heads,
                std::size_t channels, std::size_t k_t, std::size_t k_o)
      : conv(channels, k_t, k_o, channels),
        input_projection(dm, channels * feature_dim),
        attention(heads, dm),
        d_model(dm) {
    if (input_projection.out_dim() != attention.d_model)
      throw config_error("encoder: projection output must equal attention d_model");
  }

  std::size_t feature_dim() const {
    return input_projection.in_dim() / conv.out_channels();
  }

  void init(Rng& rng) {
    conv.init(rng);
    input_projection.init(rng);
    attention.init(rng);
  }
};

struct EncodedHistory {
  Tensor hidden;  // [d_model]
};

struct EncoderCache {
  nn::ConvCache conv;
  Tensor tokens;  // [T x channels*D]
  nn::AttentionCache attn;
  std::size_t rows = 0;
  bool valid = false;
};

inline Tensor encode_raw(const EncoderParams& p, const Tensor& window,
                         EncoderCache* cache = nullptr) {
  if (window.rank() != 2 || window.shape[1] != p.feature_dim())
    throw dim_error("encode: window " + window.shape_str() +
                    " does not match feature dim " + std::to_string(p.feature_dim()));
  const std::size_t T = window.shape[0], D = window.shape[1];
  const std::size_t C = p.conv.out_channels();

  Tensor conv_out =
      nn::depthwise_separable_forward(p.conv, window, cache ? &cache->conv : nullptr);

  // Stack channels per time step: token t = [conv_out[c][t][d] for c, d].
  Tensor tokens({T, C * D});
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t d = 0; d < D; ++d)
        tokens.at(t, c * D + d) = conv_out.at(c, t, d);

  Tensor projected = nn::linear_forward_rows(p.input_projection, tokens,
                                             "encoder projection");
  Tensor attended = nn::multi_head_attention_forward(p.attention, projected,
                                                     cache ? &cache->attn : nullptr);
  Tensor hidden = nn::average_pool(attended);
  if (cache) {
    cache->tokens = std::move(tokens);
    cache->rows = T;
    cache->valid = true;
  }
  return hidden;
}

inline EncodedHistory encode(const EncoderParams& p, const Tensor& window) {
  return EncodedHistory{encode_raw(p, window)};
}

struct EncoderGrads {
  nn::ConvGrads conv;
  nn::LinearGrads input_projection;
  nn::AttentionGrads attention;

  explicit EncoderGrads(const EncoderParams& p)
      : conv(p.conv), input_projection(p.input_projection), attention(p.attention) {}
};

/// Chain rule through pool -> attention -> projection -> conv; returns the
/// gradient w.r.t. the window.
inline Tensor encoder_backward(const EncoderParams& p, const EncoderCache& cache,
                               const Tensor& d_hidden, EncoderGrads& g) {
  if (!cache.valid) throw state_error("encoder backward: missing forward cache");
  const std::size_t T = cache.rows, D = p.feature_dim();
  const std::size_t C = p.conv.out_channels();

  Tensor d_attended = nn::average_pool_backward(T, d_hidden);
  Tensor d_projected =
      nn::multi_head_attention_backward(p.attention, cache.attn, d_attended,
                                        g.attention);
  Tensor d_tokens = nn::linear_backward_rows(p.input_projection, cache.tokens,
                                             d_projected, g.input_projection);

  Tensor d_conv_out({C, T, D});
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t d = 0; d < D; ++d)
        d_conv_out.at(c, t, d) = d_tokens.at(t, c * D + d);

  return nn::depthwise_separable_backward(p.conv, cache.conv, d_conv_out, g.conv);
}

// ---------------------------------------------------------------------------
// Pooling-based normalization at the actor/critic inputs: root-mean-square
// over the feature axis, parameter-free. Zero maps to zero.
// ---------------------------------------------------------------------------

inline constexpr double kNormEps = 1e-5;

inline Tensor pool_normalize(const Tensor& x) {
  if (x.rank() != 1 || x.numel() == 0)
    throw dim_error("pool_normalize: need a non-empty vector");
  double ms = 0.0;
  for (double v : x.data) ms += v * v;
  ms /= static_cast<double>(x.numel());
  const double scale = 1.0 / std::sqrt(ms + kNormEps);
  Tensor y = x;
  for (double& v : y.data) v *= scale;
  return y;
}

inline Tensor pool_normalize_backward(const Tensor& x, const Tensor& dy) {
  const std::size_t D = x.numel();
  double ms = 0.0;
  for (double v : x.data) ms += v * v;
  ms /= static_cast<double>(D);
  const double s = std::sqrt(ms + kNormEps);
  double dot = 0.0;
  for (std::size_t i = 0; i < D; ++i) dot += dy[i] * x[i];
  Tensor dx({D});
  const double s3 = s * s * s;
  for (std::size_t j = 0; j < D; ++j)
    dx[j] = dy[j] / s - dot * x[j] / (static_cast<double>(D) * s3);
  return dx;
}

}  // namespace caerl
