#pragma once

#include <cmath>

#include "caerl/rng.hpp"
#include "caerl/tensor.hpp"

namespace caerl::nn {

/// Multi-head self-attention: softmax(Q K^T / sqrt(d_k)) V per head, heads
/// concatenated and projected by W_o. Q, K, V are all projections of the
/// same input rows.
struct AttentionParams {
  std::size_t num_heads = 1;
  std::size_t d_model = 0;
  Tensor W_q, W_k, W_v, W_o;  // each [d_model x d_model]

  AttentionParams() = default;
  AttentionParams(std::size_t heads, std::size_t dm)
      : num_heads(heads),
        d_model(dm),
        W_q({dm, dm}),
        W_k({dm, dm}),
        W_v({dm, dm}),
        W_o({dm, dm}) {
    validate();
  }

  std::size_t d_k() const { return d_model / num_heads; }

  void validate() const {
    if (num_heads == 0 || d_model == 0 || d_model % num_heads != 0)
      throw config_error("attention: d_model (" + std::to_string(d_model) +
                         ") must be divisible by num_heads (" +
                         std::to_string(num_heads) + ")");
  }

  void init(Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_model));
    for (Tensor* w : {&W_q, &W_k, &W_v, &W_o})
      for (double& v : w->data) v = uniform(rng, -bound, bound);
  }
};

struct AttentionCache {
  Tensor x;        // [L x d_model]
  Tensor q, k, v;  // [L x d_model]
  Tensor weights;  // [H x L x L], softmax rows
  Tensor context;  // [L x d_model], heads concatenated
  bool valid = false;
};

inline Tensor multi_head_attention_forward(const AttentionParams& p, const Tensor& x,
                                           AttentionCache* cache = nullptr) {
  p.validate();
  if (x.rank() != 2 || x.shape[1] != p.d_model)
    throw dim_error("attention: input " + x.shape_str() + " does not match d_model " +
                    std::to_string(p.d_model));
  const std::size_t L = x.shape[0], M = p.d_model, H = p.num_heads, dk = p.d_k();
  if (L < 1) throw dim_error("attention: empty sequence");
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  auto project = [&](const Tensor& w) {
    Tensor out({L, M});
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t o = 0; o < M; ++o) {
        double acc = 0.0;
        for (std::size_t m = 0; m < M; ++m) acc += w.at(o, m) * x.at(i, m);
        out.at(i, o) = acc;
      }
    return out;
  };
  Tensor q = project(p.W_q), k = project(p.W_k), v = project(p.W_v);

  Tensor weights({H, L, L});
  Tensor context({L, M});
  std::vector<double> logits(L);
  for (std::size_t h = 0; h < H; ++h) {
    const std::size_t base = h * dk;
    for (std::size_t i = 0; i < L; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < L; ++j) {
        double s = 0.0;
        for (std::size_t d = 0; d < dk; ++d)
          s += q.at(i, base + d) * k.at(j, base + d);
        logits[j] = s * scale;
        mx = std::max(mx, logits[j]);
      }
      double z = 0.0;
      for (std::size_t j = 0; j < L; ++j) {
        weights.at(h, i, j) = std::exp(logits[j] - mx);
        z += weights.at(h, i, j);
      }
      for (std::size_t j = 0; j < L; ++j) {
        weights.at(h, i, j) /= z;
        for (std::size_t d = 0; d < dk; ++d)
          context.at(i, base + d) += weights.at(h, i, j) * v.at(j, base + d);
      }
    }
  }

  Tensor y({L, M});
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t o = 0; o < M; ++o) {
      double acc = 0.0;
      for (std::size_t m = 0; m < M; ++m) acc += p.W_o.at(o, m) * context.at(i, m);
      y.at(i, o) = acc;
    }

  if (cache) {
    cache->x = x;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->weights = std::move(weights);
    cache->context = std::move(context);
    cache->valid = true;
  }
  return y;
}

struct AttentionGrads {
  Tensor W_q, W_k, W_v, W_o;

  explicit AttentionGrads(const AttentionParams& p)
      : W_q(Tensor::zeros(p.W_q.shape)),
        W_k(Tensor::zeros(p.W_k.shape)),
        W_v(Tensor::zeros(p.W_v.shape)),
        W_o(Tensor::zeros(p.W_o.shape)) {}
};

inline Tensor multi_head_attention_backward(const AttentionParams& p,
                                            const AttentionCache& cache,
                                            const Tensor& dy, AttentionGrads& g) {
  if (!cache.valid) throw state_error("attention backward: missing forward cache");
  const std::size_t L = cache.x.shape[0], M = p.d_model, H = p.num_heads,
                    dk = p.d_k();
  require_shape(dy, {L, M}, "attention backward: output gradient");
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  // Output projection.
  Tensor dctx({L, M});
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t o = 0; o < M; ++o) {
      const double d = dy.at(i, o);
      for (std::size_t m = 0; m < M; ++m) {
        g.W_o.at(o, m) += d * cache.context.at(i, m);
        dctx.at(i, m) += p.W_o.at(o, m) * d;
      }
    }

  Tensor dq({L, M}), dkk({L, M}), dv({L, M});
  std::vector<double> dA(L), dS(L);
  for (std::size_t h = 0; h < H; ++h) {
    const std::size_t base = h * dk;
    for (std::size_t i = 0; i < L; ++i) {
      // dA[i][j] and the softmax Jacobian, row by row.
      double dot = 0.0;
      for (std::size_t j = 0; j < L; ++j) {
        double acc = 0.0;
        for (std::size_t d = 0; d < dk; ++d)
          acc += dctx.at(i, base + d) * cache.v.at(j, base + d);
        dA[j] = acc;
        dot += acc * cache.weights.at(h, i, j);
      }
      for (std::size_t j = 0; j < L; ++j) {
        const double a = cache.weights.at(h, i, j);
        dS[j] = a * (dA[j] - dot);
        for (std::size_t d = 0; d < dk; ++d)
          dv.at(j, base + d) += a * dctx.at(i, base + d);
      }
      for (std::size_t j = 0; j < L; ++j) {
        const double s = dS[j] * scale;
        for (std::size_t d = 0; d < dk; ++d) {
          dq.at(i, base + d) += s * cache.k.at(j, base + d);
          dkk.at(j, base + d) += s * cache.q.at(i, base + d);
        }
      }
    }
  }

  // Input projections; gradients accumulate across q/k/v paths.
  Tensor dx({L, M});
  auto through_projection = [&](const Tensor& w, Tensor& gw, const Tensor& dproj) {
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t o = 0; o < M; ++o) {
        const double d = dproj.at(i, o);
        for (std::size_t m = 0; m < M; ++m) {
          gw.at(o, m) += d * cache.x.at(i, m);
          dx.at(i, m) += w.at(o, m) * d;
        }
      }
  };
  through_projection(p.W_q, g.W_q, dq);
  through_projection(p.W_k, g.W_k, dkk);
  through_projection(p.W_v, g.W_v, dv);
  return dx;
}

}  // namespace caerl::nn
