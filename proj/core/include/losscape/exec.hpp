// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "losscape/batch.hpp"
#include "losscape/dual.hpp"
#include "losscape/errors.hpp"
#include "losscape/graph.hpp"

namespace losscape {

/// Per-evaluation scratch: node values, adjoints and op-specific buffers.
/// Each worker thread owns its own Workspace; the graph itself is shared
/// read-only.
template <typename S>
struct Workspace {
  std::vector<std::vector<S>> val;
  std::vector<std::vector<S>> adj;
  std::vector<std::vector<S>> aux;                // softmax probabilities
  std::vector<std::vector<std::int32_t>> pool_idx;  // maxpool argmax, per output cell
};

namespace detail {

inline std::int64_t concrete_numel(const std::vector<std::int64_t>& shape, std::int64_t batch) {
  std::int64_t n = 1;
  for (std::int64_t d : shape) n *= (d == -1 ? batch : d);
  return n;
}

}  // namespace detail

/// Forward pass over scalar type S (double for plain evaluation, Dual for
/// directional differentiation). Returns the scalar loss.
template <typename S>
S forward_pass(const Graph& g, std::span<const S> params, const Batch& batch, Workspace<S>& ws) {
  const std::int64_t B = batch.size();
  if (B < 1) throw Error(Errc::config, "forward: empty batch");
  const auto& nodes = g.nodes();
  ws.val.resize(nodes.size());
  ws.aux.resize(nodes.size());
  ws.pool_idx.resize(nodes.size());

  for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
    const Node& n = nodes[ni];
    std::vector<S>& out = ws.val[ni];
    out.assign(static_cast<std::size_t>(detail::concrete_numel(n.shape, B)), S(0.0));

    switch (n.op) {
      case OpKind::input: {
        if (batch.inputs.numel() != static_cast<std::int64_t>(out.size())) {
          throw Error(Errc::config, "forward: batch inputs do not match graph input shape");
        }
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = S(batch.inputs.values[i]);
        break;
      }
      case OpKind::constant: {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = S(n.const_values[i]);
        break;
      }
      case OpKind::param: {
        for (std::size_t i = 0; i < n.param_count; ++i) out[i] = params[n.param_offset + i];
        break;
      }
      case OpKind::matmul: {
        const auto& x = ws.val[n.inputs[0]];
        const auto& w = ws.val[n.inputs[1]];
        const std::int64_t k = nodes[n.inputs[0]].shape[1];
        const std::int64_t m = n.shape[1];
        const std::int64_t rows = n.shape[0] == -1 ? B : n.shape[0];
        for (std::int64_t b = 0; b < rows; ++b) {
          const S* xr = x.data() + b * k;
          for (std::int64_t j = 0; j < m; ++j) {
            const S* wr = w.data() + j * k;
            S acc(0.0);
            for (std::int64_t i = 0; i < k; ++i) acc += xr[i] * wr[i];
            out[b * m + j] = acc;
          }
        }
        break;
      }
      case OpKind::conv2d: {
        const auto& x = ws.val[n.inputs[0]];
        const auto& w = ws.val[n.inputs[1]];
        const std::int64_t ic = n.conv_in_c, oc = n.conv_out_c, kh = n.conv_kh, kw = n.conv_kw;
        const std::int64_t ih = nodes[n.inputs[0]].shape[2], iw = nodes[n.inputs[0]].shape[3];
        const std::int64_t oh = n.shape[2], ow = n.shape[3];
        for (std::int64_t b = 0; b < B; ++b) {
          for (std::int64_t o = 0; o < oc; ++o) {
            for (std::int64_t i = 0; i < oh; ++i) {
              for (std::int64_t j = 0; j < ow; ++j) {
                S acc(0.0);
                for (std::int64_t c = 0; c < ic; ++c) {
                  const S* xp = x.data() + ((b * ic + c) * ih + i) * iw + j;
                  const S* wp = w.data() + ((o * ic + c) * kh) * kw;
                  for (std::int64_t u = 0; u < kh; ++u) {
                    for (std::int64_t v = 0; v < kw; ++v) acc += xp[u * iw + v] * wp[u * kw + v];
                  }
                }
                out[((b * oc + o) * oh + i) * ow + j] = acc;
              }
            }
          }
        }
        break;
      }
      case OpKind::maxpool2: {
        const auto& x = ws.val[n.inputs[0]];
        const std::int64_t c = n.shape[1], oh = n.shape[2], ow = n.shape[3];
        const std::int64_t ih = nodes[n.inputs[0]].shape[2], iw = nodes[n.inputs[0]].shape[3];
        auto& idx = ws.pool_idx[ni];
        idx.assign(out.size(), 0);
        for (std::int64_t b = 0; b < B; ++b) {
          for (std::int64_t ch = 0; ch < c; ++ch) {
            const std::int64_t plane = (b * c + ch) * ih * iw;
            for (std::int64_t i = 0; i < oh; ++i) {
              for (std::int64_t j = 0; j < ow; ++j) {
                std::int64_t best = plane + (2 * i) * iw + 2 * j;
                double bv = value_of(x[best]);
                for (int u = 0; u < 2; ++u) {
                  for (int v = 0; v < 2; ++v) {
                    std::int64_t p = plane + (2 * i + u) * iw + (2 * j + v);
                    if (value_of(x[p]) > bv) {  // first maximum wins ties
                      bv = value_of(x[p]);
                      best = p;
                    }
                  }
                }
                std::int64_t oi = ((b * c + ch) * oh + i) * ow + j;
                out[oi] = x[best];
                idx[oi] = static_cast<std::int32_t>(best - plane);
              }
            }
          }
        }
        break;
      }
      case OpKind::flatten: {
        out = ws.val[n.inputs[0]];  // row-major layout is unchanged
        break;
      }
      case OpKind::relu: {
        const auto& x = ws.val[n.inputs[0]];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = value_of(x[i]) > 0.0 ? x[i] : S(0.0);
        break;
      }
      case OpKind::tanh_act: {
        const auto& x = ws.val[n.inputs[0]];
        using std::tanh;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = tanh(x[i]);
        break;
      }
      case OpKind::bias_add: {
        const auto& x = ws.val[n.inputs[0]];
        const auto& bv = ws.val[n.inputs[1]];
        if (n.shape.size() == 2) {
          const std::int64_t m = n.shape[1];
          for (std::int64_t b = 0; b < B; ++b) {
            for (std::int64_t j = 0; j < m; ++j) out[b * m + j] = x[b * m + j] + bv[j];
          }
        } else {
          const std::int64_t c = n.shape[1], hw = n.shape[2] * n.shape[3];
          for (std::int64_t b = 0; b < B; ++b) {
            for (std::int64_t ch = 0; ch < c; ++ch) {
              const std::int64_t base = (b * c + ch) * hw;
              for (std::int64_t p = 0; p < hw; ++p) out[base + p] = x[base + p] + bv[ch];
            }
          }
        }
        break;
      }
      case OpKind::batchnorm: {
        const auto& x = ws.val[n.inputs[0]];
        const auto& gamma = ws.val[n.inputs[1]];
        const auto& beta = ws.val[n.inputs[2]];
        const std::int64_t c = n.shape[1];
        const std::int64_t hw = n.shape.size() == 4 ? n.shape[2] * n.shape[3] : 1;
        for (std::int64_t b = 0; b < B; ++b) {
          for (std::int64_t ch = 0; ch < c; ++ch) {
            const double inv = 1.0 / std::sqrt(n.const_values2[ch] + n.scalar);
            const double mean = n.const_values[ch];
            const std::int64_t base = (b * c + ch) * hw;
            for (std::int64_t p = 0; p < hw; ++p) {
              out[base + p] = gamma[ch] * ((x[base + p] - S(mean)) * S(inv)) + beta[ch];
            }
          }
        }
        break;
      }
      case OpKind::softmax_xent: {
        const auto& z = ws.val[n.inputs[0]];
        const std::int64_t c = nodes[n.inputs[0]].shape[1];
        if (static_cast<std::int64_t>(batch.labels.size()) != B) {
          throw Error(Errc::config, "softmax_xent: batch has no labels");
        }
        auto& probs = ws.aux[ni];
        probs.assign(static_cast<std::size_t>(B * c), S(0.0));
        S total(0.0);
        for (std::int64_t b = 0; b < B; ++b) {
          const S* zr = z.data() + b * c;
          double zmax = value_of(zr[0]);
          for (std::int64_t j = 1; j < c; ++j) zmax = std::max(zmax, value_of(zr[j]));
          S sum(0.0);
          for (std::int64_t j = 0; j < c; ++j) {
            using losscape::exp;
            using std::exp;
            S e = exp(zr[j] - S(zmax));
            probs[b * c + j] = e;  // scaled by 1/sum below
            sum += e;
          }
          using losscape::log;
          using std::log;
          S lse = S(zmax) + log(sum);
          for (std::int64_t j = 0; j < c; ++j) probs[b * c + j] = probs[b * c + j] / sum;
          int label = batch.labels[static_cast<std::size_t>(b)];
          if (label < 0 || label >= c) throw Error(Errc::config, "softmax_xent: label out of range");
          total += lse - zr[label];
        }
        out[0] = total * S(1.0 / static_cast<double>(B));
        break;
      }
      case OpKind::mse: {
        const auto& x = ws.val[n.inputs[0]];
        if (batch.targets.numel() != static_cast<std::int64_t>(x.size())) {
          throw Error(Errc::config, "mse: batch targets do not match prediction shape");
        }
        S total(0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
          S d = x[i] - S(batch.targets.values[i]);
          total += d * d;
        }
        out[0] = total * S(1.0 / static_cast<double>(x.size()));
        break;
      }
      case OpKind::mul: {
        const auto& a = ws.val[n.inputs[0]];
        const auto& b = ws.val[n.inputs[1]];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
        break;
      }
      case OpKind::sum: {
        const auto& x = ws.val[n.inputs[0]];
        S total(0.0);
        for (const S& v : x) total += v;
        out[0] = total;
        break;
      }
      case OpKind::scale: {
        const auto& x = ws.val[n.inputs[0]];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * S(n.scalar);
        break;
      }
    }
  }

  S loss = ws.val[g.output()][0];
  if (!std::isfinite(value_of(loss))) {
    throw Error(Errc::numeric, "forward: non-finite loss value");
  }
  return loss;
}

/// Reverse pass; forward_pass must have filled `ws` for the same inputs.
/// Accumulates d(loss)/d(params) into `grad` (grad must be zero-initialized
/// by the caller; size = layout total count).
template <typename S>
void backward_pass(const Graph& g, std::span<const S> /*params*/, const Batch& batch,
                   Workspace<S>& ws, std::span<S> grad) {
  const std::int64_t B = batch.size();
  const auto& nodes = g.nodes();
  ws.adj.resize(nodes.size());
  for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
    ws.adj[ni].assign(ws.val[ni].size(), S(0.0));
  }
  ws.adj[g.output()][0] = S(1.0);

  for (std::size_t ri = nodes.size(); ri-- > 0;) {
    const Node& n = nodes[ri];
    const auto& ybar = ws.adj[ri];

    switch (n.op) {
      case OpKind::input:
      case OpKind::constant:
        break;
      case OpKind::param: {
        for (std::size_t i = 0; i < n.param_count; ++i) grad[n.param_offset + i] += ybar[i];
        break;
      }
      case OpKind::matmul: {
        auto& xbar = ws.adj[n.inputs[0]];
        auto& wbar = ws.adj[n.inputs[1]];
        const auto& x = ws.val[n.inputs[0]];
        const auto& w = ws.val[n.inputs[1]];
        const std::int64_t k = nodes[n.inputs[0]].shape[1];
        const std::int64_t m = n.shape[1];
        const std::int64_t rows = n.shape[0] == -1 ? B : n.shape[0];
        for (std::int64_t b = 0; b < rows; ++b) {
          for (std::int64_t j = 0; j < m; ++j) {
            const S yb = ybar[b * m + j];
            const S* wr = w.data() + j * k;
            const S* xr = x.data() + b * k;
            S* xbr = xbar.data() + b * k;
            S* wbr = wbar.data() + j * k;
            for (std::int64_t i = 0; i < k; ++i) {
              xbr[i] += yb * wr[i];
              wbr[i] += yb * xr[i];
            }
          }
        }
        break;
      }
      case OpKind::conv2d: {
        auto& xbar = ws.adj[n.inputs[0]];
        auto& wbar = ws.adj[n.inputs[1]];
        const auto& x = ws.val[n.inputs[0]];
        const auto& w = ws.val[n.inputs[1]];
        const std::int64_t ic = n.conv_in_c, oc = n.conv_out_c, kh = n.conv_kh, kw = n.conv_kw;
        const std::int64_t ih = nodes[n.inputs[0]].shape[2], iw = nodes[n.inputs[0]].shape[3];
        const std::int64_t oh = n.shape[2], ow = n.shape[3];
        for (std::int64_t b = 0; b < B; ++b) {
          for (std::int64_t o = 0; o < oc; ++o) {
            for (std::int64_t i = 0; i < oh; ++i) {
              for (std::int64_t j = 0; j < ow; ++j) {
                const S yb = ybar[((b * oc + o) * oh + i) * ow + j];
                for (std::int64_t c = 0; c < ic; ++c) {
                  const std::int64_t xoff = ((b * ic + c) * ih + i) * iw + j;
                  const std::int64_t woff = ((o * ic + c) * kh) * kw;
                  for (std::int64_t u = 0; u < kh; ++u) {
                    for (std::int64_t v = 0; v < kw; ++v) {
                      xbar[xoff + u * iw + v] += yb * w[woff + u * kw + v];
                      wbar[woff + u * kw + v] += yb * x[xoff + u * iw + v];
                    }
                  }
                }
              }
            }
          }
        }
        break;
      }
      case OpKind::maxpool2: {
        auto& xbar = ws.adj[n.inputs[0]];
        const auto& idx = ws.pool_idx[ri];
        const std::int64_t c = n.shape[1], oh = n.shape[2], ow = n.shape[3];
        const std::int64_t ih = nodes[n.inputs[0]].shape[2], iw = nodes[n.inputs[0]].shape[3];
        for (std::int64_t b = 0; b < B; ++b) {
          for (std::int64_t ch = 0; ch < c; ++ch) {
            const std::int64_t plane = (b * c + ch) * ih * iw;
            for (std::int64_t p = 0; p < oh * ow; ++p) {
              const std::int64_t oi = (b * c + ch) * oh * ow + p;
              xbar[plane + idx[oi]] += ybar[oi];
            }
          }
        }
        break;
      }
      case OpKind::flatten: {
        auto& xbar = ws.adj[n.inputs[0]];
        for (std::size_t i = 0; i < xbar.size(); ++i) xbar[i] += ybar[i];
        break;
      }
      case OpKind::relu: {
        auto& xbar = ws.adj[n.inputs[0]];
        const auto& x = ws.val[n.inputs[0]];
        for (std::size_t i = 0; i < xbar.size(); ++i) {
          if (value_of(x[i]) > 0.0) xbar[i] += ybar[i];
        }
        break;
      }
      case OpKind::tanh_act: {
        auto& xbar = ws.adj[n.inputs[0]];
        const auto& y = ws.val[ri];
        for (std::size_t i = 0; i < xbar.size(); ++i) {
          xbar[i] += ybar[i] * (S(1.0) - y[i] * y[i]);
        }
        break;
      }
      case OpKind::bias_add: {
        auto& xbar = ws.adj[n.inputs[0]];
        auto& bbar = ws.adj[n.inputs[1]];
        if (n.shape.size() == 2) {
          const std::int64_t m = n.shape[1];
          for (std::int64_t b = 0; b < B; ++b) {
            for (std::int64_t j = 0; j < m; ++j) {
              xbar[b * m + j] += ybar[b * m + j];
              bbar[j] += ybar[b * m + j];
            }
          }
        } else {
          const std::int64_t c = n.shape[1], hw = n.shape[2] * n.shape[3];
          for (std::int64_t b = 0; b < B; ++b) {
            for (std::int64_t ch = 0; ch < c; ++ch) {
              const std::int64_t base = (b * c + ch) * hw;
              for (std::int64_t p = 0; p < hw; ++p) {
                xbar[base + p] += ybar[base + p];
                bbar[ch] += ybar[base + p];
              }
            }
          }
        }
        break;
      }
      case OpKind::batchnorm: {
        auto& xbar = ws.adj[n.inputs[0]];
        auto& gbar = ws.adj[n.inputs[1]];
        auto& bbar = ws.adj[n.inputs[2]];
        const auto& x = ws.val[n.inputs[0]];
        const auto& gamma = ws.val[n.inputs[1]];
        const std::int64_t c = n.shape[1];
        const std::int64_t hw = n.shape.size() == 4 ? n.shape[2] * n.shape[3] : 1;
        for (std::int64_t b = 0; b < B; ++b) {
          for (std::int64_t ch = 0; ch < c; ++ch) {
            const double inv = 1.0 / std::sqrt(n.const_values2[ch] + n.scalar);
            const double mean = n.const_values[ch];
            const std::int64_t base = (b * c + ch) * hw;
            for (std::int64_t p = 0; p < hw; ++p) {
              const S yb = ybar[base + p];
              xbar[base + p] += yb * gamma[ch] * S(inv);
              gbar[ch] += yb * ((x[base + p] - S(mean)) * S(inv));
              bbar[ch] += yb;
            }
          }
        }
        break;
      }
      case OpKind::softmax_xent: {
        auto& zbar = ws.adj[n.inputs[0]];
        const auto& probs = ws.aux[ri];
        const std::int64_t c = nodes[n.inputs[0]].shape[1];
        const S w = ybar[0] * S(1.0 / static_cast<double>(B));
        for (std::int64_t b = 0; b < B; ++b) {
          const int label = batch.labels[static_cast<std::size_t>(b)];
          for (std::int64_t j = 0; j < c; ++j) {
            S p = probs[b * c + j];
            if (j == label) p -= S(1.0);
            zbar[b * c + j] += w * p;
          }
        }
        break;
      }
      case OpKind::mse: {
        auto& xbar = ws.adj[n.inputs[0]];
        const auto& x = ws.val[n.inputs[0]];
        const S w = ybar[0] * S(2.0 / static_cast<double>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) {
          xbar[i] += w * (x[i] - S(batch.targets.values[i]));
        }
        break;
      }
      case OpKind::mul: {
        auto& abar = ws.adj[n.inputs[0]];
        auto& bbar = ws.adj[n.inputs[1]];
        const auto& a = ws.val[n.inputs[0]];
        const auto& b = ws.val[n.inputs[1]];
        for (std::size_t i = 0; i < a.size(); ++i) {
          abar[i] += ybar[i] * b[i];
          bbar[i] += ybar[i] * a[i];
        }
        break;
      }
      case OpKind::sum: {
        auto& xbar = ws.adj[n.inputs[0]];
        for (S& v : xbar) v += ybar[0];
        break;
      }
      case OpKind::scale: {
        auto& xbar = ws.adj[n.inputs[0]];
        for (std::size_t i = 0; i < xbar.size(); ++i) xbar[i] += ybar[i] * S(n.scalar);
        break;
      }
    }
  }
}

}  // namespace losscape
