#ifndef RONIN_NN_OPS_HPP
#define RONIN_NN_OPS_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "ronin/tensor.hpp"

// Low-level differentiable ops. Each forward has a matching backward that
// accumulates into caller-provided gradient tensors; loop order is fixed so
// results are bit-reproducible.

namespace ronin {

// ---------------------------------------------------------------------------
// conv2d, square kernel, zero padding. weight (cout, cin, k, k), bias (cout).
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> conv2d_fwd(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                     int stride, int pad) {
  const int batch = x.b(), cin = x.c(), h = x.h(), wd = x.w();
  const int cout = w.b(), k = w.h();
  check_arg(w.c() == cin, "conv2d: channel mismatch");
  const int oh = (h + 2 * pad - k) / stride + 1;
  const int ow = (wd + 2 * pad - k) / stride + 1;
  Tensor<T> y(batch, cout, oh, ow);
  for (int bi = 0; bi < batch; ++bi)
    for (int co = 0; co < cout; ++co) {
      const T bias = b[static_cast<std::size_t>(co)];
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          T acc = bias;
          for (int ci = 0; ci < cin; ++ci)
            for (int ky = 0; ky < k; ++ky) {
              const int iy = oy * stride - pad + ky;
              if (iy < 0 || iy >= h) continue;
              for (int kx = 0; kx < k; ++kx) {
                const int ix = ox * stride - pad + kx;
                if (ix < 0 || ix >= wd) continue;
                acc += x.at(bi, ci, iy, ix) * w.at(co, ci, ky, kx);
              }
            }
          y.at(bi, co, oy, ox) = acc;
        }
    }
  return y;
}

template <class T>
void conv2d_bwd(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy,
                int stride, int pad, Tensor<T>& dx, Tensor<T>& dw,
                Tensor<T>& db) {
  const int batch = x.b(), cin = x.c(), h = x.h(), wd = x.w();
  const int cout = w.b(), k = w.h();
  const int oh = dy.h(), ow = dy.w();
  for (int bi = 0; bi < batch; ++bi)
    for (int co = 0; co < cout; ++co)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          const T g = dy.at(bi, co, oy, ox);
          db[static_cast<std::size_t>(co)] += g;
          for (int ci = 0; ci < cin; ++ci)
            for (int ky = 0; ky < k; ++ky) {
              const int iy = oy * stride - pad + ky;
              if (iy < 0 || iy >= h) continue;
              for (int kx = 0; kx < k; ++kx) {
                const int ix = ox * stride - pad + kx;
                if (ix < 0 || ix >= wd) continue;
                dx.at(bi, ci, iy, ix) += g * w.at(co, ci, ky, kx);
                dw.at(co, ci, ky, kx) += g * x.at(bi, ci, iy, ix);
              }
            }
        }
}

// ---------------------------------------------------------------------------
// Elementwise nonlinearities. Backward takes the stored pre-activation.
// ---------------------------------------------------------------------------

template <class T>
T gelu_scalar(T x) {
  return T(0.5) * x * (T(1) + std::erf(x * T(0.7071067811865475)));
}

template <class T>
T gelu_grad_scalar(T x) {
  const T phi = T(0.3989422804014327) * std::exp(T(-0.5) * x * x);
  return T(0.5) * (T(1) + std::erf(x * T(0.7071067811865475))) + x * phi;
}

template <class T>
Tensor<T> gelu_fwd(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = gelu_scalar(x[i]);
  return y;
}

template <class T>
void gelu_bwd(const Tensor<T>& x_pre, const Tensor<T>& dy, Tensor<T>& dx) {
  for (std::size_t i = 0; i < dy.size(); ++i)
    dx[i] += dy[i] * gelu_grad_scalar(x_pre[i]);
}

template <class T>
T sigmoid_scalar(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <class T>
Tensor<T> sigmoid_fwd(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = sigmoid_scalar(x[i]);
  return y;
}

// Backward from the stored post-activation y = sigmoid(x).
template <class T>
void sigmoid_bwd(const Tensor<T>& y_post, const Tensor<T>& dy, Tensor<T>& dx) {
  for (std::size_t i = 0; i < dy.size(); ++i)
    dx[i] += dy[i] * y_post[i] * (T(1) - y_post[i]);
}

// ---------------------------------------------------------------------------
// Nearest-neighbor 2x upsample.
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> upsample2_fwd(const Tensor<T>& x) {
  Tensor<T> y(x.b(), x.c(), x.h() * 2, x.w() * 2);
  for (int bi = 0; bi < x.b(); ++bi)
    for (int ci = 0; ci < x.c(); ++ci)
      for (int iy = 0; iy < x.h(); ++iy)
        for (int ix = 0; ix < x.w(); ++ix) {
          const T v = x.at(bi, ci, iy, ix);
          y.at(bi, ci, 2 * iy, 2 * ix) = v;
          y.at(bi, ci, 2 * iy, 2 * ix + 1) = v;
          y.at(bi, ci, 2 * iy + 1, 2 * ix) = v;
          y.at(bi, ci, 2 * iy + 1, 2 * ix + 1) = v;
        }
  return y;
}

template <class T>
void upsample2_bwd(const Tensor<T>& dy, Tensor<T>& dx) {
  for (int bi = 0; bi < dx.b(); ++bi)
    for (int ci = 0; ci < dx.c(); ++ci)
      for (int iy = 0; iy < dx.h(); ++iy)
        for (int ix = 0; ix < dx.w(); ++ix)
          dx.at(bi, ci, iy, ix) += dy.at(bi, ci, 2 * iy, 2 * ix) +
                                   dy.at(bi, ci, 2 * iy, 2 * ix + 1) +
                                   dy.at(bi, ci, 2 * iy + 1, 2 * ix) +
                                   dy.at(bi, ci, 2 * iy + 1, 2 * ix + 1);
}

// ---------------------------------------------------------------------------
// Bucketed average pool to a gy x gx grid (attention key/value tokens).
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> pool_grid_fwd(const Tensor<T>& x, int gy, int gx) {
  check_arg(gy >= 1 && gy <= x.h() && gx >= 1 && gx <= x.w(),
            "pool_grid: bad grid");
  Tensor<T> y(x.b(), x.c(), gy, gx);
  for (int bi = 0; bi < x.b(); ++bi)
    for (int ci = 0; ci < x.c(); ++ci)
      for (int oy = 0; oy < gy; ++oy)
        for (int ox = 0; ox < gx; ++ox) {
          const int y0 = oy * x.h() / gy, y1 = (oy + 1) * x.h() / gy;
          const int x0 = ox * x.w() / gx, x1 = (ox + 1) * x.w() / gx;
          T acc = T(0);
          for (int iy = y0; iy < y1; ++iy)
            for (int ix = x0; ix < x1; ++ix) acc += x.at(bi, ci, iy, ix);
          y.at(bi, ci, oy, ox) = acc / static_cast<T>((y1 - y0) * (x1 - x0));
        }
  return y;
}

template <class T>
void pool_grid_bwd(const Tensor<T>& dy, Tensor<T>& dx) {
  const int gy = dy.h(), gx = dy.w();
  for (int bi = 0; bi < dx.b(); ++bi)
    for (int ci = 0; ci < dx.c(); ++ci)
      for (int oy = 0; oy < gy; ++oy)
        for (int ox = 0; ox < gx; ++ox) {
          const int y0 = oy * dx.h() / gy, y1 = (oy + 1) * dx.h() / gy;
          const int x0 = ox * dx.w() / gx, x1 = (ox + 1) * dx.w() / gx;
          const T g = dy.at(bi, ci, oy, ox) /
                      static_cast<T>((y1 - y0) * (x1 - x0));
          for (int iy = y0; iy < y1; ++iy)
            for (int ix = x0; ix < x1; ++ix) dx.at(bi, ci, iy, ix) += g;
        }
}

// ---------------------------------------------------------------------------
// Global average pooling: (b, c, h, w) -> (b, c).
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> gap_fwd(const Tensor<T>& x) {
  check_arg(x.h() >= 1 && x.w() >= 1, "gap: empty spatial dims");
  Tensor<T> y = Tensor<T>::matrix(x.b(), x.c());
  const T inv = T(1) / static_cast<T>(x.h() * x.w());
  for (int bi = 0; bi < x.b(); ++bi)
    for (int ci = 0; ci < x.c(); ++ci) {
      T acc = T(0);
      for (int iy = 0; iy < x.h(); ++iy)
        for (int ix = 0; ix < x.w(); ++ix) acc += x.at(bi, ci, iy, ix);
      y.at(bi, ci, 0, 0) = acc * inv;
    }
  return y;
}

template <class T>
void gap_bwd(const Tensor<T>& dy, Tensor<T>& dx) {
  const T inv = T(1) / static_cast<T>(dx.h() * dx.w());
  for (int bi = 0; bi < dx.b(); ++bi)
    for (int ci = 0; ci < dx.c(); ++ci) {
      const T g = dy.at(bi, ci, 0, 0) * inv;
      for (int iy = 0; iy < dx.h(); ++iy)
        for (int ix = 0; ix < dx.w(); ++ix) dx.at(bi, ci, iy, ix) += g;
    }
}

// ---------------------------------------------------------------------------
// Fully connected on (b, n) matrices. weight (m, n), bias (m).
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> linear_fwd(const Tensor<T>& x, const Tensor<T>& w,
                     const Tensor<T>& b) {
  const int batch = x.b(), n = x.c(), m = w.b();
  check_arg(w.c() == n, "linear: dimension mismatch");
  Tensor<T> y = Tensor<T>::matrix(batch, m);
  for (int bi = 0; bi < batch; ++bi)
    for (int o = 0; o < m; ++o) {
      T acc = b[static_cast<std::size_t>(o)];
      for (int i = 0; i < n; ++i)
        acc += x.at(bi, i, 0, 0) * w.at(o, i, 0, 0);
      y.at(bi, o, 0, 0) = acc;
    }
  return y;
}

template <class T>
void linear_bwd(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy,
                Tensor<T>& dx, Tensor<T>& dw, Tensor<T>& db) {
  const int batch = x.b(), n = x.c(), m = w.b();
  for (int bi = 0; bi < batch; ++bi)
    for (int o = 0; o < m; ++o) {
      const T g = dy.at(bi, o, 0, 0);
      db[static_cast<std::size_t>(o)] += g;
      for (int i = 0; i < n; ++i) {
        dx.at(bi, i, 0, 0) += g * w.at(o, i, 0, 0);
        dw.at(o, i, 0, 0) += g * x.at(bi, i, 0, 0);
      }
    }
}

// ---------------------------------------------------------------------------
// Channel concat of two maps with equal spatial dims.
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> concat_c(const Tensor<T>& a, const Tensor<T>& b) {
  check_arg(a.b() == b.b() && a.h() == b.h() && a.w() == b.w(),
            "concat_c: spatial mismatch");
  Tensor<T> y(a.b(), a.c() + b.c(), a.h(), a.w());
  for (int bi = 0; bi < a.b(); ++bi) {
    for (int ci = 0; ci < a.c(); ++ci)
      for (int iy = 0; iy < a.h(); ++iy)
        for (int ix = 0; ix < a.w(); ++ix)
          y.at(bi, ci, iy, ix) = a.at(bi, ci, iy, ix);
    for (int ci = 0; ci < b.c(); ++ci)
      for (int iy = 0; iy < a.h(); ++iy)
        for (int ix = 0; ix < a.w(); ++ix)
          y.at(bi, a.c() + ci, iy, ix) = b.at(bi, ci, iy, ix);
  }
  return y;
}

template <class T>
void split_c_bwd(const Tensor<T>& dy, Tensor<T>& da, Tensor<T>& db) {
  for (int bi = 0; bi < da.b(); ++bi) {
    for (int ci = 0; ci < da.c(); ++ci)
      for (int iy = 0; iy < da.h(); ++iy)
        for (int ix = 0; ix < da.w(); ++ix)
          da.at(bi, ci, iy, ix) += dy.at(bi, ci, iy, ix);
    for (int ci = 0; ci < db.c(); ++ci)
      for (int iy = 0; iy < db.h(); ++iy)
        for (int ix = 0; ix < db.w(); ++ix)
          db.at(bi, ci, iy, ix) += dy.at(bi, da.c() + ci, iy, ix);
  }
}

// ---------------------------------------------------------------------------
// Broadcast per-channel mask: f (b,c,h,w) * m (b,c).
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> mask_mul_fwd(const Tensor<T>& f, const Tensor<T>& m) {
  check_arg(m.b() == f.b() && m.c() == f.c(), "mask_mul: channel mismatch");
  Tensor<T> y = f;
  for (int bi = 0; bi < f.b(); ++bi)
    for (int ci = 0; ci < f.c(); ++ci) {
      const T s = m.at(bi, ci, 0, 0);
      for (int iy = 0; iy < f.h(); ++iy)
        for (int ix = 0; ix < f.w(); ++ix) y.at(bi, ci, iy, ix) *= s;
    }
  return y;
}

template <class T>
void mask_mul_bwd(const Tensor<T>& f, const Tensor<T>& m, const Tensor<T>& dy,
                  Tensor<T>& df, Tensor<T>& dm) {
  for (int bi = 0; bi < f.b(); ++bi)
    for (int ci = 0; ci < f.c(); ++ci) {
      const T s = m.at(bi, ci, 0, 0);
      T acc = T(0);
      for (int iy = 0; iy < f.h(); ++iy)
        for (int ix = 0; ix < f.w(); ++ix) {
          const T g = dy.at(bi, ci, iy, ix);
          df.at(bi, ci, iy, ix) += g * s;
          acc += g * f.at(bi, ci, iy, ix);
        }
      dm.at(bi, ci, 0, 0) += acc;
    }
}

// ---------------------------------------------------------------------------
// Scaled-dot-product attention core on explicit token tensors.
//   q (b, heads, nq, dk), k (b, heads, nk, dk), v (b, heads, nk, dk)
// stored as Tensor with dims (b*heads, nq|nk, dk, 1).
// ---------------------------------------------------------------------------

template <class T>
struct AttentionTape {
  Tensor<T> attn;  // (bh, nq, nk, 1) softmax weights
};

template <class T>
Tensor<T> attention_fwd(const Tensor<T>& q, const Tensor<T>& k,
                        const Tensor<T>& v, AttentionTape<T>& tape) {
  const int bh = q.b(), nq = q.c(), dk = q.h();
  const int nk = k.c();
  check_arg(k.h() == dk && v.c() == nk && v.h() == dk,
            "attention: shape mismatch");
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));
  tape.attn = Tensor<T>(bh, nq, nk, 1);
  Tensor<T> out(bh, nq, dk, 1);
  for (int b = 0; b < bh; ++b)
    for (int i = 0; i < nq; ++i) {
      // scores -> softmax (max-subtracted for stability)
      T maxs = -std::numeric_limits<T>::infinity();
      for (int j = 0; j < nk; ++j) {
        T s = T(0);
        for (int d = 0; d < dk; ++d)
          s += q.at(b, i, d, 0) * k.at(b, j, d, 0);
        s *= scale;
        tape.attn.at(b, i, j, 0) = s;
        maxs = std::max(maxs, s);
      }
      T z = T(0);
      for (int j = 0; j < nk; ++j) {
        const T e = std::exp(tape.attn.at(b, i, j, 0) - maxs);
        tape.attn.at(b, i, j, 0) = e;
        z += e;
      }
      for (int j = 0; j < nk; ++j) tape.attn.at(b, i, j, 0) /= z;
      for (int d = 0; d < dk; ++d) {
        T acc = T(0);
        for (int j = 0; j < nk; ++j)
          acc += tape.attn.at(b, i, j, 0) * v.at(b, j, d, 0);
        out.at(b, i, d, 0) = acc;
      }
    }
  return out;
}

template <class T>
void attention_bwd(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                   const AttentionTape<T>& tape, const Tensor<T>& dout,
                   Tensor<T>& dq, Tensor<T>& dk_, Tensor<T>& dv) {
  const int bh = q.b(), nq = q.c(), dk = q.h();
  const int nk = k.c();
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));
  for (int b = 0; b < bh; ++b)
    for (int i = 0; i < nq; ++i) {
      // d attn from dout via v; dv from attn
      std::vector<T> dattn(static_cast<std::size_t>(nk), T(0));
      for (int j = 0; j < nk; ++j) {
        T acc = T(0);
        for (int d = 0; d < dk; ++d) {
          acc += dout.at(b, i, d, 0) * v.at(b, j, d, 0);
          dv.at(b, j, d, 0) +=
              tape.attn.at(b, i, j, 0) * dout.at(b, i, d, 0);
        }
        dattn[static_cast<std::size_t>(j)] = acc;
      }
      // softmax backward: ds_j = a_j (dattn_j - sum_l dattn_l a_l)
      T dot = T(0);
      for (int j = 0; j < nk; ++j)
        dot += dattn[static_cast<std::size_t>(j)] * tape.attn.at(b, i, j, 0);
      for (int j = 0; j < nk; ++j) {
        const T ds =
            tape.attn.at(b, i, j, 0) * (dattn[static_cast<std::size_t>(j)] - dot) *
            scale;
        for (int d = 0; d < dk; ++d) {
          dq.at(b, i, d, 0) += ds * k.at(b, j, d, 0);
          dk_.at(b, j, d, 0) += ds * q.at(b, i, d, 0);
        }
      }
    }
}

}  // namespace ronin

#endif  // RONIN_NN_OPS_HPP
