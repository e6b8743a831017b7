#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <type_traits>
#include <vector>

namespace vgplan::kernels {

// C[M×N] (+)= A[M×K] · B[K×N] (+ b[N], may be null).
//
// Each output row is computed by the same instruction sequence whatever M is
// and wherever the row sits in A, so a row's result never depends on which
// other rows share the call or on buffer addresses. Batched decoding and
// run-to-run reproducibility rely on this.
template <class T, bool Accumulate = false>
void gemm_rows(const T* a, std::size_t m, std::size_t k, const T* w, std::size_t n, const T* b,
               T* y) {
  constexpr std::size_t kRows = 4;
  constexpr std::size_t kCols = 256 / sizeof(T);  // four 512-bit vectors
  T acc[kRows][kCols];
  for (std::size_t i0 = 0; i0 < m; i0 += kRows) {
    const std::size_t rows = std::min(kRows, m - i0);
    for (std::size_t j0 = 0; j0 < n; j0 += kCols) {
      const std::size_t cols = std::min(kCols, n - j0);
      for (std::size_t r = 0; r < kRows; ++r) {
        for (std::size_t c = 0; c < kCols; ++c) acc[r][c] = (b && c < cols) ? b[j0 + c] : T(0);
      }
      if (cols == kCols) {
        for (std::size_t kk = 0; kk < k; ++kk) {
          const T* wr = w + kk * n + j0;
          for (std::size_t r = 0; r < kRows; ++r) {
            const T xv = r < rows ? a[(i0 + r) * k + kk] : T(0);
            for (std::size_t c = 0; c < kCols; ++c) acc[r][c] += xv * wr[c];
          }
        }
      } else {
        for (std::size_t kk = 0; kk < k; ++kk) {
          const T* wr = w + kk * n + j0;
          for (std::size_t r = 0; r < kRows; ++r) {
            const T xv = r < rows ? a[(i0 + r) * k + kk] : T(0);
            for (std::size_t c = 0; c < cols; ++c) acc[r][c] += xv * wr[c];
          }
        }
      }
      for (std::size_t r = 0; r < rows; ++r) {
        T* out = y + (i0 + r) * n + j0;
        if constexpr (Accumulate) {
          for (std::size_t c = 0; c < cols; ++c) out[c] += acc[r][c];
        } else {
          std::copy(acc[r], acc[r] + cols, out);
        }
      }
    }
  }
}

// Y[M×N] = X[M×K] · W[K×N] + b[N] (b may be null).
template <class T>
void linear_forward(const T* x, std::size_t m, std::size_t k, const T* w, std::size_t n,
                    const T* b, T* y) {
  gemm_rows<T, false>(x, m, k, w, n, b, y);
}

// dst[C×R] = srcᵀ for src[R×C].
template <class T>
void transpose(const T* src, std::size_t r, std::size_t c, T* dst) {
  constexpr std::size_t kTile = 32;
  for (std::size_t i0 = 0; i0 < r; i0 += kTile) {
    for (std::size_t j0 = 0; j0 < c; j0 += kTile) {
      const std::size_t i1 = std::min(r, i0 + kTile), j1 = std::min(c, j0 + kTile);
      for (std::size_t i = i0; i < i1; ++i) {
        for (std::size_t j = j0; j < j1; ++j) dst[j * r + i] = src[i * c + j];
      }
    }
  }
}

// Gradients of Y = X·W + b: dX += dY·Wᵀ, dW += Xᵀ·dY, db += colsum(dY).
// dx / db may be null. Fixed summation order throughout, so repeated calls
// give identical bits.
template <class T>
void linear_backward(const T* x, std::size_t m, std::size_t k, const T* w, std::size_t n,
                     const T* dy, T* dx, T* dw, T* db) {
  thread_local std::vector<T> scratch;
  scratch.resize(std::max(k * m, n * k));
  transpose(x, m, k, scratch.data());
  gemm_rows<T, true>(scratch.data(), k, m, dy, n, nullptr, dw);
  if (dx) {
    transpose(w, k, n, scratch.data());
    gemm_rows<T, true>(dy, m, n, scratch.data(), k, nullptr, dx);
  }
  if (db) {
    for (std::size_t i = 0; i < m; ++i) {
      const T* row = dy + i * n;
      for (std::size_t j = 0; j < n; ++j) db[j] += row[j];
    }
  }
}

constexpr double kLayerNormEps = 1e-5;

// y = g ⊙ (x - mean) / sqrt(var + eps) + b for one row; returns (mean, rstd).
template <class T>
void layernorm_row(const T* x, std::size_t d, const T* g, const T* b, T* y, T& mean_out,
                   T& rstd_out) {
  T mean = 0;
  for (std::size_t i = 0; i < d; ++i) mean += x[i];
  mean /= static_cast<T>(d);
  T var = 0;
  for (std::size_t i = 0; i < d; ++i) var += (x[i] - mean) * (x[i] - mean);
  var /= static_cast<T>(d);
  const T rstd = T(1) / std::sqrt(var + static_cast<T>(kLayerNormEps));
  for (std::size_t i = 0; i < d; ++i) y[i] = (x[i] - mean) * rstd * g[i] + b[i];
  mean_out = mean;
  rstd_out = rstd;
}

// dx += layernorm input gradient; dg, db accumulate.
template <class T>
void layernorm_row_backward(const T* x, std::size_t d, const T* g, T mean, T rstd, const T* dy,
                            T* dx, T* dg, T* db) {
  T sum_dxhat = 0, sum_dxhat_xhat = 0;
  for (std::size_t i = 0; i < d; ++i) {
    const T xhat = (x[i] - mean) * rstd;
    const T dxhat = dy[i] * g[i];
    dg[i] += dy[i] * xhat;
    db[i] += dy[i];
    sum_dxhat += dxhat;
    sum_dxhat_xhat += dxhat * xhat;
  }
  const T inv_d = T(1) / static_cast<T>(d);
  for (std::size_t i = 0; i < d; ++i) {
    const T xhat = (x[i] - mean) * rstd;
    const T dxhat = dy[i] * g[i];
    dx[i] += rstd * (dxhat - sum_dxhat * inv_d - xhat * sum_dxhat_xhat * inv_d);
  }
}

// exp for float written in plain arithmetic (Cody-Waite reduction plus a
// degree-6 polynomial, ~1 ulp). Unlike libm or Eigen's packet math, the
// vectorized and scalar versions of a loop over this function produce the
// same bits, so results never depend on buffer alignment or array length.
inline float exp_f32(float x) {
  x = x < -87.0f ? -87.0f : (x > 88.0f ? 88.0f : x);
  const float n = std::floor(x * 1.44269504088896341f + 0.5f);
  float r = x - n * 0.693359375f;
  r = r - n * -2.12194440e-4f;
  float p = 1.9875691500e-4f;
  p = p * r + 1.3981999507e-3f;
  p = p * r + 8.3334519073e-3f;
  p = p * r + 4.1665795894e-2f;
  p = p * r + 1.6666665459e-1f;
  p = p * r + 5.0000001201e-1f;
  p = p * r * r + r + 1.0f;
  const std::int32_t bits = (static_cast<std::int32_t>(n) + 127) << 23;
  return p * std::bit_cast<float>(bits);
}

template <class T>
inline T exp_k(T x) {
  if constexpr (std::is_same_v<T, float>) {
    return exp_f32(x);
  } else {
    return std::exp(x);
  }
}

template <class T>
inline T tanh_k(T u) {
  if constexpr (std::is_same_v<T, float>) {
    u = u < -9.0f ? -9.0f : (u > 9.0f ? 9.0f : u);
    return 1.0f - 2.0f / (exp_f32(2.0f * u) + 1.0f);
  } else {
    return std::tanh(u);
  }
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)

// tanh approximation of GELU, elementwise over n values.
template <class T>
void gelu_forward(const T* f, std::size_t n, T* g) {
  const T c = static_cast<T>(kGeluC);
  for (std::size_t i = 0; i < n; ++i) {
    const T x = f[i];
    g[i] = T(0.5) * x * (T(1) + tanh_k(c * (x + T(0.044715) * x * x * x)));
  }
}

// dg *= gelu'(f), elementwise.
template <class T>
void gelu_backward(const T* f, std::size_t n, T* dg) {
  const T c = static_cast<T>(kGeluC);
  for (std::size_t i = 0; i < n; ++i) {
    const T x = f[i];
    const T t = tanh_k(c * (x + T(0.044715) * x * x * x));
    dg[i] *= T(0.5) * (T(1) + t) +
             T(0.5) * x * (T(1) - t * t) * c * (T(1) + T(3 * 0.044715) * x * x);
  }
}

// Dot product with a fixed lane structure (vectorizes without reassociating
// a single accumulator, so it is deterministic).
template <class T>
inline T dot_k(const T* a, const T* b, std::size_t n) {
  constexpr std::size_t kLanes = 64 / sizeof(T);
  T acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t j = 0; j < kLanes; ++j) acc[j] += a[i + j] * b[i + j];
  }
  const std::size_t rem = n - i;
  for (std::size_t j = 0; j < rem && j < kLanes; ++j) acc[j] += a[i + j] * b[i + j];
  T sum = 0;
  for (std::size_t j = 0; j < kLanes; ++j) sum += acc[j];
  return sum;
}

// Causal attention for one query row against `len` cached keys/values of one
// head: probs[s] = softmax_s(q·k_s · scale), out = Σ_s probs[s] v_s.
// Keys/values are strided rows (stride elements apart).
template <class T>
void attend_one(const T* q, const T* keys, const T* values, std::size_t stride, std::size_t len,
                std::size_t dh, T scale, T* probs, T* out) {
  T max_score = -INFINITY;
  for (std::size_t s = 0; s < len; ++s) {
    probs[s] = dot_k(q, keys + s * stride, dh) * scale;
    max_score = std::max(max_score, probs[s]);
  }
  for (std::size_t s = 0; s < len; ++s) probs[s] = exp_k(probs[s] - max_score);
  T denom = 0;
  for (std::size_t s = 0; s < len; ++s) denom += probs[s];
  const T inv = T(1) / denom;
  for (std::size_t s = 0; s < len; ++s) probs[s] *= inv;
  std::fill(out, out + dh, T(0));
  for (std::size_t s = 0; s < len; ++s) {
    const T* vr = values + s * stride;
    const T p = probs[s];
    for (std::size_t i = 0; i < dh; ++i) out[i] += p * vr[i];
  }
}

}  // namespace vgplan::kernels
