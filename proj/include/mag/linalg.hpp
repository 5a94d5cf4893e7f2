#pragma once

// Dense LU with partial pivoting on row-major n x n matrices of any scalar
// level (double or nested Dual). Pivots are chosen on the plain value.

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mag/dual.hpp"
#include "mag/error.hpp"

namespace mag {

/// |det| at or below this is treated as singular.
inline constexpr double kSingularDet = 1e-10;

template <class S>
struct LuFactors {
  std::size_t n = 0;
  std::vector<S> lu;
  std::vector<std::size_t> perm;
  S det{};
};

template <class S>
LuFactors<S> lu_factor(std::span<const S> a, std::size_t n) {
  LuFactors<S> f;
  f.n = n;
  f.lu.assign(a.begin(), a.end());
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  double sign = 1.0;
  S det(1.0);
  auto& m = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(value_of(m[k * n + k]));
    for (std::size_t r = k + 1; r < n; ++r) {
      const double mag = std::abs(value_of(m[r * n + k]));
      if (mag > best) {
        best = mag;
        piv = r;
      }
    }
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m[k * n + c], m[piv * n + c]);
      std::swap(f.perm[k], f.perm[piv]);
      sign = -sign;
    }
    det = det * m[k * n + k];
    if (best == 0.0) continue;
    const S inv = S(1.0) / m[k * n + k];
    for (std::size_t r = k + 1; r < n; ++r) {
      const S factor = m[r * n + k] * inv;
      m[r * n + k] = factor;
      for (std::size_t c = k + 1; c < n; ++c) m[r * n + c] = m[r * n + c] - factor * m[k * n + c];
    }
  }
  f.det = det * sign;
  return f;
}

template <class S>
S determinant(std::span<const S> a, std::size_t n) {
  return lu_factor(a, n).det;
}

/// Inverse of a row-major matrix; throws `code` when |det| <= kSingularDet.
template <class S>
std::vector<S> inverse(std::span<const S> a, std::size_t n,
                       ErrorCode code = ErrorCode::SingularMetric) {
  const LuFactors<S> f = lu_factor(a, n);
  if (!(std::abs(value_of(f.det)) > kSingularDet)) {
    throw Error(code, "matrix determinant below threshold");
  }
  std::vector<S> inv(n * n, S(0.0));
  std::vector<S> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = S(f.perm[i] == j ? 1.0 : 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      S s = col[i];
      for (std::size_t k = 0; k < i; ++k) s = s - f.lu[i * n + k] * col[k];
      col[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      S s = col[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s = s - f.lu[ii * n + k] * col[k];
      col[ii] = s / f.lu[ii * n + ii];
    }
    for (std::size_t i = 0; i < n; ++i) inv[i * n + j] = col[i];
  }
  return inv;
}

}  // namespace mag
