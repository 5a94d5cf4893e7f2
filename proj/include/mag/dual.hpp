#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<double>> gives exact second
// derivatives, which is how the analytic differentiation strategy is realized.

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace mag {

/// Largest chart dimension supported by the gradient slots of a Dual.
inline constexpr std::size_t kMaxDim = 5;

template <class T>
struct Dual {
  T v{};
  std::array<T, kMaxDim> d{};

  constexpr Dual() = default;
  constexpr Dual(double c) : v(c) {}  // NOLINT(google-explicit-constructor)

  /// Seeded variable: value x, unit tangent along direction `dir`.
  static Dual variable(const T& x, std::size_t dir) {
    Dual r;
    r.v = x;
    r.d[dir] = T(1.0);
    return r;
  }
};

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

template <class T>
struct dual_level : std::integral_constant<int, 0> {};
template <class T>
struct dual_level<Dual<T>> : std::integral_constant<int, dual_level<T>::value + 1> {};
template <class T>
inline constexpr int dual_level_v = dual_level<T>::value;

/// Deepest scalar type fields are instantiated for.
inline constexpr int kMaxDualLevel = 3;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

// ---- arithmetic -----------------------------------------------------------

template <class T>
Dual<T> operator-(const Dual<T>& a) {
  Dual<T> r;
  r.v = -a.v;
  for (std::size_t i = 0; i < kMaxDim; ++i) r.d[i] = -a.d[i];
  return r;
}
template <class T>
Dual<T> operator+(const Dual<T>& a) {
  return a;
}

template <class T>
Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) {
  a.v += b.v;
  for (std::size_t i = 0; i < kMaxDim; ++i) a.d[i] += b.d[i];
  return a;
}
template <class T>
Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) {
  a.v -= b.v;
  for (std::size_t i = 0; i < kMaxDim; ++i) a.d[i] -= b.d[i];
  return a;
}
template <class T>
Dual<T>& operator*=(Dual<T>& a, const Dual<T>& b) {
  for (std::size_t i = 0; i < kMaxDim; ++i) a.d[i] = a.d[i] * b.v + a.v * b.d[i];
  a.v *= b.v;
  return a;
}
template <class T>
Dual<T>& operator*=(Dual<T>& a, double b) {
  a.v *= b;
  for (std::size_t i = 0; i < kMaxDim; ++i) a.d[i] *= b;
  return a;
}
template <class T>
Dual<T>& operator/=(Dual<T>& a, const Dual<T>& b) {
  const T inv = T(1.0) / b.v;
  const T q = a.v * inv;
  for (std::size_t i = 0; i < kMaxDim; ++i) a.d[i] = (a.d[i] - q * b.d[i]) * inv;
  a.v = q;
  return a;
}
template <class T>
Dual<T>& operator/=(Dual<T>& a, double b) {
  return a *= (1.0 / b);
}
template <class T>
Dual<T>& operator+=(Dual<T>& a, double b) {
  a.v += b;
  return a;
}
template <class T>
Dual<T>& operator-=(Dual<T>& a, double b) {
  a.v -= b;
  return a;
}

template <class T>
Dual<T> operator+(Dual<T> a, const Dual<T>& b) {
  return a += b;
}
template <class T>
Dual<T> operator-(Dual<T> a, const Dual<T>& b) {
  return a -= b;
}
template <class T>
Dual<T> operator*(Dual<T> a, const Dual<T>& b) {
  return a *= b;
}
template <class T>
Dual<T> operator/(Dual<T> a, const Dual<T>& b) {
  return a /= b;
}

template <class T>
Dual<T> operator+(Dual<T> a, double b) {
  return a += b;
}
template <class T>
Dual<T> operator+(double b, Dual<T> a) {
  return a += b;
}
template <class T>
Dual<T> operator-(Dual<T> a, double b) {
  return a -= b;
}
template <class T>
Dual<T> operator-(double b, const Dual<T>& a) {
  Dual<T> r = -a;
  return r += b;
}
template <class T>
Dual<T> operator*(Dual<T> a, double b) {
  return a *= b;
}
template <class T>
Dual<T> operator*(double b, Dual<T> a) {
  return a *= b;
}
template <class T>
Dual<T> operator/(Dual<T> a, double b) {
  return a /= b;
}
template <class T>
Dual<T> operator/(double b, const Dual<T>& a) {
  return Dual<T>(b) / a;
}

template <class T>
bool operator<(const Dual<T>& a, const Dual<T>& b) {
  return value_of(a) < value_of(b);
}
template <class T>
bool operator>(const Dual<T>& a, const Dual<T>& b) {
  return value_of(a) > value_of(b);
}

// ---- elementary functions (chain rule on the outer level) -----------------

namespace detail {
template <class T, class F, class DF>
Dual<T> chain(const Dual<T>& a, F&& f, DF&& df) {
  Dual<T> r;
  r.v = f(a.v);
  const T slope = df(a.v);
  for (std::size_t i = 0; i < kMaxDim; ++i) r.d[i] = slope * a.d[i];
  return r;
}
}  // namespace detail

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return detail::chain(a, [](const T& x) { return sin(x); }, [](const T& x) { return cos(x); });
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return detail::chain(a, [](const T& x) { return cos(x); }, [](const T& x) { return -sin(x); });
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  const T e = exp(a.v);
  return detail::chain(a, [&](const T&) { return e; }, [&](const T&) { return e; });
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return detail::chain(a, [](const T& x) { return log(x); }, [](const T& x) { return T(1.0) / x; });
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  return detail::chain(a, [&](const T&) { return s; }, [&](const T&) { return T(0.5) / s; });
}
template <class T>
Dual<T> abs(const Dual<T>& a) {
  return value_of(a) < 0.0 ? -a : a;
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
  using std::tanh;
  const T t = tanh(a.v);
  return detail::chain(a, [&](const T&) { return t; }, [&](const T&) { return T(1.0) - t * t; });
}

/// Integer power by repeated multiplication; valid for every scalar level.
template <class S>
S ipow(const S& x, int k) {
  if (k < 0) return S(1.0) / ipow(x, -k);
  S r(1.0);
  for (int i = 0; i < k; ++i) r = r * x;
  return r;
}

}  // namespace mag
