// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

namespace losscape {

/// First-order dual number: value plus directional derivative. Running the
/// forward and backward passes over Dual scalars differentiates the whole
/// gradient computation along one direction, which is exactly what a
/// Hessian-vector product requires.
struct Dual {
  double v = 0.0;
  double t = 0.0;

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  Dual(double value, double tangent) : v(value), t(tangent) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    t += o.t;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    t -= o.t;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    t = t * o.v + v * o.t;
    v *= o.v;
    return *this;
  }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.t}; }
inline Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.t * b.v + a.v * b.t}; }
inline Dual operator/(const Dual& a, const Dual& b) {
  double q = a.v / b.v;
  return {q, (a.t - q * b.t) / b.v};
}

inline Dual exp(const Dual& a) {
  double e = std::exp(a.v);
  return {e, a.t * e};
}
inline Dual log(const Dual& a) { return {std::log(a.v), a.t / a.v}; }
inline Dual sqrt(const Dual& a) {
  double s = std::sqrt(a.v);
  return {s, a.t / (2.0 * s)};
}
inline Dual tanh(const Dual& a) {
  double th = std::tanh(a.v);
  return {th, a.t * (1.0 - th * th)};
}

/// Primal value, for code generic over double and Dual.
inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

}  // namespace losscape
