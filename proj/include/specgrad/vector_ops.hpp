//
// specgrad - Copyright 2026 the specgrad authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace specgrad {

using Vector = std::vector<double>;

inline void require_same_size(std::span<const double> a, std::span<const double> b,
                              const char* where) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// alpha*a + b as a new vector.
inline Vector axpy(double alpha, std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b, "axpy");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = alpha * a[i] + b[i];
  return r;
}

inline Vector subtract(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b, "subtract");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline void scale_inplace(Vector& a, double c) {
  for (double& v : a) v *= c;
}

inline bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace specgrad
