//
// specgrad - Copyright 2026 the specgrad authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "specgrad/vector_ops.hpp"

namespace specgrad {

/// Symmetric positive definite operator kept in factored form
///   A = Q diag(v_1..v_n) Q^T,  Q = R_k ... R_2 R_1,  R_i = I - 2 w_i w_i^T,
/// so A*v costs one reflection pass each side plus a diagonal scale and the
/// eigenvalues are exactly the stored diagonal. The dense matrix is never formed.
struct HouseholderChain {
  std::vector<Vector> reflectors;  // unit 2-norm within 1e-12, applied w_1 first in Q
  Vector diag;                     // strictly positive eigenvalues

  HouseholderChain(std::vector<Vector> refl, Vector d)
      : reflectors(std::move(refl)), diag(std::move(d)) {
    if (diag.empty()) throw std::invalid_argument("HouseholderChain: empty diagonal");
    for (double v : diag)
      if (!(v > 0.0)) throw std::invalid_argument("HouseholderChain: eigenvalues must be > 0");
    for (const auto& w : reflectors) {
      if (w.size() != diag.size())
        throw std::invalid_argument("HouseholderChain: reflector dimension mismatch");
      if (std::abs(norm2(w) - 1.0) > 1e-12)
        throw std::invalid_argument("HouseholderChain: reflector is not unit length");
    }
  }

  int dimension() const { return static_cast<int>(diag.size()); }
};

namespace detail {
inline void reflect_inplace(Vector& v, const Vector& w) {
  const double c = 2.0 * dot(w, v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * w[i];
}
}  // namespace detail

/// A*v via Q diag Q^T: reflect (reverse order) for Q^T, scale, reflect (forward) for Q.
inline Vector apply_operator(const HouseholderChain& chain, std::span<const double> v) {
  if (static_cast<int>(v.size()) != chain.dimension())
    throw std::invalid_argument("apply_operator: dimension mismatch");
  Vector w(v.begin(), v.end());
  for (auto it = chain.reflectors.rbegin(); it != chain.reflectors.rend(); ++it)
    detail::reflect_inplace(w, *it);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= chain.diag[i];
  for (const auto& r : chain.reflectors) detail::reflect_inplace(w, r);
  return w;
}

}  // namespace specgrad
