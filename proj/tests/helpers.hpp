#ifndef RANGING_TESTS_HELPERS_HPP
#define RANGING_TESTS_HELPERS_HPP

#include "ranging/types.hpp"

#include <random>

namespace ranging::testing {

inline CVector random_cvector(Index n, Rng& rng, Real scale = 1.0) {
  std::normal_distribution<Real> normal(0.0, scale);
  CVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = Complex(normal(rng), normal(rng));
  return v;
}

inline CMatrix random_cmatrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<Real> normal(0.0, 1.0);
  CMatrix A(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) A(r, c) = Complex(normal(rng), normal(rng));
  }
  return A;
}

/// k-sparse vector with unit-scale complex Gaussian nonzeros.
inline CVector random_sparse(Index n, Index k, Rng& rng) {
  CVector x = CVector::Zero(n);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::normal_distribution<Real> normal(0.0, 1.0);
  for (Index placed = 0; placed < k;) {
    const Index i = pick(rng);
    if (x[i] != Complex{}) continue;
    x[i] = Complex(normal(rng), normal(rng));
    ++placed;
  }
  return x;
}

inline Real rel_err(const CVector& a, const CVector& b) {
  const Real denom = std::max(b.norm(), 1e-300);
  return (a - b).norm() / denom;
}

}  // namespace ranging::testing

#endif  // RANGING_TESTS_HELPERS_HPP
