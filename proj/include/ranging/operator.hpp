#ifndef RANGING_OPERATOR_HPP
#define RANGING_OPERATOR_HPP

#include "ranging/types.hpp"

#include <concepts>

namespace ranging {

/// What the solvers need from a measurement matrix A (M x n).
template <typename Op>
concept SensingOperator = requires(const Op& op, const CVector& v) {
  { op.rows() } -> std::convertible_to<Index>;
  { op.cols() } -> std::convertible_to<Index>;
  { op.apply(v) } -> std::convertible_to<CVector>;          // A v
  { op.adjoint(v) } -> std::convertible_to<CVector>;        // A^* v
  { op.gram(v) } -> std::convertible_to<CMatrix>;           // A diag(v) A^*
  { op.gram_transpose(v) } -> std::convertible_to<CMatrix>; // A diag(v) A^T
};

/// An explicit matrix behind the SensingOperator interface.
class DenseOperator {
 public:
  explicit DenseOperator(CMatrix A) : A_(std::move(A)) {}

  const CMatrix& matrix() const { return A_; }
  Index rows() const { return A_.rows(); }
  Index cols() const { return A_.cols(); }

  CVector apply(const CVector& v) const { return A_ * v; }
  CVector adjoint(const CVector& v) const { return A_.adjoint() * v; }
  CVector column(Index t) const { return A_.col(t); }
  CMatrix gram(const CVector& w) const {
    return A_ * w.asDiagonal() * A_.adjoint();
  }
  CMatrix gram_transpose(const CVector& w) const {
    return A_ * w.asDiagonal() * A_.transpose();
  }

 private:
  CMatrix A_;
};

}  // namespace ranging

#endif  // RANGING_OPERATOR_HPP
