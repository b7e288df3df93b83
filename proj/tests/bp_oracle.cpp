#include "bp_oracle.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace ranging::testing {

namespace {

CVector shrink(const CVector& v, Real t) {
  CVector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const Real m = std::abs(v[i]);
    out[i] = m > t ? v[i] * ((m - t) / m) : Complex{};
  }
  return out;
}

}  // namespace

BpSolution basis_pursuit_admm(const CMatrix& A, const CVector& y, Real tol,
                              int max_iters) {
  const Index n = A.cols();
  const Eigen::LLT<CMatrix> gram(A * A.adjoint());
  const CVector x_ls = A.adjoint() * gram.solve(y);
  auto project = [&](const CVector& v) -> CVector {
    return v - A.adjoint() * gram.solve(A * v) + x_ls;
  };

  // Penalty scaled to the data so the iteration count does not depend on |y|.
  const Real rho = 1.0 / std::max(x_ls.cwiseAbs().maxCoeff(), 1e-300);
  BpSolution out;
  CVector z = x_ls;
  CVector u = CVector::Zero(n);
  for (int k = 1; k <= max_iters; ++k) {
    const CVector x = project(z - u);
    const CVector z_old = z;
    z = shrink(x + u, 1.0 / rho);
    u += x - z;
    const Real scale = std::max(z.norm(), 1e-300);
    const Real primal = (x - z).norm();
    const Real dual = rho * (z - z_old).norm();
    out.iterations = k;
    if (primal <= tol * scale && dual <= tol * rho * scale) {
      out.converged = true;
      break;
    }
  }
  // z is exactly sparse; the affine projection of it is exactly feasible.
  out.x = project(z);
  return out;
}

}  // namespace ranging::testing
