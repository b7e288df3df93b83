#include "ranging/l1_dual.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ranging {

namespace {

struct Evaluated {
  CVector q;       // A^* g
  RVector f;       // |q|^2 - 1
  CVector r_dual;  // y - A (z .* q)
  RVector r_cent;  // -z .* f - mu
  Real norm = 0.0;
};

template <SensingOperator Op>
Evaluated evaluate(const CVector& g, const RVector& z, Real mu, const Op& A,
                   const CVector& y) {
  Evaluated e;
  e.q = A.adjoint(g);
  e.f = e.q.cwiseAbs2().array() - 1.0;
  e.r_dual = y - A.apply((z.cast<Complex>().array() * e.q.array()).matrix());
  e.r_cent = -z.cwiseProduct(e.f).array() - mu;
  e.norm = std::sqrt(e.r_dual.squaredNorm() + e.r_cent.squaredNorm());
  return e;
}

}  // namespace

template <SensingOperator Op>
DualDirections search_directions(const DualState& state, const Op& A,
                                 const CVector& y) {
  const Index M = A.rows();
  const CVector q = A.adjoint(state.g);
  const RVector abs2 = q.cwiseAbs2();
  const RVector f = abs2.array() - 1.0;
  const RVector b = f.cwiseInverse();
  const RVector s = state.z.cwiseQuotient(f);

  // P dg - Q conj(dg) = y + mu A(q .* b)
  const CVector p_weights = (state.z - s.cwiseProduct(abs2)).cast<Complex>();
  const CVector q_weights = s.cast<Complex>().cwiseProduct(q.cwiseProduct(q));
  const CMatrix P = A.gram(p_weights);
  const CMatrix Q = A.gram_transpose(q_weights);
  const CVector rhs =
      y + state.mu * A.apply(q.cwiseProduct(b.cast<Complex>()));

  RMatrix K(2 * M, 2 * M);
  K.topLeftCorner(M, M) = P.real() - Q.real();
  K.topRightCorner(M, M) = -P.imag() - Q.imag();
  K.bottomLeftCorner(M, M) = P.imag() - Q.imag();
  K.bottomRightCorner(M, M) = P.real() + Q.real();
  RVector r(2 * M);
  r << rhs.real(), rhs.imag();

  DualDirections out;
  Eigen::LLT<RMatrix> llt(K);
  if (llt.info() != Eigen::Success) {
    const Real ridge = 1e-12 * K.trace();
    K.diagonal().array() += ridge;
    llt.compute(K);
    if (llt.info() != Eigen::Success) {
      out.ok = false;
      return out;
    }
  }
  const RVector uv = llt.solve(r);
  out.dg = uv.head(M).cast<Complex>() + Complex(0, 1) * uv.tail(M).cast<Complex>();
  const CVector dq = A.adjoint(out.dg);
  const RVector lin = (q.conjugate().cwiseProduct(dq)).real();
  out.dz = -state.z - state.mu * b - 2.0 * s.cwiseProduct(lin);
  out.ok = out.dg.allFinite() && out.dz.allFinite();
  return out;
}

template <SensingOperator Op>
RVector residual(const DualState& state, const Op& A, const CVector& y) {
  const auto e = evaluate(state.g, state.z, state.mu, A, y);
  const Index M = A.rows();
  RVector out(2 * M + e.r_cent.size());
  out << e.r_dual.real(), e.r_dual.imag(), e.r_cent;
  return out;
}

Real sparsity_ratio(const CVector& x_hat, Index M) {
  const Real total = x_hat.squaredNorm();
  if (total <= 0.0) return 0.0;
  std::vector<Real> mags(x_hat.size());
  for (Index i = 0; i < x_hat.size(); ++i) mags[i] = std::norm(x_hat[i]);
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(M / 2), mags.size());
  std::nth_element(mags.begin(), mags.begin() + keep, mags.end(), std::greater<>());
  Real kept = 0.0;
  for (std::size_t i = 0; i < keep; ++i) kept += mags[i];
  return std::min(1.0, kept / total);
}

template <SensingOperator Op>
RoughEstimate primal_dual_solve(const Op& A, const CVector& y,
                                const L1Params& params) {
  const Index n = A.cols();
  const Index M = A.rows();
  RoughEstimate out;
  out.x_hat = CVector::Zero(n);
  out.state = DualState{CVector::Zero(M), RVector::Ones(n), params.mu0};
  if (y.isZero(0.0)) return out;

  auto& st = out.state;
  const Real y_norm = y.norm();
  const int max_iters = params.tight ? std::max(params.max_iters, 200) : params.max_iters;
  Real last_r_dual = y_norm;
  for (int it = 1; it <= max_iters; ++it) {
    const auto dir = search_directions(st, A, y);
    if (!dir.ok) {
      out.failed = true;
      out.failure = "singular Newton system at iteration " + std::to_string(it);
      break;
    }
    Real s_max = std::numeric_limits<Real>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (dir.dz[i] < 0) s_max = std::min(s_max, -st.z[i] / dir.dz[i]);
    }
    Real step = std::min(1.0, 0.99 * s_max);
    const Real tau_old = evaluate(st.g, st.z, st.mu, A, y).norm;

    bool accepted = false;
    CVector g_new;
    RVector z_new;
    Evaluated e;
    for (int halving = 0; halving <= 30; ++halving, step *= 0.5) {
      g_new = st.g + step * dir.dg;
      z_new = st.z + step * dir.dz;
      if ((z_new.array() <= 0.0).any()) continue;
      e = evaluate(g_new, z_new, st.mu, A, y);
      if ((e.f.array() >= 0.0).any()) continue;
      if (e.norm <= (1.0 - params.alpha * step) * tau_old) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Tight solves can stall a hair above tol where the Newton system
      // reaches its rounding floor; the iterate is as good as it gets.
      if (params.tight && st.mu <= 10.0 * params.tol &&
          last_r_dual <= 1e3 * params.tol * y_norm) {
        out.reached_target = true;
        break;
      }
      out.failed = true;
      out.failure = "line search failed at iteration " + std::to_string(it);
      break;
    }
    st.g = g_new;
    st.z = z_new;
    // alpha times the surrogate duality gap per constraint. On the central
    // path this equals alpha * mu; off it, mu waits for the iterate.
    st.mu = params.alpha * (-st.z.dot(e.f)) / static_cast<Real>(n);
    out.iterations = it;
    out.x_hat = (st.z.cast<Complex>().array() * e.q.array()).matrix();
    out.kappa = sparsity_ratio(out.x_hat, M);
    out.trace.push_back({it, out.kappa, e.norm, st.mu, step});
    last_r_dual = e.r_dual.norm();

    if (params.tight) {
      if (st.mu <= params.tol && e.r_dual.norm() <= params.tol * y_norm) {
        out.reached_target = true;
        break;
      }
    } else if (out.kappa >= params.kappa_target) {
      out.reached_target = true;
      break;
    }
  }
  return out;
}

template DualDirections search_directions(const DualState&,
                                          const MeasurementModel&,
                                          const CVector&);
template DualDirections search_directions(const DualState&,
                                          const DenseOperator&, const CVector&);
template RVector residual(const DualState&, const MeasurementModel&,
                          const CVector&);
template RVector residual(const DualState&, const DenseOperator&,
                          const CVector&);
template RoughEstimate primal_dual_solve(const MeasurementModel&,
                                         const CVector&, const L1Params&);
template RoughEstimate primal_dual_solve(const DenseOperator&, const CVector&,
                                         const L1Params&);

}  // namespace ranging
