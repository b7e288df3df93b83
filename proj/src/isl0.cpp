#include "ranging/isl0.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <vector>

namespace ranging {

Real f_sigma(Real a, Real sigma) {
  return std::exp(-a * a / (2.0 * sigma * sigma));
}

Real big_F(const CVector& x, Real sigma) {
  Real sum = 0.0;
  for (Index t = 0; t < x.size(); ++t) sum += f_sigma(std::abs(x[t]), sigma);
  return sum;
}

RVector smoothing_weights(const CVector& x, Real sigma) {
  RVector w(x.size());
  for (Index t = 0; t < x.size(); ++t) {
    w[t] = std::max(f_sigma(std::abs(x[t]), sigma), kWeightFloor);
  }
  return w;
}

template <SensingOperator Op>
Real sl0_objective(const CVector& x, Real sigma, const Op& A, const CVector& y,
                   Real lambda) {
  return -big_F(x, sigma) + 0.5 * lambda * (y - A.apply(x)).squaredNorm();
}

CVector zeta_dense(const CVector& x, Real sigma, const CMatrix& A,
                   const CVector& y, Real lambda) {
  const RVector w = smoothing_weights(x, sigma);
  CMatrix H = lambda * (A.adjoint() * A);
  H.diagonal() += (w / (sigma * sigma)).cast<Complex>();
  return lambda * H.ldlt().solve(A.adjoint() * y);
}

namespace {

// Entries whose weight has collapsed are eliminated explicitly. Left inside
// the M x M system their 1/w columns swamp it and the back-projection
// w^{-1} a_t^* u cancels catastrophically. W_S keeps the reduced system
// positive definite, so more than M of them is fine; 2M bounds its cost.
constexpr Real kSplitWeight = 1e-3;

std::vector<Index> collapsed_entries(const RVector& w, Index M) {
  std::vector<Index> S;
  for (Index t = 0; t < w.size(); ++t) {
    if (w[t] < kSplitWeight) S.push_back(t);
  }
  const auto cap = static_cast<std::size_t>(2 * M);
  if (S.size() > cap) {
    std::nth_element(S.begin(), S.begin() + static_cast<std::ptrdiff_t>(cap), S.end(),
                     [&](Index a, Index b) { return w[a] < w[b]; });
    S.resize(cap);
  }
  return S;
}

}  // namespace

template <SensingOperator Op>
CVector zeta_fast(const CVector& x, Real sigma, const Op& A, const CVector& y,
                  Real lambda) {
  const RVector w = smoothing_weights(x, sigma);
  RVector w_inv = w.cwiseInverse();
  const auto S = collapsed_entries(w, A.rows());
  for (Index t : S) w_inv[t] = 0.0;

  CMatrix C = A.gram(w_inv.cast<Complex>());
  C.diagonal().array() += 1.0 / (lambda * sigma * sigma);
  const Eigen::LLT<CMatrix> llt(C);

  // With B = C_T^{-1}: (W_S + A_S^* B A_S) x_S = A_S^* B y and
  // x_T = W_T^{-1} A_T^* B (y - A_S x_S).
  CVector r = y;
  CVector x_S;
  if (!S.empty()) {
    const Index s = static_cast<Index>(S.size());
    CMatrix AS(A.rows(), s);
    for (Index j = 0; j < s; ++j) {
      if constexpr (requires { A.column(j); }) {
        AS.col(j) = A.column(S[j]);
      } else {
        CVector e = CVector::Zero(A.cols());
        e[S[j]] = 1.0;
        AS.col(j) = A.apply(e);
      }
    }
    const CMatrix BAS = llt.solve(AS);
    CMatrix H = AS.adjoint() * BAS;
    for (Index j = 0; j < s; ++j) H(j, j) += w[S[j]];
    H = 0.5 * (H + H.adjoint()).eval();
    x_S = H.llt().solve(BAS.adjoint() * y);
    r -= AS * x_S;
  }
  const CVector u = llt.solve(r);
  // Back-projection by per-code IFFT where the operator offers it.
  CVector back;
  if constexpr (requires { A.adjoint_fft(u); }) {
    back = A.adjoint_fft(u);
  } else {
    back = A.adjoint(u);
  }
  CVector out = w_inv.cast<Complex>().cwiseProduct(back);
  for (std::size_t j = 0; j < S.size(); ++j) out[S[j]] = x_S[static_cast<Index>(j)];
  return out;
}

template <SensingOperator Op>
Real default_lambda(const Op& A, const CVector& y) {
  const CVector c = A.adjoint(y);
  return c.size() == 0 ? 0.0 : 0.1 * c.cwiseAbs().maxCoeff();
}

template <SensingOperator Op>
Sl0Result sl0_solve(const CVector& x0, Real sigma_st, const Op& A,
                    const CVector& y, const Sl0Params& params) {
  Sl0Result out;
  out.x = x0;
  out.lambda = params.lambda > 0 ? params.lambda : default_lambda(A, y);
  if (out.lambda <= 0.0) {
    // y = 0: x = 0 is the global minimiser of every L_sigma.
    out.x.setZero();
    out.final_sigma = params.sigma0;
    return out;
  }
  const Real lambda = out.lambda;
  Real sigma = std::max(sigma_st, params.sigma0);
  while (sigma >= params.sigma0) {
    Sl0Epoch epoch;
    epoch.sigma = sigma;
    Real L = sl0_objective(out.x, sigma, A, y, lambda);
    epoch.accepted_objectives.push_back(L);
    for (int it = 0; it < params.max_inner; ++it) {
      const CVector d = zeta_fast(out.x, sigma, A, y, lambda) - out.x;
      ++out.zeta_calls;
      Real beta = 1.0;
      Real L_new = sl0_objective(CVector(out.x + d), sigma, A, y, lambda);
      while (L_new > L && beta >= 1e-8) {
        beta *= params.gamma;
        L_new = sl0_objective(CVector(out.x + beta * d), sigma, A, y, lambda);
      }
      if (beta < 1e-8) break;
      out.x += beta * d;
      L = L_new;
      epoch.accepted_objectives.push_back(L);
      ++epoch.inner_iterations;
      if (beta * d.norm() < params.eta * sigma) break;
    }
    epoch.objective = L;
    const auto& seq = epoch.accepted_objectives;
    for (std::size_t i = 1; i < seq.size(); ++i) {
      if (seq[i] > seq[i - 1]) ++out.descent_violations;
    }
    epoch.support_3sigma = (out.x.cwiseAbs().array() > 3.0 * sigma).count();
    out.epochs.push_back(std::move(epoch));
    out.final_sigma = sigma;
    sigma *= params.rho;
  }
  return out;
}

namespace {

Real sigma_objective_with(Real sigma2, const CVector& x_hat,
                          const CVector& data_term) {
  Real sum = 0.0;
  for (Index t = 0; t < x_hat.size(); ++t) {
    const Real w = std::exp(-std::norm(x_hat[t]) / (2.0 * sigma2));
    sum += std::norm(w / sigma2 * x_hat[t] - data_term[t]);
  }
  return sum;
}

}  // namespace

template <SensingOperator Op>
Real sigma_st_objective(Real sigma2, const CVector& x_hat, const Op& A,
                        const CVector& y, Real lambda) {
  const CVector data_term = lambda * A.adjoint(y - A.apply(x_hat));
  return sigma_objective_with(sigma2, x_hat, data_term);
}

template <SensingOperator Op>
Real estimate_sigma_st(const CVector& x_hat, const Op& A, const CVector& y,
                       Real lambda, Real sigma0) {
  const Real peak = x_hat.size() ? x_hat.cwiseAbs().maxCoeff() : 0.0;
  if (peak <= 0.0) return std::max(sigma0, 1.0);

  const CVector data_term = lambda * A.adjoint(y - A.apply(x_hat));
  auto objective = [&](Real log_s2) {
    return sigma_objective_with(std::exp(log_s2), x_hat, data_term);
  };
  const Real lo = std::log(sigma0 * sigma0);
  const Real hi = std::max(lo, std::log(100.0 * peak * peak));
  const Real init = std::clamp(std::log(peak * peak), lo, hi);

  constexpr int kGrid = 64;
  Real best_t = init;
  Real best_v = objective(init);
  const Real h = (hi - lo) / (kGrid - 1);
  for (int i = 0; i < kGrid; ++i) {
    const Real t = lo + i * h;
    const Real v = objective(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }

  // Golden-section refinement inside the neighbouring grid cells.
  Real a = std::max(lo, best_t - h);
  Real b = std::min(hi, best_t + h);
  const Real ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  Real c = b - ratio * (b - a);
  Real d = a + ratio * (b - a);
  Real fc = objective(c);
  Real fd = objective(d);
  for (int it = 0; it < 60 && b - a > 1e-10; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = objective(d);
    }
  }
  const Real t = fc < fd ? c : d;
  if (std::min(fc, fd) < best_v) best_t = t;
  return std::sqrt(std::exp(best_t));
}

#define RANGING_ISL0_INSTANTIATE(Op)                                          \
  template Real sl0_objective(const CVector&, Real, const Op&,                \
                              const CVector&, Real);                          \
  template CVector zeta_fast(const CVector&, Real, const Op&, const CVector&, \
                             Real);                                           \
  template Real default_lambda(const Op&, const CVector&);                    \
  template Sl0Result sl0_solve(const CVector&, Real, const Op&,               \
                               const CVector&, const Sl0Params&);             \
  template Real estimate_sigma_st(const CVector&, const Op&, const CVector&,  \
                                  Real, Real);                                \
  template Real sigma_st_objective(Real, const CVector&, const Op&,           \
                                   const CVector&, Real);
RANGING_ISL0_INSTANTIATE(MeasurementModel)
RANGING_ISL0_INSTANTIATE(DenseOperator)
#undef RANGING_ISL0_INSTANTIATE

}  // namespace ranging
