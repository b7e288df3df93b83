#ifndef RANGING_ISL0_HPP
#define RANGING_ISL0_HPP

#include "ranging/ofdma_model.hpp"
#include "ranging/operator.hpp"
#include "ranging/types.hpp"

#include <vector>

namespace ranging {

struct Sl0Params {
  Real lambda = 0.0;  // <= 0 selects 0.1 ||A^* y||_inf
  Real rho = 0.3;
  Real eta = 0.5;
  Real gamma = 0.5;
  Real sigma0 = 0.001;
  int max_inner = 100;
};

inline constexpr Real kWeightFloor = 1e-12;

/// exp(-a^2 / (2 sigma^2)).
Real f_sigma(Real a, Real sigma);
/// sum_t f_sigma(|x_t|).
Real big_F(const CVector& x, Real sigma);
/// w_t = f_sigma(|x_t|), floored at kWeightFloor.
RVector smoothing_weights(const CVector& x, Real sigma);

/// L_sigma(x) = -F_sigma(x) + (lambda/2) ||y - A x||^2.
template <SensingOperator Op>
Real sl0_objective(const CVector& x, Real sigma, const Op& A, const CVector& y,
                   Real lambda);

/// lambda [W/sigma^2 + lambda A^* A]^{-1} A^* y with an explicit n x n solve.
CVector zeta_dense(const CVector& x, Real sigma, const CMatrix& A,
                   const CVector& y, Real lambda);

/// W^{-1} A^* [I/(lambda sigma^2) + A W^{-1} A^*]^{-1} y; only an M x M solve.
/// Entries with w_t < 1e-3 (at most 2M of them) are solved for through a
/// small Schur complement instead of carrying 1/w_t into the M x M system.
template <SensingOperator Op>
CVector zeta_fast(const CVector& x, Real sigma, const Op& A, const CVector& y,
                  Real lambda);

/// Default data-fit weight 0.1 ||A^* y||_inf.
template <SensingOperator Op>
Real default_lambda(const Op& A, const CVector& y);

struct Sl0Epoch {
  Real sigma = 0.0;
  int inner_iterations = 0;
  Real objective = 0.0;
  Index support_3sigma = 0;
  // Objective after every accepted step of this epoch, starting value first.
  std::vector<Real> accepted_objectives;
};

struct Sl0Result {
  CVector x;
  Real lambda = 0.0;
  Real final_sigma = 0.0;
  int zeta_calls = 0;
  int descent_violations = 0;
  std::vector<Sl0Epoch> epochs;
};

template <SensingOperator Op>
Sl0Result sl0_solve(const CVector& x0, Real sigma_st, const Op& A,
                    const CVector& y, const Sl0Params& params);

/// Starting sigma: the sigma minimising
///   || (W_sigma(x)/sigma^2) x - lambda A^*(y - A x) ||^2
/// over sigma^2 in [sigma0^2, (10 max|x|)^2], by a log-grid scan refined with
/// golden section, never worse than sigma = max|x|.
template <SensingOperator Op>
Real estimate_sigma_st(const CVector& x_hat, const Op& A, const CVector& y,
                       Real lambda, Real sigma0 = 0.001);

/// The objective minimised by estimate_sigma_st, as a function of sigma^2.
template <SensingOperator Op>
Real sigma_st_objective(Real sigma2, const CVector& x_hat, const Op& A,
                        const CVector& y, Real lambda);

#define RANGING_ISL0_EXTERN(Op)                                               \
  extern template Real sl0_objective(const CVector&, Real, const Op&,         \
                                     const CVector&, Real);                   \
  extern template CVector zeta_fast(const CVector&, Real, const Op&,          \
                                    const CVector&, Real);                    \
  extern template Real default_lambda(const Op&, const CVector&);             \
  extern template Sl0Result sl0_solve(const CVector&, Real, const Op&,        \
                                      const CVector&, const Sl0Params&);      \
  extern template Real estimate_sigma_st(const CVector&, const Op&,           \
                                         const CVector&, Real, Real);         \
  extern template Real sigma_st_objective(Real, const CVector&, const Op&,    \
                                          const CVector&, Real);
RANGING_ISL0_EXTERN(MeasurementModel)
RANGING_ISL0_EXTERN(DenseOperator)
#undef RANGING_ISL0_EXTERN

}  // namespace ranging

#endif  // RANGING_ISL0_HPP
