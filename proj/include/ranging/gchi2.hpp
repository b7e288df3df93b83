#ifndef RANGING_GCHI2_HPP
#define RANGING_GCHI2_HPP

#include "ranging/types.hpp"

namespace ranging {

// Distribution of Q = sum_k Lambda_k sigma_e2 E_k with E_k i.i.d. unit-mean
// exponentials, i.e. ||D e||^2 for circular complex Gaussian e ~ CN(0, sigma_e2 I).

struct Gchi2Value {
  Real value = 0.0;
  bool monte_carlo = false;  // inversion did not converge; MC estimate used
};

/// P(Q > tau) by fixed-Talbot inversion of the Laplace transform
/// (1 - prod_k (1 + a_k s)^{-1}) / s, a_k = Lambda_k sigma_e2. Two node counts
/// are compared; when they disagree Imhof's integral is tried, and a 1e5-draw
/// Monte Carlo estimate is the last resort.
Gchi2Value gchi2_survival(Real tau, const RVector& Lambda, Real sigma_e2);

/// P(Q > tau) from Imhof's integral alone, to absolute error `tol`; NaN if
/// the adaptive quadrature runs out of panels.
Real gchi2_survival_imhof(Real tau, const RVector& Lambda, Real sigma_e2,
                          Real tol = 1e-10);

/// P(Q <= tau).
Real gchi2_cdf(Real tau, const RVector& Lambda, Real sigma_e2);

/// Empirical P(Q <= tau) from `draws` samples.
Real gchi2_cdf_monte_carlo(Real tau, const RVector& Lambda, Real sigma_e2,
                           int draws, Rng& rng);

/// tau with |P(Q > tau) - psi| <= 1e-10; Illinois iteration on the bracket
/// [0, sigma_e2 (sum Lambda + 20 sqrt(sum Lambda^2))], widened up to 2^10
/// times before giving up with std::runtime_error.
Real threshold_for_fa(Real psi, const RVector& Lambda, Real sigma_e2);

/// Per-block rate psi with 1 - (1 - psi)^G = P_fa.
Real psi_from_pfa(Real pfa, int G);

}  // namespace ranging

#endif  // RANGING_GCHI2_HPP
