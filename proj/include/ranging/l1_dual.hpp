#ifndef RANGING_L1_DUAL_HPP
#define RANGING_L1_DUAL_HPP

#include "ranging/ofdma_model.hpp"
#include "ranging/operator.hpp"
#include "ranging/types.hpp"

#include <string>
#include <vector>

namespace ranging {

/// Interior point of the Basis Pursuit dual
///   max Re(y^* g)  s.t.  f_i(g) = |a_i^* g|^2 - 1 <= 0.
struct DualState {
  CVector g;  // length M
  RVector z;  // length n, multipliers of f_i
  Real mu = 1.0;
};

struct DualDirections {
  CVector dg;
  RVector dz;
  bool ok = true;
};

struct L1Params {
  Real kappa_target = 0.8;
  int max_iters = 50;
  Real mu0 = 0.01;
  Real alpha = 0.5;
  // Tight mode ignores kappa and runs until mu <= tol and
  // ||y - A diag(z) A^* g|| <= tol ||y||. A line-search stall with
  // mu <= 10 tol and the residual within 1e3 tol ||y|| also counts as done.
  bool tight = false;
  Real tol = 1e-10;
};

struct L1Trace {
  int iteration = 0;
  Real kappa = 0.0;
  Real residual_norm = 0.0;
  Real mu = 0.0;
  Real step = 0.0;
};

struct RoughEstimate {
  CVector x_hat;
  DualState state;
  Real kappa = 0.0;
  int iterations = 0;
  bool reached_target = false;
  bool failed = false;
  std::string failure;
  std::vector<L1Trace> trace;
};

/// Newton direction of the residual below at the current mu.
template <SensingOperator Op>
DualDirections search_directions(const DualState& state, const Op& A,
                                 const CVector& y);

/// [y - A diag(z) A^* g ; -z_i f_i(g) - mu] stacked as real numbers
/// (real parts, imaginary parts, then the n centrality entries).
template <SensingOperator Op>
RVector residual(const DualState& state, const Op& A, const CVector& y);

/// Energy fraction held by the floor(M/2) largest-magnitude entries.
Real sparsity_ratio(const CVector& x_hat, Index M);

template <SensingOperator Op>
RoughEstimate primal_dual_solve(const Op& A, const CVector& y,
                                const L1Params& params);

extern template DualDirections search_directions(const DualState&,
                                                 const MeasurementModel&,
                                                 const CVector&);
extern template DualDirections search_directions(const DualState&,
                                                 const DenseOperator&,
                                                 const CVector&);
extern template RVector residual(const DualState&, const MeasurementModel&,
                                 const CVector&);
extern template RVector residual(const DualState&, const DenseOperator&,
                                 const CVector&);
extern template RoughEstimate primal_dual_solve(const MeasurementModel&,
                                                const CVector&,
                                                const L1Params&);
extern template RoughEstimate primal_dual_solve(const DenseOperator&,
                                                const CVector&,
                                                const L1Params&);

}  // namespace ranging

#endif  // RANGING_L1_DUAL_HPP
