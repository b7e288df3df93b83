#ifndef RANGING_DETECTOR_HPP
#define RANGING_DETECTOR_HPP

#include "ranging/ofdma_model.hpp"
#include "ranging/types.hpp"

#include <vector>

namespace ranging {

inline constexpr Real kPFloor = 1e-10;
/// Entries with p <= kFreeRatio * M are taken in the exact P -> 0 limit.
inline constexpr Real kFreeRatio = 1e-6;

/// Per-block spectra of the linearised recovery error v = D e, where
///   D = [P + A^* A]^{-1} A^* = P^{-1} A^* [I + A P^{-1} A^*]^{-1},
///   P = (W_sigma(x)/(lambda sigma^2)) (I - diag(|x|^2/sigma^2)).
/// Lambda[i] holds the eigenvalues of D_i^* D_i (M of them), so that
/// ||v_i||^2 = sum_k Lambda[i][k] sigma_e2 E_k.
struct ErrorModelBlocks {
  std::vector<RVector> Lambda;
  bool finite = true;
};

/// Diagonal of P, clamped below at kPFloor. `drop_taylor_term` keeps only
/// W_sigma(x)/(lambda sigma^2).
RVector error_model_diagonal(const CVector& x_bar, Real lambda, Real sigma,
                             bool drop_taylor_term = false);

ErrorModelBlocks build_error_model(const CVector& x_bar,
                                   const MeasurementModel& model, Real lambda,
                                   Real sigma, bool drop_taylor_term = false);

/// Same quantity from an explicitly materialised D (small configs only).
ErrorModelBlocks build_error_model_dense(const CVector& x_bar, const CMatrix& A,
                                         Index block_length, Real lambda,
                                         Real sigma,
                                         bool drop_taylor_term = false);

struct DetectedCode {
  int code = 0;    // 0-based
  int timing = 0;  // samples
  Real power = 0.0;
  CVector h;       // length N1
};

struct DetectionResult {
  std::vector<DetectedCode> detected;
  std::vector<Real> thresholds;
  std::vector<Real> block_energy;
  Real pfa = 0.0;
  Real psi = 0.0;
  bool cdf_fallback = false;  // any survival value came from Monte Carlo
  Real noise_scale = 1.0;     // factor applied to sigma_e2 before testing
};

/// Median over blocks of ||x_i||^2 / (sigma_e2 * sum Lambda_i), floored at 1.
/// Signal the sparse fit missed reaches every block through the same linear
/// map as the noise, so inactive blocks sit at a common multiple of their
/// modelled mean. With few active codes the median reads that multiple off.
Real leakage_scale(const CVector& x_bar, const ErrorModelBlocks& errors,
                   Real sigma_e2, Index block_length);

/// First index whose magnitude reaches max(gate * max|h|, min(floor, max|h|));
/// 0 for a zero block.
int first_significant_index(const CVector& h, Real gate, Real floor = 0.0);

/// Which taps of a detected block count as nonzero. `floor` is absolute
/// (same units as h); see timing_floor() for the usual choice.
struct TimingRule {
  Real gate = 0.1;
  Real floor = 0.0;
};

/// `sigmas` per-entry noise deviations, sqrt(sigma_e2 / M) each, for unit
/// modulus columns of length M.
Real timing_floor(Real sigmas, Real sigma_e2, Index M);

/// Block test ||x_i||^2 > tau_i with tau_i set for the per-block rate implied
/// by `pfa`; timing, power and channel of every detected block.
DetectionResult detect(const CVector& x_bar, const ErrorModelBlocks& errors,
                       Real pfa, Real sigma_e2, Index block_length,
                       const TimingRule& timing = {});

/// The same test for several false-alarm targets at once. Each block costs a
/// single survival evaluation P(Q > ||x_i||^2), compared against every psi;
/// thresholds are left empty.
std::vector<DetectionResult> detect_multi(const CVector& x_bar,
                                          const ErrorModelBlocks& errors,
                                          const std::vector<Real>& pfas,
                                          Real sigma_e2, Index block_length,
                                          const TimingRule& timing = {});

}  // namespace ranging

#endif  // RANGING_DETECTOR_HPP
