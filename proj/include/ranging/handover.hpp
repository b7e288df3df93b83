#ifndef RANGING_HANDOVER_HPP
#define RANGING_HANDOVER_HPP

#include "ranging/config.hpp"
#include "ranging/isl0.hpp"
#include "ranging/l1_dual.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ranging {

struct HandoverConfig {
  Real kappa_target = 0.8;
  int l1_max_iters = 50;
  Real mu0 = 0.01;
  Real alpha = 0.5;
  Sl0Params sl0;
  // With sl0.lambda <= 0: lambda = lambda_noise / noise_var when both are
  // positive, otherwise 0.1 ||A^* y||_inf.
  Real noise_var = 0.0;
  Real lambda_noise = 2.0;
  // ISL0 starts no lower than sigma_st_floor * max|x_hat|. The fitted
  // sigma_st tends to land near sigma0, which skips the continuation.
  Real sigma_st_floor = 2.0;
  bool flop_accounting = true;
};

HandoverConfig handover_config(const PipelineConfig& pipeline,
                               Real noise_var = 0.0);

struct HandoverReport {
  Real kappa = 0.0;
  int l1_iterations = 0;
  bool kappa_reached = false;
  Real sigma_st = 0.0;
  Real lambda = 0.0;
  Real final_sigma = 0.0;
  int zeta_calls = 0;
  int sl0_epochs = 0;
  int descent_violations = 0;
  std::uint64_t flops = 0;
  bool failed = false;
  std::string failure;  // "<stage>: <message>"
  std::vector<std::string> warnings;
};

struct HandoverResult {
  CVector x_bar;
  CVector x_hat;
  HandoverReport report;
};

/// Rough l1 estimate to the target kappa, then ISL0 from sigma_st.
HandoverResult handover_solve(const MeasurementModel& model, const CVector& y,
                              const HandoverConfig& config);

/// Flops of one zeta evaluation:
///   2 G N log2 N + G M (M+1)/2 + G N1 + M^2 (M - 1.5)/3.
std::uint64_t flops_per_zeta(const SystemConfig& dims);

/// flops_per_zeta charged for every zeta call and every l1 iteration
/// (both are dominated by one Gram build and one M x M factorisation).
std::uint64_t count_flops(const SystemConfig& dims, std::uint64_t zeta_calls,
                          std::uint64_t l1_iterations = 0);

}  // namespace ranging

#endif  // RANGING_HANDOVER_HPP
