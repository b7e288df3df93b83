#include "ranging/handover.hpp"

#include <algorithm>
#include <cmath>

namespace ranging {

HandoverConfig handover_config(const PipelineConfig& p, Real noise_var) {
  HandoverConfig c;
  c.noise_var = noise_var;
  c.lambda_noise = p.sl0_lambda_noise;
  c.sigma_st_floor = p.sigma_st_floor;
  c.kappa_target = p.kappa;
  c.l1_max_iters = p.l1_max_iters;
  c.mu0 = p.mu0;
  c.alpha = p.alpha;
  c.sl0.lambda = p.sl0_lambda;
  c.sl0.rho = p.sl0_rho;
  c.sl0.eta = p.sl0_eta;
  c.sl0.gamma = p.sl0_gamma;
  c.sl0.sigma0 = p.sl0_sigma0;
  c.sl0.max_inner = p.sl0_max_inner;
  return c;
}

HandoverResult handover_solve(const MeasurementModel& model, const CVector& y,
                              const HandoverConfig& config) {
  HandoverResult out;
  auto& rep = out.report;

  L1Params l1;
  l1.kappa_target = config.kappa_target;
  l1.max_iters = config.l1_max_iters;
  l1.mu0 = config.mu0;
  l1.alpha = config.alpha;
  const auto rough = primal_dual_solve(model, y, l1);
  out.x_hat = rough.x_hat;
  rep.kappa = rough.kappa;
  rep.l1_iterations = rough.iterations;
  rep.kappa_reached = rough.reached_target;
  if (rough.failed) {
    // A line-search stall still leaves a usable interior iterate.
    rep.warnings.push_back("l1: " + rough.failure);
    if (rough.iterations == 0) {
      rep.failed = true;
      rep.failure = "l1: " + rough.failure;
      out.x_bar = out.x_hat;
      return out;
    }
  } else if (!rough.reached_target && !y.isZero(0.0)) {
    rep.warnings.push_back("l1: kappa target not reached, handing over anyway");
  }

  Real lambda = config.sl0.lambda;
  if (lambda <= 0.0) {
    lambda = config.noise_var > 0.0 && config.lambda_noise > 0.0
                 ? config.lambda_noise / config.noise_var
                 : default_lambda(model, y);
  }
  rep.lambda = lambda;
  rep.sigma_st = estimate_sigma_st(out.x_hat, model, y, lambda, config.sl0.sigma0);
  if (out.x_hat.size() > 0 && config.sigma_st_floor > 0.0) {
    rep.sigma_st = std::max(rep.sigma_st,
                            config.sigma_st_floor * out.x_hat.cwiseAbs().maxCoeff());
  }

  Sl0Params sl0 = config.sl0;
  sl0.lambda = lambda;
  const auto refined = sl0_solve(out.x_hat, rep.sigma_st, model, y, sl0);
  out.x_bar = refined.x;
  rep.final_sigma = refined.final_sigma;
  rep.zeta_calls = refined.zeta_calls;
  rep.sl0_epochs = static_cast<int>(refined.epochs.size());
  rep.descent_violations = refined.descent_violations;
  if (!out.x_bar.allFinite()) {
    rep.failed = true;
    rep.failure = "isl0: non-finite estimate";
  }
  if (config.flop_accounting) {
    rep.flops = count_flops(model.config(), refined.zeta_calls, rough.iterations);
  }
  return out;
}

std::uint64_t flops_per_zeta(const SystemConfig& d) {
  const double G = d.G, N = d.N, M = d.M, N1 = d.N1;
  const double total = 2.0 * G * N * std::log2(N) + G * M * (M + 1) / 2.0 +
                       G * N1 + M * M * (M - 1.5) / 3.0;
  return static_cast<std::uint64_t>(std::llround(total));
}

std::uint64_t count_flops(const SystemConfig& dims, std::uint64_t zeta_calls,
                          std::uint64_t l1_iterations) {
  return (zeta_calls + l1_iterations) * flops_per_zeta(dims);
}

}  // namespace ranging
