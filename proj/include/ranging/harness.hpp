#ifndef RANGING_HARNESS_HPP
#define RANGING_HARNESS_HPP

#include "ranging/config.hpp"
#include "ranging/detector.hpp"
#include "ranging/handover.hpp"
#include "ranging/ofdma_model.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ranging {

/// sigma_e^2 for unit channel energy: 10^(-SNR/10).
Real noise_var_from_snr(Real snr_db);

/// Independent stream for one (seed, K, SNR, trial) cell entry.
Rng trial_rng(std::uint64_t seed, int users, Real snr_db,
              std::uint64_t trial_index);

/// K terminals with uniform codes, uniform profiles and uniform delays.
RangingScenario make_scenario(int users, Real snr_db, const SystemConfig& config,
                              Rng& rng);

struct BaselineDetection {
  int code = 0;
  int timing = 0;
  Real peak = 0.0;
};

/// Matched filter E_l^* y for every code. A code is declared when its peak
/// magnitude exceeds threshold_factor * sqrt(median |A^* y|^2); timing is
/// the argmax.
std::vector<BaselineDetection> baseline_correlation_detect(
    const CVector& y, const MeasurementModel& model, Real threshold_factor);

inline constexpr Real kDefaultBaselineFactor = 4.0;

struct TrialOptions {
  std::vector<Real> pfas;  // first entry is the primary target
  bool baseline = false;
  Real baseline_factor = kDefaultBaselineFactor;
};

struct TrialMetrics {
  int users = 0;
  Real snr_db = 0.0;
  std::uint64_t trial_index = 0;
  bool failed = false;
  std::string failure;
  bool collision = false;
  std::vector<bool> exact_match;  // one per entry of TrialOptions::pfas
  std::vector<bool> false_alarm;  // a code outside the true set was declared
  std::vector<Real> power_sq_errors;
  std::vector<Real> timing_sq_errors;
  std::uint64_t flops = 0;
  Real wall_seconds = 0.0;
  bool baseline_exact_match = false;
  HandoverReport report;
};

struct TrialOutcome {
  RangingScenario scenario;
  CVector y;
  HandoverResult solve;
  std::vector<DetectionResult> detections;  // one per pfa
  TrialMetrics metrics;
};

/// scenario -> y -> handover -> error model -> detection -> metrics.
/// Deterministic in (seed, users, snr_db, trial_index). Solver failures are
/// reported in the metrics, never thrown.
TrialOutcome run_trial(const MeasurementModel& model,
                       const PipelineConfig& pipeline, int users, Real snr_db,
                       std::uint64_t seed, std::uint64_t trial_index,
                       const TrialOptions& options);

/// Detection and metrics for a received vector whose scenario is known.
TrialOutcome evaluate_received(const MeasurementModel& model,
                               const PipelineConfig& pipeline,
                               RangingScenario scenario, CVector y,
                               const TrialOptions& options);

struct SweepSpec {
  RunConfig config;
  std::vector<Real> snr_db{10.0};
  std::vector<int> users{4};
  int trials = 200;
  std::vector<Real> extra_pfas;  // evaluated on the same solves
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  bool baseline = false;
  Real baseline_factor = kDefaultBaselineFactor;
  const std::atomic<bool>* stop = nullptr;  // checked between trials
};

struct CellSummary {
  Real snr_db = 0.0;
  int users = 0;
  int trials = 0;
  int failures = 0;
  Real ps = 0.0;
  Real mse_power = 0.0;
  Real mse_timing = 0.0;
  Real mean_flops = 0.0;
  Real mean_seconds = 0.0;
  std::vector<Real> pfas;
  std::vector<Real> ps_by_pfa;
  std::vector<Real> false_alarm_by_pfa;
  Real baseline_ps = 0.0;
  std::size_t power_samples = 0;
  std::size_t timing_samples = 0;
};

CellSummary summarize(const std::vector<TrialMetrics>& trials, Real snr_db,
                      int users, const std::vector<Real>& pfas);

/// Runs every (SNR, K) cell. `on_cell` fires after each cell, in grid order.
/// Results do not depend on the worker count.
std::vector<CellSummary> run_sweep(
    const SweepSpec& spec,
    const std::function<void(const CellSummary&,
                             const std::vector<TrialMetrics>&)>& on_cell = {});

/// Header `snr_db,users,trials,ps,mse_power,mse_timing,mean_flops`.
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const CellSummary& cell);

}  // namespace ranging

#endif  // RANGING_HARNESS_HPP
