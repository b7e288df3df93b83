#include "ranging/harness.hpp"

#include "ranging/channel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <thread>

namespace ranging {

Real noise_var_from_snr(Real snr_db) { return std::pow(10.0, -snr_db / 10.0); }

Rng trial_rng(std::uint64_t seed, int users, Real snr_db,
              std::uint64_t trial_index) {
  const auto snr_key = static_cast<std::int64_t>(std::llround(snr_db * 1000.0));
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(users),
                    static_cast<std::uint32_t>(snr_key),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(snr_key) >> 32),
                    static_cast<std::uint32_t>(trial_index),
                    static_cast<std::uint32_t>(trial_index >> 32)};
  return Rng(seq);
}

RangingScenario make_scenario(int users, Real snr_db, const SystemConfig& config,
                              Rng& rng) {
  RangingScenario scenario;
  scenario.noise_var = noise_var_from_snr(snr_db);
  std::uniform_int_distribution<int> code(0, config.G - 1);
  for (int k = 0; k < users; ++k) {
    Terminal t;
    t.code = code(rng);
    t.channel = synthesize_channel(random_profile(rng), config, rng);
    scenario.terminals.push_back(std::move(t));
  }
  return scenario;
}

std::vector<BaselineDetection> baseline_correlation_detect(
    const CVector& y, const MeasurementModel& model, Real threshold_factor) {
  std::vector<BaselineDetection> out;
  const CVector r = model.adjoint(y);
  RVector mag2 = r.cwiseAbs2();
  if (mag2.size() == 0) return out;
  std::vector<Real> sorted(mag2.data(), mag2.data() + mag2.size());
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  const Real floor = std::sqrt(*mid);
  if (floor <= 0.0) return out;

  const Index N1 = model.block_length();
  for (Index l = 0; l < model.num_blocks(); ++l) {
    Index arg = 0;
    const Real peak2 = mag2.segment(l * N1, N1).maxCoeff(&arg);
    const Real peak = std::sqrt(peak2);
    if (peak > threshold_factor * floor) {
      out.push_back({static_cast<int>(l), static_cast<int>(arg), peak});
    }
  }
  return out;
}

namespace {

std::set<int> true_codes(const RangingScenario& scenario) {
  std::set<int> codes;
  for (const auto& t : scenario.terminals) codes.insert(t.code);
  return codes;
}

}  // namespace

TrialOutcome evaluate_received(const MeasurementModel& model,
                               const PipelineConfig& pipeline,
                               RangingScenario scenario, CVector y,
                               const TrialOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  TrialOutcome out;
  out.scenario = std::move(scenario);
  out.y = std::move(y);
  auto& m = out.metrics;
  m.users = static_cast<int>(out.scenario.terminals.size());

  std::map<int, int> per_code;
  for (const auto& t : out.scenario.terminals) ++per_code[t.code];
  for (const auto& [code, count] : per_code) m.collision = m.collision || count > 1;
  const auto truth = true_codes(out.scenario);

  if (options.baseline) {
    std::set<int> found;
    for (const auto& d :
         baseline_correlation_detect(out.y, model, options.baseline_factor)) {
      found.insert(d.code);
    }
    m.baseline_exact_match = found == truth;
  }

  try {
    out.solve = handover_solve(model, out.y,
                               handover_config(pipeline, out.scenario.noise_var));
    m.report = out.solve.report;
    m.flops = m.report.flops;
    if (m.report.failed) {
      m.failed = true;
      m.failure = m.report.failure;
    } else {
      const Real sigma = m.report.final_sigma > 0 ? m.report.final_sigma
                                                  : pipeline.sl0_sigma0;
      const auto errors = build_error_model(out.solve.x_bar, model,
                                            m.report.lambda, sigma,
                                            pipeline.drop_taylor_term);
      if (!errors.finite) {
        m.failed = true;
        m.failure = "detector: non-finite error model";
      } else {
        const Real noise = std::max(out.scenario.noise_var, 1e-300);
        const Real scale = pipeline.leakage_scale
                               ? leakage_scale(out.solve.x_bar, errors, noise,
                                               model.block_length())
                               : 1.0;
        const TimingRule timing{pipeline.timing_gate,
                                timing_floor(pipeline.timing_floor, scale * noise,
                                             model.rows())};
        out.detections = detect_multi(out.solve.x_bar, errors, options.pfas,
                                      scale * noise, model.block_length(), timing);
        for (auto& d : out.detections) d.noise_scale = scale;
      }
    }
  } catch (const std::exception& e) {
    m.failed = true;
    m.failure = e.what();
  }

  for (const auto& det : out.detections) {
    std::set<int> found;
    for (const auto& d : det.detected) found.insert(d.code);
    m.exact_match.push_back(found == truth);
    bool extra = false;
    for (int c : found) extra = extra || !truth.contains(c);
    m.false_alarm.push_back(extra);
  }
  if (m.failed) {
    m.exact_match.assign(options.pfas.size(), false);
    m.false_alarm.assign(options.pfas.size(), false);
  }

  if (!m.failed && !m.collision && !out.detections.empty()) {
    const auto& cfg = model.config();
    const CVector x = stacked_channels(out.scenario, cfg);
    for (const auto& d : out.detections.front().detected) {
      for (const auto& t : out.scenario.terminals) {
        if (t.code != d.code) continue;
        const Real gamma = ranging_power(x.segment(Index{d.code} * cfg.N1, cfg.N1));
        m.power_sq_errors.push_back(std::pow(d.power - gamma, 2));
        m.timing_sq_errors.push_back(std::pow(d.timing - t.channel.delay, 2));
      }
    }
  }
  m.wall_seconds =
      std::chrono::duration<Real>(std::chrono::steady_clock::now() - start).count();
  return out;
}

TrialOutcome run_trial(const MeasurementModel& model,
                       const PipelineConfig& pipeline, int users, Real snr_db,
                       std::uint64_t seed, std::uint64_t trial_index,
                       const TrialOptions& options) {
  Rng rng = trial_rng(seed, users, snr_db, trial_index);
  auto scenario = make_scenario(users, snr_db, model.config(), rng);
  CVector y = simulate_received(scenario, model, rng);
  auto out = evaluate_received(model, pipeline, std::move(scenario), std::move(y),
                               options);
  out.metrics.snr_db = snr_db;
  out.metrics.trial_index = trial_index;
  return out;
}

CellSummary summarize(const std::vector<TrialMetrics>& trials, Real snr_db,
                      int users, const std::vector<Real>& pfas) {
  CellSummary c;
  c.snr_db = snr_db;
  c.users = users;
  c.trials = static_cast<int>(trials.size());
  c.pfas = pfas;
  c.ps_by_pfa.assign(pfas.size(), 0.0);
  c.false_alarm_by_pfa.assign(pfas.size(), 0.0);
  Real power = 0.0, timing = 0.0, flops = 0.0, seconds = 0.0, baseline = 0.0;
  for (const auto& t : trials) {
    if (t.failed) ++c.failures;
    for (std::size_t k = 0; k < pfas.size() && k < t.exact_match.size(); ++k) {
      c.ps_by_pfa[k] += t.exact_match[k] ? 1.0 : 0.0;
      c.false_alarm_by_pfa[k] += t.false_alarm[k] ? 1.0 : 0.0;
    }
    for (Real e : t.power_sq_errors) power += e;
    for (Real e : t.timing_sq_errors) timing += e;
    c.power_samples += t.power_sq_errors.size();
    c.timing_samples += t.timing_sq_errors.size();
    flops += static_cast<Real>(t.flops);
    seconds += t.wall_seconds;
    baseline += t.baseline_exact_match ? 1.0 : 0.0;
  }
  if (c.trials > 0) {
    for (auto& p : c.ps_by_pfa) p /= c.trials;
    for (auto& p : c.false_alarm_by_pfa) p /= c.trials;
    c.mean_flops = flops / c.trials;
    c.mean_seconds = seconds / c.trials;
    c.baseline_ps = baseline / c.trials;
  }
  c.ps = c.ps_by_pfa.empty() ? 0.0 : c.ps_by_pfa.front();
  c.mse_power = c.power_samples ? power / c.power_samples : 0.0;
  c.mse_timing = c.timing_samples ? timing / c.timing_samples : 0.0;
  return c;
}

std::vector<CellSummary> run_sweep(
    const SweepSpec& spec,
    const std::function<void(const CellSummary&,
                             const std::vector<TrialMetrics>&)>& on_cell) {
  if (spec.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  const MeasurementModel model(spec.config.system,
                               generate_code_matrix(spec.config.system));
  TrialOptions options;
  options.pfas.push_back(spec.config.pipeline.pfa);
  options.pfas.insert(options.pfas.end(), spec.extra_pfas.begin(),
                      spec.extra_pfas.end());
  options.baseline = spec.baseline;
  options.baseline_factor = spec.baseline_factor;

  int workers = spec.threads > 0 ? spec.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, spec.trials);

  std::vector<CellSummary> cells;
  for (Real snr : spec.snr_db) {
    for (int users : spec.users) {
      std::vector<TrialMetrics> results(static_cast<std::size_t>(spec.trials));
      std::vector<char> done(results.size(), 0);
      std::atomic<int> next{0};
      auto work = [&] {
        for (int i = next++; i < spec.trials; i = next++) {
          if (spec.stop && spec.stop->load()) return;
          results[i] = run_trial(model, spec.config.pipeline, users, snr,
                                 spec.seed, static_cast<std::uint64_t>(i), options)
                           .metrics;
          done[i] = 1;
        }
      };
      std::vector<std::thread> pool;
      for (int w = 1; w < workers; ++w) pool.emplace_back(work);
      work();
      for (auto& t : pool) t.join();

      std::vector<TrialMetrics> completed;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (done[i]) completed.push_back(std::move(results[i]));
      }
      if (completed.empty()) return cells;
      cells.push_back(summarize(completed, snr, users, options.pfas));
      if (on_cell) on_cell(cells.back(), completed);
      if (spec.stop && spec.stop->load()) return cells;
    }
  }
  return cells;
}

void write_csv_header(std::ostream& out) {
  out << "snr_db,users,trials,ps,mse_power,mse_timing,mean_flops\n";
}

void write_csv_row(std::ostream& out, const CellSummary& c) {
  out << std::setprecision(10) << c.snr_db << ',' << c.users << ',' << c.trials
      << ',' << c.ps << ',' << c.mse_power << ',' << c.mse_timing << ','
      << c.mean_flops << '\n';
}

}  // namespace ranging
