// Command-line front end: one simulated trial, detection on a stored
// received vector, or a Monte Carlo sweep written as CSV.

#include "ranging/channel.hpp"
#include "ranging/harness.hpp"
#include "ranging/json_io.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>

using namespace ranging;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> pfa;
  std::optional<double> kappa;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "key = value config file");
  cmd->add_option("--seed", o.seed, "RNG seed (codes, subcarriers and trials)");
  cmd->add_option("--pfa", o.pfa, "overall false-alarm target");
  cmd->add_option("--kappa", o.kappa, "l1-stage sparsity-ratio target");
}

RunConfig resolve(const CommonOptions& o) {
  RunConfig config = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (o.seed) config.system.rng_seed = *o.seed;
  if (o.pfa) config.pipeline.pfa = *o.pfa;
  if (o.kappa) config.pipeline.kappa = *o.kappa;
  config.system.validate();
  return config;
}

void emit(const Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

int exit_code(int failures, int trials) {
  if (trials > 0 && failures * 10 > trials) {
    std::cerr << "solver failure rate " << failures << "/" << trials
              << " exceeds 10%\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-recovery initial ranging simulator"};
  app.require_subcommand(1);

  CommonOptions sim_opts;
  int sim_users = 4;
  double sim_snr = 10.0;
  std::uint64_t sim_index = 0;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "run one trial and dump it as JSON");
  add_common(sim, sim_opts);
  sim->add_option("-k,--users", sim_users, "active ranging terminals")->check(CLI::NonNegativeNumber);
  sim->add_option("--snr", sim_snr, "SNR in dB");
  sim->add_option("--trial-index", sim_index, "trial number within the seed");
  sim->add_option("-o,--out", sim_out, "output JSON path (default stdout)");

  CommonOptions det_opts;
  std::string det_input;
  std::optional<double> det_noise;
  std::string det_out;
  auto* det = app.add_subcommand("detect", "detect codes in a received vector");
  add_common(det, det_opts);
  det->add_option("-i,--input", det_input,
                  "JSON with \"y\": {\"re\": [...], \"im\": [...]} and \"noise_var\"")
      ->required();
  det->add_option("--noise-var", det_noise, "noise variance (overrides the file)");
  det->add_option("-o,--out", det_out, "output JSON path (default stdout)");

  CommonOptions sw_opts;
  std::vector<double> sw_snr{10.0};
  std::vector<int> sw_users{1, 2, 3, 4, 5, 6};
  int sw_trials = 200;
  int sw_threads = 0;
  std::vector<double> sw_extra_pfa;
  bool sw_baseline = false;
  std::string sw_out;
  std::string sw_json;
  auto* sw = app.add_subcommand("sweep", "Monte Carlo grid over SNR and user count");
  add_common(sw, sw_opts);
  sw->add_option("--snr", sw_snr, "SNR values in dB")->delimiter(',');
  sw->add_option("-k,--users", sw_users, "user counts")->delimiter(',');
  sw->add_option("--trials", sw_trials, "trials per cell")->check(CLI::PositiveNumber);
  sw->add_option("--threads", sw_threads, "worker threads (0: all cores)");
  sw->add_option("--extra-pfa", sw_extra_pfa,
                 "further P_fa targets evaluated on the same solves")
      ->delimiter(',');
  sw->add_flag("--baseline", sw_baseline, "also run the correlation baseline");
  sw->add_option("-o,--out", sw_out, "CSV path (default stdout)");
  sw->add_option("--json", sw_json, "per-cell JSON summary path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const RunConfig config = resolve(sim_opts);
      const MeasurementModel model(config.system, generate_code_matrix(config.system));
      TrialOptions options;
      options.pfas = {config.pipeline.pfa};
      const auto t = run_trial(model, config.pipeline, sim_users, sim_snr,
                               config.system.rng_seed, sim_index, options);
      Json j{{"config", to_json(config)},
             {"scenario", to_json(t.scenario)},
             {"y", to_json(t.y)},
             {"noise_var", t.scenario.noise_var},
             {"report", to_json(t.solve.report)},
             {"metrics", to_json(t.metrics)}};
      j["detection"] = t.detections.empty() ? Json(nullptr) : to_json(t.detections.front());
      emit(j, sim_out);
      return exit_code(t.metrics.failed ? 1 : 0, 1);
    }

    if (*det) {
      const RunConfig config = resolve(det_opts);
      std::ifstream in(det_input);
      if (!in) throw std::runtime_error("cannot open '" + det_input + "'");
      const Json input = Json::parse(in);
      const CVector y = complex_vector_from_json(input.at("y"));
      const double noise = det_noise ? *det_noise : input.at("noise_var").get<double>();
      if (!(noise > 0.0)) throw std::invalid_argument("noise variance must be > 0");
      const MeasurementModel model(config.system, generate_code_matrix(config.system));
      if (y.size() != model.rows()) {
        throw std::invalid_argument("y has " + std::to_string(y.size()) +
                                    " entries, config expects M = " +
                                    std::to_string(model.rows()));
      }
      const auto solve = handover_solve(model, y, handover_config(config.pipeline, noise));
      Json j{{"report", to_json(solve.report)}};
      if (!solve.report.failed) {
        const auto errors = build_error_model(solve.x_bar, model, solve.report.lambda,
                                              solve.report.final_sigma,
                                              config.pipeline.drop_taylor_term);
        const double scale =
            config.pipeline.leakage_scale
                ? leakage_scale(solve.x_bar, errors, noise, model.block_length())
                : 1.0;
        const TimingRule timing{
            config.pipeline.timing_gate,
            timing_floor(config.pipeline.timing_floor, scale * noise, model.rows())};
        auto result = detect(solve.x_bar, errors, config.pipeline.pfa, scale * noise,
                             model.block_length(), timing);
        result.noise_scale = scale;
        j["detection"] = to_json(result);
      }
      emit(j, det_out);
      return exit_code(solve.report.failed ? 1 : 0, 1);
    }

    SweepSpec spec;
    spec.config = resolve(sw_opts);
    spec.seed = spec.config.system.rng_seed;
    spec.snr_db = sw_snr;
    spec.users = sw_users;
    spec.trials = sw_trials;
    spec.threads = sw_threads;
    spec.extra_pfas = sw_extra_pfa;
    spec.baseline = sw_baseline;
    spec.stop = &g_stop;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    std::ofstream file;
    if (!sw_out.empty() && sw_out != "-") {
      file.open(sw_out);
      if (!file) throw std::runtime_error("cannot write '" + sw_out + "'");
    }
    std::ostream& csv = file.is_open() ? file : std::cout;
    write_csv_header(csv);
    csv.flush();
    Json cells = Json::array();
    int failures = 0;
    int trials = 0;
    run_sweep(spec, [&](const CellSummary& cell, const std::vector<TrialMetrics>&) {
      write_csv_row(csv, cell);
      csv.flush();
      cells.push_back(to_json(cell));
      failures += cell.failures;
      trials += cell.trials;
      std::cerr << "snr " << cell.snr_db << " dB, K = " << cell.users
                << ": ps " << cell.ps << " (" << cell.trials << " trials, "
                << cell.mean_seconds << " s/trial)\n";
    });
    if (!sw_json.empty()) emit(cells, sw_json);
    if (g_stop) std::cerr << "interrupted; partial results written\n";
    return exit_code(failures, trials);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
