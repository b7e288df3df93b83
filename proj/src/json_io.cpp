#include "ranging/json_io.hpp"

#include <sstream>

namespace ranging {

Json to_json(const CVector& v) {
  Json re = Json::array();
  Json im = Json::array();
  for (Index i = 0; i < v.size(); ++i) {
    re.push_back(v[i].real());
    im.push_back(v[i].imag());
  }
  return Json{{"re", re}, {"im", im}};
}

CVector complex_vector_from_json(const Json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != im.size()) {
    throw std::invalid_argument("complex vector: re/im length mismatch");
  }
  CVector v(static_cast<Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) {
    v[static_cast<Index>(i)] = Complex(re[i].get<Real>(), im[i].get<Real>());
  }
  return v;
}

Json to_json(const RunConfig& config) {
  std::ostringstream text;
  write_config(text, config);
  Json j = Json::object();
  std::istringstream in(text.str());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  j["subcarriers_resolved"] = resolve_subcarriers(config.system);
  return j;
}

Json to_json(const RangingScenario& scenario) {
  Json terminals = Json::array();
  for (const auto& t : scenario.terminals) {
    terminals.push_back({{"code", t.code},
                         {"delay", t.channel.delay},
                         {"taps", to_json(t.channel.taps)}});
  }
  return Json{{"noise_var", scenario.noise_var}, {"terminals", terminals}};
}

RangingScenario scenario_from_json(const Json& j) {
  RangingScenario s;
  s.noise_var = j.at("noise_var").get<Real>();
  for (const auto& t : j.at("terminals")) {
    Terminal term;
    term.code = t.at("code").get<int>();
    term.channel.delay = t.at("delay").get<int>();
    term.channel.taps = complex_vector_from_json(t.at("taps"));
    s.terminals.push_back(std::move(term));
  }
  return s;
}

Json to_json(const DetectionResult& result) {
  Json detected = Json::array();
  for (const auto& d : result.detected) {
    detected.push_back({{"code", d.code}, {"timing", d.timing}, {"power", d.power}});
  }
  Json j{{"detected", detected},
         {"pfa", result.pfa},
         {"psi", result.psi},
         {"block_energy", result.block_energy},
         {"cdf_fallback", result.cdf_fallback},
         {"noise_scale", result.noise_scale}};
  j["thresholds"] = result.thresholds;
  return j;
}

Json to_json(const HandoverReport& r) {
  return Json{{"kappa", r.kappa},
              {"l1_iterations", r.l1_iterations},
              {"kappa_reached", r.kappa_reached},
              {"sigma_st", r.sigma_st},
              {"lambda", r.lambda},
              {"final_sigma", r.final_sigma},
              {"zeta_calls", r.zeta_calls},
              {"sl0_epochs", r.sl0_epochs},
              {"descent_violations", r.descent_violations},
              {"flops", r.flops},
              {"failed", r.failed},
              {"failure", r.failure},
              {"warnings", r.warnings}};
}

Json to_json(const TrialMetrics& m) {
  return Json{{"users", m.users},
              {"snr_db", m.snr_db},
              {"trial_index", m.trial_index},
              {"failed", m.failed},
              {"failure", m.failure},
              {"collision", m.collision},
              {"exact_match", m.exact_match},
              {"false_alarm", m.false_alarm},
              {"power_sq_errors", m.power_sq_errors},
              {"timing_sq_errors", m.timing_sq_errors},
              {"flops", m.flops},
              {"wall_seconds", m.wall_seconds},
              {"baseline_exact_match", m.baseline_exact_match}};
}

Json to_json(const CellSummary& c) {
  return Json{{"snr_db", c.snr_db},
              {"users", c.users},
              {"trials", c.trials},
              {"failures", c.failures},
              {"ps", c.ps},
              {"mse_power", c.mse_power},
              {"mse_timing", c.mse_timing},
              {"mean_flops", c.mean_flops},
              {"mean_seconds", c.mean_seconds},
              {"pfas", c.pfas},
              {"ps_by_pfa", c.ps_by_pfa},
              {"false_alarm_by_pfa", c.false_alarm_by_pfa},
              {"baseline_ps", c.baseline_ps}};
}

}  // namespace ranging
