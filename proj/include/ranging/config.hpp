#ifndef RANGING_CONFIG_HPP
#define RANGING_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ranging {

enum class SubcarrierLayout { Random, Even };

/// OFDMA and ranging-channel dimensions.
///
/// Subcarrier indices are 1-based as in the usual j_m notation. When
/// `subcarriers` is empty the set is generated from `layout` and `rng_seed`
/// by `resolve_subcarriers`.
struct SystemConfig {
  int N = 1024;        // subcarriers per OFDM core symbol
  int Ng = 64;         // cyclic prefix length
  int M = 144;         // ranging subcarriers
  int G = 32;          // ranging codes
  int D = 186;         // delay bound, d in [0, D)
  int P_max = 30;      // channel order
  int N1 = 216;        // truncation length, default P_max + D
  double sample_period_ns = 89.28;
  std::uint64_t rng_seed = 1;
  SubcarrierLayout layout = SubcarrierLayout::Random;
  std::vector<int> subcarriers;

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

/// Sorted 1-based ranging subcarrier indices for `config`.
std::vector<int> resolve_subcarriers(const SystemConfig& config);

/// A scaled-down configuration used by fast tests.
SystemConfig toy_config(int N = 64, int G = 4);

/// Solver and detector knobs that travel with a system configuration in
/// config files.
struct PipelineConfig {
  double kappa = 0.8;
  int l1_max_iters = 50;
  double mu0 = 0.01;
  double alpha = 0.5;
  double sl0_lambda = 0.0;        // > 0 fixes lambda
  double sl0_lambda_noise = 2.0;  // else lambda = this / sigma_e2 when known
  double sigma_st_floor = 2.0;    // sigma_st >= this * max|x_hat|
  double sl0_rho = 0.3;
  double sl0_eta = 0.5;
  double sl0_gamma = 0.5;
  double sl0_sigma0 = 0.001;
  int sl0_max_inner = 100;
  double pfa = 1e-4;
  double timing_gate = 0.1;
  double timing_floor = 4.0;  // in sqrt(c sigma_e2 / M) units, 0 disables
  bool drop_taylor_term = false;
  bool leakage_scale = true;  // see leakage_scale() in detector.hpp
};

struct RunConfig {
  SystemConfig system;
  PipelineConfig pipeline;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys throw.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
void write_config(std::ostream& out, const RunConfig& config);

/// Applies a single `key`/`value` pair (shared by files and CLI overrides).
void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value);

}  // namespace ranging

#endif  // RANGING_CONFIG_HPP
