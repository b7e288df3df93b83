#include "ranging/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ranging {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("config: bad value for '" + key + "': '" +
                                text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  throw std::invalid_argument("config: bad boolean for '" + key + "'");
}

std::vector<int> parse_int_list(const std::string& key,
                                const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number<int>(key, item));
  }
  return out;
}

}  // namespace

void SystemConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("SystemConfig: " + what);
  };
  if (N < 2) fail("N must be >= 2");
  if (Ng < 0) fail("Ng must be >= 0");
  if (M < 1 || M > N) fail("M must satisfy 1 <= M <= N");
  if (G < 1) fail("G must be >= 1");
  if (D < 1 || D >= N) fail("D must satisfy 1 <= D < N");
  if (P_max < 1) fail("P_max must be >= 1");
  if (N1 < 1 || N1 > N) fail("N1 must satisfy 1 <= N1 <= N");
  if (D + P_max > N + Ng) fail("D + P_max must not exceed N + Ng");
  if (!subcarriers.empty()) {
    if (static_cast<int>(subcarriers.size()) != M) {
      fail("explicit subcarrier list must have M entries");
    }
    std::vector<int> sorted = subcarriers;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      fail("subcarrier indices must be distinct");
    }
    if (sorted.front() < 1 || sorted.back() > N) {
      fail("subcarrier indices must lie in [1, N]");
    }
  }
}

std::vector<int> resolve_subcarriers(const SystemConfig& config) {
  if (!config.subcarriers.empty()) {
    std::vector<int> sorted = config.subcarriers;
    std::sort(sorted.begin(), sorted.end());
    return sorted;
  }
  std::vector<int> out(static_cast<std::size_t>(config.M));
  if (config.layout == SubcarrierLayout::Even) {
    const int step = config.N / config.M;
    for (int m = 0; m < config.M; ++m) out[m] = 1 + m * step;
    return out;
  }
  // Seeded partial Fisher-Yates over [1, N]; a separate stream from the codes.
  std::seed_seq seq{config.rng_seed, std::uint64_t{0x5ca1ab1e}};
  std::mt19937_64 rng(seq);
  std::vector<int> pool(static_cast<std::size_t>(config.N));
  std::iota(pool.begin(), pool.end(), 1);
  for (int m = 0; m < config.M; ++m) {
    std::uniform_int_distribution<int> pick(m, config.N - 1);
    std::swap(pool[m], pool[pick(rng)]);
  }
  std::copy_n(pool.begin(), config.M, out.begin());
  std::sort(out.begin(), out.end());
  return out;
}

SystemConfig toy_config(int N, int G) {
  SystemConfig c;
  c.N = N;
  c.Ng = N / 8;
  c.M = N / 4;
  c.G = G;
  c.D = N / 4;
  c.P_max = N / 8;
  c.N1 = c.D + c.P_max;
  c.rng_seed = 7;
  return c;
}

void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value) {
  auto& s = config.system;
  auto& p = config.pipeline;
  if (key == "N") s.N = parse_number<int>(key, value);
  else if (key == "Ng") s.Ng = parse_number<int>(key, value);
  else if (key == "M") s.M = parse_number<int>(key, value);
  else if (key == "G") s.G = parse_number<int>(key, value);
  else if (key == "D") s.D = parse_number<int>(key, value);
  else if (key == "P_max") s.P_max = parse_number<int>(key, value);
  else if (key == "N1") s.N1 = parse_number<int>(key, value);
  else if (key == "sample_period_ns") s.sample_period_ns = parse_number<double>(key, value);
  else if (key == "seed") s.rng_seed = parse_number<std::uint64_t>(key, value);
  else if (key == "subcarrier_layout") {
    if (value == "random") s.layout = SubcarrierLayout::Random;
    else if (value == "even") s.layout = SubcarrierLayout::Even;
    else throw std::invalid_argument("config: subcarrier_layout must be random|even");
  } else if (key == "subcarriers") s.subcarriers = parse_int_list(key, value);
  else if (key == "kappa") p.kappa = parse_number<double>(key, value);
  else if (key == "l1_max_iters") p.l1_max_iters = parse_number<int>(key, value);
  else if (key == "mu0") p.mu0 = parse_number<double>(key, value);
  else if (key == "alpha") p.alpha = parse_number<double>(key, value);
  else if (key == "sl0_lambda") p.sl0_lambda = parse_number<double>(key, value);
  else if (key == "sl0_lambda_noise") p.sl0_lambda_noise = parse_number<double>(key, value);
  else if (key == "sigma_st_floor") p.sigma_st_floor = parse_number<double>(key, value);
  else if (key == "sl0_rho") p.sl0_rho = parse_number<double>(key, value);
  else if (key == "sl0_eta") p.sl0_eta = parse_number<double>(key, value);
  else if (key == "sl0_gamma") p.sl0_gamma = parse_number<double>(key, value);
  else if (key == "sl0_sigma0") p.sl0_sigma0 = parse_number<double>(key, value);
  else if (key == "sl0_max_inner") p.sl0_max_inner = parse_number<int>(key, value);
  else if (key == "pfa") p.pfa = parse_number<double>(key, value);
  else if (key == "timing_gate") p.timing_gate = parse_number<double>(key, value);
  else if (key == "timing_floor") p.timing_floor = parse_number<double>(key, value);
  else if (key == "drop_taylor_term") p.drop_taylor_term = parse_bool(key, value);
  else if (key == "leakage_scale") p.leakage_scale = parse_bool(key, value);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  bool n1_given = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    apply_config_value(config, key, trim(line.substr(eq + 1)));
    n1_given = n1_given || key == "N1";
  }
  if (!n1_given) config.system.N1 = config.system.P_max + config.system.D;
  config.system.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& config) {
  const auto& s = config.system;
  const auto& p = config.pipeline;
  out << std::setprecision(12);
  out << "N = " << s.N << "\nNg = " << s.Ng << "\nM = " << s.M
      << "\nG = " << s.G << "\nD = " << s.D << "\nP_max = " << s.P_max
      << "\nN1 = " << s.N1 << "\nsample_period_ns = " << s.sample_period_ns
      << "\nseed = " << s.rng_seed << "\nsubcarrier_layout = "
      << (s.layout == SubcarrierLayout::Even ? "even" : "random") << "\n";
  if (!s.subcarriers.empty()) {
    out << "subcarriers = ";
    for (std::size_t i = 0; i < s.subcarriers.size(); ++i) {
      out << (i ? "," : "") << s.subcarriers[i];
    }
    out << "\n";
  }
  out << "kappa = " << p.kappa << "\nl1_max_iters = " << p.l1_max_iters
      << "\nmu0 = " << p.mu0 << "\nalpha = " << p.alpha
      << "\nsl0_lambda = " << p.sl0_lambda
      << "\nsl0_lambda_noise = " << p.sl0_lambda_noise
      << "\nsigma_st_floor = " << p.sigma_st_floor << "\nsl0_rho = " << p.sl0_rho
      << "\nsl0_eta = " << p.sl0_eta << "\nsl0_gamma = " << p.sl0_gamma
      << "\nsl0_sigma0 = " << p.sl0_sigma0
      << "\nsl0_max_inner = " << p.sl0_max_inner << "\npfa = " << p.pfa
      << "\ntiming_gate = " << p.timing_gate
      << "\ntiming_floor = " << p.timing_floor << "\ndrop_taylor_term = "
      << (p.drop_taylor_term ? "true" : "false")
      << "\nleakage_scale = " << (p.leakage_scale ? "true" : "false") << "\n";
}

}  // namespace ranging
