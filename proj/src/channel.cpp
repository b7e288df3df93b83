#include "ranging/channel.hpp"

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

namespace ranging {

namespace {

struct PathProfile {
  std::span<const Real> delays_ns;
  std::span<const Real> powers_db;
};

constexpr std::array<Real, 4> kPedADelay{0, 110, 190, 410};
constexpr std::array<Real, 4> kPedAPower{0, -9.7, -19.2, -22.8};
constexpr std::array<Real, 6> kPedBDelay{0, 200, 800, 1200, 2300, 3700};
constexpr std::array<Real, 6> kPedBPower{0, -0.9, -4.9, -8.0, -7.8, -23.9};
constexpr std::array<Real, 6> kVehADelay{0, 310, 710, 1090, 1730, 2510};
constexpr std::array<Real, 6> kVehAPower{0, -1, -9, -10, -15, -20};

PathProfile lookup(ChannelProfile profile) {
  switch (profile) {
    case ChannelProfile::PedA: return {kPedADelay, kPedAPower};
    case ChannelProfile::PedB: return {kPedBDelay, kPedBPower};
    case ChannelProfile::VehA: return {kVehADelay, kVehAPower};
  }
  throw std::invalid_argument("unknown channel profile");
}

constexpr Real kRollOff = 0.22;
constexpr Real kPulseHalfWidth = 5.0;

}  // namespace

ChannelProfile parse_profile(std::string_view name) {
  if (name == "PedA") return ChannelProfile::PedA;
  if (name == "PedB") return ChannelProfile::PedB;
  if (name == "VehA") return ChannelProfile::VehA;
  throw std::invalid_argument("unknown channel profile '" + std::string(name) + "'");
}

std::string profile_name(ChannelProfile profile) {
  switch (profile) {
    case ChannelProfile::PedA: return "PedA";
    case ChannelProfile::PedB: return "PedB";
    case ChannelProfile::VehA: return "VehA";
  }
  return "unknown";
}

Real rrc_pulse(Real t, Real beta) {
  if (std::abs(t) < 1e-12) return 1.0 + beta * (4.0 / kPi - 1.0);
  const Real edge = 1.0 / (4.0 * beta);
  if (beta > 0 && std::abs(std::abs(t) - edge) < 1e-9) {
    return beta / std::sqrt(2.0) *
           ((1 + 2 / kPi) * std::sin(kPi / (4 * beta)) +
            (1 - 2 / kPi) * std::cos(kPi / (4 * beta)));
  }
  const Real num = std::sin(kPi * t * (1 - beta)) +
                   4 * beta * t * std::cos(kPi * t * (1 + beta));
  const Real den = kPi * t * (1 - std::pow(4 * beta * t, 2));
  return num / den;
}

ChannelRealization synthesize_channel(ChannelProfile profile,
                                      const SystemConfig& config, Rng& rng) {
  const auto paths = lookup(profile);
  const Index P = config.P_max;
  const std::size_t L = paths.delays_ns.size();

  // Pulse samples per path and the expected tap energy they imply.
  RMatrix shape = RMatrix::Zero(P, static_cast<Index>(L));
  Real expected_energy = 0.0;
  for (std::size_t k = 0; k < L; ++k) {
    const Real centre = paths.delays_ns[k] / config.sample_period_ns;
    const Real power = std::pow(10.0, paths.powers_db[k] / 10.0);
    for (Index n = 0; n < P; ++n) {
      const Real t = static_cast<Real>(n) - centre;
      if (std::abs(t) <= kPulseHalfWidth) shape(n, k) = rrc_pulse(t, kRollOff);
    }
    expected_energy += power * shape.col(k).squaredNorm();
  }

  std::normal_distribution<Real> normal(0.0, std::sqrt(0.5));
  CVector taps = CVector::Zero(P);
  for (std::size_t k = 0; k < L; ++k) {
    const Real amp = std::sqrt(std::pow(10.0, paths.powers_db[k] / 10.0));
    const Real re = normal(rng);
    const Real im = normal(rng);
    taps += (amp * Complex(re, im)) * shape.col(k).cast<Complex>();
  }
  taps /= std::sqrt(expected_energy);

  std::uniform_int_distribution<int> delay(0, config.D - 1);
  return ChannelRealization{taps, delay(rng)};
}

ChannelProfile random_profile(Rng& rng) {
  std::uniform_int_distribution<int> pick(0, 2);
  return static_cast<ChannelProfile>(pick(rng));
}

}  // namespace ranging
