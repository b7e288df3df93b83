#ifndef RANGING_CHANNEL_HPP
#define RANGING_CHANNEL_HPP

#include "ranging/config.hpp"
#include "ranging/ofdma_model.hpp"
#include "ranging/types.hpp"

#include <string>
#include <string_view>

namespace ranging {

enum class ChannelProfile { PedA, PedB, VehA };

/// Parses "PedA", "PedB" or "VehA"; throws std::invalid_argument otherwise.
ChannelProfile parse_profile(std::string_view name);
std::string profile_name(ChannelProfile profile);

/// Root-raised-cosine pulse with roll-off `beta`, time in symbol periods,
/// normalised so that p(0) = 1 + beta(4/pi - 1).
Real rrc_pulse(Real t, Real beta = 0.22);

/// ITU tapped-delay-line realisation sampled at the configured period.
///
/// Each path is a circular Gaussian gain shaped by an RRC pulse
/// (roll-off 0.22, ten periods long) centred at the path delay, with the
/// first path peaking at tap 0. Taps are truncated to P_max and scaled so
/// that E||taps||^2 = 1. The delay is uniform on [0, D).
ChannelRealization synthesize_channel(ChannelProfile profile,
                                      const SystemConfig& config, Rng& rng);

/// Picks one of the three profiles with equal probability.
ChannelProfile random_profile(Rng& rng);

}  // namespace ranging

#endif  // RANGING_CHANNEL_HPP
