#include "ranging/channel.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace ranging;

TEST_CASE("profile names round trip") {
  for (auto p : {ChannelProfile::PedA, ChannelProfile::PedB, ChannelProfile::VehA}) {
    CHECK(parse_profile(profile_name(p)) == p);
  }
  CHECK_THROWS_AS(parse_profile("TU6"), std::invalid_argument);
}

TEST_CASE("rrc pulse at zero, at the edge singularity and symmetric") {
  const Real beta = 0.22;
  CHECK(rrc_pulse(0.0, beta) == doctest::Approx(1.0 + beta * (4.0 / kPi - 1.0)));
  const Real edge = 1.0 / (4.0 * beta);
  CHECK(rrc_pulse(edge, beta) ==
        doctest::Approx(0.5 * (rrc_pulse(edge - 1e-6, beta) + rrc_pulse(edge + 1e-6, beta)))
            .epsilon(1e-5));
  for (Real t : {0.3, 1.0, 2.7, 4.9}) {
    CHECK(rrc_pulse(t, beta) == doctest::Approx(rrc_pulse(-t, beta)));
  }
}

TEST_CASE("taps have unit expected energy for every profile") {
  const SystemConfig cfg;
  for (auto p : {ChannelProfile::PedA, ChannelProfile::PedB, ChannelProfile::VehA}) {
    Rng rng(101);
    Real energy = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) energy += synthesize_channel(p, cfg, rng).taps.squaredNorm();
    CAPTURE(profile_name(p));
    CHECK(energy / draws == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("taps are truncated to P_max and delays stay below D") {
  const SystemConfig cfg;
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const auto ch = synthesize_channel(random_profile(rng), cfg, rng);
    REQUIRE(ch.taps.size() == cfg.P_max);
    CHECK(ch.delay >= 0);
    CHECK(ch.delay < 186);
  }
}

TEST_CASE("the first path peaks at tap zero") {
  SystemConfig cfg;
  Rng rng(9);
  int first_is_max = 0;
  const int draws = 500;
  for (int i = 0; i < draws; ++i) {
    const auto ch = synthesize_channel(ChannelProfile::PedA, cfg, rng);
    Index arg = 0;
    ch.taps.cwiseAbs().maxCoeff(&arg);
    first_is_max += arg <= 1 ? 1 : 0;
  }
  // Ped-A puts about 90% of its power in the first path.
  CHECK(first_is_max > draws * 3 / 4);
}

TEST_CASE("profile choice is uniform") {
  Rng rng(77);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 30000; ++i) ++counts[static_cast<int>(random_profile(rng))];
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}

TEST_CASE("channel draws are reproducible") {
  const SystemConfig cfg;
  Rng a(42), b(42);
  const auto x = synthesize_channel(ChannelProfile::VehA, cfg, a);
  const auto y = synthesize_channel(ChannelProfile::VehA, cfg, b);
  CHECK(x.taps == y.taps);
  CHECK(x.delay == y.delay);
}
