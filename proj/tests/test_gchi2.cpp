#include "ranging/gchi2.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace ranging;

namespace {

RVector spectrum(std::initializer_list<Real> values) {
  RVector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (Real x : values) v[i++] = x;
  return v;
}

// Shapes that show up in the detector: one dominant weight, a flat block of
// similar weights, and a decaying spread with zeros mixed in.
std::vector<RVector> test_spectra() {
  std::vector<RVector> out;
  out.push_back(spectrum({2.0}));
  out.push_back(spectrum({1.0, 0.5, 0.25}));
  RVector flat(144);
  for (Index k = 0; k < flat.size(); ++k) flat[k] = 0.01 * (1.0 + 0.1 * std::sin(Real(k)));
  out.push_back(flat);
  RVector decay = RVector::Zero(60);
  for (Index k = 0; k < 40; ++k) decay[k] = std::exp(-0.15 * Real(k));
  out.push_back(decay);
  return out;
}

}  // namespace

TEST_CASE("CDF is zero at zero and the exponential case is exact") {
  CHECK(gchi2_cdf(0.0, spectrum({1.0, 2.0}), 0.3) == 0.0);
  for (Real lambda : {0.1, 1.0, 7.0}) {
    for (Real sigma_e2 : {0.05, 1.0}) {
      for (Real q : {0.01, 0.3, 1.0, 3.0, 12.0}) {
        const Real tau = q * lambda * sigma_e2;
        const Real expected = -std::expm1(-tau / (lambda * sigma_e2));
        CHECK(std::abs(gchi2_cdf(tau, spectrum({lambda}), sigma_e2) - expected) < 1e-9);
      }
    }
  }
}

TEST_CASE("CDF matches Monte Carlo at twenty quantiles") {
  Rng rng(2024);
  for (const auto& L : test_spectra()) {
    const Real sigma_e2 = 0.7;
    // Twenty points spanning the bulk, read off a pilot sample.
    std::vector<Real> draws(20000);
    std::exponential_distribution<Real> expo(1.0);
    for (auto& d : draws) {
      d = 0.0;
      for (Index k = 0; k < L.size(); ++k) d += L[k] * sigma_e2 * expo(rng);
    }
    std::sort(draws.begin(), draws.end());
    for (int q = 1; q <= 20; ++q) {
      const Real tau = draws[static_cast<std::size_t>((draws.size() - 1) * q / 21)];
      const Real mc = gchi2_cdf_monte_carlo(tau, L, sigma_e2, 100000, rng);
      CAPTURE(L.size());
      CAPTURE(q);
      CHECK(std::abs(gchi2_cdf(tau, L, sigma_e2) - mc) <= 0.005);
    }
  }
}

TEST_CASE("Talbot and Imhof agree") {
  for (const auto& L : test_spectra()) {
    // A lone weight leaves Imhof's integrand with a 1/v^2 tail it cannot clear.
    if ((L.array() > 0.0).count() < 2) continue;
    const Real mean = L.sum();
    for (Real f : {0.3, 0.8, 1.0, 1.3, 2.5, 5.0}) {
      const auto talbot = gchi2_survival(f * mean, L, 1.0);
      const Real imhof = gchi2_survival_imhof(f * mean, L, 1.0);
      CHECK_FALSE(talbot.monte_carlo);
      CHECK(std::abs(talbot.value - imhof) < 1e-8);
    }
  }
}

TEST_CASE("CDF is non-decreasing and tends to one") {
  for (const auto& L : test_spectra()) {
    Real prev = 0.0;
    const Real mean = L.sum();
    for (int i = 0; i <= 200; ++i) {
      const Real c = gchi2_cdf(mean * i / 10.0, L, 1.0);
      CHECK(c >= prev - 1e-10);
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      prev = c;
    }
    CHECK(prev > 1.0 - 1e-6);
  }
}

TEST_CASE("threshold inversion") {
  CHECK(threshold_for_fa(0.5, spectrum({1.0}), 1.0) == doctest::Approx(std::log(2.0)));
  for (const auto& L : test_spectra()) {
    Real prev = 0.0;
    for (Real psi : {0.5, 1e-2, 1e-4, 3.1251e-6, 1e-8}) {
      const Real tau = threshold_for_fa(psi, L, 0.4);
      CHECK(std::abs(gchi2_survival(tau, L, 0.4).value - psi) <= 1e-9 * std::max(psi, 1e-3));
      CHECK(tau > prev);
      prev = tau;
    }
  }
  CHECK_THROWS_AS(threshold_for_fa(0.0, spectrum({1.0}), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(threshold_for_fa(1.0, spectrum({1.0}), 1.0), std::invalid_argument);
  CHECK(threshold_for_fa(0.1, RVector::Zero(3), 1.0) == 0.0);
}

TEST_CASE("per-block rate from the overall false-alarm target") {
  CHECK(psi_from_pfa(0.0, 32) == 0.0);
  CHECK(psi_from_pfa(1e-4, 32) == doctest::Approx(3.1251e-6).epsilon(1e-4));
  for (Real pfa : {1e-6, 1e-4, 1e-2, 0.3}) {
    for (int G : {1, 8, 32}) {
      const Real psi = psi_from_pfa(pfa, G);
      CHECK(std::abs(-std::expm1(G * std::log1p(-psi)) - pfa) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(psi_from_pfa(1.0, 32), std::invalid_argument);
  CHECK_THROWS_AS(psi_from_pfa(0.1, 0), std::invalid_argument);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(gchi2_survival(1.0, spectrum({-1.0}), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gchi2_survival(1.0, spectrum({1.0}), 0.0), std::invalid_argument);
  CHECK(gchi2_survival(-1.0, spectrum({1.0}), 1.0).value == 1.0);
}
