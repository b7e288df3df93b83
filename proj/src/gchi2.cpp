#include "ranging/gchi2.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>
#include <stdexcept>

namespace ranging {

namespace {

// log(1 + w) accurate for small |w|.
Complex log1p_c(Complex w) {
  if (std::abs(w) < 1e-4) return w - w * w / 2.0 + w * w * w / 3.0;
  return std::log(1.0 + w);
}

// 1 - exp(L) accurate for small |L|.
Complex one_minus_exp(Complex L) {
  if (std::abs(L) < 1e-3) {
    return -(L + L * L / 2.0 + L * L * L / 6.0 + L * L * L * L / 24.0);
  }
  return 1.0 - std::exp(L);
}

// Laplace transform of the survival function.
Complex survival_transform(Complex s, const RVector& a) {
  Complex log_phi{};
  for (Index k = 0; k < a.size(); ++k) log_phi -= log1p_c(a[k] * s);
  return one_minus_exp(log_phi) / s;
}

Real talbot(Real t, const RVector& a, int nodes) {
  const Real r = 2.0 * nodes / (5.0 * t);
  Real sum = 0.5 * (survival_transform(Complex(r), a) * std::exp(r * t)).real();
  for (int k = 1; k < nodes; ++k) {
    const Real theta = k * kPi / nodes;
    const Real cot = std::cos(theta) / std::sin(theta);
    const Complex s = r * theta * Complex(cot, 1.0);
    const Real sigma = theta + (theta * cot - 1.0) * cot;
    sum += (std::exp(t * s) * survival_transform(s, a) * Complex(1.0, sigma)).real();
  }
  return r / nodes * sum;
}

// Imhof's form for complex quadratic forms:
//   S(t) = 1/2 + (1/pi) int_0^inf sin(sum_k atan(a_k v) - t v) / (v rho(v)) dv,
//   rho(v) = prod_k sqrt(1 + a_k^2 v^2).
// Talbot struggles when many similar weights make the CDF nearly a step;
// there rho grows like v^n and this integral is short.
struct Imhof {
  const RVector& a;
  Real t;

  Real operator()(Real v) const {
    if (v <= 0.0) return a.sum() - t;
    Real theta = -t * v;
    Real log_rho = 0.0;
    for (Index k = 0; k < a.size(); ++k) {
      const Real av = a[k] * v;
      theta += std::atan(av);
      log_rho += 0.5 * std::log1p(av * av);
    }
    return std::sin(theta) / (v * std::exp(log_rho));
  }

  Real log_envelope(Real v) const {
    Real log_rho = 0.0;
    for (Index k = 0; k < a.size(); ++k) log_rho += 0.5 * std::log1p(a[k] * a[k] * v * v);
    return -std::log(v) - log_rho;
  }
};

// 7-point Gauss / 15-point Kronrod pair.
constexpr std::array<Real, 8> kXk{0.991455371120812639, 0.949107912342758525,
                                  0.864864423359769073, 0.741531185599394440,
                                  0.586087235467691130, 0.405845151377397167,
                                  0.207784955007898468, 0.0};
constexpr std::array<Real, 8> kWk{0.022935322010529225, 0.063092092629978553,
                                  0.104790010322250184, 0.140653259715525919,
                                  0.169004726639267903, 0.190350578064785410,
                                  0.204432940075298892, 0.209482141084727828};
constexpr std::array<Real, 4> kWg{0.129484966168869693, 0.279705391489276668,
                                  0.381830050505118945, 0.417959183673469388};

template <class F>
std::pair<Real, Real> kronrod(const F& f, Real lo, Real hi) {
  const Real c = 0.5 * (lo + hi);
  const Real h = 0.5 * (hi - lo);
  const Real fc = f(c);
  Real k = kWk[7] * fc;
  Real g = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const Real pair = f(c - h * kXk[j]) + f(c + h * kXk[j]);
    k += kWk[j] * pair;
    if (j % 2 == 1) g += kWg[j / 2] * pair;
  }
  return {k * h, std::abs((k - g) * h)};
}

// Returns NaN when the tolerance cannot be met within the panel budget.
Real imhof_survival(Real t, const RVector& a, Real tol) {
  const Imhof f{a, t};
  // Truncate where the envelope 1/(v rho) has fallen below tol / 10; beyond
  // that point the tail integral is bounded by the same order.
  const Real scale = 1.0 / a.maxCoeff();
  Real upper = scale;
  const Real target = std::log(0.1 * tol);
  for (int i = 0; i < 200 && f.log_envelope(upper) > target; ++i) upper *= 1.5;
  if (f.log_envelope(upper) > target) return std::numeric_limits<Real>::quiet_NaN();

  struct Panel {
    Real lo, hi, value, error;
  };
  std::vector<Panel> panels;
  const int initial = 16;
  for (int i = 0; i < initial; ++i) {
    const Real lo = upper * i / initial;
    const Real hi = upper * (i + 1) / initial;
    const auto [v, e] = kronrod(f, lo, hi);
    panels.push_back({lo, hi, v, e});
  }
  for (int it = 0; it < 2000; ++it) {
    Real total_error = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total_error += panels[i].error;
      if (panels[i].error > panels[worst].error) worst = i;
    }
    if (total_error <= tol * kPi) {
      Real integral = 0.0;
      for (const auto& p : panels) integral += p.value;
      return 0.5 + integral / kPi;
    }
    const Panel p = panels[worst];
    const Real mid = 0.5 * (p.lo + p.hi);
    const auto [v1, e1] = kronrod(f, p.lo, mid);
    const auto [v2, e2] = kronrod(f, mid, p.hi);
    panels[worst] = {p.lo, mid, v1, e1};
    panels.push_back({mid, p.hi, v2, e2});
  }
  return std::numeric_limits<Real>::quiet_NaN();
}

constexpr int kNodes = 24;
constexpr int kCheckNodes = 32;
constexpr Real kAgreement = 1e-10;
constexpr int kFallbackDraws = 100000;

}  // namespace

Gchi2Value gchi2_survival(Real tau, const RVector& Lambda, Real sigma_e2) {
  if ((Lambda.array() < 0.0).any() || sigma_e2 <= 0.0) {
    throw std::invalid_argument("gchi2: need Lambda >= 0 and sigma_e2 > 0");
  }
  if (tau <= 0.0) return {1.0, false};
  const RVector a = Lambda * sigma_e2;
  if (a.sum() <= 0.0) return {0.0, false};

  const Real s1 = talbot(tau, a, kNodes);
  const Real s2 = talbot(tau, a, kCheckNodes);
  if (std::isfinite(s1) && std::abs(s1 - s2) <= kAgreement) {
    return {std::clamp(s1, 0.0, 1.0), false};
  }
  const Real s3 = imhof_survival(tau, a, kAgreement);
  if (std::isfinite(s3)) return {std::clamp(s3, 0.0, 1.0), false};
  Rng rng(0x6a09e667f3bcc908ULL);
  return {1.0 - gchi2_cdf_monte_carlo(tau, Lambda, sigma_e2, kFallbackDraws, rng),
          true};
}

Real gchi2_survival_imhof(Real tau, const RVector& Lambda, Real sigma_e2,
                          Real tol) {
  if (tau <= 0.0) return 1.0;
  const RVector a = Lambda * sigma_e2;
  if (a.sum() <= 0.0) return 0.0;
  return imhof_survival(tau, a, tol);
}

Real gchi2_cdf(Real tau, const RVector& Lambda, Real sigma_e2) {
  if (tau <= 0.0) return 0.0;
  return 1.0 - gchi2_survival(tau, Lambda, sigma_e2).value;
}

Real gchi2_cdf_monte_carlo(Real tau, const RVector& Lambda, Real sigma_e2,
                           int draws, Rng& rng) {
  std::exponential_distribution<Real> expo(1.0);
  int below = 0;
  for (int d = 0; d < draws; ++d) {
    Real q = 0.0;
    for (Index k = 0; k < Lambda.size(); ++k) q += Lambda[k] * sigma_e2 * expo(rng);
    if (q <= tau) ++below;
  }
  return static_cast<Real>(below) / draws;
}

Real threshold_for_fa(Real psi, const RVector& Lambda, Real sigma_e2) {
  if (!(psi > 0.0 && psi < 1.0)) {
    throw std::invalid_argument("threshold_for_fa: psi must lie in (0, 1)");
  }
  if ((sigma_e2 * Lambda).sum() <= 0.0) return 0.0;

  auto survival = [&](Real t) { return gchi2_survival(t, Lambda, sigma_e2).value; };
  Real hi = sigma_e2 * (Lambda.sum() + 20.0 * std::sqrt(Lambda.squaredNorm()));
  Real s_hi = survival(hi);
  for (int widen = 0; s_hi > psi && widen < 10; ++widen) {
    hi *= 2.0;
    s_hi = survival(hi);
  }
  if (s_hi > psi) throw std::runtime_error("threshold_for_fa: bracket failure");
  if (std::abs(s_hi - psi) <= 1e-10 && s_hi > 0.0) return hi;

  // Illinois on log S(t) - log psi; S is log-concave enough for this to
  // converge superlinearly.
  const Real log_psi = std::log(psi);
  auto h = [&](Real s) { return std::log(std::max(s, 1e-300)) - log_psi; };
  Real lo = 0.0;
  Real h_lo = -log_psi;
  Real h_hi = h(s_hi);
  int side = 0;
  Real t = hi;
  for (int it = 0; it < 200; ++it) {
    t = (lo * h_hi - hi * h_lo) / (h_hi - h_lo);
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    const Real s = survival(t);
    if (std::abs(s - psi) <= 1e-10 * std::min(1.0, psi * 1e4)) return t;
    const Real ht = h(s);
    if (ht > 0.0) {
      lo = t;
      h_lo = ht;
      if (side == -1) h_hi *= 0.5;
      side = -1;
    } else {
      hi = t;
      h_hi = ht;
      if (side == 1) h_lo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  return t;
}

Real psi_from_pfa(Real pfa, int G) {
  if (pfa < 0.0 || pfa >= 1.0 || G < 1) {
    throw std::invalid_argument("psi_from_pfa: need 0 <= P_fa < 1 and G >= 1");
  }
  return -std::expm1(std::log1p(-pfa) / G);
}

}  // namespace ranging
