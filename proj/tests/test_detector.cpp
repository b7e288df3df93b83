#include "helpers.hpp"
#include "ranging/detector.hpp"
#include "ranging/gchi2.hpp"
#include "ranging/handover.hpp"

#include <doctest.h>

#include <cmath>

using namespace ranging;
using ranging::testing::random_cvector;
using ranging::testing::random_sparse;

namespace {

MeasurementModel toy_model(int N, int G) {
  const auto cfg = toy_config(N, G);
  return MeasurementModel(cfg, generate_code_matrix(cfg));
}

struct Solved {
  CVector x_bar;
  Real lambda;
  Real sigma;
};

// A realistic plug-in point: the pipeline's own estimate on a noisy instance.
Solved solved_instance(const MeasurementModel& model, Rng& rng, Index active = 4) {
  const CVector x = random_sparse(model.cols(), active, rng);
  const CVector y = model.apply(x) + random_cvector(model.rows(), rng, std::sqrt(0.05));
  HandoverConfig hc;
  hc.noise_var = 0.1;
  const auto r = handover_solve(model, y, hc);
  return {r.x_bar, r.report.lambda, r.report.final_sigma};
}

}  // namespace

TEST_CASE("error-model diagonal") {
  CVector x(4);
  x << 0.0, 0.5, 1.0, 3.0;
  const Real lambda = 2.0, sigma = 1.0;
  const RVector p = error_model_diagonal(x, lambda, sigma);
  CHECK(p[0] == doctest::Approx(1.0 / (lambda * sigma * sigma)));
  CHECK(p[1] == doctest::Approx(std::exp(-0.125) / 2.0 * 0.75));
  CHECK(p[2] == kPFloor);  // 1 - |x|^2/sigma^2 = 0
  CHECK(p[3] == kPFloor);  // negative before the clamp
  const RVector q = error_model_diagonal(x, lambda, sigma, true);
  CHECK(q[2] == doctest::Approx(std::exp(-0.5) / 2.0));
  CHECK((q.array() > 0.0).all());
}

TEST_CASE("structured error model matches the dense one") {
  for (int N : {32, 64}) {
    for (int G : {2, 4}) {
      const auto model = toy_model(N, G);
      const CMatrix A = model.dense();
      Rng rng(static_cast<std::uint64_t>(N * 10 + G));
      for (int rep = 0; rep < 3; ++rep) {
        const auto s = solved_instance(model, rng, 3);
        for (bool drop : {false, true}) {
          const auto fast = build_error_model(s.x_bar, model, s.lambda, s.sigma, drop);
          const auto dense = build_error_model_dense(s.x_bar, A, model.block_length(),
                                                     s.lambda, s.sigma, drop);
          REQUIRE(fast.finite);
          REQUIRE(dense.finite);
          REQUIRE(fast.Lambda.size() == dense.Lambda.size());
          for (std::size_t i = 0; i < fast.Lambda.size(); ++i) {
            // Eigenvalues come back sorted ascending from both builders.
            const Real scale = std::max(dense.Lambda[i].maxCoeff(), 1e-300);
            CAPTURE(N);
            CAPTURE(G);
            CAPTURE(i);
            CHECK((fast.Lambda[i] - dense.Lambda[i]).cwiseAbs().maxCoeff() <= 1e-8 * scale);
          }
        }
      }
    }
  }
}

TEST_CASE("block spectra are non-negative with at most M nonzeros") {
  const auto model = toy_model(64, 4);
  Rng rng(4);
  const auto s = solved_instance(model, rng);
  const auto em = build_error_model(s.x_bar, model, s.lambda, s.sigma);
  REQUIRE(em.finite);
  CHECK(em.Lambda.size() == 4);
  for (const auto& L : em.Lambda) {
    CHECK(L.size() == model.rows());
    CHECK((L.array() >= 0.0).all());
  }
}

TEST_CASE("first significant index") {
  CVector h = CVector::Zero(8);
  CHECK(first_significant_index(h, 0.1) == 0);
  h[2] = 0.9;
  h[3] = 0.1;
  CHECK(first_significant_index(h, 0.1) == 2);
  h[1] = Complex(0, 0.2);
  CHECK(first_significant_index(h, 0.1) == 1);
  CHECK(first_significant_index(h, 0.3) == 2);
  CHECK(first_significant_index(h, 0.1, 0.5) == 2);
  CHECK(first_significant_index(h, 0.0, 2.0) == 2);  // floor above the peak
  CHECK(timing_floor(4.0, 0.36, 4) == doctest::Approx(1.2));
  CHECK(timing_floor(4.0, 0.36, 0) == 0.0);
}

TEST_CASE("zero estimate detects nothing") {
  const auto model = toy_model(64, 4);
  Rng rng(2);
  const auto s = solved_instance(model, rng);
  const auto em = build_error_model(s.x_bar, model, s.lambda, s.sigma);
  const auto r = detect(CVector::Zero(model.cols()), em, 1e-2, 0.1, model.block_length());
  CHECK(r.detected.empty());
  CHECK(r.thresholds.size() == 4);
}

TEST_CASE("detected blocks exceed their thresholds and multi-target detection agrees") {
  const auto model = toy_model(64, 8);
  Rng rng(13);
  for (int rep = 0; rep < 4; ++rep) {
    const auto s = solved_instance(model, rng, 5);
    const auto em = build_error_model(s.x_bar, model, s.lambda, s.sigma);
    const std::vector<Real> pfas{1e-2, 1e-4};
    const auto multi = detect_multi(s.x_bar, em, pfas, 0.1, model.block_length(), {0.3, 0.05});
    for (std::size_t k = 0; k < pfas.size(); ++k) {
      const auto single = detect(s.x_bar, em, pfas[k], 0.1, model.block_length(), {0.3, 0.05});
      REQUIRE(single.detected.size() == multi[k].detected.size());
      for (std::size_t j = 0; j < single.detected.size(); ++j) {
        const auto& d = single.detected[j];
        CHECK(d.code == multi[k].detected[j].code);
        CHECK(d.timing == multi[k].detected[j].timing);
        CHECK(single.block_energy[d.code] > single.thresholds[d.code]);
        CHECK(d.power == doctest::Approx(single.block_energy[d.code]));
        CHECK(d.h.size() == model.block_length());
      }
    }
    // A looser target never detects fewer blocks.
    CHECK(multi[0].detected.size() >= multi[1].detected.size());
  }
}

TEST_CASE("thresholds grow with the block's spectral mass") {
  std::vector<RVector> spectra;
  for (Real s : {0.5, 1.0, 2.0, 4.0}) spectra.push_back(RVector::Constant(6, s));
  const ErrorModelBlocks em{spectra, true};
  const auto r = detect(CVector::Zero(24), em, 1e-3, 0.2, 6);
  for (std::size_t i = 1; i < r.thresholds.size(); ++i) {
    CHECK(r.thresholds[i] > r.thresholds[i - 1]);
  }
}

TEST_CASE("joint rescaling leaves the decision unchanged") {
  const auto model = toy_model(64, 8);
  Rng rng(29);
  const auto s = solved_instance(model, rng, 4);
  const auto em = build_error_model(s.x_bar, model, s.lambda, s.sigma);
  const auto base = detect(s.x_bar, em, 1e-3, 0.1, model.block_length());
  for (Real c : {0.1, 3.0, 40.0}) {
    const auto scaled = detect(c * s.x_bar, em, 1e-3, c * c * 0.1, model.block_length());
    REQUIRE(scaled.detected.size() == base.detected.size());
    for (std::size_t j = 0; j < base.detected.size(); ++j) {
      CHECK(scaled.detected[j].code == base.detected[j].code);
      CHECK(scaled.detected[j].timing == base.detected[j].timing);
    }
  }
}

TEST_CASE("leakage scale reads the common excess of inactive blocks") {
  std::vector<RVector> spectra(5, RVector::Constant(4, 0.25));
  const ErrorModelBlocks em{spectra, true};
  const Real sigma_e2 = 0.2;  // modelled block mean 0.2
  CVector x = CVector::Zero(20);
  for (int i = 0; i < 5; ++i) x[4 * i] = std::sqrt(3.0 * 0.2);
  x[0] = 10.0;  // one active block does not move the median
  CHECK(leakage_scale(x, em, sigma_e2, 4) == doctest::Approx(3.0));
  CHECK(leakage_scale(CVector::Zero(20), em, sigma_e2, 4) == 1.0);
}

TEST_CASE("with the exact error map the per-block false-alarm rate is as designed") {
  const auto model = toy_model(64, 4);
  const CMatrix A = model.dense();
  Rng rng(99);
  const auto s = solved_instance(model, rng, 3);
  const auto em = build_error_model(s.x_bar, model, s.lambda, s.sigma);

  // D = [P + A^*A]^{-1} A^* with the same free-entry limit.
  RVector p = error_model_diagonal(s.x_bar, s.lambda, s.sigma);
  CMatrix H = A.adjoint() * A;
  const auto dense = build_error_model_dense(s.x_bar, A, model.block_length(),
                                             s.lambda, s.sigma);
  for (std::size_t i = 0; i < em.Lambda.size(); ++i) {
    REQUIRE((em.Lambda[i] - dense.Lambda[i]).cwiseAbs().maxCoeff() <=
            1e-8 * std::max(dense.Lambda[i].maxCoeff(), 1e-300));
  }
  for (Index t = 0; t < p.size(); ++t) {
    if (p[t] <= kFreeRatio * static_cast<Real>(model.rows())) p[t] = 0.0;
  }
  H.diagonal() += p.cast<Complex>();
  const CMatrix D = H.completeOrthogonalDecomposition().solve(CMatrix(A.adjoint()));

  const Real sigma_e2 = 0.3, psi = 0.05;
  const Index N1 = model.block_length();
  std::vector<Real> tau;
  for (const auto& L : em.Lambda) tau.push_back(threshold_for_fa(psi, L, sigma_e2));
  const int draws = 4000;
  int alarms = 0;
  for (int d = 0; d < draws; ++d) {
    const CVector v = D * random_cvector(model.rows(), rng, std::sqrt(sigma_e2 / 2));
    for (Index i = 0; i < model.num_blocks(); ++i) {
      alarms += v.segment(i * N1, N1).squaredNorm() > tau[i] ? 1 : 0;
    }
  }
  const Real n = static_cast<Real>(draws * model.num_blocks());
  const Real rate = alarms / n;
  CHECK(std::abs(rate - psi) <= 4.0 * std::sqrt(psi * (1 - psi) / n));
}
