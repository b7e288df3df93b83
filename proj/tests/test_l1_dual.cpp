#include "helpers.hpp"
#include "ranging/l1_dual.hpp"

#include <doctest.h>

#include <cmath>

using namespace ranging;
using ranging::testing::random_cmatrix;
using ranging::testing::random_cvector;
using ranging::testing::random_sparse;

namespace {

// A strictly interior random state.
DualState interior_state(const DenseOperator& A, Rng& rng) {
  CVector g = random_cvector(A.rows(), rng);
  const Real peak = A.adjoint(g).cwiseAbs().maxCoeff();
  g *= 0.7 / peak;
  std::uniform_real_distribution<Real> u(0.2, 2.0);
  RVector z(A.cols());
  for (Index i = 0; i < z.size(); ++i) z[i] = u(rng);
  return DualState{g, z, 0.3};
}

}  // namespace

TEST_CASE("search directions are the Newton step of the residual") {
  Rng rng(21);
  const DenseOperator A(random_cmatrix(8, 24, rng));
  const CVector y = random_cvector(8, rng);
  for (int rep = 0; rep < 5; ++rep) {
    const DualState st = interior_state(A, rng);
    const auto d = search_directions(st, A, y);
    REQUIRE(d.ok);
    const RVector r0 = residual(st, A, y);
    // Directional derivative of the residual along the step equals -r0.
    const Real eps = 1e-6;
    DualState plus{st.g + eps * d.dg, st.z + eps * d.dz, st.mu};
    DualState minus{st.g - eps * d.dg, st.z - eps * d.dz, st.mu};
    const RVector jd = (residual(plus, A, y) - residual(minus, A, y)) / (2 * eps);
    CHECK((jd + r0).norm() <= 1e-6 * r0.norm());
  }
}

TEST_CASE("residual and directions vanish at a modified KKT point") {
  Rng rng(4);
  const DenseOperator A(random_cmatrix(6, 12, rng));
  DualState st = interior_state(A, rng);
  // Choose z on the central path, then y to make stationarity exact.
  const CVector q = A.adjoint(st.g);
  const RVector f = q.cwiseAbs2().array() - 1.0;
  st.z = -st.mu * f.cwiseInverse();
  const CVector y = A.apply((st.z.cast<Complex>().array() * q.array()).matrix());
  CHECK(residual(st, A, y).norm() < 1e-12);
  const auto d = search_directions(st, A, y);
  CHECK(d.dg.norm() < 1e-10);
  CHECK(d.dz.norm() < 1e-10);
}

TEST_CASE("sparsity ratio") {
  CVector x = CVector::Zero(10);
  CHECK(sparsity_ratio(x, 8) == 0.0);
  x[2] = 3.0;
  x[7] = Complex(0, 1);
  CHECK(sparsity_ratio(x, 8) == doctest::Approx(1.0));
  const CVector ones = CVector::Ones(16);
  CHECK(sparsity_ratio(ones, 8) == doctest::Approx(0.25));
}

TEST_CASE("zero data stops immediately") {
  Rng rng(1);
  const DenseOperator A(random_cmatrix(5, 15, rng));
  const auto r = primal_dual_solve(A, CVector::Zero(5), L1Params{});
  CHECK(r.iterations == 0);
  CHECK(r.kappa == 0.0);
  CHECK(r.x_hat.isZero(0.0));
}

TEST_CASE("feasibility and monotone residual along the iterations") {
  Rng rng(8);
  const DenseOperator A(random_cmatrix(20, 100, rng));
  const CVector x = random_sparse(100, 3, rng);
  const CVector y = A.apply(x);
  L1Params p;
  p.tight = true;
  const auto r = primal_dual_solve(A, y, p);
  REQUIRE_FALSE(r.failed);
  CHECK((r.state.z.array() >= 0.0).all());
  CHECK(A.adjoint(r.state.g).cwiseAbs().maxCoeff() <= 1.0);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].step > 0.0);
  }
  // Tight convergence on noiseless data.
  CHECK(A.adjoint(r.state.g).cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-3));
  const Real l1 = r.x_hat.cwiseAbs().sum();
  const Real dual = (y.adjoint() * r.state.g)(0).real();
  CHECK(std::abs(l1 - dual) <= 1e-3 * l1);
  const Real align = (r.state.g.adjoint() * A.apply(r.x_hat))(0).real();
  CHECK(align >= (1 - 1e-3) * l1);
  CHECK((r.x_hat - x).norm() <= 1e-4 * x.norm());
}
