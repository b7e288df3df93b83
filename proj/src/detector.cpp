#include "ranging/detector.hpp"

#include "ranging/gchi2.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ranging {

RVector error_model_diagonal(const CVector& x_bar, Real lambda, Real sigma,
                             bool drop_taylor_term) {
  const Real s2 = sigma * sigma;
  RVector p(x_bar.size());
  for (Index t = 0; t < x_bar.size(); ++t) {
    const Real mag2 = std::norm(x_bar[t]);
    const Real w = std::exp(-mag2 / (2.0 * s2));
    Real value = w / (lambda * s2);
    if (!drop_taylor_term) value *= 1.0 - mag2 / s2;
    p[t] = value > kPFloor ? value : kPFloor;
  }
  return p;
}

namespace {

RVector clamped_eigenvalues(const CMatrix& K) {
  const CMatrix H = 0.5 * (K + K.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(H, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseMax(0.0);
}

// Entries whose penalty is negligible against the column energy M behave as
// unpenalised in [P + A^*A]^{-1}. Treating them as exactly free avoids the
// cancellation between P^{-1} ~ 1e10 and B ~ 1e-10 in the inverse-lemma form.
// At most M - 1 are kept free (those with the smallest p) so A_S stays
// full column rank.
std::vector<Index> free_set(const RVector& p, Index M) {
  std::vector<Index> S;
  for (Index t = 0; t < p.size(); ++t) {
    if (p[t] <= kFreeRatio * static_cast<Real>(M)) S.push_back(t);
  }
  if (static_cast<Index>(S.size()) > M - 1) {
    std::sort(S.begin(), S.end(), [&](Index a, Index b) { return p[a] < p[b]; });
    S.resize(static_cast<std::size_t>(std::max<Index>(M - 1, 0)));
  }
  std::sort(S.begin(), S.end());
  return S;
}

}  // namespace

ErrorModelBlocks build_error_model(const CVector& x_bar,
                                   const MeasurementModel& model, Real lambda,
                                   Real sigma, bool drop_taylor_term) {
  const Index M = model.rows();
  const Index N1 = model.block_length();
  const RVector p = error_model_diagonal(x_bar, lambda, sigma, drop_taylor_term);
  const auto S = free_set(p, M);
  RVector p_inv = p.cwiseInverse();
  for (Index t : S) p_inv[t] = 0.0;

  ErrorModelBlocks out;
  CMatrix C = model.gram(p_inv.cast<Complex>());
  C.diagonal().array() += 1.0;
  Eigen::LLT<CMatrix> llt(C);
  CMatrix B = llt.solve(CMatrix::Identity(M, M));
  B = 0.5 * (B + B.adjoint()).eval();
  if (llt.info() != Eigen::Success || !B.allFinite()) {
    out.finite = false;
    return out;
  }

  // v_S = L e, v_T = P_T^{-1} A_T^* B (I - A_S L) e with
  // L = (A_S^* B A_S)^{-1} A_S^* B.
  const Index s = static_cast<Index>(S.size());
  CMatrix Q = B;
  CMatrix L(s, M);
  if (s > 0) {
    CMatrix AS(M, s);
    for (Index j = 0; j < s; ++j) AS.col(j) = model.column(S[j]);
    const CMatrix BAS = B * AS;
    CMatrix H = AS.adjoint() * BAS;
    H = 0.5 * (H + H.adjoint()).eval();
    L = H.ldlt().solve(CMatrix(BAS.adjoint()));
    if (!L.allFinite()) {
      out.finite = false;
      return out;
    }
    Q = B - BAS * L;
  }

  out.Lambda.reserve(model.num_blocks());
  std::size_t next = 0;
  for (Index i = 0; i < model.num_blocks(); ++i) {
    const CVector w = p_inv.segment(i * N1, N1).cwiseAbs2().cast<Complex>();
    CMatrix K = w.isZero(0.0) ? CMatrix::Zero(M, M)
                              : CMatrix(Q.adjoint() * model.block_gram(i, w) * Q);
    for (; next < S.size() && S[next] < (i + 1) * N1; ++next) {
      K += L.row(static_cast<Index>(next)).adjoint() * L.row(static_cast<Index>(next));
    }
    out.Lambda.push_back(clamped_eigenvalues(K));
    out.finite = out.finite && out.Lambda.back().allFinite();
  }
  return out;
}

ErrorModelBlocks build_error_model_dense(const CVector& x_bar, const CMatrix& A,
                                         Index block_length, Real lambda,
                                         Real sigma, bool drop_taylor_term) {
  RVector p = error_model_diagonal(x_bar, lambda, sigma, drop_taylor_term);
  for (Index t : free_set(p, A.rows())) p[t] = 0.0;
  CMatrix H = A.adjoint() * A;
  H.diagonal() += p.cast<Complex>();
  const CMatrix D = H.partialPivLu().solve(CMatrix(A.adjoint()));

  ErrorModelBlocks out;
  const Index blocks = A.cols() / block_length;
  for (Index i = 0; i < blocks; ++i) {
    const CMatrix Di = D.middleRows(i * block_length, block_length);
    out.Lambda.push_back(clamped_eigenvalues(Di.adjoint() * Di));
    out.finite = out.finite && out.Lambda.back().allFinite();
  }
  return out;
}

int first_significant_index(const CVector& h, Real gate, Real floor) {
  if (h.size() == 0) return 0;
  const Real peak = h.cwiseAbs().maxCoeff();
  if (peak <= 0.0) return 0;
  const Real level = std::max(gate * peak, std::min(floor, peak));
  for (Index t = 0; t < h.size(); ++t) {
    if (std::abs(h[t]) >= level) return static_cast<int>(t);
  }
  return 0;
}

Real timing_floor(Real sigmas, Real sigma_e2, Index M) {
  return M > 0 ? sigmas * std::sqrt(std::max(sigma_e2, 0.0) / static_cast<Real>(M)) : 0.0;
}

namespace {

DetectedCode describe(const CVector& x_bar, Index block, Index block_length,
                      const TimingRule& timing) {
  DetectedCode d;
  d.code = static_cast<int>(block);
  d.h = x_bar.segment(block * block_length, block_length);
  d.power = d.h.squaredNorm();
  d.timing = first_significant_index(d.h, timing.gate, timing.floor);
  return d;
}

std::vector<Real> block_energies(const CVector& x_bar, Index blocks,
                                 Index block_length) {
  std::vector<Real> e(static_cast<std::size_t>(blocks));
  for (Index i = 0; i < blocks; ++i) {
    e[i] = x_bar.segment(i * block_length, block_length).squaredNorm();
  }
  return e;
}

}  // namespace

Real leakage_scale(const CVector& x_bar, const ErrorModelBlocks& errors,
                   Real sigma_e2, Index block_length) {
  const Index G = static_cast<Index>(errors.Lambda.size());
  std::vector<Real> ratio;
  ratio.reserve(static_cast<std::size_t>(G));
  for (Index i = 0; i < G; ++i) {
    const Real mean = sigma_e2 * errors.Lambda[i].sum();
    if (mean > 0.0) {
      ratio.push_back(x_bar.segment(i * block_length, block_length).squaredNorm() / mean);
    }
  }
  if (ratio.empty()) return 1.0;
  const auto mid = ratio.begin() + static_cast<std::ptrdiff_t>(ratio.size() / 2);
  std::nth_element(ratio.begin(), mid, ratio.end());
  return std::max(1.0, *mid);
}

DetectionResult detect(const CVector& x_bar, const ErrorModelBlocks& errors,
                       Real pfa, Real sigma_e2, Index block_length,
                       const TimingRule& timing) {
  const Index G = static_cast<Index>(errors.Lambda.size());
  DetectionResult out;
  out.pfa = pfa;
  out.psi = psi_from_pfa(pfa, static_cast<int>(G));
  out.block_energy = block_energies(x_bar, G, block_length);
  for (Index i = 0; i < G; ++i) {
    const Real tau = out.psi > 0.0
                         ? threshold_for_fa(out.psi, errors.Lambda[i], sigma_e2)
                         : std::numeric_limits<Real>::infinity();
    out.thresholds.push_back(tau);
    if (out.block_energy[i] > tau) {
      out.detected.push_back(describe(x_bar, i, block_length, timing));
    }
  }
  return out;
}

std::vector<DetectionResult> detect_multi(const CVector& x_bar,
                                          const ErrorModelBlocks& errors,
                                          const std::vector<Real>& pfas,
                                          Real sigma_e2, Index block_length,
                                          const TimingRule& timing) {
  const Index G = static_cast<Index>(errors.Lambda.size());
  const auto energy = block_energies(x_bar, G, block_length);
  std::vector<Real> survival(static_cast<std::size_t>(G));
  bool fallback = false;
  for (Index i = 0; i < G; ++i) {
    const auto s = gchi2_survival(energy[i], errors.Lambda[i], sigma_e2);
    survival[i] = s.value;
    fallback = fallback || s.monte_carlo;
  }
  std::vector<DetectionResult> out;
  for (Real pfa : pfas) {
    DetectionResult r;
    r.pfa = pfa;
    r.psi = psi_from_pfa(pfa, static_cast<int>(G));
    r.block_energy = energy;
    r.cdf_fallback = fallback;
    for (Index i = 0; i < G; ++i) {
      // ||x_i||^2 > tau_i exactly when P(Q > ||x_i||^2) < psi.
      if (energy[i] > 0.0 && survival[i] < r.psi) {
        r.detected.push_back(describe(x_bar, i, block_length, timing));
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ranging
