#include "ranging/ofdma_model.hpp"

#include "ranging/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace ranging {

namespace {

// exp(-i 2 pi k / n) with the phase reduced mod n first.
Complex twiddle(long long k, long long n) {
  const long long r = ((k % n) + n) % n;
  return std::polar(1.0, -2.0 * kPi * static_cast<Real>(r) / static_cast<Real>(n));
}

}  // namespace

CodeMatrix generate_code_matrix(const SystemConfig& config) {
  if (config.M < 1 || config.G < 1) {
    throw std::invalid_argument("generate_code_matrix: M and G must be >= 1");
  }
  std::seed_seq seq{config.rng_seed, std::uint64_t{0xc0de}};
  Rng rng(seq);
  std::bernoulli_distribution coin(0.5);
  CodeMatrix codes{RMatrix(config.M, config.G)};
  for (Index l = 0; l < config.G; ++l) {
    for (Index m = 0; m < config.M; ++m) {
      codes.entries(m, l) = coin(rng) ? 1.0 : -1.0;
    }
  }
  return codes;
}

CVector circular_shift(const CVector& v, Index k) {
  const Index n = v.size();
  CVector out(n);
  if (n == 0) return out;
  const Index shift = ((k % n) + n) % n;
  for (Index i = 0; i < n; ++i) out[(i + shift) % n] = v[i];
  return out;
}

MeasurementModel::MeasurementModel(SystemConfig config, CodeMatrix codes)
    : config_(std::move(config)), codes_(std::move(codes)) {
  config_.validate();
  if (codes_.rows() != config_.M || codes_.cols() != config_.G) {
    throw std::invalid_argument("MeasurementModel: code matrix must be M x G");
  }
  const auto subcarriers = resolve_subcarriers(config_);
  bins_.reserve(subcarriers.size());
  for (int j : subcarriers) bins_.push_back(j - 1);

  const int M = config_.M;
  const int N = config_.N;
  diff_index_.resize(M, M);
  sum_index_.resize(M, M);
  for (int c = 0; c < M; ++c) {
    for (int r = 0; r < M; ++r) {
      diff_index_(r, c) = ((bins_[r] - bins_[c]) % N + N) % N;
      sum_index_(r, c) = (bins_[r] + bins_[c]) % N;
    }
  }
  partial_dft_.resize(M, config_.N1);
  for (Index q = 0; q < config_.N1; ++q) {
    for (Index m = 0; m < M; ++m) {
      partial_dft_(m, q) = twiddle(static_cast<long long>(bins_[m]) * q, N);
    }
  }
}

CVector MeasurementModel::apply(const CVector& x) const {
  if (x.size() != cols()) throw std::invalid_argument("apply: size mismatch");
  const Eigen::Map<const CMatrix> X(x.data(), config_.N1, config_.G);
  const CMatrix Y = partial_dft_ * X;
  return Y.cwiseProduct(codes_.entries.cast<Complex>()).rowwise().sum();
}

CVector MeasurementModel::adjoint(const CVector& g) const {
  if (g.size() != rows()) throw std::invalid_argument("adjoint: size mismatch");
  const CMatrix weighted = codes_.entries.cast<Complex>().array().colwise() * g.array();
  CVector out(cols());
  Eigen::Map<CMatrix>(out.data(), config_.N1, config_.G).noalias() =
      partial_dft_.adjoint() * weighted;
  return out;
}

CVector MeasurementModel::apply_fft(const CVector& x) const {
  if (x.size() != cols()) throw std::invalid_argument("apply: size mismatch");
  const int N = config_.N;
  const int N1 = config_.N1;
  CVector y = CVector::Zero(rows());
  std::vector<Complex> buf(static_cast<std::size_t>(N));
  std::vector<Complex> spec;
  for (Index g = 0; g < num_blocks(); ++g) {
    std::fill(buf.begin(), buf.end(), Complex{});
    const auto block = x.segment(g * N1, N1);
    if (block.isZero(0.0)) continue;
    for (int q = 0; q < N1; ++q) buf[q] = block[q];
    fft::forward(buf, spec);
    for (Index m = 0; m < rows(); ++m) {
      y[m] += codes_.entries(m, g) * spec[bins_[m]];
    }
  }
  return y;
}

CVector MeasurementModel::adjoint_fft(const CVector& g) const {
  if (g.size() != rows()) throw std::invalid_argument("adjoint: size mismatch");
  const int N = config_.N;
  const int N1 = config_.N1;
  CVector out(cols());
  std::vector<Complex> buf(static_cast<std::size_t>(N));
  std::vector<Complex> time;
  for (Index b = 0; b < num_blocks(); ++b) {
    std::fill(buf.begin(), buf.end(), Complex{});
    for (Index m = 0; m < rows(); ++m) buf[bins_[m]] = codes_.entries(m, b) * g[m];
    fft::inverse(buf, time);
    for (int q = 0; q < N1; ++q) out[b * N1 + q] = time[q];
  }
  return out;
}

std::vector<Complex> MeasurementModel::block_spectrum(
    const CVector& block_weights) const {
  std::vector<Complex> buf(static_cast<std::size_t>(config_.N));
  for (Index q = 0; q < block_weights.size(); ++q) buf[q] = block_weights[q];
  std::vector<Complex> spec;
  fft::forward(buf, spec);
  return spec;
}

void MeasurementModel::accumulate_block(Index g,
                                        const std::vector<Complex>& spectrum,
                                        const Eigen::MatrixXi& index,
                                        CMatrix& out) const {
  const Index M = rows();
  for (Index c = 0; c < M; ++c) {
    const Real sc = codes_.entries(c, g);
    for (Index r = 0; r < M; ++r) {
      out(r, c) += (codes_.entries(r, g) * sc) * spectrum[index(r, c)];
    }
  }
}

CMatrix MeasurementModel::gram(const CVector& weights) const {
  if (weights.size() != cols()) throw std::invalid_argument("gram: size mismatch");
  CMatrix out = CMatrix::Zero(rows(), rows());
  const int N1 = config_.N1;
  for (Index g = 0; g < num_blocks(); ++g) {
    const CVector w = weights.segment(g * N1, N1);
    if (w.isZero(0.0)) continue;
    accumulate_block(g, block_spectrum(w), diff_index_, out);
  }
  return out;
}

CMatrix MeasurementModel::gram_transpose(const CVector& weights) const {
  if (weights.size() != cols()) {
    throw std::invalid_argument("gram_transpose: size mismatch");
  }
  CMatrix out = CMatrix::Zero(rows(), rows());
  const int N1 = config_.N1;
  for (Index g = 0; g < num_blocks(); ++g) {
    const CVector w = weights.segment(g * N1, N1);
    if (w.isZero(0.0)) continue;
    accumulate_block(g, block_spectrum(w), sum_index_, out);
  }
  return out;
}

CMatrix MeasurementModel::block_gram(Index block,
                                     const CVector& block_weights) const {
  if (block < 0 || block >= num_blocks() ||
      block_weights.size() != block_length()) {
    throw std::invalid_argument("block_gram: bad block or size");
  }
  CMatrix out = CMatrix::Zero(rows(), rows());
  accumulate_block(block, block_spectrum(block_weights), diff_index_, out);
  return out;
}

CMatrix MeasurementModel::block(Index code) const {
  if (code < 0 || code >= num_blocks()) {
    throw std::out_of_range("block: code index out of range");
  }
  CMatrix E(rows(), config_.N1);
  for (Index q = 0; q < config_.N1; ++q) {
    for (Index m = 0; m < rows(); ++m) {
      E(m, q) = codes_.entries(m, code) *
                twiddle(static_cast<long long>(bins_[m]) * q, config_.N);
    }
  }
  return E;
}

CVector MeasurementModel::column(Index t) const {
  if (t < 0 || t >= cols()) throw std::out_of_range("column: index out of range");
  const Index g = t / config_.N1;
  const Index q = t % config_.N1;
  CVector a(rows());
  for (Index m = 0; m < rows(); ++m) {
    a[m] = codes_.entries(m, g) * twiddle(static_cast<long long>(bins_[m]) * q, config_.N);
  }
  return a;
}

CMatrix MeasurementModel::dense() const {
  CMatrix A(rows(), cols());
  for (Index g = 0; g < num_blocks(); ++g) {
    A.middleCols(g * config_.N1, config_.N1) = block(g);
  }
  return A;
}

CMatrix build_E(const MeasurementModel& model, Index code) {
  return model.block(code);
}

MeasurementModel build_A(const SystemConfig& config, const CodeMatrix& codes) {
  return MeasurementModel(config, codes);
}

CombinedChannel combined_channel(std::span<const ChannelRealization> channels,
                                 const SystemConfig& config) {
  CombinedChannel out{CVector::Zero(config.N1), false};
  for (const auto& ch : channels) {
    if (ch.delay < 0 || ch.delay >= config.N) {
      throw std::invalid_argument("combined_channel: delay out of range");
    }
    CVector padded = CVector::Zero(config.N);
    const Index taps = std::min<Index>(ch.taps.size(), config.N);
    padded.head(taps) = ch.taps.head(taps);
    out.h += circular_shift(padded, ch.delay).head(config.N1);
    if (ch.delay + config.P_max > config.N1) out.truncated = true;
  }
  return out;
}

CVector stacked_channels(const RangingScenario& scenario,
                         const SystemConfig& config) {
  CVector x = CVector::Zero(Index{config.G} * config.N1);
  for (int l = 0; l < config.G; ++l) {
    std::vector<ChannelRealization> users;
    for (const auto& t : scenario.terminals) {
      if (t.code == l) users.push_back(t.channel);
    }
    if (!users.empty()) {
      x.segment(Index{l} * config.N1, config.N1) =
          combined_channel(users, config).h;
    }
  }
  return x;
}

CVector simulate_received(const RangingScenario& scenario,
                          const MeasurementModel& model, Rng& rng) {
  for (const auto& t : scenario.terminals) {
    if (t.code < 0 || t.code >= model.config().G) {
      throw std::invalid_argument("simulate_received: code index out of range");
    }
  }
  CVector y = model.apply(stacked_channels(scenario, model.config()));
  if (scenario.noise_var > 0.0) {
    std::normal_distribution<Real> normal(0.0, std::sqrt(scenario.noise_var / 2));
    for (Index m = 0; m < y.size(); ++m) {
      const Real re = normal(rng);
      const Real im = normal(rng);
      y[m] += Complex(re, im);
    }
  }
  return y;
}

CVector simulate_time_domain(const RangingScenario& scenario,
                             const MeasurementModel& model) {
  const auto& cfg = model.config();
  const int N = cfg.N;
  const int Ng = cfg.Ng;
  const int Nbar = N + Ng;
  const Index M = model.rows();
  const auto& bins = model.bins();
  const Real scale = 1.0 / std::sqrt(static_cast<Real>(N));

  CVector y = CVector::Zero(M);
  for (const auto& t : scenario.terminals) {
    const auto& h = t.channel.taps;
    const int d = t.channel.delay;
    if (d + h.size() > Nbar) {
      throw std::invalid_argument("simulate_time_domain: delay + taps > N + Ng");
    }
    // s = F^* Theta^T c  (unitary IFFT of the code placed on the ranging bins)
    std::vector<Complex> s(static_cast<std::size_t>(N));
    for (int q = 0; q < N; ++q) {
      Complex acc{};
      for (Index m = 0; m < M; ++m) {
        acc += model.codes().entries(m, t.code) *
               std::conj(twiddle(static_cast<long long>(bins[m]) * q, N));
      }
      s[q] = scale * acc;
    }
    // u_{n-1} = [CP, s], u_n = [s, first Ng samples of s]
    std::vector<Complex> u(static_cast<std::size_t>(2 * Nbar));
    for (int i = 0; i < Ng; ++i) u[i] = s[N - Ng + i];
    for (int i = 0; i < N; ++i) u[Ng + i] = s[i];
    for (int i = 0; i < N; ++i) u[Nbar + i] = s[i];
    for (int i = 0; i < Ng; ++i) u[Nbar + N + i] = s[i];

    // v(k) = sum_p h_p u(k - p - d), first N samples of symbol n
    std::vector<Complex> v(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
      Complex acc{};
      for (Index p = 0; p < h.size(); ++p) {
        const Index src = Nbar + i - p - d;
        if (src >= 0) acc += h[p] * u[src];
      }
      v[i] = acc;
    }
    // Theta F v
    for (Index m = 0; m < M; ++m) {
      Complex acc{};
      for (int i = 0; i < N; ++i) {
        acc += v[i] * twiddle(static_cast<long long>(bins[m]) * i, N);
      }
      y[m] += scale * acc;
    }
  }
  return y;
}

Real ranging_power(const CVector& h) { return h.squaredNorm(); }

Real collision_probability(int K, int G) {
  if (K < 0 || G < 1) {
    throw std::invalid_argument("collision_probability: need K >= 0, G >= 1");
  }
  if (K <= 1) return 0.0;
  const Real p = 1.0 / G;
  const Real miss = 1.0 - p;
  return 1.0 - std::pow(miss, K) - K * std::pow(miss, K - 1) * p;
}

}  // namespace ranging
