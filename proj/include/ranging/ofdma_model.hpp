#ifndef RANGING_OFDMA_MODEL_HPP
#define RANGING_OFDMA_MODEL_HPP

#include "ranging/config.hpp"
#include "ranging/types.hpp"

#include <span>
#include <vector>

namespace ranging {

// Code indices are 0-based throughout the C++ API: code l in [0, G).

/// M x G matrix of +-1 ranging codes; column l is the code c_l.
struct CodeMatrix {
  RMatrix entries;

  Index rows() const { return entries.rows(); }
  Index cols() const { return entries.cols(); }
};

/// Seeded Rademacher codes. Deterministic in `config.rng_seed`.
CodeMatrix generate_code_matrix(const SystemConfig& config);

/// Output index i holds v[(i - k) mod n].
CVector circular_shift(const CVector& v, Index k);

/// Impulse response (length P_max) and integer delay of one terminal.
struct ChannelRealization {
  CVector taps;
  int delay = 0;
};

struct Terminal {
  int code = 0;
  ChannelRealization channel;
};

struct RangingScenario {
  std::vector<Terminal> terminals;
  Real noise_var = 0.0;
};

/// The stacked ranging measurement operator A = [E_0(:,0:N1) ... E_{G-1}(:,0:N1)].
///
/// Block l maps a length-N1 channel h to the M ranging bins:
///   (E_l h)[m] = C[m,l] * sum_q h[q] exp(-i 2 pi k_m q / N),  k_m = j_m - 1.
/// The entries have unit modulus, which is what the time-domain signal chain
/// (unitary IFFT at the terminal, unitary FFT at the base station) produces.
///
/// Every block shares the M x N1 partial DFT F[m,q] = exp(-i 2 pi k_m q / N),
/// so A x = rowsum(C .* (F X)) with X the N1 x G matrix of blocks: one GEMM.
/// Weighted Gram matrices A diag(w) A^* use one length-N FFT of each block's
/// weights, read at the bin differences.
class MeasurementModel {
 public:
  MeasurementModel(SystemConfig config, CodeMatrix codes);

  const SystemConfig& config() const { return config_; }
  const CodeMatrix& codes() const { return codes_; }
  /// 0-based FFT bins k_m of the ranging subcarriers.
  const std::vector<int>& bins() const { return bins_; }

  Index rows() const { return config_.M; }
  Index cols() const { return Index{config_.G} * config_.N1; }
  Index num_blocks() const { return config_.G; }
  Index block_length() const { return config_.N1; }

  CVector apply(const CVector& x) const;
  CVector adjoint(const CVector& g) const;
  /// The same products through one length-N (I)FFT per block.
  CVector apply_fft(const CVector& x) const;
  CVector adjoint_fft(const CVector& g) const;
  /// A diag(w) A^*.
  CMatrix gram(const CVector& weights) const;
  /// A diag(w) A^T.
  CMatrix gram_transpose(const CVector& weights) const;
  /// E_l diag(w_l) E_l^* for one block.
  CMatrix block_gram(Index block, const CVector& block_weights) const;

  /// Column t of A.
  CVector column(Index t) const;
  /// E_l(:, 0:N1) materialised.
  CMatrix block(Index code) const;
  /// A materialised (M x G*N1).
  CMatrix dense() const;

 private:
  // Adds diag(c_g) T diag(c_g) to `out`, T[m,m'] = spectrum[index(m,m')].
  void accumulate_block(Index g, const std::vector<Complex>& spectrum,
                        const Eigen::MatrixXi& index, CMatrix& out) const;
  std::vector<Complex> block_spectrum(const CVector& block_weights) const;

  SystemConfig config_;
  CodeMatrix codes_;
  std::vector<int> bins_;
  Eigen::MatrixXi diff_index_;  // (k_m - k_m') mod N
  Eigen::MatrixXi sum_index_;   // (k_m + k_m') mod N
  CMatrix partial_dft_;         // M x N1
};

/// E_l(:, 0:N1) for code `code`.
CMatrix build_E(const MeasurementModel& model, Index code);
MeasurementModel build_A(const SystemConfig& config, const CodeMatrix& codes);

struct CombinedChannel {
  CVector h;               // length N1
  bool truncated = false;  // some terminal had delay + P_max > N1
};

/// Sum of the delayed impulse responses of the terminals sharing one code,
/// truncated to N1 samples.
CombinedChannel combined_channel(std::span<const ChannelRealization> channels,
                                 const SystemConfig& config);

/// Ground-truth stacked vector x (length G*N1) of a scenario.
CVector stacked_channels(const RangingScenario& scenario,
                         const SystemConfig& config);

/// y = sum_l E_l h_l + e with e ~ CN(0, noise_var I).
CVector simulate_received(const RangingScenario& scenario,
                          const MeasurementModel& model, Rng& rng);

/// Noiseless y built sample by sample: IFFT of the code, the two ranging
/// OFDM symbols with their cyclic prefixes, linear convolution with the
/// delayed channel, FFT of the first N samples of the second symbol.
/// Uses direct DFT sums, not the FFT path of MeasurementModel.
CVector simulate_time_domain(const RangingScenario& scenario,
                             const MeasurementModel& model);

/// Gamma = h^* h.
Real ranging_power(const CVector& h);

/// Probability that a given code is chosen by more than one of K terminals.
Real collision_probability(int K, int G);

}  // namespace ranging

#endif  // RANGING_OFDMA_MODEL_HPP
