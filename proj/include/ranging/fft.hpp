#ifndef RANGING_FFT_HPP
#define RANGING_FFT_HPP

#include "ranging/types.hpp"

#include <vector>

namespace ranging::fft {

// Unnormalised transforms of length n:
//   forward: X[k] = sum_t x[t] exp(-i 2 pi k t / n)
//   inverse: x[t] = sum_k X[k] exp(+i 2 pi k t / n)   (no 1/n)
// Each thread keeps its own plan cache.
void forward(const std::vector<Complex>& in, std::vector<Complex>& out);
void inverse(const std::vector<Complex>& in, std::vector<Complex>& out);

}  // namespace ranging::fft

#endif  // RANGING_FFT_HPP
