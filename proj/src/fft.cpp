#include "ranging/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace ranging::fft {

namespace {

Eigen::FFT<Real>& engine() {
  thread_local Eigen::FFT<Real> instance = [] {
    Eigen::FFT<Real> f;
    f.SetFlag(Eigen::FFT<Real>::Unscaled);
    return f;
  }();
  return instance;
}

}  // namespace

void forward(const std::vector<Complex>& in, std::vector<Complex>& out) {
  engine().fwd(out, in);
}

void inverse(const std::vector<Complex>& in, std::vector<Complex>& out) {
  engine().inv(out, in);
}

}  // namespace ranging::fft
