#ifndef RANGING_TYPES_HPP
#define RANGING_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

namespace ranging {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

/// One independent stream per trial; every random draw goes through one.
using Rng = std::mt19937_64;

inline constexpr Real kPi = 3.14159265358979323846;

}  // namespace ranging

#endif  // RANGING_TYPES_HPP
