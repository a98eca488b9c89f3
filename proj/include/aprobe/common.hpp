#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace aprobe {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;

// Default numerical tolerances (see docs/numerics.md).
inline constexpr double kNormTol = 1e-9;
inline constexpr double kHermTol = 1e-10;
inline constexpr double kTruncTolDefault = 1e-10;

enum class Kind { harmonic, quartic, cubic };

const char* kind_name(Kind k);
Kind kind_from_name(const std::string& name);

// Pairwise (cascade) summation: deterministic and more accurate than a
// running sum for long quadrature accumulations.
double pairwise_sum(std::span<const double> v);

}  // namespace aprobe
