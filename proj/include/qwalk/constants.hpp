#pragma once

#include <cmath>
#include <complex>

namespace qwalk {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Resonant kicking period (dimensionless, in units of the half-Talbot time).
inline constexpr double resonant_tau = 4.0 * pi;

inline constexpr cplx iu{0.0, 1.0};

}
