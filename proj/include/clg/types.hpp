#pragma once

// Basic scalar/vector aliases shared by the whole library.  Everything runs in
// double precision; fields are flat Eigen arrays indexed x-fastest.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace clg {

using Real = double;
using Complex = std::complex<Real>;
using Index = std::ptrdiff_t;

using Vec3 = Eigen::Matrix<Real, 3, 1>;
using Mat3 = Eigen::Matrix<Real, 3, 3>;
using ArrayXr = Eigen::ArrayX<Real>;
using ArrayXc = Eigen::ArrayX<Complex>;

inline constexpr Real kPi = 3.14159265358979323846264338327950288;

} // namespace clg
