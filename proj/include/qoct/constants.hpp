#pragma once

#include <numbers>

namespace qoct {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;

// FWHM of a Gaussian = kGaussianFwhm * sigma
inline constexpr double kGaussianFwhm = 2.3548200450309493;  // 2 sqrt(2 ln 2)

}  // namespace qoct
