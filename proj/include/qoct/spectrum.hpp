#pragma once

#include "qoct/constants.hpp"

namespace qoct {

// Conversion from a wavelength FWHM of the measured spectral density to the
// standard deviation of the Gaussian density in angular frequency:
//   delta_omega = 2 pi c delta_lambda / lambda^2,  sigma = delta_omega / (2 sqrt(2 ln 2))
// Throws std::domain_error on non-positive input.
double sigma_from_fwhm(double center_wavelength_m, double fwhm_wavelength_m);

// Gaussian spectral density |g(omega)|^2 of the photons, centered at
// omega_p / 2. Widths are stored as measured (wavelength FWHM) and exposed as
// the density's sigma in rad/s.
struct SpectrumModel {
  double center_wavelength_m = 1560e-9;
  double fwhm_wavelength_m = 44e-9;

  double sigma_omega() const { return sigma_from_fwhm(center_wavelength_m, fwhm_wavelength_m); }
  double center_omega() const { return 2.0 * kPi * kSpeedOfLight / center_wavelength_m; }

  // Normalized density at detuning Omega = omega - omega_p/2.
  double density(double detuning) const;

  // Carrier spatial frequency 1/lambda_c and sideband FWHM dlambda/lambda^2,
  // both in 1/m; these are what the interferogram spectrum shows.
  double carrier_spatial_frequency() const { return 1.0 / center_wavelength_m; }
  double sideband_fwhm_spatial() const {
    return fwhm_wavelength_m / (center_wavelength_m * center_wavelength_m);
  }

  void validate() const;  // throws std::domain_error
};

}  // namespace qoct
