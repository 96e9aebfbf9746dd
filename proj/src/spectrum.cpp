#include "qoct/spectrum.hpp"

#include <cmath>
#include <stdexcept>

namespace qoct {

double sigma_from_fwhm(double center_wavelength_m, double fwhm_wavelength_m) {
  if (!(center_wavelength_m > 0.0) || !(fwhm_wavelength_m > 0.0)) {
    throw std::domain_error("sigma_from_fwhm: wavelengths must be positive");
  }
  const double delta_omega = 2.0 * kPi * kSpeedOfLight * fwhm_wavelength_m /
                             (center_wavelength_m * center_wavelength_m);
  return delta_omega / kGaussianFwhm;
}

double SpectrumModel::density(double detuning) const {
  const double s = sigma_omega();
  const double z = detuning / s;
  return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * kPi));
}

void SpectrumModel::validate() const {
  if (!(center_wavelength_m > 0.0)) throw std::domain_error("spectrum: center_wavelength_m must be > 0");
  if (!(fwhm_wavelength_m > 0.0)) throw std::domain_error("spectrum: fwhm_wavelength_m must be > 0");
  if (fwhm_wavelength_m >= center_wavelength_m) {
    throw std::domain_error("spectrum: fwhm_wavelength_m must be << center_wavelength_m");
  }
}

}  // namespace qoct
