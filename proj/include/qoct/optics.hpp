#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "qoct/dispersion.hpp"
#include "qoct/spectrum.hpp"

namespace qoct {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adaptive trapezoid over [-half_range_sigmas, +half_range_sigmas] * sigma
// with doubling-grid convergence check; under-resolution is an error, never
// a silent inaccuracy.
struct QuadratureOptions {
  double half_range_sigmas = 6.0;
  double rel_tolerance = 1e-9;
  int initial_points = 257;       // >= 10 points per sigma over 12 sigma
  int max_points = (1 << 21) + 1;
};

// Two-photon coincidence curve, Eq.-style:
//   P_c(tau) = P_c0 * (2 - fringe_visibility cos(omega_p tau) - alpha dip(tau))
// dip(tau) is the normalized dip shape (1 at tau=0 without dispersion). The
// fringe term is literal by default; fringe_coherence_envelope multiplies it
// by the dip shape instead (selectable behavior, see README).
struct QuantumCurveModel {
  SpectrumModel spectrum;
  double baseline_rate_hz = 1000.0;  // P_c0
  double dip_visibility = 1.0;       // alpha
  double fringe_visibility = 1.0;
  double pump_omega = 2.0 * kPi * kSpeedOfLight / 780e-9;
  bool fringe_coherence_envelope = false;
  DispersionProfile dispersion;

  void validate() const;
};

// Classical interferogram: I(tau) = I0 [1 - V cos(omega_c tau) f(tau)] with
// f the magnitude of the complex degree of coherence; without dispersion
// f(0) = 1, with dispersion the peak drops and the envelope broadens.
struct ClassicalCurveModel {
  SpectrumModel spectrum;
  double mean_intensity_hz = 1e5;  // I0
  double visibility = 1.0;         // V
  double carrier_omega = 2.0 * kPi * kSpeedOfLight / 1560e-9;
  DispersionProfile dispersion;

  void validate() const;
};

// Closed forms for the dispersion-free case. The dip closed form is
// calibrated to the spectral-integral oracle below:
//   dip(tau) = exp(-2 sigma^2 tau^2),  f(tau) = exp(-sigma^2 tau^2 / 2).
double gaussian_dip(const SpectrumModel& s, double tau_s);
double gaussian_envelope(const SpectrumModel& s, double tau_s);

// Numerical oracle for the dip shape:
//   dip(tau) = Re int dO |g(O)|^2 exp(i [phi(O) - phi(-O)]) exp(2 i O tau),
// normalized so the dispersion-free peak is 1. Depends only on the odd part
// of phi; equals the Gaussian closed form when phi == 0.
std::vector<double> hom_dip_numeric(const SpectrumModel& spectrum,
                                    const DispersionProfile& dispersion,
                                    std::span<const double> tau_grid_s,
                                    const QuadratureOptions& opt = {});

struct EnvelopeSample {
  double envelope = 0.0;       // |gamma(tau)|
  double carrier_phase = 0.0;  // arg gamma(tau)
};

// Complex degree of coherence gamma(tau) = int dO |g|^2 e^{i phi(O)} e^{i O tau},
// normalized so that f(0) = 1 when phi == 0.
std::vector<EnvelopeSample> classical_envelope_numeric(
    const SpectrumModel& spectrum, const DispersionProfile& dispersion,
    std::span<const double> tau_grid_s, const QuadratureOptions& opt = {});

// Curve evaluation; scalar calls wrap the batch versions.
std::vector<double> quantum_coincidence(const QuantumCurveModel& m,
                                        std::span<const double> tau_s);
double quantum_coincidence(const QuantumCurveModel& m, double tau_s);
std::vector<double> classical_intensity(const ClassicalCurveModel& m,
                                        std::span<const double> tau_s);
double classical_intensity(const ClassicalCurveModel& m, double tau_s);

// Numerical check that the stored spectral density integrates to 1.
double spectral_density_norm(const SpectrumModel& s, const QuadratureOptions& opt = {});

struct CurveMetrics {
  double fwhm = 0.0;                 // same units as the x grid
  double extremum_visibility = 0.0;  // |extremum - baseline| / max(|baseline|, |extremum|)
  double dip_area = 0.0;             // integral of the normalized deficit, x units
};

// FWHM by linear interpolation between bracketing samples, visibility from
// the edge baseline, deficit area by trapezoid. The baseline is the average
// of the outer 5% of samples on each side. Throws std::runtime_error when a
// half-maximum crossing is missing inside the grid.
CurveMetrics curve_metrics(std::span<const double> x, std::span<const double> values);

}  // namespace qoct
