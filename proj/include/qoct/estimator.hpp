#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qoct/scan.hpp"

namespace qoct {

// Estimation failure carrying the pipeline stage that raised it.
struct EstimatorError : std::runtime_error {
  EstimatorError(std::string stage_, const std::string& msg)
      : std::runtime_error(stage_ + ": " + msg), stage(std::move(stage_)) {}
  std::string stage;
};

enum class EstimatorMode { quantum, classical };
std::string to_string(EstimatorMode m);

struct FourierSpectrum {
  std::vector<double> frequencies;  // 1/m, strictly increasing
  std::vector<std::complex<double>> amplitudes;
};

struct BandSpec {
  enum class Mode { quantum_lowpass, classical_sideband };
  Mode mode = Mode::quantum_lowpass;
  double f_lo = 0.0;  // 1/m
  double f_hi = 0.0;
  double amplitude_floor = 0.1;  // fraction of in-band peak magnitude
};

struct EstimatorTuning {
  // Baseline window: exclusion halfwidth defaults to 2x the expected feature
  // FWHM, shrunk if necessary until enough points remain outside.
  double exclusion_halfwidth_m = 0.0;  // 0 = auto
  double expected_dip_fwhm_m = 24.41e-6;
  double expected_envelope_fwhm_m = 134e-6;
  int min_outside_points = 50;
  double min_outside_fraction = 0.15;

  // Frequency grid: spacing 1/(grid_oversampling * span), up to
  // nyquist_factor / (2 * mean step).
  double grid_oversampling = 4.0;
  double nyquist_factor = 1.2;

  // Band defaults: quantum (0, quantum_band_factor / dip FWHM] with f = 0
  // excluded; classical carrier +- classical_band_halfwidth_factor * sideband
  // FWHM.
  double quantum_band_factor = 1.5;
  double classical_band_halfwidth_factor = 0.4;
  double amplitude_floor = 0.1;
  double carrier_frequency_per_m = 1.0 / 1560e-9;
  double sideband_fwhm_per_m = 44e-9 / (1560e-9 * 1560e-9);

  // The pump-frequency fringe rides on the coincidence record; its power
  // aliases across the low band once the sample positions are irregular, so
  // the fitted tone is removed before the transform.
  bool remove_fringe_tone = true;
  double fringe_frequency_per_m = 1.0 / 780e-9;

  // Cosine taper over the scan window; keeps window-edge leakage of the
  // carrier and of baseline residuals out of the fit bands.
  bool hann_taper = true;

  bool weighted_fit = true;  // weights |X1||X2|; plain fit is selectable
  int max_unwrap_jump_fraction_denominator = 4;
};

struct FitDiagnostics {
  double residual_rms_rad = 0.0;
  int unwrap_jumps = 0;
  int n_bins = 0;
  double fit_cov_std_err_m = 0.0;  // naive weighted-fit covariance
  double baseline1 = 0.0, baseline2 = 0.0;
  double coarse_center1_m = 0.0, coarse_center2_m = 0.0;
};

struct DeltaTauEstimate {
  double delta_tau_m = 0.0;
  double std_err_m = 0.0;  // split-half estimate, see README
  EstimatorMode mode = EstimatorMode::quantum;
  BandSpec band;
  FitDiagnostics diagnostics;
};

struct PreprocessedRecord {
  std::vector<double> positions_m;
  std::vector<double> values;  // counts minus baseline, taper applied later
  double baseline = 0.0;
  double coarse_center_m = 0.0;
  double window_center_m = 0.0;
  double window_halfspan_m = 0.0;
  double mean_step_m = 0.0;
};

// Subtracts the average of all points farther than exclusion_halfwidth from
// the coarse feature center (extremum of a moving average of the absolute
// deviation, kernel ~3x the expected FWHM). Throws EstimatorError when fewer
// than min_outside_points remain outside even after shrinking the window.
PreprocessedRecord preprocess(const ScanRecord& record, double exclusion_halfwidth_m,
                              double expected_feature_fwhm_m, const EstimatorTuning& tuning = {});

// Exact direct transform X(f) = sum_n x_n exp(-2 pi i f p_n).
FourierSpectrum ndft(std::span<const double> positions_m, std::span<const double> values,
                     std::span<const double> frequencies);

// Keeps bins with f_lo <= f <= f_hi and |X| >= floor * band peak; the f = 0
// bin is always excluded for quantum_lowpass. Throws when fewer than 5 bins
// survive.
FourierSpectrum band_select(const FourierSpectrum& spectrum, const BandSpec& band);

// Weighted least-squares line through unwrap(arg(X2 conj X1))); slope gives
// delta tau = -slope / (2 pi). Intercept is free in both modes.
DeltaTauEstimate differential_phase_fit(const FourierSpectrum& spec1,
                                        const FourierSpectrum& spec2,
                                        bool weighted = true,
                                        int max_jump_denominator = 4);

// Full pipeline: preprocess -> fringe-tone removal (quantum) -> taper ->
// ndft on the default grid -> band_select -> differential_phase_fit, with a
// split-half (even/odd points) standard error.
DeltaTauEstimate estimate_delta_tau(const ScanRecord& record1, const ScanRecord& record2,
                                    EstimatorMode mode, const EstimatorTuning& tuning = {});

struct DeltaN {
  double value = 0.0;
  double sigma = 0.0;
};

// delta n = delta tau / L with the fit error and the length uncertainty
// combined in quadrature.
DeltaN delta_n(const DeltaTauEstimate& estimate, double sample_length_m,
               double sample_length_sigma_m);

}  // namespace qoct
