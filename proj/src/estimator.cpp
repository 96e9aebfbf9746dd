#include "qoct/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qoct/constants.hpp"

namespace qoct {

std::string to_string(EstimatorMode m) {
  return m == EstimatorMode::quantum ? "quantum" : "classical";
}

PreprocessedRecord preprocess(const ScanRecord& record, double exclusion_halfwidth_m,
                              double expected_feature_fwhm_m, const EstimatorTuning& tuning) {
  const std::size_t n = record.positions_m.size();
  if (n == 0 || record.counts.size() != n) {
    throw EstimatorError("preprocess", "empty or inconsistent record");
  }
  const auto& pos = record.positions_m;
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = static_cast<double>(record.counts[i]);

  std::vector<double> sorted_vals = vals;
  std::nth_element(sorted_vals.begin(), sorted_vals.begin() + n / 2, sorted_vals.end());
  const double median = sorted_vals[n / 2];

  double mean_step = (pos.back() - pos.front()) / std::max<std::size_t>(1, n - 1);
  if (!(mean_step > 0.0)) throw EstimatorError("preprocess", "positions not increasing");

  // Coarse feature center: extremum of a moving average of |counts - median|,
  // kernel ~3x the expected feature width. Works for a mean-level dip and for
  // a fringe packet alike.
  int kernel = static_cast<int>(std::round(3.0 * expected_feature_fwhm_m / mean_step));
  kernel = std::clamp(kernel, 3, static_cast<int>(n) | 1);
  if (kernel % 2 == 0) ++kernel;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = std::fabs(vals[i] - median);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + dev[i];
  std::size_t best = 0;
  double best_val = -1.0;
  const int hk = kernel / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i > static_cast<std::size_t>(hk) ? i - hk : 0;
    const std::size_t b = std::min(n, i + hk + 1);
    const double m = (prefix[b] - prefix[a]) / static_cast<double>(b - a);
    if (m > best_val) { best_val = m; best = i; }
  }
  const double center = pos[best];

  double halfwidth = exclusion_halfwidth_m > 0.0 ? exclusion_halfwidth_m
                                                 : 2.0 * expected_feature_fwhm_m;
  const int need = std::max(tuning.min_outside_points,
                            static_cast<int>(tuning.min_outside_fraction * n));
  int outside = 0;
  for (int iter = 0; iter < 80; ++iter) {
    outside = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(pos[i] - center) > halfwidth) ++outside;
    }
    if (outside >= need) break;
    halfwidth *= 0.85;
  }
  if (outside < tuning.min_outside_points) {
    throw EstimatorError("preprocess", "fewer than " +
                                           std::to_string(tuning.min_outside_points) +
                                           " points outside the exclusion window");
  }

  double baseline = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(pos[i] - center) > halfwidth) baseline += vals[i];
  }
  baseline /= outside;

  PreprocessedRecord out;
  out.positions_m = pos;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = vals[i] - baseline;
  out.baseline = baseline;
  out.coarse_center_m = center;
  out.window_center_m = 0.5 * (pos.front() + pos.back());
  out.window_halfspan_m = 0.5 * (pos.back() - pos.front());
  out.mean_step_m = mean_step;
  return out;
}

FourierSpectrum ndft(std::span<const double> positions_m, std::span<const double> values,
                     std::span<const double> frequencies) {
  if (positions_m.empty() || values.size() != positions_m.size()) {
    throw EstimatorError("ndft", "empty record");
  }
  FourierSpectrum spec;
  spec.frequencies.assign(frequencies.begin(), frequencies.end());
  spec.amplitudes.resize(frequencies.size());
  const std::size_t n = positions_m.size();
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    const double w = -2.0 * kPi * frequencies[k];
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = w * positions_m[i];
      re += values[i] * std::cos(a);
      im += values[i] * std::sin(a);
    }
    spec.amplitudes[k] = {re, im};
  }
  return spec;
}

FourierSpectrum band_select(const FourierSpectrum& spectrum, const BandSpec& band) {
  if (band.f_lo >= band.f_hi) throw EstimatorError("band_select", "empty band");
  std::vector<std::size_t> idx;
  double peak = 0.0;
  for (std::size_t i = 0; i < spectrum.frequencies.size(); ++i) {
    const double f = spectrum.frequencies[i];
    if (f < band.f_lo || f > band.f_hi) continue;
    if (band.mode == BandSpec::Mode::quantum_lowpass && f == 0.0) continue;
    idx.push_back(i);
    peak = std::max(peak, std::abs(spectrum.amplitudes[i]));
  }
  FourierSpectrum out;
  for (std::size_t i : idx) {
    if (std::abs(spectrum.amplitudes[i]) < band.amplitude_floor * peak) continue;
    out.frequencies.push_back(spectrum.frequencies[i]);
    out.amplitudes.push_back(spectrum.amplitudes[i]);
  }
  if (out.frequencies.size() < 5) {
    throw EstimatorError("band_select", "fewer than 5 bins survive the band");
  }
  return out;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_var = 0.0;  // naive weighted covariance
  double residual_rms = 0.0;
  int jumps = 0;
};

LineFit fit_phase_line(const std::vector<double>& f, const std::vector<double>& phi,
                       const std::vector<double>& w) {
  const std::size_t n = f.size();
  double W = 0.0, fb = 0.0, yb = 0.0;
  for (std::size_t i = 0; i < n; ++i) { W += w[i]; fb += w[i] * f[i]; yb += w[i] * phi[i]; }
  fb /= W; yb /= W;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (f[i] - fb) * (f[i] - fb);
    sxy += w[i] * (f[i] - fb) * (phi[i] - yb);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = yb - fit.slope * fb;
  double wr2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = phi[i] - (fit.intercept + fit.slope * f[i]);
    wr2 += w[i] * r * r;
  }
  fit.residual_rms = std::sqrt(wr2 / W);
  const double dof = std::max<double>(1.0, static_cast<double>(n) - 2.0);
  fit.slope_var = wr2 / dof / sxx;
  return fit;
}

std::vector<double> unwrap_phases(const std::vector<double>& wrapped, int* jumps) {
  std::vector<double> out(wrapped.size());
  int count = 0;
  double offset = 0.0;
  for (std::size_t i = 0; i < wrapped.size(); ++i) {
    if (i > 0) {
      const double d = wrapped[i] + offset - out[i - 1];
      const double k = std::round(d / (2.0 * kPi));
      if (k != 0.0) { offset -= 2.0 * kPi * k; ++count; }
    }
    out[i] = wrapped[i] + offset;
  }
  if (jumps) *jumps = count;
  return out;
}

}  // namespace

DeltaTauEstimate differential_phase_fit(const FourierSpectrum& spec1,
                                        const FourierSpectrum& spec2, bool weighted,
                                        int max_jump_denominator) {
  const std::size_t n = spec1.frequencies.size();
  if (n != spec2.frequencies.size() || n == 0) {
    throw EstimatorError("differential_phase_fit", "spectra on different grids");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (spec1.frequencies[i] != spec2.frequencies[i]) {
      throw EstimatorError("differential_phase_fit", "spectra on different grids");
    }
  }
  std::vector<double> wrapped(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::complex<double> cross = spec2.amplitudes[i] * std::conj(spec1.amplitudes[i]);
    wrapped[i] = std::arg(cross);
    w[i] = weighted ? std::abs(spec1.amplitudes[i]) * std::abs(spec2.amplitudes[i]) : 1.0;
  }
  int jumps = 0;
  const std::vector<double> phi = unwrap_phases(wrapped, &jumps);
  if (jumps > static_cast<int>(n) / max_jump_denominator) {
    throw EstimatorError("differential_phase_fit",
                         "unwrap jump count exceeds band size / " +
                             std::to_string(max_jump_denominator));
  }
  const LineFit fit = fit_phase_line(spec1.frequencies, phi, w);

  DeltaTauEstimate est;
  est.delta_tau_m = -fit.slope / (2.0 * kPi);
  est.diagnostics.residual_rms_rad = fit.residual_rms;
  est.diagnostics.unwrap_jumps = jumps;
  est.diagnostics.n_bins = static_cast<int>(n);
  est.diagnostics.fit_cov_std_err_m = std::sqrt(std::max(0.0, fit.slope_var)) / (2.0 * kPi);
  est.std_err_m = est.diagnostics.fit_cov_std_err_m;
  return est;
}

namespace {

// LS removal of a cos/sin pair at f0 plus a constant, evaluated on the
// record's own (possibly nonuniform) positions.
void remove_tone(const std::vector<double>& pos, std::vector<double>& vals, double f0) {
  const std::size_t n = pos.size();
  double m[3][3] = {{0}}, rhs[3] = {0};
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * f0 * pos[i];
    const double b0 = std::cos(a), b1 = std::sin(a), b2 = 1.0;
    const double basis[3] = {b0, b1, b2};
    for (int r = 0; r < 3; ++r) {
      rhs[r] += basis[r] * vals[i];
      for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
    }
  }
  // 3x3 Gaussian elimination with partial pivoting
  double aug[3][4];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) aug[r][c] = m[r][c];
    aug[r][3] = rhs[r];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(aug[r][col]) > std::fabs(aug[piv][col])) piv = r;
    }
    std::swap(aug[col], aug[piv]);
    if (std::fabs(aug[col][col]) < 1e-12) return;  // degenerate, skip removal
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double fac = aug[r][col] / aug[col][col];
      for (int c = col; c < 4; ++c) aug[r][c] -= fac * aug[col][c];
    }
  }
  const double coef[3] = {aug[0][3] / aug[0][0], aug[1][3] / aug[1][1], aug[2][3] / aug[2][2]};
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * f0 * pos[i];
    vals[i] -= coef[0] * std::cos(a) + coef[1] * std::sin(a) + coef[2];
  }
}

void apply_taper(const PreprocessedRecord& rec, std::vector<double>& vals) {
  for (std::size_t i = 0; i < vals.size(); ++i) {
    double u = (rec.positions_m[i] - rec.window_center_m) / rec.window_halfspan_m;
    u = std::clamp(u, -1.0, 1.0);
    vals[i] *= 0.5 * (1.0 + std::cos(kPi * u));
  }
}

// Lattice of the default grid (spacing 1/(oversampling * span), capped at
// nyquist_factor * Nyquist of the mean step) restricted to [f_lo, f_hi]. The
// NDFT treats every bin independently, so evaluating only the band's bins is
// identical to masking the full grid.
std::vector<double> band_lattice(double span_m, double mean_step_m, double f_lo, double f_hi,
                                 const EstimatorTuning& t) {
  const double df = 1.0 / (t.grid_oversampling * span_m);
  const double f_max = t.nyquist_factor / (2.0 * mean_step_m);
  const double hi = std::min(f_hi, f_max);
  std::vector<double> f;
  long long k = static_cast<long long>(std::ceil(std::max(0.0, f_lo) / df - 1e-9));
  for (; k * df <= hi + 1e-9; ++k) f.push_back(k * df);
  return f;
}

BandSpec make_band(EstimatorMode mode, const EstimatorTuning& t) {
  BandSpec band;
  band.amplitude_floor = t.amplitude_floor;
  if (mode == EstimatorMode::quantum) {
    band.mode = BandSpec::Mode::quantum_lowpass;
    band.f_lo = 0.0;
    band.f_hi = t.quantum_band_factor / t.expected_dip_fwhm_m;
  } else {
    band.mode = BandSpec::Mode::classical_sideband;
    const double half = t.classical_band_halfwidth_factor * t.sideband_fwhm_per_m;
    band.f_lo = t.carrier_frequency_per_m - half;
    band.f_hi = t.carrier_frequency_per_m + half;
  }
  return band;
}

struct PipelineInput {
  std::vector<double> pos;
  std::vector<double> vals;
};

// One slope fit over a pair of prepared point sets.
DeltaTauEstimate fit_pair(const PipelineInput& a, const PipelineInput& b,
                          const std::vector<double>& grid, const BandSpec& band,
                          const EstimatorTuning& tuning) {
  FourierSpectrum s1 = ndft(a.pos, a.vals, grid);
  FourierSpectrum s2 = ndft(b.pos, b.vals, grid);
  FourierSpectrum b1 = band_select(s1, band);
  FourierSpectrum b2 = band_select(s2, band);
  // keep a common grid: intersect the surviving bins
  std::vector<double> common;
  std::set_intersection(b1.frequencies.begin(), b1.frequencies.end(), b2.frequencies.begin(),
                        b2.frequencies.end(), std::back_inserter(common));
  if (common.size() < 5) throw EstimatorError("band_select", "fewer than 5 common bins");
  auto mask = [&](const FourierSpectrum& s) {
    FourierSpectrum out;
    std::size_t j = 0;
    for (std::size_t i = 0; i < s.frequencies.size(); ++i) {
      if (j < common.size() && s.frequencies[i] == common[j]) {
        out.frequencies.push_back(s.frequencies[i]);
        out.amplitudes.push_back(s.amplitudes[i]);
        ++j;
      }
    }
    return out;
  };
  return differential_phase_fit(mask(b1), mask(b2), tuning.weighted_fit,
                                tuning.max_unwrap_jump_fraction_denominator);
}

PipelineInput half(const PipelineInput& in, int parity) {
  PipelineInput out;
  for (std::size_t i = static_cast<std::size_t>(parity); i < in.pos.size(); i += 2) {
    out.pos.push_back(in.pos[i]);
    out.vals.push_back(in.vals[i]);
  }
  return out;
}

}  // namespace

DeltaTauEstimate estimate_delta_tau(const ScanRecord& record1, const ScanRecord& record2,
                                    EstimatorMode mode, const EstimatorTuning& tuning) {
  if (record1.channel != record2.channel) {
    throw EstimatorError("estimate_delta_tau", "records from different channels");
  }
  const Channel expected =
      mode == EstimatorMode::quantum ? Channel::coincidences : Channel::singles;
  if (record1.channel != expected) {
    throw EstimatorError("estimate_delta_tau", "record channel does not match mode " +
                                                   to_string(mode));
  }

  const double feature = mode == EstimatorMode::quantum ? tuning.expected_dip_fwhm_m
                                                        : tuning.expected_envelope_fwhm_m;
  PreprocessedRecord p1 = preprocess(record1, tuning.exclusion_halfwidth_m, feature, tuning);
  PreprocessedRecord p2 = preprocess(record2, tuning.exclusion_halfwidth_m, feature, tuning);

  if (mode == EstimatorMode::quantum && tuning.remove_fringe_tone) {
    remove_tone(p1.positions_m, p1.values, tuning.fringe_frequency_per_m);
    remove_tone(p2.positions_m, p2.values, tuning.fringe_frequency_per_m);
  }
  if (tuning.hann_taper) {
    apply_taper(p1, p1.values);
    apply_taper(p2, p2.values);
  }

  const double span = 2.0 * std::max(p1.window_halfspan_m, p2.window_halfspan_m);
  const double mean_step = 0.5 * (p1.mean_step_m + p2.mean_step_m);
  const BandSpec band = make_band(mode, tuning);
  const std::vector<double> grid = band_lattice(span, mean_step, band.f_lo, band.f_hi, tuning);
  if (grid.empty()) throw EstimatorError("band_select", "band outside the frequency grid");

  PipelineInput a{p1.positions_m, p1.values};
  PipelineInput b{p2.positions_m, p2.values};
  DeltaTauEstimate est = fit_pair(a, b, grid, band, tuning);
  est.mode = mode;
  est.band = band;
  est.diagnostics.baseline1 = p1.baseline;
  est.diagnostics.baseline2 = p2.baseline;
  est.diagnostics.coarse_center1_m = p1.coarse_center_m;
  est.diagnostics.coarse_center2_m = p2.coarse_center_m;

  // Split-half standard error: even/odd points give two independent
  // estimates; |d|/2 * sqrt(pi/2) is an unbiased estimate of the full-record
  // std under Gaussian errors, whatever the in-band noise correlation.
  try {
    const DeltaTauEstimate even = fit_pair(half(a, 0), half(b, 0), grid, band, tuning);
    const DeltaTauEstimate odd = fit_pair(half(a, 1), half(b, 1), grid, band, tuning);
    est.std_err_m = 0.5 * std::fabs(even.delta_tau_m - odd.delta_tau_m) * std::sqrt(kPi / 2.0);
  } catch (const EstimatorError&) {
    est.std_err_m = est.diagnostics.fit_cov_std_err_m;
  }
  if (!std::isfinite(est.std_err_m) || !std::isfinite(est.delta_tau_m)) {
    throw EstimatorError("differential_phase_fit", "non-finite estimate");
  }
  return est;
}

DeltaN delta_n(const DeltaTauEstimate& estimate, double sample_length_m,
               double sample_length_sigma_m) {
  if (!(sample_length_m > 0.0)) {
    throw std::domain_error("delta_n: sample length must be > 0");
  }
  DeltaN out;
  out.value = estimate.delta_tau_m / sample_length_m;
  const double a = estimate.std_err_m / sample_length_m;
  const double b = estimate.delta_tau_m * sample_length_sigma_m /
                   (sample_length_m * sample_length_m);
  out.sigma = std::sqrt(a * a + b * b);
  return out;
}

}  // namespace qoct
