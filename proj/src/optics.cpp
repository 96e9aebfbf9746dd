#include "qoct/optics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

namespace qoct {

namespace {

// Batch adaptive trapezoid of kernel(Omega) * exp(i m Omega tau) over
// [-R, R], R = half_range_sigmas * sigma. The grid doubles until every tau's
// integral moves by less than rel_tolerance * max|I|.
std::vector<std::complex<double>> oscillatory_quadrature(
    const SpectrumModel& spectrum, const std::function<std::complex<double>(double)>& kernel,
    double tau_factor, std::span<const double> tau_s, const QuadratureOptions& opt) {
  const double sigma = spectrum.sigma_omega();
  const double R = opt.half_range_sigmas * sigma;
  const std::size_t nt = tau_s.size();

  int n = opt.initial_points;
  if ((n - 1) % 2 != 0) ++n;
  const int min_points = static_cast<int>(2.0 * opt.half_range_sigmas * 10.0) + 1;
  while (n < min_points) n = 2 * (n - 1) + 1;

  auto evaluate = [&](int points) {
    std::vector<std::complex<double>> acc(nt, {0.0, 0.0});
    const double h = 2.0 * R / (points - 1);
    for (int i = 0; i < points; ++i) {
      const double omega = -R + h * i;
      std::complex<double> k = kernel(omega);
      if (i == 0 || i == points - 1) k *= 0.5;
      for (std::size_t j = 0; j < nt; ++j) {
        const double ang = tau_factor * omega * tau_s[j];
        acc[j] += k * std::complex<double>(std::cos(ang), std::sin(ang));
      }
    }
    for (auto& v : acc) v *= h;
    return acc;
  };

  std::vector<std::complex<double>> prev = evaluate(n);
  while (n < opt.max_points) {
    const int n2 = 2 * (n - 1) + 1;
    std::vector<std::complex<double>> cur = evaluate(n2);
    double scale = 0.0, diff = 0.0;
    for (std::size_t j = 0; j < nt; ++j) {
      scale = std::max(scale, std::abs(cur[j]));
      diff = std::max(diff, std::abs(cur[j] - prev[j]));
    }
    if (diff <= opt.rel_tolerance * std::max(scale, 1e-300)) return cur;
    prev = std::move(cur);
    n = n2;
  }
  throw QuadratureError("oscillatory_quadrature: grid doubling did not converge; "
                        "integrand under-resolved");
}

double density_norm(const SpectrumModel& s, const QuadratureOptions& opt) {
  const double tau0[] = {0.0};
  auto v = oscillatory_quadrature(
      s, [&](double o) { return std::complex<double>(s.density(o), 0.0); }, 1.0, tau0, opt);
  return v[0].real();
}

}  // namespace

double gaussian_dip(const SpectrumModel& s, double tau_s) {
  const double x = s.sigma_omega() * tau_s;
  return std::exp(-2.0 * x * x);
}

double gaussian_envelope(const SpectrumModel& s, double tau_s) {
  const double x = s.sigma_omega() * tau_s;
  return std::exp(-0.5 * x * x);
}

std::vector<double> hom_dip_numeric(const SpectrumModel& spectrum,
                                    const DispersionProfile& dispersion,
                                    std::span<const double> tau_grid_s,
                                    const QuadratureOptions& opt) {
  spectrum.validate();
  dispersion.validate();
  const double norm = density_norm(spectrum, opt);
  auto kernel = [&](double o) {
    const double dphi = dispersion.phase(o) - dispersion.phase(-o);
    return spectrum.density(o) * std::complex<double>(std::cos(dphi), std::sin(dphi));
  };
  auto integral = oscillatory_quadrature(spectrum, kernel, 2.0, tau_grid_s, opt);
  std::vector<double> out(tau_grid_s.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = integral[i].real() / norm;
  return out;
}

std::vector<EnvelopeSample> classical_envelope_numeric(
    const SpectrumModel& spectrum, const DispersionProfile& dispersion,
    std::span<const double> tau_grid_s, const QuadratureOptions& opt) {
  spectrum.validate();
  dispersion.validate();
  const double norm = density_norm(spectrum, opt);
  auto kernel = [&](double o) {
    const double phi = dispersion.phase(o);
    return spectrum.density(o) * std::complex<double>(std::cos(phi), std::sin(phi));
  };
  auto integral = oscillatory_quadrature(spectrum, kernel, 1.0, tau_grid_s, opt);
  std::vector<EnvelopeSample> out(tau_grid_s.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = {std::abs(integral[i]) / norm, std::arg(integral[i])};
  }
  return out;
}

void QuantumCurveModel::validate() const {
  spectrum.validate();
  dispersion.validate();
  if (baseline_rate_hz < 0.0) throw std::domain_error("quantum model: P_c0 must be >= 0");
  if (dip_visibility < 0.0 || dip_visibility > 1.0) {
    throw std::domain_error("quantum model: dip visibility must be in [0, 1]");
  }
  if (fringe_visibility < 0.0 || fringe_visibility > 1.0) {
    throw std::domain_error("quantum model: fringe visibility must be in [0, 1]");
  }
  if (!(pump_omega > 0.0)) throw std::domain_error("quantum model: pump_omega must be > 0");
}

void ClassicalCurveModel::validate() const {
  spectrum.validate();
  dispersion.validate();
  if (mean_intensity_hz < 0.0) throw std::domain_error("classical model: I0 must be >= 0");
  if (visibility < 0.0 || visibility > 1.0) {
    throw std::domain_error("classical model: visibility must be in [0, 1]");
  }
  if (!(carrier_omega > 0.0)) throw std::domain_error("classical model: carrier_omega must be > 0");
}

std::vector<double> quantum_coincidence(const QuantumCurveModel& m,
                                        std::span<const double> tau_s) {
  m.validate();
  std::vector<double> dip;
  if (m.dispersion.is_zero() || m.dispersion.even_only()) {
    dip.resize(tau_s.size());
    for (std::size_t i = 0; i < tau_s.size(); ++i) dip[i] = gaussian_dip(m.spectrum, tau_s[i]);
  } else {
    dip = hom_dip_numeric(m.spectrum, m.dispersion, tau_s);
  }
  std::vector<double> out(tau_s.size());
  for (std::size_t i = 0; i < tau_s.size(); ++i) {
    double fringe = m.fringe_visibility * std::cos(m.pump_omega * tau_s[i]);
    if (m.fringe_coherence_envelope) fringe *= dip[i];
    out[i] = m.baseline_rate_hz * (2.0 - fringe - m.dip_visibility * dip[i]);
  }
  return out;
}

double quantum_coincidence(const QuantumCurveModel& m, double tau_s) {
  const double t[] = {tau_s};
  return quantum_coincidence(m, t)[0];
}

std::vector<double> classical_intensity(const ClassicalCurveModel& m,
                                        std::span<const double> tau_s) {
  m.validate();
  std::vector<double> out(tau_s.size());
  if (m.dispersion.is_zero()) {
    for (std::size_t i = 0; i < tau_s.size(); ++i) {
      const double f = gaussian_envelope(m.spectrum, tau_s[i]);
      out[i] = m.mean_intensity_hz *
               (1.0 - m.visibility * std::cos(m.carrier_omega * tau_s[i]) * f);
    }
  } else {
    auto env = classical_envelope_numeric(m.spectrum, m.dispersion, tau_s);
    for (std::size_t i = 0; i < tau_s.size(); ++i) {
      out[i] = m.mean_intensity_hz *
               (1.0 - m.visibility * std::cos(m.carrier_omega * tau_s[i]) * env[i].envelope);
    }
  }
  return out;
}

double classical_intensity(const ClassicalCurveModel& m, double tau_s) {
  const double t[] = {tau_s};
  return classical_intensity(m, t)[0];
}

double spectral_density_norm(const SpectrumModel& s, const QuadratureOptions& opt) {
  return density_norm(s, opt);
}

CurveMetrics curve_metrics(std::span<const double> x, std::span<const double> values) {
  const std::size_t n = x.size();
  if (n < 8 || values.size() != n) {
    throw std::runtime_error("curve_metrics: need >= 8 samples with matching grids");
  }
  const std::size_t edge = std::max<std::size_t>(2, n / 20);
  double baseline = 0.0;
  for (std::size_t i = 0; i < edge; ++i) baseline += values[i] + values[n - 1 - i];
  baseline /= static_cast<double>(2 * edge);

  std::size_t ext = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::fabs(values[i] - baseline) > std::fabs(values[ext] - baseline)) ext = i;
  }
  const double depth = values[ext] - baseline;
  if (depth == 0.0) throw std::runtime_error("curve_metrics: flat curve");
  const double half = baseline + 0.5 * depth;

  auto cross = [&](bool rightward) {
    std::size_t i = ext;
    const double sign = depth > 0.0 ? 1.0 : -1.0;
    while (true) {
      std::size_t j = rightward ? i + 1 : i - 1;
      if ((rightward && i + 1 >= n) || (!rightward && i == 0)) {
        throw std::runtime_error("curve_metrics: no half-maximum crossing inside grid");
      }
      if (sign * (values[j] - half) <= 0.0) {
        const double t = (half - values[i]) / (values[j] - values[i]);
        return x[i] + t * (x[j] - x[i]);
      }
      i = j;
    }
  };
  const double xr = cross(true);
  const double xl = cross(false);

  // Deficit normalized by the baseline level; a curve that is already a
  // normalized shape (baseline ~ 0) integrates as-is.
  const double norm = std::fabs(baseline) > 1e-9 * std::fabs(depth) ? std::fabs(baseline) : 1.0;
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d0 = (values[i] - baseline) / norm;
    const double d1 = (values[i + 1] - baseline) / norm;
    area += 0.5 * (d0 + d1) * (x[i + 1] - x[i]);
  }

  CurveMetrics m;
  m.fwhm = xr - xl;
  m.extremum_visibility =
      std::fabs(depth) / std::max(std::fabs(baseline), std::fabs(values[ext]));
  m.dip_area = std::fabs(area);
  return m;
}

}  // namespace qoct
