#include "qoct/scan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qoct/rng.hpp"

namespace qoct {

int ScanPlan::point_count() const {
  return static_cast<int>(std::floor(span_m / step_m + 1e-9)) + 1;
}

std::vector<double> ScanPlan::commanded_positions() const {
  const int n = point_count();
  std::vector<double> p(n);
  const double start = center_m - 0.5 * (n - 1) * step_m;
  for (int i = 0; i < n; ++i) p[i] = start + i * step_m;
  return p;
}

void ScanPlan::validate() const {
  if (!(step_m > 0.0)) throw std::domain_error("scan plan: step must be > 0");
  if (!(span_m >= step_m)) throw std::domain_error("scan plan: span must be >= step");
  if (!(integration_time_s > 0.0)) throw std::domain_error("scan plan: integration time must be > 0");
  if (span_m / step_m > 5e6) throw std::domain_error("scan plan: span/step too large");
}

ScanPlan build_scan_plan(double center_m, double span_m, double step_m,
                         double integration_time_s) {
  ScanPlan plan{center_m, span_m, step_m, integration_time_s};
  plan.validate();
  return plan;
}

void NoiseConfig::validate() const {
  if (position_jitter_sigma_m < 0.0) throw std::domain_error("noise: jitter must be >= 0");
  if (!(coincidence_to_singles_ratio > 0.0) || coincidence_to_singles_ratio > 1.0) {
    throw std::domain_error("noise: coincidence_to_singles_ratio must be in (0, 1]");
  }
  if (!(singles_peak_rate_hz > 0.0)) throw std::domain_error("noise: singles_peak_rate must be > 0");
}

std::string to_string(Channel c) {
  return c == Channel::singles ? "singles" : "coincidences";
}
std::string to_string(Core c) { return c == Core::core1 ? "core1" : "core2"; }

Channel channel_from_string(const std::string& s) {
  if (s == "singles") return Channel::singles;
  if (s == "coincidences") return Channel::coincidences;
  throw std::invalid_argument("unknown channel: " + s);
}
Core core_from_string(const std::string& s) {
  if (s == "core1") return Core::core1;
  if (s == "core2") return Core::core2;
  throw std::invalid_argument("unknown core: " + s);
}

RateTable RateTable::for_quantum(const QuantumCurveModel& m, double balance_position_m,
                                 double pos_min_m, double pos_max_m, int n) {
  m.validate();
  RateTable t;
  t.is_quantum_ = true;
  t.balance_ = balance_position_m;
  t.lo_ = pos_min_m;
  t.hi_ = pos_max_m;
  t.dx_ = (pos_max_m - pos_min_m) / (n - 1);
  t.baseline_ = m.baseline_rate_hz;
  t.fringe_amp_ = m.fringe_visibility;
  t.fringe_k_ = m.pump_omega / kSpeedOfLight;
  t.fringe_uses_shape_ = m.fringe_coherence_envelope;
  t.dip_visibility_ = m.dip_visibility;

  std::vector<double> taus(n);
  for (int i = 0; i < n; ++i) {
    taus[i] = (pos_min_m + i * t.dx_ - balance_position_m) / kSpeedOfLight;
  }
  if (m.dispersion.is_zero() || m.dispersion.even_only()) {
    t.shape_.resize(n);
    for (int i = 0; i < n; ++i) t.shape_[i] = gaussian_dip(m.spectrum, taus[i]);
  } else {
    t.shape_ = hom_dip_numeric(m.spectrum, m.dispersion, taus);
  }
  return t;
}

RateTable RateTable::for_classical(const ClassicalCurveModel& m, double balance_position_m,
                                   double pos_min_m, double pos_max_m, int n) {
  m.validate();
  RateTable t;
  t.is_quantum_ = false;
  t.balance_ = balance_position_m;
  t.lo_ = pos_min_m;
  t.hi_ = pos_max_m;
  t.dx_ = (pos_max_m - pos_min_m) / (n - 1);
  t.baseline_ = m.mean_intensity_hz;
  t.carrier_amp_ = m.visibility;
  t.carrier_k_ = m.carrier_omega / kSpeedOfLight;

  std::vector<double> taus(n);
  for (int i = 0; i < n; ++i) {
    taus[i] = (pos_min_m + i * t.dx_ - balance_position_m) / kSpeedOfLight;
  }
  t.shape_.resize(n);
  t.phase_.assign(n, 0.0);
  if (m.dispersion.is_zero()) {
    for (int i = 0; i < n; ++i) t.shape_[i] = gaussian_envelope(m.spectrum, taus[i]);
  } else {
    auto env = classical_envelope_numeric(m.spectrum, m.dispersion, taus);
    for (int i = 0; i < n; ++i) {
      t.shape_[i] = env[i].envelope;
      t.phase_[i] = env[i].carrier_phase;
    }
  }
  return t;
}

double RateTable::interp(const std::vector<double>& v, double position_m) const {
  double x = (position_m - lo_) / dx_;
  const int n = static_cast<int>(v.size());
  if (x <= 0.0) return v.front();
  if (x >= n - 1) return v.back();
  int i = static_cast<int>(x);
  i = std::clamp(i, 1, n - 3);
  const double s = x - i;
  // Catmull-Rom
  const double a = v[i - 1], b = v[i], c = v[i + 1], d = v[i + 2];
  return b + 0.5 * s * (c - a + s * (2.0 * a - 5.0 * b + 4.0 * c - d +
                                     s * (3.0 * (b - c) + d - a)));
}

double RateTable::rate(double position_m) const {
  if (is_quantum_) {
    const double dip = interp(shape_, position_m);
    double fringe = fringe_amp_ * std::cos(fringe_k_ * (position_m - balance_));
    if (fringe_uses_shape_) fringe *= dip;
    return baseline_ * (2.0 - fringe - dip_visibility_ * dip);
  }
  const double env = interp(shape_, position_m);
  const double ph = phase_.empty() ? 0.0 : interp(phase_, position_m);
  return baseline_ *
         (1.0 - carrier_amp_ * std::cos(carrier_k_ * (position_m - balance_) + ph) * env);
}

namespace {

double round_to_significant(double v, int digits) {
  if (v == 0.0) return 0.0;
  const double mag =
      std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::fabs(v)))));
  return std::round(v * mag) / mag;
}

// Strictly increasing jittered positions; the whole vector is redrawn on an
// ordering violation (vanishingly rare at 20 nm vs a 240 nm step).
std::vector<double> draw_positions(const std::vector<double>& commanded, double jitter_sigma,
                                   Rng& rng) {
  if (jitter_sigma <= 0.0) return commanded;
  const int n = static_cast<int>(commanded.size());
  std::vector<double> pos(n);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (int i = 0; i < n; ++i) pos[i] = commanded[i] + rng.normal(0.0, jitter_sigma);
    bool ok = true;
    for (int i = 1; i < n; ++i) {
      if (!(pos[i] > pos[i - 1])) { ok = false; break; }
    }
    if (ok) return pos;
  }
  throw std::runtime_error(
      "simulate_scan: could not draw strictly increasing positions; jitter too large");
}

ScanRecord sample_record(const RateTable& rate, const ScanPlan& plan, const NoiseConfig& noise,
                         std::uint64_t seed, Channel channel, Core core,
                         const std::vector<double>& true_pos,
                         const std::vector<double>& drift, Rng& count_rng) {
  const auto commanded = plan.commanded_positions();
  const int n = static_cast<int>(commanded.size());
  ScanRecord rec;
  rec.channel = channel;
  rec.core = core;
  rec.seed = seed;
  rec.integration_time_s = plan.integration_time_s;
  rec.counts.resize(n);
  rec.positions_m.resize(n);
  for (int i = 0; i < n; ++i) {
    const double optical = true_pos[i] + (drift.empty() ? 0.0 : drift[i]);
    const double mu = rate.rate(optical) * plan.integration_time_s;
    if (mu < 0.0) throw std::logic_error("simulate_scan: negative expected counts");
    rec.counts[i] = noise.poisson_counts ? count_rng.poisson(mu) : std::llround(mu);
    const double seen = noise.estimator_sees_true_positions ? true_pos[i] : commanded[i];
    // canonical disk precision: 12 significant digits (~1e-16 m here)
    rec.positions_m[i] = round_to_significant(seen, 12);
  }
  rec.window_warning =
      rate.balance_position_m() < commanded.front() || rate.balance_position_m() > commanded.back();
  return rec;
}

}  // namespace

ScanRecord simulate_scan(const RateTable& rate, const ScanPlan& plan,
                         const NoiseConfig& noise, std::uint64_t seed,
                         Channel channel, Core core,
                         const std::vector<double>& drift_offsets_m) {
  plan.validate();
  noise.validate();
  const auto commanded = plan.commanded_positions();
  if (!drift_offsets_m.empty() &&
      drift_offsets_m.size() != commanded.size()) {
    throw std::invalid_argument("simulate_scan: drift offsets size mismatch");
  }
  Rng jitter_rng(derive_seed(seed, 0, 0, 1));
  Rng count_rng(derive_seed(seed, 0, 0, 2));
  const auto true_pos = draw_positions(commanded, noise.position_jitter_sigma_m, jitter_rng);
  return sample_record(rate, plan, noise, seed, channel, core, true_pos, drift_offsets_m,
                       count_rng);
}

void DualCoreScenario::validate() const {
  if (!(sample_length_m > 0.0)) throw std::domain_error("scenario: sample length must be > 0");
  if (sample_length_sigma_m < 0.0) throw std::domain_error("scenario: length sigma must be >= 0");
}

CorePairRecords simulate_core_pair(const DualCoreScenario& scenario,
                                   const QuantumCurveModel& quantum,
                                   const ClassicalCurveModel& classical,
                                   const ScanPlan& plan, const NoiseConfig& noise,
                                   std::uint64_t root_seed, std::uint64_t trial_index) {
  scenario.validate();
  plan.validate();
  noise.validate();

  const int n = plan.point_count();
  const double margin = 6.0 * noise.position_jitter_sigma_m +
                        2.0 * std::fabs(scenario.drift_per_scan_m) + plan.step_m;

  CorePairRecords out;
  for (int core_idx = 0; core_idx < 2; ++core_idx) {
    const bool second = core_idx == 1;
    const Core core = second ? Core::core2 : Core::core1;
    const double balance = plan.center_m + (second ? scenario.delta_tau_true_m : 0.0);

    ScanPlan core_plan = plan;
    if (second && scenario.recenter_core2_window) core_plan.center_m += scenario.delta_tau_true_m;

    const auto commanded = core_plan.commanded_positions();
    const double lo = commanded.front() - margin, hi = commanded.back() + margin;
    const RateTable qt = RateTable::for_quantum(quantum, balance, lo, hi);
    const RateTable ct = RateTable::for_classical(classical, balance, lo, hi);

    // Sequential scans: the optical path drifts linearly through scan 1 then
    // scan 2; the recorded stage positions never see it.
    std::vector<double> drift;
    if (scenario.drift_per_scan_m != 0.0) {
      drift.resize(n);
      for (int i = 0; i < n; ++i) {
        const double scans = (second ? 1.0 : 0.0) + static_cast<double>(i) / n;
        drift[i] = scenario.drift_per_scan_m * scans;
      }
    }

    // One stage pass per core: both channels share the same jittered
    // positions; counts are independent streams.
    const std::uint64_t seed = derive_seed(root_seed, trial_index, core_idx);
    Rng jitter_rng(derive_seed(seed, 0, 0, 1));
    Rng coinc_rng(derive_seed(seed, 0, 0, 2));
    Rng singles_rng(derive_seed(seed, 0, 0, 3));
    const auto true_pos = draw_positions(commanded, noise.position_jitter_sigma_m, jitter_rng);

    ScanRecord coinc = sample_record(qt, core_plan, noise, seed, Channel::coincidences, core,
                                     true_pos, drift, coinc_rng);
    ScanRecord singles = sample_record(ct, core_plan, noise, seed, Channel::singles, core,
                                       true_pos, drift, singles_rng);
    if (second) {
      out.coincidences2 = std::move(coinc);
      out.singles2 = std::move(singles);
    } else {
      out.coincidences1 = std::move(coinc);
      out.singles1 = std::move(singles);
    }
  }
  return out;
}

double quantum_peak_rate(const QuantumCurveModel& m) {
  return m.baseline_rate_hz * (2.0 + m.fringe_visibility);
}

double classical_peak_rate(const ClassicalCurveModel& m) {
  double peak_env = 1.0;
  if (!m.dispersion.is_zero()) {
    const double tau0[] = {0.0};
    peak_env = classical_envelope_numeric(m.spectrum, m.dispersion, tau0)[0].envelope;
  }
  return m.mean_intensity_hz * (1.0 + m.visibility * peak_env);
}

}  // namespace qoct
