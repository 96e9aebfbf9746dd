#include "qoct/bench.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qoct/rng.hpp"

namespace qoct {

namespace {

TrialResult run_one_trial(const BenchSetup& setup, std::uint64_t root_seed,
                          std::uint64_t trial_index) {
  TrialResult r;
  r.trial_index = trial_index;
  r.seed = derive_seed(root_seed, trial_index, 0);
  const CorePairRecords recs = simulate_core_pair(setup.scenario, setup.quantum, setup.classical,
                                                  setup.plan, setup.noise, root_seed, trial_index);
  try {
    r.quantum = estimate_delta_tau(recs.coincidences1, recs.coincidences2,
                                   EstimatorMode::quantum, setup.tuning);
  } catch (const EstimatorError& e) {
    r.quantum_error = e.what();
  }
  try {
    r.classical = estimate_delta_tau(recs.singles1, recs.singles2, EstimatorMode::classical,
                                     setup.tuning);
  } catch (const EstimatorError& e) {
    r.classical_error = e.what();
  }
  return r;
}

struct Moments {
  int n = 0;
  double mean = 0.0;
  double std_dev = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  m.n = static_cast<int>(v.size());
  if (m.n == 0) return m;
  for (double x : v) m.mean += x;
  m.mean /= m.n;
  if (m.n > 1) {
    double s = 0.0;
    for (double x : v) s += (x - m.mean) * (x - m.mean);
    m.std_dev = std::sqrt(s / (m.n - 1));
  }
  return m;
}

ModeStats mode_stats(const std::vector<double>& dtau, const std::vector<double>& errs,
                     int n_failed, double L, double sigma_L, int bin_count) {
  ModeStats s;
  s.n_success = static_cast<int>(dtau.size());
  s.n_failed = n_failed;
  s.available = s.n_success >= 2;
  if (!s.available) return s;
  const Moments m = moments(dtau);
  s.mean_delta_tau_m = m.mean;
  s.std_delta_tau_m = m.std_dev;
  s.mean_delta_n = m.mean / L;
  // spread of delta n across trials; the L uncertainty enters per-estimate
  // via delta_n(), not the ensemble spread
  s.std_delta_n = m.std_dev / L;
  (void)sigma_L;
  s.mean_reported_std_err_m = moments(errs).mean;
  s.normal_mu_m = m.mean;
  s.normal_sigma_m = m.std_dev;

  const double lo = *std::min_element(dtau.begin(), dtau.end());
  const double hi = *std::max_element(dtau.begin(), dtau.end());
  const double width = hi > lo ? hi - lo : std::max(std::fabs(hi), 1e-12);
  const double pad = hi > lo ? 0.0 : 0.5 * width;
  const double a = lo - pad, b = hi + pad;
  s.histogram_edges_m.resize(bin_count + 1);
  s.histogram_counts.assign(bin_count, 0);
  for (int i = 0; i <= bin_count; ++i) {
    s.histogram_edges_m[i] = a + (b - a) * i / bin_count;
  }
  for (double x : dtau) {
    int k = static_cast<int>((x - a) / (b - a) * bin_count);
    k = std::clamp(k, 0, bin_count - 1);
    ++s.histogram_counts[k];
  }
  return s;
}

}  // namespace

TrialSet run_trials(const BenchSetup& setup, int n_trials, std::uint64_t root_seed,
                    int n_threads) {
  if (n_trials < 2) throw std::domain_error("run_trials: n_trials must be >= 2");
  TrialSet set;
  set.root_seed = root_seed;
  set.setup = setup;
  set.trials.resize(n_trials);

  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  const int threads = n_threads > 0 ? n_threads : hw;

  if (threads <= 1) {
    for (int i = 0; i < n_trials; ++i) {
      set.trials[i] = run_one_trial(setup, root_seed, static_cast<std::uint64_t>(i));
    }
    return set;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n_trials) return;
        set.trials[i] = run_one_trial(setup, root_seed, static_cast<std::uint64_t>(i));
      }
    });
  }
  for (auto& th : pool) th.join();
  return set;
}

PrecisionReport precision_report(const TrialSet& set, int bin_count) {
  if (bin_count < 1) throw std::domain_error("precision_report: bin_count must be >= 1");
  std::vector<double> qv, qe, cv, ce;
  int qfail = 0, cfail = 0;
  for (const auto& t : set.trials) {
    if (t.quantum) {
      qv.push_back(t.quantum->delta_tau_m);
      qe.push_back(t.quantum->std_err_m);
    } else {
      ++qfail;
    }
    if (t.classical) {
      cv.push_back(t.classical->delta_tau_m);
      ce.push_back(t.classical->std_err_m);
    } else {
      ++cfail;
    }
  }
  PrecisionReport rep;
  rep.n_trials = static_cast<int>(set.trials.size());
  rep.root_seed = set.root_seed;
  const double L = set.setup.scenario.sample_length_m;
  const double sL = set.setup.scenario.sample_length_sigma_m;
  rep.quantum = mode_stats(qv, qe, qfail, L, sL, bin_count);
  rep.classical = mode_stats(cv, ce, cfail, L, sL, bin_count);
  if (rep.quantum.available && rep.classical.available && rep.quantum.std_delta_tau_m > 0.0) {
    rep.ratio_std_classical_over_quantum =
        rep.classical.std_delta_tau_m / rep.quantum.std_delta_tau_m;
  }
  rep.failure_fraction =
      static_cast<double>(qfail + cfail) / (2.0 * std::max(1, rep.n_trials));
  return rep;
}

double dip_fwhm_path(const SpectrumModel& spectrum, const DispersionProfile& dispersion) {
  const double base = kSpeedOfLight * kGaussianFwhm / (2.0 * spectrum.sigma_omega());
  const double half_range = 4.0 * std::max(base, 1e-9);
  const int n = 4001;
  std::vector<double> taus(n), x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = -half_range + 2.0 * half_range * i / (n - 1);
    taus[i] = x[i] / kSpeedOfLight;
  }
  const std::vector<double> dip = hom_dip_numeric(spectrum, dispersion, taus);
  return curve_metrics(x, dip).fwhm;
}

double envelope_fwhm_path(const SpectrumModel& spectrum, const DispersionProfile& dispersion) {
  const double base = kSpeedOfLight * kGaussianFwhm / spectrum.sigma_omega();
  double half_range = 2.0 * base;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const int n = 4001;
    std::vector<double> taus(n), x(n);
    for (int i = 0; i < n; ++i) {
      x[i] = -half_range + 2.0 * half_range * i / (n - 1);
      taus[i] = x[i] / kSpeedOfLight;
    }
    const auto env = classical_envelope_numeric(spectrum, dispersion, taus);
    std::vector<double> mag(n);
    for (int i = 0; i < n; ++i) mag[i] = env[i].envelope;
    try {
      return curve_metrics(x, mag).fwhm;
    } catch (const std::runtime_error&) {
      half_range *= 2.0;  // broadened beyond the window; widen and retry
    }
  }
  throw std::runtime_error("envelope_fwhm_path: envelope too broad to bracket");
}

namespace {

double bisect_coefficient(const SpectrumModel& spectrum, int order, double target_fwhm_m,
                          bool envelope) {
  auto width = [&](double coeffL) {
    DispersionProfile d;
    d.sample_length_m = 1.0;
    d.terms = {{order, coeffL}};
    return envelope ? envelope_fwhm_path(spectrum, d) : dip_fwhm_path(spectrum, d);
  };
  const double base = width(0.0);
  if (target_fwhm_m <= base) {
    throw std::domain_error("calibration target below the dispersion-free width");
  }
  double hi = envelope ? 1e-27 : 1e-41;
  while (width(hi) < target_fwhm_m) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (width(mid) < target_fwhm_m) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double calibrate_beta2L(const SpectrumModel& spectrum, double target_envelope_fwhm_m) {
  return bisect_coefficient(spectrum, 2, target_envelope_fwhm_m, true);
}

double calibrate_beta3L(const SpectrumModel& spectrum, double target_dip_fwhm_m) {
  return bisect_coefficient(spectrum, 3, target_dip_fwhm_m, false);
}

std::vector<SweepRow> scan_plan_sweep(const BenchSetup& base, const std::vector<int>& point_counts,
                                      int n_trials, std::uint64_t root_seed, int n_threads) {
  std::vector<SweepRow> rows;
  const double base_budget = base.plan.point_count() * base.plan.integration_time_s;
  for (std::size_t i = 0; i < point_counts.size(); ++i) {
    const int points = point_counts[i];
    if (points < 50) throw std::domain_error("scan_plan_sweep: point counts must be >= 50");
    BenchSetup setup = base;
    setup.plan.step_m = setup.plan.span_m / (points - 1);
    setup.plan.integration_time_s = base_budget / points;
    const TrialSet set = run_trials(setup, n_trials, derive_seed(root_seed, 1000 + i, 0),
                                    n_threads);
    const PrecisionReport rep = precision_report(set, 10);
    SweepRow row;
    row.parameter = points;
    row.sigma_quantum_m = rep.quantum.available ? rep.quantum.std_delta_tau_m
                                                : std::numeric_limits<double>::infinity();
    row.sigma_classical_m = rep.classical.available ? rep.classical.std_delta_tau_m
                                                    : std::numeric_limits<double>::infinity();
    row.failed_quantum = rep.quantum.n_failed;
    row.failed_classical = rep.classical.n_failed;
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> dispersion_sensitivity_sweep(const BenchSetup& base,
                                                   const std::vector<double>& beta2L_values,
                                                   int n_trials, std::uint64_t root_seed,
                                                   int n_threads) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < beta2L_values.size(); ++i) {
    const double beta2L = beta2L_values[i];
    BenchSetup setup = base;
    const double L = setup.scenario.sample_length_m;
    auto set_beta2 = [&](DispersionProfile& d) {
      d.sample_length_m = L;
      bool found = false;
      for (auto& t : d.terms) {
        if (t.order == 2) { t.coefficient = beta2L / L; found = true; }
      }
      if (!found) d.terms.push_back({2, beta2L / L});
    };
    set_beta2(setup.quantum.dispersion);
    set_beta2(setup.classical.dispersion);

    SweepRow row;
    row.parameter = beta2L;
    row.quantum_dip_fwhm_m = dip_fwhm_path(setup.quantum.spectrum, setup.quantum.dispersion);
    row.classical_envelope_fwhm_m =
        envelope_fwhm_path(setup.classical.spectrum, setup.classical.dispersion);

    const TrialSet set = run_trials(setup, n_trials, derive_seed(root_seed, 2000 + i, 0),
                                    n_threads);
    const PrecisionReport rep = precision_report(set, 10);
    row.sigma_quantum_m = rep.quantum.available ? rep.quantum.std_delta_tau_m
                                                : std::numeric_limits<double>::infinity();
    row.sigma_classical_m = rep.classical.available ? rep.classical.std_delta_tau_m
                                                    : std::numeric_limits<double>::infinity();
    row.failed_quantum = rep.quantum.n_failed;
    row.failed_classical = rep.classical.n_failed;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qoct
