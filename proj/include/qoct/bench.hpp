#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qoct/estimator.hpp"
#include "qoct/scan.hpp"

namespace qoct {

struct BenchSetup {
  DualCoreScenario scenario;
  QuantumCurveModel quantum;
  ClassicalCurveModel classical;
  ScanPlan plan;
  NoiseConfig noise;
  EstimatorTuning tuning;
};

struct TrialResult {
  std::uint64_t trial_index = 0;
  std::uint64_t seed = 0;
  std::optional<DeltaTauEstimate> quantum;
  std::optional<DeltaTauEstimate> classical;
  std::string quantum_error;
  std::string classical_error;
};

struct TrialSet {
  std::vector<TrialResult> trials;
  std::uint64_t root_seed = 0;
  BenchSetup setup;
};

// Each trial simulates a fresh core pair (both channels) and runs both
// estimators. Trials are independent, reproducible from root_seed, and may
// run on several threads; results are ordered by trial index either way.
// Estimator errors mark the trial's mode as failed without aborting the set.
TrialSet run_trials(const BenchSetup& setup, int n_trials, std::uint64_t root_seed,
                    int n_threads = 0);

struct ModeStats {
  bool available = false;
  int n_success = 0;
  int n_failed = 0;
  double mean_delta_tau_m = 0.0;
  double std_delta_tau_m = 0.0;
  double mean_delta_n = 0.0;
  double std_delta_n = 0.0;
  double mean_reported_std_err_m = 0.0;
  // normal fit by moment matching
  double normal_mu_m = 0.0;
  double normal_sigma_m = 0.0;
  std::vector<double> histogram_edges_m;
  std::vector<int> histogram_counts;
};

struct PrecisionReport {
  ModeStats quantum;
  ModeStats classical;
  double ratio_std_classical_over_quantum = 0.0;
  double failure_fraction = 0.0;
  int n_trials = 0;
  std::uint64_t root_seed = 0;
};

PrecisionReport precision_report(const TrialSet& trials, int bin_count);

struct SweepRow {
  double parameter = 0.0;  // point count or beta2*L
  double sigma_quantum_m = 0.0;
  double sigma_classical_m = 0.0;
  double quantum_dip_fwhm_m = 0.0;       // dispersion sweep only
  double classical_envelope_fwhm_m = 0.0;
  int failed_quantum = 0;
  int failed_classical = 0;
};

// Precision vs number of scan points at fixed span and fixed total scan
// time: the per-point integration time scales as base_points / points, so
// rows compare equal photon budgets.
std::vector<SweepRow> scan_plan_sweep(const BenchSetup& base, const std::vector<int>& point_counts,
                                      int n_trials, std::uint64_t root_seed, int n_threads = 0);

// Precision and interferogram widths vs beta2*L (applied to the sample's
// order-2 term; other terms of the base setup are preserved).
std::vector<SweepRow> dispersion_sensitivity_sweep(const BenchSetup& base,
                                                   const std::vector<double>& beta2L_values,
                                                   int n_trials, std::uint64_t root_seed,
                                                   int n_threads = 0);

// Width helpers shared by the sweeps and the acceptance suite: FWHM in path
// length of the numeric dip / envelope for the given models.
double dip_fwhm_path(const SpectrumModel& spectrum, const DispersionProfile& dispersion);
double envelope_fwhm_path(const SpectrumModel& spectrum, const DispersionProfile& dispersion);

// Bisection calibrations used for defaults and tests: beta2*L reproducing a
// target classical envelope FWHM, beta3*L reproducing a target dip FWHM.
double calibrate_beta2L(const SpectrumModel& spectrum, double target_envelope_fwhm_m);
double calibrate_beta3L(const SpectrumModel& spectrum, double target_dip_fwhm_m);

}  // namespace qoct
