#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "qoct/bench.hpp"

namespace qoct {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BenchConfig {
  int n_trials = 70;
  int histogram_bins = 12;
  int threads = 0;  // 0 = hardware concurrency
  int sweep_trials = 100;
  std::vector<int> sweep_point_counts = {2000, 500, 100};
  std::vector<double> sweep_beta2L_values;  // defaults filled in load
};

// Full run description. Absolute rates of the two curves derive from the
// noise block: the coincidence peak rate is coincidence_to_singles_ratio
// times the singles peak rate.
struct RunConfig {
  SpectrumModel spectrum;
  DispersionProfile dispersion;  // shared two-core sample
  double dip_visibility = 0.74;
  double fringe_visibility = 0.74;
  bool fringe_coherence_envelope = false;
  double classical_visibility = 0.5;
  double pump_wavelength_m = 780e-9;
  ScanPlan plan;
  NoiseConfig noise;
  DualCoreScenario scenario;
  EstimatorTuning tuning_overrides;  // band/taper tuning; feature widths auto-derived
  BenchConfig bench;
  std::uint64_t root_seed = 42;

  QuantumCurveModel quantum_model() const;
  ClassicalCurveModel classical_model() const;
  EstimatorTuning estimator_tuning() const;  // with widths derived from the models
  BenchSetup bench_setup() const;
};

// Strict JSON parsing: unknown keys anywhere are an error (reported with the
// offending line), missing keys keep defaults.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text, const std::string& origin = "<string>");
std::string config_to_json(const RunConfig& config);
RunConfig default_config();

}  // namespace qoct
