#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qoct/optics.hpp"

namespace qoct {

// Commanded scan grid: uniform positions centered on center_m, inclusive
// endpoints, floor(span/step)+1 points.
struct ScanPlan {
  double center_m = 0.0;
  double span_m = 120e-6;
  double step_m = 0.24e-6;
  double integration_time_s = 0.5;

  int point_count() const;
  std::vector<double> commanded_positions() const;
  double total_scan_time_s() const { return point_count() * integration_time_s; }
  void validate() const;  // throws std::domain_error
};

ScanPlan build_scan_plan(double center_m, double span_m, double step_m,
                         double integration_time_s);

struct NoiseConfig {
  double position_jitter_sigma_m = 20e-9;
  double singles_peak_rate_hz = 3.0e6;
  double coincidence_to_singles_ratio = 0.01;
  bool estimator_sees_true_positions = true;
  // Poisson sampling switch; off gives deterministic rounded expectations for
  // noiseless fixtures and oracles.
  bool poisson_counts = true;

  void validate() const;
};

enum class Channel { singles, coincidences };
enum class Core { core1, core2 };

std::string to_string(Channel c);
std::string to_string(Core c);
Channel channel_from_string(const std::string& s);
Core core_from_string(const std::string& s);

// One interferogram. positions_m hold what the estimator is allowed to see
// (true jittered values in encoder-read mode, commanded values otherwise);
// counts always come from the true optical delay.
struct ScanRecord {
  Channel channel = Channel::coincidences;
  Core core = Core::core1;
  std::uint64_t seed = 0;
  double integration_time_s = 0.5;
  std::vector<double> positions_m;
  std::vector<long long> counts;
  bool window_warning = false;
};

// Rate as a function of stage position, sampled once on a dense grid so a
// scan evaluates by cubic interpolation instead of re-running the spectral
// quadrature per jittered point. Verified against direct evaluation to 1e-9
// in tests.
class RateTable {
 public:
  RateTable() = default;
  // balance_position_m: stage position of optical path equality for the core.
  static RateTable for_quantum(const QuantumCurveModel& m, double balance_position_m,
                               double pos_min_m, double pos_max_m, int n = 8193);
  static RateTable for_classical(const ClassicalCurveModel& m, double balance_position_m,
                                 double pos_min_m, double pos_max_m, int n = 8193);
  double rate(double position_m) const;
  double balance_position_m() const { return balance_; }

 private:
  double lo_ = 0.0, hi_ = 0.0, dx_ = 0.0, balance_ = 0.0;
  // oscillatory carrier/fringe parts evaluated exactly per call; only the
  // smooth dip/envelope shape is tabulated
  double baseline_ = 0.0;
  double dip_visibility_ = 1.0;
  double fringe_amp_ = 0.0;    // multiplies cos(k_fringe (p - balance))
  double fringe_k_ = 0.0;      // spatial angular frequency, rad/m
  bool fringe_uses_shape_ = false;
  double carrier_amp_ = 0.0;   // classical V, multiplies cos * envelope
  double carrier_k_ = 0.0;
  std::vector<double> shape_;  // dip or envelope on the grid
  std::vector<double> phase_;  // envelope carrier phase on the grid
  bool is_quantum_ = true;
  double interp(const std::vector<double>& v, double position_m) const;
};

// position_n = commanded_n + N(0, jitter^2), redrawn if ordering breaks;
// counts_n ~ Poisson(rate(true position + drift) * T). drift_offsets_m, when
// given, hold the per-point unrecorded drift of the optical path.
ScanRecord simulate_scan(const RateTable& rate, const ScanPlan& plan,
                         const NoiseConfig& noise, std::uint64_t seed,
                         Channel channel, Core core,
                         const std::vector<double>& drift_offsets_m = {});

struct DualCoreScenario {
  double delta_tau_true_m = 41.1e-6;  // optical-path offset between cores, path-length units
  double sample_length_m = 0.5;
  double sample_length_sigma_m = 1e-4;
  double drift_per_scan_m = 0.0;  // linear optical-path drift accumulated over one scan
  // Each core's scan window is centered on that core's balance point, the way
  // the experiment recenters on the prior estimated path equality. Off keeps
  // one common window for both cores.
  bool recenter_core2_window = true;

  void validate() const;
};

struct CorePairRecords {
  ScanRecord coincidences1, coincidences2;
  ScanRecord singles1, singles2;
};

// Models describe core 1; core 2 is the same pair of curves translated by
// delta_tau_true. All four records come from one pass: per core, singles and
// coincidences share the same jittered positions.
CorePairRecords simulate_core_pair(const DualCoreScenario& scenario,
                                   const QuantumCurveModel& quantum,
                                   const ClassicalCurveModel& classical,
                                   const ScanPlan& plan, const NoiseConfig& noise,
                                   std::uint64_t root_seed, std::uint64_t trial_index = 0);

// Expected (noise-free) peak rates used for the 1:100 coupling between the
// channels; see config::build_models.
double quantum_peak_rate(const QuantumCurveModel& m);
double classical_peak_rate(const ClassicalCurveModel& m);

}  // namespace qoct
