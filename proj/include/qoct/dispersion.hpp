#pragma once

#include <vector>

namespace qoct {

// One Taylor term of the sample's spectral phase: beta_k in s^k / m.
struct DispersionTerm {
  int order = 2;
  double coefficient = 0.0;
};

// Spectral phase applied by the sample,
//   phi(Omega) = sum_k beta_k / k! * Omega^k * L,
// with Omega the detuning from omega_p/2. Orders are distinct and >= 2.
struct DispersionProfile {
  double sample_length_m = 0.0;
  std::vector<DispersionTerm> terms;

  double phase(double detuning) const;
  double odd_phase(double detuning) const;   // (phi(O) - phi(-O)) / 2
  double even_phase(double detuning) const;  // (phi(O) + phi(-O)) / 2

  bool is_zero() const;
  bool even_only() const;

  void validate() const;  // throws std::domain_error
};

}  // namespace qoct
