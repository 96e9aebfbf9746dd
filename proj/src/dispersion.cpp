#include "qoct/dispersion.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace qoct {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

double DispersionProfile::phase(double detuning) const {
  double phi = 0.0;
  for (const auto& t : terms) {
    phi += t.coefficient / factorial(t.order) * std::pow(detuning, t.order);
  }
  return phi * sample_length_m;
}

double DispersionProfile::odd_phase(double detuning) const {
  return 0.5 * (phase(detuning) - phase(-detuning));
}

double DispersionProfile::even_phase(double detuning) const {
  return 0.5 * (phase(detuning) + phase(-detuning));
}

bool DispersionProfile::is_zero() const {
  if (sample_length_m == 0.0) return true;
  for (const auto& t : terms) {
    if (t.coefficient != 0.0) return false;
  }
  return true;
}

bool DispersionProfile::even_only() const {
  for (const auto& t : terms) {
    if (t.order % 2 != 0 && t.coefficient != 0.0) return false;
  }
  return true;
}

void DispersionProfile::validate() const {
  if (sample_length_m < 0.0) throw std::domain_error("dispersion: sample_length_m must be >= 0");
  std::set<int> seen;
  for (const auto& t : terms) {
    if (t.order < 2) throw std::domain_error("dispersion: orders must be >= 2");
    if (!seen.insert(t.order).second) {
      throw std::domain_error("dispersion: orders must be distinct");
    }
  }
}

}  // namespace qoct
