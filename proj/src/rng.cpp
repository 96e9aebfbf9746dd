#include "qoct/rng.hpp"

#include <cmath>

namespace qoct {

namespace {

double log_factorial(double k) {
  // Stirling series, used only for k >= 10 inside PTRS.
  const double one_over_k = 1.0 / k;
  return (k + 0.5) * std::log(k) - k + 0.9189385332046727 +
         one_over_k * (1.0 / 12.0 - one_over_k * one_over_k / 360.0);
}

}  // namespace

long long Rng::poisson(double mu) {
  if (mu <= 0.0) return 0;
  if (mu < 30.0) {
    // inversion by sequential search
    double p = std::exp(-mu);
    double cdf = p;
    double u = uniform();
    long long k = 0;
    while (u > cdf && k < 1100) {
      ++k;
      p *= mu / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  // PTRS, Hormann (1993), exact for mu >= 10
  const double b = 0.931 + 2.53 * std::sqrt(mu);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mu = std::log(mu);
  for (;;) {
    double u = uniform() - 0.5;
    double v = uniform();
    double us = 0.5 - std::fabs(u);
    double k = std::floor((2.0 * a / us + b) * u + mu + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long long>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mu - mu - log_factorial(k)) {
      return static_cast<long long>(k);
    }
  }
}

}  // namespace qoct
