#include "convexburgers/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "convexburgers/errors.hpp"

namespace convexburgers::initial_data {

TrigSeries random_trig_series(std::uint64_t seed, int degree) {
  if (degree < 1) throw InvalidArgument("random trig data needs degree >= 1, got " + std::to_string(degree));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  TrigSeries s;
  for (int k = 0; k < degree; ++k) {
    s.alpha.push_back(coef(rng));
    s.beta.push_back(coef(rng));
  }
  return s;
}

TrigSeries sine_series(int k) {
  if (k < 1) throw InvalidArgument("sine data needs wavenumber >= 1, got " + std::to_string(k));
  TrigSeries s{std::vector<double>(static_cast<std::size_t>(k), 0.0), std::vector<double>(static_cast<std::size_t>(k), 0.0)};
  s.alpha.back() = 1.0;
  return s;
}

SampledFn sample(const PeriodicGrid& grid, const TrigSeries& series) {
  SampledFn u = SampledFn::sample(grid, [&](double x) {
    double v = 0.0;
    for (std::size_t k = 0; k < series.degree(); ++k) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(k + 1) * x;
      v += series.alpha[k] * std::sin(w) + series.beta[k] * std::cos(w);
    }
    return v;
  });
  const double m = u.mean();
  for (double& v : u.values) v -= m;
  return u;
}

SampledFn sample_potential(const PeriodicGrid& grid, const TrigSeries& series) {
  return SampledFn::sample(grid, [&](double x) {
    double v = 0.0;
    for (std::size_t k = 0; k < series.degree(); ++k) {
      const double c = 2.0 * std::numbers::pi * static_cast<double>(k + 1);
      v += (-series.alpha[k] * std::cos(c * x) + series.beta[k] * std::sin(c * x)) / c;
    }
    return v;
  });
}

}  // namespace convexburgers::initial_data
