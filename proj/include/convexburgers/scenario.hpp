#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "convexburgers/errors.hpp"
#include "convexburgers/periodic.hpp"

namespace convexburgers::cli {

/// Malformed config text; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line;
  std::size_t column;
};

/// Every violation found in a scenario, not only the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  std::vector<std::string> problems;
};

const std::vector<std::string>& experiment_names();

struct InitialDataSpec {
  /// "zero", "sine", "random-trig" or "samples".
  std::string preset = "sine";
  int k = 1;
  std::uint64_t seed = 0;
  int degree = 3;
  std::vector<double> samples;
};

struct PrimalSettings {
  double tol = 1e-3;
  std::size_t max_iterations = 2000;
  double r = 1.0;
};

struct Scenario {
  InitialDataSpec initial_data;
  /// Horizon; ignored when T_over_tstar is set.
  double T = 0.5;
  std::optional<double> T_over_tstar;
  std::size_t n = 1024;
  std::size_t nt = 1024;
  double cfl = 0.9;
  std::string experiment = "values";
  std::string output_dir = "out";
  PrimalSettings primal;
};

/// Parses a JSON document. Recognized keys (all optional):
///
///   initial_data   "zero" | "sine K" | "random-trig SEED/DEGREE" | object
///                  {preset, k, seed, degree} | {samples: [...]}
///   T, T_over_tstar, grid {n, nt}, cfl, experiment, output_dir,
///   primal {tol, max_iterations, r}
///
/// Throws ParseError for bad syntax, ValidationError listing every bad or
/// unknown key and every out-of-range value.
Scenario parse_config(const std::string& text);

/// Range and closed-set checks; throws ValidationError with all problems.
void validate(const Scenario& s);

/// Initial data sampled on n nodes (n = samples.size() for inline data).
SampledFn initial_velocity(const Scenario& s);

/// T, or T_over_tstar times the shock time of the initial data.
double resolve_horizon(const Scenario& s, const SampledFn& u0);

struct RunOutcome {
  int exit_code;
  std::string message;
};

/// Runs the experiment and writes meta.json and its CSV files into
/// output_dir. Exit codes: 0 success, 2 invalid input, 3 solver divergence.
RunOutcome run(const Scenario& s);

}  // namespace convexburgers::cli
