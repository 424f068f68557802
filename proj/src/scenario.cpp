#include "convexburgers/scenario.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "convexburgers/duality.hpp"
#include "convexburgers/fv_oracle.hpp"
#include "convexburgers/hopf_lax.hpp"
#include "convexburgers/initial_data.hpp"
#include "convexburgers/parallel.hpp"
#include "convexburgers/primal_solver.hpp"
#include "convexburgers/shock_free.hpp"

#ifndef CONVEXBURGERS_VERSION
#define CONVEXBURGERS_VERSION "unknown"
#endif

namespace convexburgers::cli {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxGrid = std::size_t{1} << 20;

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
  return buf;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// Collects problems while reading typed fields out of a JSON object.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (!allowed.count(key)) {
        problems_.push_back("unknown key '" + key + "' in " + where);
      }
    }
  }

  template <typename T>
  void read(const json& obj, const std::string& key, const std::string& where, T& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("");
        out = v.get<std::string>();
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("");
        out = v.get<double>();
      } else {
        if (!v.is_number_integer()) throw std::invalid_argument("");
        if (std::is_unsigned_v<T> && v.get<long long>() < 0 && !v.is_number_unsigned()) {
          problems_.push_back(where + key + " must be non-negative");
          return;
        }
        out = v.get<T>();
      }
    } catch (const std::exception&) {
      problems_.push_back(where + key + " has the wrong type");
    }
  }

 private:
  std::vector<std::string>& problems_;
};

void parse_initial_string(const std::string& text, InitialDataSpec& spec, std::vector<std::string>& problems) {
  std::istringstream in(text);
  std::string name;
  in >> name;
  spec.preset = name;
  if (name == "zero") return;
  if (name == "sine") {
    int k = 1;
    if (in >> k) spec.k = k;
    return;
  }
  if (name == "random-trig") {
    std::string rest;
    in >> rest;
    const auto slash = rest.find('/');
    try {
      if (rest.empty()) return;
      if (slash == std::string::npos) {
        spec.seed = std::stoull(rest);
      } else {
        spec.seed = std::stoull(rest.substr(0, slash));
        spec.degree = std::stoi(rest.substr(slash + 1));
      }
    } catch (const std::exception&) {
      problems.push_back("initial_data '" + text + "' must look like 'random-trig SEED/DEGREE'");
    }
  }
}

void collect_problems(const Scenario& s, std::vector<std::string>& problems) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), s.experiment) == names.end()) {
    problems.push_back("experiment '" + s.experiment + "' is not one of {" + join(names, ", ") + "}");
  }
  if (s.T_over_tstar) {
    if (!(*s.T_over_tstar > 0.0) || !std::isfinite(*s.T_over_tstar)) problems.push_back("T_over_tstar must be positive");
  } else if (!(s.T > 0.0) || !std::isfinite(s.T)) {
    problems.push_back("T must be positive");
  }
  const std::size_t n = s.initial_data.preset == "samples" ? s.initial_data.samples.size() : s.n;
  if (n < 4 || n > kMaxGrid) problems.push_back("n must lie in [4, 2^20], got " + std::to_string(n));
  if (s.nt < 4 || s.nt > kMaxGrid) problems.push_back("nt must lie in [4, 2^20], got " + std::to_string(s.nt));
  if (!(s.cfl > 0.0 && s.cfl <= 1.0)) problems.push_back("cfl must lie in (0, 1]");
  const auto& p = s.initial_data.preset;
  if (p != "zero" && p != "sine" && p != "random-trig" && p != "samples") {
    problems.push_back("initial_data preset '" + p + "' is not one of zero, sine, random-trig, samples");
  }
  if (p == "sine" && s.initial_data.k < 1) problems.push_back("sine wavenumber must be >= 1");
  if (p == "random-trig" && s.initial_data.degree < 1) problems.push_back("random-trig degree must be >= 1");
  if (p == "samples") {
    for (double v : s.initial_data.samples) {
      if (!std::isfinite(v)) {
        problems.push_back("initial_data samples must be finite");
        break;
      }
    }
  }
  if (s.output_dir.empty()) problems.push_back("output_dir must not be empty");
  if (!(s.primal.tol > 0.0)) problems.push_back("primal.tol must be positive");
  if (!(s.primal.r > 0.0)) problems.push_back("primal.r must be positive");
  if (s.primal.max_iterations == 0) problems.push_back("primal.max_iterations must be positive");
}

json scenario_json(const Scenario& s) {
  json init{{"preset", s.initial_data.preset}};
  if (s.initial_data.preset == "sine") init["k"] = s.initial_data.k;
  if (s.initial_data.preset == "random-trig") {
    init["seed"] = s.initial_data.seed;
    init["degree"] = s.initial_data.degree;
  }
  if (s.initial_data.preset == "samples") init["samples"] = s.initial_data.samples;
  json out{{"initial_data", init},
           {"grid", {{"n", s.n}, {"nt", s.nt}}},
           {"cfl", s.cfl},
           {"experiment", s.experiment},
           {"output_dir", s.output_dir},
           {"primal", {{"tol", s.primal.tol}, {"max_iterations", s.primal.max_iterations}, {"r", s.primal.r}}}};
  if (s.T_over_tstar) {
    out["T_over_tstar"] = *s.T_over_tstar;
  } else {
    out["T"] = s.T;
  }
  return out;
}

class Csv {
 public:
  Csv(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw InvalidArgument("cannot write " + path.string());
    out_ << join(header, ",") << '\n';
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  static std::string cell(std::size_t v) { return std::to_string(v); }

  std::ofstream out_;
};

void write_solution_rows(Csv& csv, double t, const SampledFn& u, const SampledFn& phi) {
  for (std::size_t i = 0; i < u.size(); ++i) csv.row(t, u.grid.node(static_cast<std::ptrdiff_t>(i)), u.values[i], phi.values[i]);
}

void write_particles(Csv& csv, const shock_free::ParticleMeasure& m) {
  for (const auto& p : m.particles) csv.row(m.t, p.a, p.position, p.weight, p.velocity);
}

double relative_gap(double reference, double value) {
  const double scale = std::abs(reference) < 1e-14 ? 1.0 : std::abs(reference);
  return std::abs(value - reference) / scale;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json run_experiment(const Scenario& s, const std::filesystem::path& dir, json& timings, json& warnings) {
  const SampledFn u0 = initial_velocity(s);
  const SampledFn phi0 = antiderivative_zero_mean(u0);
  const double T = resolve_horizon(s, u0);
  const double tstar = hopf_lax::shock_time(phi0);
  json results{{"T", T}, {"tstar", tstar}};
  Timer timer;
  const std::string& e = s.experiment;

  if (e == "hopflax") {
    const auto sol = hopf_lax::solve(phi0, T);
    Csv csv(dir / "solution.csv", {"t", "x", "u", "phi"});
    write_solution_rows(csv, 0.0, u0, phi0);
    write_solution_rows(csv, T, sol.u, sol.phi);
    results["entropy_total"] = hopf_lax::entropy_total(sol);
  } else if (e == "tstar") {
    Csv csv(dir / "solution.csv", {"t", "x", "u", "phi"});
    write_solution_rows(csv, 0.0, u0, phi0);
    if (std::isfinite(tstar)) {
      results["smooth_at_0.95_tstar"] = hopf_lax::smooth_characteristics_check(phi0, 0.95 * tstar);
      results["smooth_at_1.05_tstar"] = hopf_lax::smooth_characteristics_check(phi0, 1.05 * tstar);
    }
  } else if (e == "substitute") {
    const auto sub = shock_free::substitute(phi0, T);
    const auto original = hopf_lax::solve(phi0, T);
    const auto replaced = hopf_lax::solve(sub.phi0T, T);
    Csv csv(dir / "solution.csv", {"t", "x", "u", "phi"});
    write_solution_rows(csv, 0.0, sub.u0T, sub.phi0T);
    write_solution_rows(csv, T, replaced.u, replaced.phi);
    Csv particles(dir / "particles.csv", {"t", "a", "position", "weight", "velocity"});
    write_particles(particles, shock_free::pushforward(sub, 0.0));
    results["no_shock_margin"] = shock_free::no_shock_margin(sub);
    results["l1_substitute_vs_original"] = l1_distance(replaced.u, original.u);
  } else if (e == "pushforward") {
    const auto sub = shock_free::substitute(phi0, T);
    Csv particles(dir / "particles.csv", {"t", "a", "position", "weight", "velocity"});
    for (double t : {0.0, 0.5 * T, T}) write_particles(particles, shock_free::pushforward(sub, t));
    const auto end = shock_free::pushforward(sub, T);
    results["total_mass"] = end.total_mass();
    results["w1_to_uniform"] = shock_free::wasserstein1_to_uniform(end);
  } else if (e == "values") {
    const double opti = shock_free::optimal_value_hj(phi0, T);
    const double value = shock_free::optimal_value_contact(shock_free::substitute(phi0, T));
    Csv csv(dir / "values.csv", {"method", "J", "gap"});
    csv.row("optiJ", opti, 0.0);
    csv.row("valueJ", value, relative_gap(opti, value));
  } else if (e == "primal") {
    const SpaceTimeGrid grid(u0.size(), s.nt, T);
    primal::SolverOptions opts;
    opts.tol = s.primal.tol;
    opts.max_iterations = s.primal.max_iterations;
    opts.r = s.primal.r;
    const auto res = primal::solve_primal(u0, T, grid, opts);
    const auto& rep = res.report;
    for (const auto& w : rep.warnings) warnings.push_back(w);
    Csv conv(dir / "convergence.csv", {"iteration", "objective", "gap", "residual"});
    for (std::size_t k = 0; k < rep.objective_history.size(); ++k) {
      conv.row(k + 1, rep.objective_history[k], rep.gap_history[k], rep.residual_history[k]);
    }
    Csv csv(dir / "values.csv", {"method", "J", "gap"});
    csv.row("optiJ", rep.reference_value, 0.0);
    csv.row("primal", rep.objective_history.back(), rep.gap_history.back());
    results["iterations"] = rep.iterations;
    results["converged"] = rep.converged;
  } else if (e == "criterion") {
    const SpaceTimeGrid grid(u0.size(), s.nt, T);
    StateField U(grid, 1);
    std::vector<double> entropy(grid.nt + 1);
    for (std::size_t k = 0; k <= grid.nt; ++k) {
      const SampledFn u = (k == 0) ? u0 : hopf_lax::solve(phi0, grid.time(k)).u;
      double e2 = 0.0;
      for (std::size_t i = 0; i < grid.n; ++i) {
        U.values[k * grid.n + i] = u.values[i];
        e2 += 0.5 * u.values[i] * u.values[i];
      }
      entropy[k] = e2 * grid.dx();
    }
    const BurgersSystem burgers;
    const auto report = criterion_check(burgers, U, {});
    Csv csv(dir / "criterion.csv", {"t", "x", "minEigenvalue"});
    for (std::size_t k = 0; k <= grid.nt; ++k) {
      for (std::size_t i = 0; i < grid.n; ++i) {
        csv.row(grid.time(k), grid.dx() * static_cast<double>(i), report.node_minimum[k * grid.n + i]);
      }
    }
    results["min_eigenvalue"] = report.min_eigenvalue;
    results["pass"] = report.pass;
    double integral = 0.0;
    for (std::size_t k = 0; k < grid.nt; ++k) integral += 0.5 * (entropy[k] + entropy[k + 1]) * grid.dt();
    results["entropy_integral"] = integral;
    try {
      results["objective_candidate_W"] = objective(burgers, theorem1_W(burgers, U), u0);
    } catch (const Infeasible& err) {
      warnings.push_back(std::string("candidate W infeasible: ") + err.what());
    }
  } else if (e == "godunov-compare") {
    const auto end = fv::advance(fv::FvState{u0, 0.0, s.cfl}, T);
    const auto sol = hopf_lax::solve(phi0, T);
    Csv csv(dir / "compare.csv", {"x", "godunov", "hopflax"});
    for (std::size_t i = 0; i < u0.size(); ++i) {
      csv.row(u0.grid.node(static_cast<std::ptrdiff_t>(i)), end.u.values[i], sol.u.values[i]);
    }
    results["l1"] = l1_distance(end.u, sol.u);
  }
  timings["experiment_seconds"] = timer.seconds();
  return results;
}

}  // namespace

ParseError::ParseError(std::size_t l, std::size_t c, const std::string& what)
    : Error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + what), line(l), column(c) {}

ValidationError::ValidationError(std::vector<std::string> p)
    : Error("invalid scenario: " + join(p, "; ")), problems(std::move(p)) {}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"hopflax", "tstar",  "substitute", "pushforward",
                                              "values",  "primal", "criterion",  "godunov-compare"};
  return names;
}

Scenario parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    throw ParseError(line, column, e.what());
  }
  std::vector<std::string> problems;
  Scenario s;
  if (!doc.is_object()) throw ValidationError({"config must be a JSON object"});
  Reader rd(problems);
  rd.check_keys(doc, "config",
                {"initial_data", "T", "T_over_tstar", "grid", "cfl", "experiment", "output_dir", "primal"});

  if (doc.contains("initial_data")) {
    const json& init = doc.at("initial_data");
    if (init.is_string()) {
      parse_initial_string(init.get<std::string>(), s.initial_data, problems);
    } else if (init.is_object()) {
      rd.check_keys(init, "initial_data", {"preset", "k", "seed", "degree", "samples"});
      if (init.contains("samples")) {
        s.initial_data.preset = "samples";
        const json& list = init.at("samples");
        if (!list.is_array() || !std::all_of(list.begin(), list.end(), [](const json& v) { return v.is_number(); })) {
          problems.push_back("initial_data.samples must be an array of numbers");
        } else {
          s.initial_data.samples = list.get<std::vector<double>>();
        }
      }
      rd.read(init, "preset", "initial_data.", s.initial_data.preset);
      rd.read(init, "k", "initial_data.", s.initial_data.k);
      rd.read(init, "seed", "initial_data.", s.initial_data.seed);
      rd.read(init, "degree", "initial_data.", s.initial_data.degree);
    } else {
      problems.push_back("initial_data must be a string or an object");
    }
  }
  rd.read(doc, "T", "", s.T);
  if (doc.contains("T_over_tstar")) {
    double f = 0.0;
    rd.read(doc, "T_over_tstar", "", f);
    s.T_over_tstar = f;
    if (doc.contains("T")) problems.push_back("give either T or T_over_tstar, not both");
  }
  if (doc.contains("grid")) {
    const json& grid = doc.at("grid");
    if (grid.is_object()) {
      rd.check_keys(grid, "grid", {"n", "nt"});
      rd.read(grid, "n", "grid.", s.n);
      rd.read(grid, "nt", "grid.", s.nt);
    } else {
      problems.push_back("grid must be an object {n, nt}");
    }
  }
  rd.read(doc, "cfl", "", s.cfl);
  rd.read(doc, "experiment", "", s.experiment);
  rd.read(doc, "output_dir", "", s.output_dir);
  if (doc.contains("primal")) {
    const json& p = doc.at("primal");
    if (p.is_object()) {
      rd.check_keys(p, "primal", {"tol", "max_iterations", "r"});
      rd.read(p, "tol", "primal.", s.primal.tol);
      rd.read(p, "max_iterations", "primal.", s.primal.max_iterations);
      rd.read(p, "r", "primal.", s.primal.r);
    } else {
      problems.push_back("primal must be an object");
    }
  }
  if (s.initial_data.preset == "samples" && !doc.at("initial_data").contains("samples")) {
    problems.push_back("preset 'samples' needs a samples array");
  }
  collect_problems(s, problems);
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return s;
}

void validate(const Scenario& s) {
  std::vector<std::string> problems;
  collect_problems(s, problems);
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

SampledFn initial_velocity(const Scenario& s) {
  const auto& d = s.initial_data;
  if (d.preset == "samples") return SampledFn(PeriodicGrid(d.samples.size()), d.samples);
  const PeriodicGrid grid(s.n);
  if (d.preset == "zero") return initial_data::zero(grid);
  if (d.preset == "sine") return initial_data::sine(grid, d.k);
  if (d.preset == "random-trig") return initial_data::random_trig(grid, d.seed, d.degree);
  throw ValidationError({"initial_data preset '" + d.preset + "' is not one of zero, sine, random-trig, samples"});
}

double resolve_horizon(const Scenario& s, const SampledFn& u0) {
  if (!s.T_over_tstar) return s.T;
  const double tstar = hopf_lax::shock_time(antiderivative_zero_mean(u0));
  if (!std::isfinite(tstar)) throw ValidationError({"T_over_tstar needs data that forms a shock"});
  return *s.T_over_tstar * tstar;
}

RunOutcome run(const Scenario& s) {
  Timer total;
  json timings = json::object();
  json warnings = json::array();
  json results;
  RunOutcome outcome{0, "ok"};
  std::filesystem::path dir(s.output_dir);
  try {
    validate(s);
    std::filesystem::create_directories(dir);
    results = run_experiment(s, dir, timings, warnings);
  } catch (const Diverged& e) {
    outcome = {3, e.what()};
  } catch (const Error& e) {
    outcome = {2, e.what()};
  } catch (const std::filesystem::filesystem_error& e) {
    outcome = {2, e.what()};
  }
  timings["total_seconds"] = total.seconds();
  const json meta{{"scenario", scenario_json(s)},
                  {"versions",
                   {{"convexburgers", CONVEXBURGERS_VERSION},
                    {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
                    {"fftw", std::string(fftw_version)},
                    {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
                  {"threads", max_threads()},
                  {"timings", timings},
                  {"results", results},
                  {"warnings", warnings},
                  {"exit_code", outcome.exit_code},
                  {"message", outcome.message}};
  if (std::filesystem::is_directory(dir)) {
    std::ofstream out(dir / "meta.json");
    out << meta.dump(2) << '\n';
  }
  return outcome;
}

}  // namespace convexburgers::cli
