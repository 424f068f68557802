// Scenario runner: one subcommand per experiment, or `run --experiment NAME`.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "convexburgers/scenario.hpp"

namespace cb = convexburgers::cli;

namespace {

struct Overrides {
  std::string config;
  std::string experiment;
  std::string data;
  std::optional<std::size_t> n;
  std::optional<std::size_t> nt;
  std::optional<double> T;
  std::optional<double> T_over_tstar;
  std::optional<std::uint64_t> seed;
  std::optional<double> cfl;
  std::string out;
};

cb::Scenario build(const Overrides& o, const std::string& subcommand) {
  std::string text = "{}";
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw cb::ValidationError({"cannot read config file " + o.config});
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  cb::Scenario s = cb::parse_config(text);
  if (!o.data.empty()) {
    // reuse the config grammar for the preset string
    cb::Scenario d = cb::parse_config("{\"initial_data\": \"" + o.data + "\"}");
    s.initial_data = d.initial_data;
  }
  if (o.n) s.n = *o.n;
  if (o.nt) s.nt = *o.nt;
  if (o.T) {
    s.T = *o.T;
    s.T_over_tstar.reset();
  }
  if (o.T_over_tstar) s.T_over_tstar = *o.T_over_tstar;
  if (o.cfl) s.cfl = *o.cfl;
  if (!o.out.empty()) s.output_dir = o.out;
  if (o.seed) {
    if (s.initial_data.preset != "random-trig") {
      throw cb::ValidationError({"--seed applies only to random-trig initial data"});
    }
    s.initial_data.seed = *o.seed;
  }
  if (!subcommand.empty() && subcommand != "run") {
    s.experiment = subcommand;
  } else if (!o.experiment.empty()) {
    s.experiment = o.experiment;
  }
  cb::validate(s);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex-dual Burgers experiments"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config, "JSON scenario file");
  app.add_option("--experiment", o.experiment, "experiment name (for `run`)");
  app.add_option("--data", o.data, "initial data: zero | 'sine K' | 'random-trig SEED/DEGREE'");
  app.add_option("--n", o.n, "spatial nodes");
  app.add_option("--nt", o.nt, "time steps");
  app.add_option("--T", o.T, "horizon");
  app.add_option("--T-over-tstar", o.T_over_tstar, "horizon as a multiple of the shock time");
  app.add_option("--seed", o.seed, "seed for random-trig data");
  app.add_option("--cfl", o.cfl, "Courant number for godunov-compare");
  app.add_option("--out", o.out, "output directory");

  std::vector<CLI::App*> subs;
  subs.push_back(app.add_subcommand("run", "run the experiment named by --experiment or the config"));
  for (const auto& name : cb::experiment_names()) subs.push_back(app.add_subcommand(name, "run " + name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  std::string chosen;
  for (auto* sub : subs) {
    if (sub->parsed()) chosen = sub->get_name();
  }

  cb::Scenario scenario;
  try {
    scenario = build(o, chosen);
  } catch (const convexburgers::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  const cb::RunOutcome outcome = cb::run(scenario);
  if (outcome.exit_code != 0) std::cerr << "error: " << outcome.message << '\n';
  return outcome.exit_code;
}
