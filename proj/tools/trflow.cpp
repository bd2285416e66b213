// trflow: run residual checks, flows and experiments from JSON scenarios.

#include <iostream>

#include "CLI11.hpp"
#include "trflow/cli/commands.hpp"
#include "trflow/core/errors.hpp"

using namespace trflow;

int main(int argc, char** argv) {
  CLI::App app{"Totally real submanifolds: J-volume, Maslov flow and residual checks"};
  app.require_subcommand(1);

  RunOptions opt;
  std::string scenario;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto common = [&](CLI::App* sub, const std::string& out_help) {
    sub->add_option("scenario", scenario, "scenario JSON file or preset name")->required();
    sub->add_option("--out", opt.out, out_help);
    sub->add_option("--threads", opt.threads, "worker threads (0: all cores)")->check(CLI::Range(0, 1024));
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) {
      seed = s;
      seed_given = true;
    }, "random seed override");
    sub->add_option("--resolution", opt.resolution, "grid resolution override (nodes per axis)")
        ->check(CLI::Range(16, 4096));
  };

  auto* check = app.add_subcommand("check", "residual suite for the scenario");
  common(check, "output directory (default out)");
  auto* flow = app.add_subcommand("flow", "run the configured flow and write the series CSV");
  common(flow, "series CSV path (default series.csv)");
  flow->add_option("--snapshots", opt.snapshots, "directory for per-record position snapshots");
  auto* angle = app.add_subcommand("angle", "Lagrangian angle, Maslov class and calibration checks");
  common(angle, "output directory (default out)");
  auto* str = app.add_subcommand("str-solve", "special totally real graph family root");
  common(str, "output directory (default out)");
  auto* var = app.add_subcommand("variation", "first/second variation of the J-volume");
  common(var, "output directory (default out)");
  var->add_option("--probe", opt.probe, "probe field: zero | const:a,b | sin1 | random:K | bump:c1,c2,width,axis");
  auto* sym = app.add_subcommand("symbol", "principal symbol report");
  common(sym, "output directory (default out)");

  CLI11_PARSE(app, argc, argv);
  if (seed_given) opt.seed = seed;

  try {
    ScenarioConfig c;
    if (scenario.size() > 5 && scenario.substr(scenario.size() - 5) == ".json") {
      c = load_scenario(scenario);
    } else {
      c = parse_scenario(nlohmann::json{{"preset", scenario}});
    }
    if (check->parsed()) return cmd_check(c, opt, std::cout);
    if (flow->parsed()) return cmd_flow(c, opt, std::cout);
    if (angle->parsed()) return cmd_angle(c, opt, std::cout);
    if (str->parsed()) return cmd_str_solve(c, opt, std::cout);
    if (var->parsed()) return cmd_variation(c, opt, std::cout);
    if (sym->parsed()) return cmd_symbol(c, opt, std::cout);
  } catch (const Error& e) {
    std::cerr << "trflow: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "trflow: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
