// orbitedge: run scenario experiments from the command line.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "orbitedge/errors.hpp"
#include "orbitedge/experiments.hpp"
#include "orbitedge/scenario.hpp"

namespace ex = orbitedge::experiments;

int main(int argc, char** argv) {
  CLI::App app{"Edge-computing constellation experiments"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string solver;
  int replicas = 0;

  const char* verbs[] = {"validate", "observe", "turbulence-mc", "capacity", "pipeline", "sweep"};
  const char* help[] = {"load and check a scenario", "compare exact, GA and FIFO schedules",
                        "turbulence gating and rescheduling", "supported load per architecture",
                        "end-to-end episode", "slot duration / platform sweep"};
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(verbs[i], help[i]);
    sub->add_option("--scenario", scenario_path, "scenario file (YAML or JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the scenario)");
    sub->add_option("--out", out_dir, "output directory (overrides the scenario)");
    sub->add_option("--solver", solver, "observation solver")->check(CLI::IsMember({"exact", "ga", "fifo"}));
    sub->add_option("--replicas", replicas, "Monte Carlo replicas")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);

  const auto* sub = app.get_subcommands().front();
  try {
    auto s = orbitedge::scenario::load_scenario(scenario_path);
    ex::Overrides o;
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--out")) o.out_dir = out_dir;
    if (sub->count("--solver")) o.solver = orbitedge::obs::parse_solver(solver);
    if (sub->count("--replicas")) o.replicas = replicas;
    s = ex::apply_overrides(std::move(s), o);

    const auto e = ex::parse_experiment(sub->get_name());
    const auto a = ex::run_experiment(s, e);
    // --out is taken relative to the working directory, the scenario's own
    // output_dir relative to the scenario file.
    const auto dir = sub->count("--out") ? out_dir : s.resolve(s.output_dir);
    for (const auto& p : ex::write_artifacts(a, dir)) std::cout << p << '\n';
    if (!a.ok) {
      std::cerr << sub->get_name() << ": experiment checks failed; see the summary JSON\n";
      return 3;
    }
  } catch (const orbitedge::ValidationError& e) {
    std::cerr << "invalid scenario:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
    return 2;
  } catch (const orbitedge::InfeasibleAllocationError& e) {
    std::cerr << "infeasible allocation: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
