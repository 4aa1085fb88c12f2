// bench: run seeded benchmark grids and export plot-ready CSVs.

#include "anatra/bench.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  namespace bench = anatra::bench;
  CLI::App app{"Noise-aware trust-region benchmark harness"};
  app.require_subcommand(1);

  bench::ExperimentSpec spec;
  std::string solvers = "anatra,det-mbtr,spsa";
  std::string budget = "auto";
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run one experiment and write traces plus aggregate.csv");
  run->add_option("--problem", spec.problem, "quadratic-d2, quadratic-d10, rosenbrock, qaoa-c6, qaoa-chvatal, qaoa")
      ->required();
  run->add_option("--graph", spec.graph, "c6, chvatal or a graph file (with --problem qaoa)");
  run->add_option("--noise", spec.noise, "uniform, gaussian or shots")->required();
  auto* level = run->add_option("--level", spec.level, "noise level for synthetic problems");
  auto* shots = run->add_option("--shots", spec.shots, "shots per evaluation for QAOA");
  level->excludes(shots);
  run->add_option("--solvers", solvers, "comma-separated list of anatra, det-mbtr, spsa");
  run->add_option("--trials", spec.trials, "number of seeded trials")->capture_default_str();
  run->add_option("--budget", budget, "evaluations per run, or auto for 25(d+1)")->capture_default_str();
  run->add_option("--seed", spec.seed, "base seed; trial t uses seed + t")->capture_default_str();
  run->add_option("--out", out_dir, "output directory")->required();

  std::string in_dir;
  auto* exp = app.add_subcommand("export", "Write one long-format CSV per figure from run directories");
  exp->add_option("--in", in_dir, "directory holding one or more runs")->required();

  std::string import_solver, import_traces;
  auto* imp = app.add_subcommand("import", "Aggregate external JSON-lines traces into a run directory");
  imp->add_option("--in", in_dir, "run directory with spec.json")->required();
  imp->add_option("--solver", import_solver, "series name for the imported traces")->required();
  imp->add_option("--traces", import_traces, "directory of .jsonl traces, one per trial")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      spec.solvers = split_list(solvers);
      if (budget != "auto") spec.budget = std::stol(budget);
      spec.validate();
      const auto result = bench::run_experiment(spec);
      bench::write_experiment(result, out_dir);
      int status = 0;
      for (const auto& t : result.trials) {
        if (t.error) {
          std::cerr << "bench: " << t.solver << " trial " << t.trial << " failed: " << *t.error << '\n';
          status = 1;
        }
      }
      return status;
    }
    if (*exp) {
      for (const auto& p : bench::export_figures(in_dir)) std::cout << p.string() << '\n';
      return 0;
    }
    if (*imp) {
      bench::import_traces(in_dir, import_solver, import_traces);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
