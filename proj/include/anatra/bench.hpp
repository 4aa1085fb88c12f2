#ifndef ANATRA_BENCH_HPP
#define ANATRA_BENCH_HPP

// Seeded multi-trial benchmark runs, median best-so-far aggregation and
// plot-ready exports.

#include "anatra/comparators.hpp"
#include "anatra/oracles.hpp"
#include "anatra/qaoa.hpp"
#include "anatra/solver.hpp"
#include "anatra/trace_json.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace anatra::bench {

namespace fs = std::filesystem;

inline constexpr int kQaoaDepth = 5;

struct ExperimentSpec {
  std::string problem;           // quadratic-d2, quadratic-d10, rosenbrock, qaoa-c6, qaoa-chvatal, qaoa
  std::string graph;             // only for problem "qaoa": c6, chvatal or a file path
  std::string noise = "uniform";  // uniform, gaussian or shots
  double level = 0.0;
  int shots = 0;
  std::vector<std::string> solvers;
  int trials = 30;
  std::optional<long> budget;  // 25 (d + 1) when unset
  std::uint64_t seed = 1234;

  bool is_qaoa() const { return problem.rfind("qaoa", 0) == 0; }

  std::string graph_name() const {
    if (problem == "qaoa-c6") return "c6";
    if (problem == "qaoa-chvatal") return "chvatal";
    return graph;
  }

  int dimension() const {
    if (problem == "quadratic-d2" || problem == "rosenbrock") return 2;
    if (problem == "quadratic-d10") return 10;
    if (is_qaoa()) return 2 * kQaoaDepth;
    throw std::invalid_argument("unknown problem: " + problem);
  }

  long resolved_budget() const { return budget.value_or(25L * (dimension() + 1)); }

  std::uint64_t trial_seed(int trial) const { return seed + static_cast<std::uint64_t>(trial); }

  void validate() const {
    dimension();
    if (solvers.empty()) throw std::invalid_argument("solver list is empty");
    for (const auto& s : solvers) {
      if (s != "anatra" && s != "det-mbtr" && s != "spsa") throw std::invalid_argument("unknown solver: " + s);
    }
    if (std::set<std::string>(solvers.begin(), solvers.end()).size() != solvers.size()) {
      throw std::invalid_argument("duplicate solver in list");
    }
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (is_qaoa()) {
      if (noise != "shots") throw std::invalid_argument("QAOA problems take --noise shots");
      if (shots < 2) throw InvalidShots("shot count must be at least 2");
      if (problem == "qaoa" && graph.empty()) throw std::invalid_argument("problem qaoa needs --graph");
    } else {
      if (noise != "uniform" && noise != "gaussian") {
        throw std::invalid_argument("synthetic problems take --noise uniform or gaussian");
      }
      if (!(level >= 0.0)) throw std::invalid_argument("noise level must be nonnegative");
    }
    if (resolved_budget() < dimension() + 2) throw BudgetTooSmall("budget must be at least d + 2");
  }

  /// Noise level for synthetic problems, shot count for QAOA.
  double series_level() const { return is_qaoa() ? static_cast<double>(shots) : level; }
};

inline nlohmann::json to_json(const ExperimentSpec& s) {
  nlohmann::json j;
  j["problem"] = s.problem;
  j["graph"] = s.graph_name();
  j["noise"] = s.noise;
  j["level"] = s.level;
  j["shots"] = s.shots;
  j["solvers"] = s.solvers;
  j["trials"] = s.trials;
  j["budget"] = s.resolved_budget();
  j["seed"] = s.seed;
  return j;
}

inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  s.problem = j.at("problem").get<std::string>();
  s.graph = j.value("graph", std::string());
  s.noise = j.at("noise").get<std::string>();
  s.level = j.value("level", 0.0);
  s.shots = j.value("shots", 0);
  s.solvers = j.at("solvers").get<std::vector<std::string>>();
  s.trials = j.at("trials").get<int>();
  s.budget = j.at("budget").get<long>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

inline std::unique_ptr<ZerothOrderOracle> make_oracle(const ExperimentSpec& spec, std::uint64_t seed) {
  if (spec.is_qaoa()) {
    return std::make_unique<QaoaShotOracle>(QaoaCircuit(load_graph(spec.graph_name()), kQaoaDepth),
                                            spec.shots, seed);
  }
  const NoiseSpec noise{spec.noise == "gaussian" ? NoiseKind::kGaussian : NoiseKind::kUniform, spec.level};
  if (spec.problem == "rosenbrock") return std::make_unique<NoisyRosenbrock>(noisy_rosenbrock(noise, seed));
  return std::make_unique<NoisyQuadratic>(noisy_quadratic(spec.dimension(), noise, seed));
}

/// Ones for quadratics, the origin for Rosenbrock, a seeded uniform draw in
/// [0, 2 pi)^d for QAOA.
inline Vector initial_point(const ExperimentSpec& spec, std::uint64_t seed) {
  const int d = spec.dimension();
  if (spec.problem == "rosenbrock") return Vector::Zero(d);
  if (!spec.is_qaoa()) return Vector::Ones(d);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> u(0.0, 2.0 * 3.14159265358979323846);
  Vector x(d);
  for (int i = 0; i < d; ++i) x(i) = u(rng);
  return x;
}

inline SolverConfig solver_config(const ExperimentSpec& spec) {
  SolverConfig c;
  c.budget = spec.resolved_budget();
  if (spec.is_qaoa()) {
    c.noise_mode = NoiseMode::kStandardError;
  } else {
    c.noise_mode = NoiseMode::kExact;
    c.noise_level = spec.level;
  }
  return c;
}

inline SolveResult run_solver(const std::string& solver, ZerothOrderOracle& oracle, const Vector& theta0,
                              const ExperimentSpec& spec, std::uint64_t seed) {
  if (solver == "spsa") {
    SpsaConfig c;
    c.budget = spec.resolved_budget();
    c.seed = seed;
    return spsa_solve(oracle, theta0, c);
  }
  if (solver == "det-mbtr") return deterministic_mbtr_solve(oracle, theta0, solver_config(spec));
  return solve(oracle, theta0, solver_config(spec));
}

/// Running minimum of the true values, one entry per evaluation slot; slots
/// past the last evaluation repeat the final value.
inline std::vector<double> best_so_far_curve(const RunTrace& trace, long budget) {
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(budget));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : trace.evaluations) {
    if (static_cast<long>(curve.size()) == budget) break;
    if (!e.true_value) throw std::invalid_argument("trace evaluation lacks a true value");
    best = std::min(best, *e.true_value);
    curve.push_back(best);
  }
  while (static_cast<long>(curve.size()) < budget) curve.push_back(best);
  return curve;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline std::vector<double> pointwise_median(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) return {};
  std::vector<double> out(curves.front().size());
  std::vector<double> column(curves.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t t = 0; t < curves.size(); ++t) column[t] = curves[t].at(i);
    out[i] = median(column);
  }
  return out;
}

struct TrialResult {
  std::string solver;
  int trial = 0;
  std::uint64_t seed = 0;
  Vector theta0;
  RunTrace trace;  // true values filled in
  std::vector<double> curve;
  std::optional<std::string> error;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<TrialResult> trials;  // solver-major, then trial index
  std::map<std::string, std::vector<double>> aggregates;

  bool ok() const {
    return std::none_of(trials.begin(), trials.end(), [](const TrialResult& t) { return t.error.has_value(); });
  }
};

inline void fill_true_values(RunTrace& trace, const ZerothOrderOracle& oracle) {
  for (auto& e : trace.evaluations) {
    if (!e.true_value) e.true_value = oracle.true_value(e.point);
  }
}

inline TrialResult run_trial(const ExperimentSpec& spec, const std::string& solver, int trial) {
  TrialResult r;
  r.solver = solver;
  r.trial = trial;
  r.seed = spec.trial_seed(trial);
  r.theta0 = initial_point(spec, r.seed);
  auto oracle = make_oracle(spec, r.seed);
  try {
    r.trace = run_solver(solver, *oracle, r.theta0, spec, r.seed).trace;
  } catch (const OracleFailure& e) {
    r.trace = e.partial_trace();
    r.error = e.what();
  } catch (const std::exception& e) {
    r.trace.solver = solver;
    r.error = e.what();
  }
  fill_true_values(r.trace, *oracle);
  if (!r.error) r.curve = best_so_far_curve(r.trace, spec.resolved_budget());
  return r;
}

/// Number of worker threads: BENCH_THREADS if set, else the hardware count.
inline unsigned bench_threads() {
  if (const char* env = std::getenv("BENCH_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec, unsigned threads = bench_threads()) {
  spec.validate();
  ExperimentResult result;
  result.spec = spec;
  const std::size_t jobs = spec.solvers.size() * static_cast<std::size_t>(spec.trials);
  result.trials.resize(jobs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::string& solver = spec.solvers[j / static_cast<std::size_t>(spec.trials)];
      result.trials[j] = run_trial(spec, solver, static_cast<int>(j % static_cast<std::size_t>(spec.trials)));
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& solver : spec.solvers) {
    std::vector<std::vector<double>> curves;
    for (const auto& t : result.trials) {
      if (t.solver == solver && !t.error) curves.push_back(t.curve);
    }
    if (!curves.empty()) result.aggregates[solver] = pointwise_median(curves);
  }
  return result;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trace_filename(const std::string& solver, int trial) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_trial%03d.jsonl", solver.c_str(), trial);
  return buf;
}

/// Writes aggregate.csv with series in spec solver order; eval_index counts
/// evaluations from 1.
inline void write_aggregate_csv(std::ostream& os, const std::vector<std::string>& solvers,
                                const std::map<std::string, std::vector<double>>& aggregates) {
  os << "eval_index,solver,median_best_true_value\n";
  for (const auto& solver : solvers) {
    const auto it = aggregates.find(solver);
    if (it == aggregates.end()) continue;
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      os << (i + 1) << ',' << solver << ',' << format_double(it->second[i]) << '\n';
    }
  }
}

inline std::map<std::string, std::vector<double>> read_aggregate_csv(std::istream& is,
                                                                     std::vector<std::string>* order = nullptr) {
  std::map<std::string, std::vector<double>> out;
  std::string line;
  if (!std::getline(is, line) || line != "eval_index,solver,median_best_true_value") {
    throw std::invalid_argument("aggregate.csv: unexpected header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string idx, solver, value;
    if (!std::getline(row, idx, ',') || !std::getline(row, solver, ',') || !std::getline(row, value)) {
      throw std::invalid_argument("aggregate.csv: malformed row");
    }
    if (order && out.find(solver) == out.end()) order->push_back(solver);
    out[solver].push_back(std::stod(value));
  }
  return out;
}

inline void write_trace_file(const fs::path& path, const TrialResult& t) {
  std::ofstream os(path);
  nlohmann::json header;
  header["record"] = "run";
  header["solver"] = t.solver;
  header["trial"] = t.trial;
  header["seed"] = t.seed;
  header["theta0"] = std::vector<double>(t.theta0.data(), t.theta0.data() + t.theta0.size());
  if (t.error) header["error"] = *t.error;
  os << header.dump() << '\n';
  write_jsonl(os, t.trace);
}

/// Layout: spec.json, traces/<solver>_trialNNN.jsonl, aggregate.csv.
inline void write_experiment(const ExperimentResult& result, const fs::path& dir) {
  fs::create_directories(dir / "traces");
  {
    std::ofstream os(dir / "spec.json");
    os << to_json(result.spec).dump(2) << '\n';
  }
  for (const auto& t : result.trials) write_trace_file(dir / "traces" / trace_filename(t.solver, t.trial), t);
  std::ofstream os(dir / "aggregate.csv");
  write_aggregate_csv(os, result.spec.solvers, result.aggregates);
}

/// Aggregates externally produced traces (one JSON-lines file per trial) into
/// an existing run directory under the given solver name. Evaluations without
/// a true value are scored with the run's noise-free objective.
inline void import_traces(const fs::path& run_dir, const std::string& solver, const fs::path& trace_dir) {
  std::ifstream spec_in(run_dir / "spec.json");
  if (!spec_in) throw std::invalid_argument("no spec.json in " + run_dir.string());
  ExperimentSpec spec = spec_from_json(nlohmann::json::parse(spec_in));
  auto scorer = make_oracle(spec, spec.seed);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(trace_dir)) {
    if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::invalid_argument("no .jsonl traces in " + trace_dir.string());

  std::vector<std::vector<double>> curves;
  for (const auto& f : files) {
    std::ifstream in(f);
    RunTrace trace = read_jsonl(in);
    fill_true_values(trace, *scorer);
    curves.push_back(best_so_far_curve(trace, spec.resolved_budget()));
  }

  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> aggregates;
  if (std::ifstream agg_in(run_dir / "aggregate.csv"); agg_in) aggregates = read_aggregate_csv(agg_in, &order);
  if (aggregates.find(solver) == aggregates.end()) order.push_back(solver);
  aggregates[solver] = pointwise_median(curves);
  std::ofstream os(run_dir / "aggregate.csv");
  write_aggregate_csv(os, order, aggregates);
}

inline std::string figure_for(const std::string& problem) {
  if (problem == "quadratic-d2") return "fig1_quadratic_d2";
  if (problem == "quadratic-d10") return "fig2_quadratic_d10";
  if (problem == "rosenbrock") return "fig3_rosenbrock";
  return "fig4_qaoa";
}

/// Finds every run directory (one holding spec.json) under `in` and writes one
/// long-format CSV per figure into in/figures. Returns the files written.
inline std::vector<fs::path> export_figures(const fs::path& in) {
  std::vector<fs::path> runs;
  if (fs::exists(in / "spec.json")) runs.push_back(in);
  if (fs::is_directory(in)) {
    for (const auto& entry : fs::recursive_directory_iterator(in)) {
      if (entry.is_regular_file() && entry.path().filename() == "spec.json" && entry.path().parent_path() != in) {
        runs.push_back(entry.path().parent_path());
      }
    }
  }
  std::sort(runs.begin(), runs.end());
  if (runs.empty()) throw std::invalid_argument("no run directories under " + in.string());

  std::map<std::string, std::vector<std::string>> rows;  // figure -> CSV rows
  for (const auto& run : runs) {
    std::ifstream spec_in(run / "spec.json");
    const ExperimentSpec spec = spec_from_json(nlohmann::json::parse(spec_in));
    std::ifstream agg_in(run / "aggregate.csv");
    if (!agg_in) throw std::invalid_argument("missing aggregate.csv in " + run.string());
    std::vector<std::string> order;
    const auto aggregates = read_aggregate_csv(agg_in, &order);
    if (aggregates.empty()) throw std::invalid_argument("empty aggregate.csv in " + run.string());

    const std::string graph = spec.is_qaoa() ? spec.graph_name() : "";
    auto& out = rows[figure_for(spec.problem)];
    for (const auto& solver : order) {
      const auto& curve = aggregates.at(solver);
      for (std::size_t i = 0; i < curve.size(); ++i) {
        out.push_back(spec.problem + ',' + graph + ',' + spec.noise + ',' + format_double(spec.series_level()) +
                      ',' + solver + ',' + std::to_string(i + 1) + ',' + format_double(curve[i]));
      }
    }
  }

  fs::create_directories(in / "figures");
  std::vector<fs::path> written;
  for (const auto& [figure, lines] : rows) {
    const fs::path path = in / "figures" / (figure + ".csv");
    std::ofstream os(path);
    os << "problem,graph,noise,level,solver,eval_index,median_best_true_value\n";
    for (const auto& l : lines) os << l << '\n';
    written.push_back(path);
  }
  return written;
}

}  // namespace anatra::bench

#endif  // ANATRA_BENCH_HPP
