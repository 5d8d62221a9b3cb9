// Copyright 2026 The wmtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// wmtomo: command-line front end.
//
//   wmtomo simulate --state 0.3,-0.2,0.5 --eps 0.5 --a 0.4 --ensemble 30
//   wmtomo sweep --config plan.json --out-dir results/
//   wmtomo score --config plan.json
//   wmtomo analytic-check --mc-samples 1000000 --seed 3
//
// Exit codes: 0 success, 1 runtime or tolerance failure, 2 usage/config error.
// Data goes to stdout (or --out-dir); progress and diagnostics go to stderr.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wmtomo/config.hpp"
#include "wmtomo/consistency.hpp"
#include "wmtomo/harness.hpp"
#include "wmtomo/pipeline.hpp"
#include "wmtomo/report.hpp"
#include "wmtomo/version.hpp"

namespace {

using namespace wmtomo;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stream tags for the simulate subcommand.
constexpr std::uint64_t kSimulateState = 1;
constexpr std::uint64_t kSimulateScheme = 2;
constexpr std::uint64_t kSimulateBaseline = 3;

BlochVector parse_state(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--state: cannot parse '" + item + "' as a number");
    }
  }
  if (values.size() != 3) throw UsageError("--state expects three comma-separated values x,y,z");
  const BlochVector b{values[0], values[1], values[2]};
  if (!b.is_physical()) {
    throw UsageError("--state: |state| = " + format_number(b.norm()) + " exceeds the Bloch-ball bound 1");
  }
  return b;
}

std::string vector_text(const BlochVector& b) {
  return format_number(b.x) + " " + format_number(b.y) + " " + format_number(b.z);
}

json vector_json(const BlochVector& b) { return json::array({b.x, b.y, b.z}); }

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string state;
  bool random = false;
  std::string distribution = "ball";
  double eps = 0.5;
  std::optional<double> eps1;
  std::optional<double> eps2;
  double a = 0.0;
  std::size_t ensemble = 30;
  std::uint64_t seed = 1;
  std::string estimator = "calibrated";
  bool clamp = false;
  bool json_output = false;
};

int run_simulate(const SimulateArgs& args) {
  if (args.state.empty() == !args.random) throw UsageError("give exactly one of --state x,y,z or --random");
  const auto dist = parse_distribution(args.distribution);
  if (!dist) throw UsageError("--distribution must be 'ball' or 'surface'");
  const auto mode = parse_estimator(args.estimator);
  if (!mode) throw UsageError("--estimator must be 'calibrated' or 'paper-naive'");
  const double e1 = args.eps1.value_or(args.eps);
  const double e2 = args.eps2.value_or(args.eps);
  if (!(e1 > 0.0) || !(e2 > 0.0) || !std::isfinite(e1) || !std::isfinite(e2)) {
    throw UsageError("--eps/--eps1/--eps2 must be positive and finite");
  }
  if (!(args.a >= 0.0) || !std::isfinite(args.a)) throw UsageError("--a must be non-negative and finite");
  if (args.ensemble < 3) throw UsageError("--ensemble must be at least 3");

  SchemeConfig cfg;
  cfg.eps1 = MeasurementStrength{e1};
  cfg.eps2 = MeasurementStrength{e2};
  cfg.a = DiscardWidth{args.a};
  cfg.ensemble_size = args.ensemble;
  cfg.estimator_mode = *mode;
  cfg.clamp_estimates = args.clamp;

  BlochVector truth;
  if (args.random) {
    RandomStream rng = seed_substream(args.seed, kSimulateState, 0, 0);
    truth = random_state(rng, *dist);
  } else {
    truth = parse_state(args.state);
  }

  RandomStream scheme_rng = seed_substream(args.seed, kSimulateScheme, 0, 0);
  const SchemeTally tally = run_scheme_on_ensemble(truth, cfg, scheme_rng);
  const PartialEstimate partial = estimate_weak_partial(tally, cfg);
  std::optional<BlochVector> weak;
  if (partial.complete()) weak = estimate_weak(tally, cfg);
  RandomStream baseline_rng = seed_substream(args.seed, kSimulateBaseline, 0, 0);
  BlochVector projective = run_projective_baseline(truth, cfg.ensemble_size, baseline_rng);
  if (cfg.clamp_estimates) projective = clamp_to_ball(projective);

  std::vector<std::string> failed;
  for (PauliAxis axis : {PauliAxis::Z, PauliAxis::X, PauliAxis::Y}) {
    if (!partial[axis]) failed.emplace_back(axis_name(axis));
  }

  const double n = static_cast<double>(cfg.ensemble_size);
  const double discard_z = static_cast<double>(tally.counts_z.n_discard) / n;
  const double discard_x = static_cast<double>(tally.counts_x.n_discard) / n;
  if (args.json_output) {
    json weak_json = json::array();
    for (PauliAxis axis : kAllAxes) {
      weak_json.push_back(partial[axis] ? json(weak ? (*weak)[axis] : *partial[axis]) : json(nullptr));
    }
    json out{{"true_state", vector_json(truth)},
             {"weak_estimate", weak_json},
             {"projective_estimate", vector_json(projective)},
             {"fidelity_weak", weak ? json(fidelity_score(truth, *weak)) : json(nullptr)},
             {"fidelity_projective", fidelity_score(truth, projective)},
             {"discard_fraction_z", discard_z},
             {"discard_fraction_x", discard_x},
             {"failed_stages", failed},
             {"counts",
              {{"z", {tally.counts_z.n_plus, tally.counts_z.n_minus, tally.counts_z.n_discard}},
               {"x", {tally.counts_x.n_plus, tally.counts_x.n_minus, tally.counts_x.n_discard}},
               {"y", {tally.counts_y.n_plus, tally.counts_y.n_minus}}}},
             {"config",
              {{"eps1", e1},
               {"eps2", e2},
               {"a", args.a},
               {"ensemble", args.ensemble},
               {"estimator", estimator_name(*mode)},
               {"seed", args.seed}}}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::string weak_text;
    for (PauliAxis axis : kAllAxes) {
      if (!weak_text.empty()) weak_text += ' ';
      weak_text += partial[axis] ? format_number(weak ? (*weak)[axis] : *partial[axis]) : "failed";
    }
    std::cout << "true_state          " << vector_text(truth) << '\n'
              << "weak_estimate       " << weak_text << '\n'
              << "projective_estimate " << vector_text(projective) << '\n'
              << "fidelity_weak       " << (weak ? format_number(fidelity_score(truth, *weak)) : "n/a") << '\n'
              << "fidelity_projective " << format_number(fidelity_score(truth, projective)) << '\n'
              << "discard_fraction_z  " << format_number(discard_z) << '\n'
              << "discard_fraction_x  " << format_number(discard_x) << '\n';
  }
  if (!failed.empty()) {
    std::string stages;
    for (const auto& f : failed) stages += (stages.empty() ? "" : ", ") + f;
    std::cerr << "error: estimation failed for stage(s) " << stages
              << (cfg.estimator_mode == EstimatorMode::Calibrated ? " (calibration slope below 1e-12)"
                                                                  : " (no kept readings or correction overflow)")
              << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep / score

struct SweepArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::string out_dir;
  std::optional<std::string> distribution;
  std::optional<std::string> estimator;
  std::optional<std::size_t> states;
  std::optional<std::size_t> runs;
  std::vector<std::size_t> ensemble;
  std::vector<double> eps;
  std::vector<double> a;
  bool quiet = false;
};

ExperimentPlan build_plan(const SweepArgs& args) {
  ExperimentPlan plan;
  try {
    if (!args.config.empty()) plan = plan_from_file(args.config, plan);
  } catch (const ConfigError& e) {
    throw UsageError(args.config + ": " + e.what());
  }
  if (args.seed) plan.master_seed = *args.seed;
  if (args.distribution) {
    const auto d = parse_distribution(*args.distribution);
    if (!d) throw UsageError("--distribution must be 'ball' or 'surface'");
    plan.distribution = *d;
  }
  if (args.estimator) {
    const auto m = parse_estimator(*args.estimator);
    if (!m) throw UsageError("--estimator must be 'calibrated' or 'paper-naive'");
    plan.estimator_mode = *m;
  }
  if (args.states) plan.state_count = *args.states;
  if (args.runs) plan.runs_per_state = *args.runs;
  if (!args.ensemble.empty()) plan.ensemble_sizes = args.ensemble;
  if (!args.eps.empty()) plan.epsilon_grid = args.eps;
  if (!args.a.empty()) plan.a_grid = args.a;
  try {
    plan.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return plan;
}

SweepResult execute_sweep(const ExperimentPlan& plan, const SweepArgs& args) {
  SweepOptions options;
  options.workers = args.workers;
  if (!args.quiet) {
    options.progress = [last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
      const std::size_t percent = total == 0 ? 100 : done * 100 / total;
      if (percent != last || done == total) {
        last = percent;
        std::fprintf(stderr, "\rsweep: %zu/%zu tasks (%zu%%)", done, total, percent);
        if (done == total) std::fputc('\n', stderr);
      }
    };
  }
  return run_sweep(plan, options);
}

void write_outputs(const std::filesystem::path& dir, const std::string& command, const ExperimentPlan& plan,
                   const SweepResult& result, double seconds) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "sweep.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / "sweep.csv").string());
    write_sweep_csv(csv, result.rows);
  }
  const json manifest{{"tool", "wmtomo"},
                      {"version", kVersion},
                      {"command", command},
                      {"plan", plan_to_json(plan)},
                      {"wall_clock_seconds", seconds},
                      {"failures", result.total_failures},
                      {"rows", result.rows.size()},
                      {"outputs", json::array({"sweep.csv"})}};
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

int run_sweep_command(const SweepArgs& args, bool score_only) {
  const ExperimentPlan plan = build_plan(args);
  const auto start = std::chrono::steady_clock::now();
  const SweepResult result = execute_sweep(plan, args);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (score_only) {
    write_score_csv(std::cout, result.rows);
    if (!args.out_dir.empty()) write_outputs(args.out_dir, "score", plan, result, seconds);
  } else {
    write_outputs(args.out_dir.empty() ? "." : args.out_dir, "sweep", plan, result, seconds);
  }
  if (!args.quiet) {
    std::fprintf(stderr, "sweep: %zu rows, %zu estimation failures, %.2f s\n", result.rows.size(),
                 result.total_failures, seconds);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analytic-check

struct CheckArgs {
  std::size_t points = 1000;
  std::uint64_t seed = 3;
  std::size_t mc_samples = 100000;
  std::string formula = "all";
  std::string variant = "eps2";
  double tolerance = 1e-9;
};

int run_analytic_check(const CheckArgs& args) {
  std::vector<consistency::Formula> formulas;
  if (args.formula == "all") {
    formulas.assign(std::begin(consistency::kAllFormulas), std::end(consistency::kAllFormulas));
  } else if (const auto f = consistency::parse_formula(args.formula)) {
    formulas.push_back(*f);
  } else {
    throw UsageError("--formula must be one of all, z, x, y, discard_x");
  }
  consistency::DiscardXVariant variant;
  if (args.variant == "eps2") {
    variant = consistency::DiscardXVariant::SecondStage;
  } else if (args.variant == "paper-eps1") {
    variant = consistency::DiscardXVariant::PaperEps1;
  } else {
    throw UsageError("--variant must be 'eps2' or 'paper-eps1'");
  }

  bool ok = true;
  double worst = 0.0;
  for (const auto f : formulas) {
    const auto d = consistency::quadrature_check(f, args.points, args.seed, variant, args.tolerance);
    worst = std::max(worst, d.max_deviation);
    ok = ok && d.pass();
    std::string name = consistency::formula_name(f);
    if (f == consistency::Formula::DiscardX && variant == consistency::DiscardXVariant::PaperEps1) {
      name += "(paper-eps1)";
    }
    std::printf("quadrature  %-20s points=%zu max_deviation=%.3e tolerance=%.1e %s\n", name.c_str(), d.points,
                d.max_deviation, d.tolerance, d.pass() ? "PASS" : "FAIL");
    if (!d.pass()) std::printf("  worst at %s\n", d.worst.describe().c_str());
  }
  std::printf("quadrature  max deviation over checked formulas: %.3e\n", worst);

  if (args.mc_samples > 0) {
    SchemeConfig cfg;
    cfg.eps1 = MeasurementStrength{0.5};
    cfg.eps2 = MeasurementStrength{0.5};
    cfg.a = DiscardWidth{0.4};
    cfg.ensemble_size = args.mc_samples;
    const BlochVector state{0.3, -0.2, 0.5};
    RandomStream rng{args.seed};
    const auto report = consistency::monte_carlo_check(state, cfg, rng);
    std::printf("monte-carlo state=(0.3,-0.2,0.5) eps1=eps2=0.5 a=0.4 samples=%zu seed=%llu\n", args.mc_samples,
                static_cast<unsigned long long>(args.seed));
    for (const auto& c : report.checks) {
      const std::string stage = c.label.substr(0, 1);
      const bool selected = args.formula == "all" || args.formula == stage ||
                            (args.formula == "discard_x" && c.label == "x:discard");
      if (!selected) continue;
      ok = ok && c.pass();
      std::printf("monte-carlo %-10s expected=%.6f observed=%.6f z=%+.2f (3-sigma) %s\n", c.label.c_str(),
                  c.expected, c.observed, c.sigma > 0 ? (c.observed - c.expected) / c.sigma : 0.0,
                  c.pass() ? "PASS" : "FAIL");
    }
  }
  std::printf("%s\n", ok ? "analytic-check: all checks within tolerance" : "analytic-check: TOLERANCE BREACH");
  return ok ? kExitOk : kExitFailure;
}

void add_sweep_flags(CLI::App* cmd, SweepArgs& args) {
  cmd->add_option("--config", args.config, "Flat JSON experiment plan");
  cmd->add_option("--seed", args.seed, "Master seed (overrides config)");
  cmd->add_option("--workers", args.workers, "Worker threads (0 = all cores); never changes results");
  cmd->add_option("--out-dir", args.out_dir, "Directory for sweep.csv and manifest.json");
  cmd->add_option("--distribution", args.distribution, "Random states: ball | surface");
  cmd->add_option("--estimator", args.estimator, "calibrated | paper-naive");
  cmd->add_option("--states", args.states, "Number of random states S");
  cmd->add_option("--runs", args.runs, "Runs per state R");
  cmd->add_option("--ensemble", args.ensemble, "Ensemble sizes N")->delimiter(',');
  cmd->add_option("--eps", args.eps, "Measurement strength grid")->delimiter(',');
  cmd->add_option("--a", args.a, "Discard half-width grid")->delimiter(',');
  cmd->add_flag("--quiet", args.quiet, "No progress output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit state estimation with sequential weak measurements"};
  app.set_version_flag("--version", std::string(wmtomo::kVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one weak-scheme and one projective experiment");
  simulate->add_option("--state", sim.state, "True Bloch vector x,y,z");
  simulate->add_flag("--random", sim.random, "Draw the true state at random");
  simulate->add_option("--distribution", sim.distribution, "ball | surface (with --random)");
  simulate->add_option("--eps", sim.eps, "Strength of both weak stages");
  simulate->add_option("--eps1", sim.eps1, "Strength of the sigma_z stage");
  simulate->add_option("--eps2", sim.eps2, "Strength of the sigma_x stage");
  simulate->add_option("--a", sim.a, "Discard half-width");
  simulate->add_option("--ensemble", sim.ensemble, "Ensemble size N");
  simulate->add_option("--seed", sim.seed, "Seed");
  simulate->add_option("--estimator", sim.estimator, "calibrated | paper-naive");
  simulate->add_flag("--clamp", sim.clamp, "Project estimates into the Bloch ball");
  simulate->add_flag("--json", sim.json_output, "Machine-readable output");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Run an (eps, a, N) sweep over a random state panel");
  add_sweep_flags(sweep, sweep_args);
  SweepArgs score_args;
  auto* score = app.add_subcommand("score", "Like sweep, printing only the win scores");
  add_sweep_flags(score, score_args);

  CheckArgs check;
  auto* analytic = app.add_subcommand("analytic-check", "Check closed forms against quadrature and Monte Carlo");
  analytic->add_option("--points", check.points, "Random parameter points per formula");
  analytic->add_option("--seed", check.seed, "Seed");
  analytic->add_option("--mc-samples", check.mc_samples, "Monte Carlo ensemble size (0 disables)");
  analytic->add_option("--formula", check.formula, "all | z | x | y | discard_x");
  analytic->add_option("--variant", check.variant, "discard_x expression: eps2 | paper-eps1");
  analytic->add_option("--tolerance", check.tolerance, "Quadrature tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (sweep->parsed()) return run_sweep_command(sweep_args, false);
    if (score->parsed()) return run_sweep_command(score_args, true);
    if (analytic->parsed()) return run_analytic_check(check);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EstimationFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
