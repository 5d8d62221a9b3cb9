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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Supporting numbers go on indented lines.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wmtomo/analytic.hpp"
#include "wmtomo/consistency.hpp"
#include "wmtomo/harness.hpp"
#include "wmtomo/oracle.hpp"
#include "wmtomo/pipeline.hpp"
#include "wmtomo/report.hpp"

using namespace wmtomo;

namespace {

struct Verdict {
  bool pass = false;
  std::string summary;
};

void detail(const char* fmt, auto... args) {
  std::printf("  ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

Verdict analytic_oracles() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  bool ok = true;
  for (consistency::Formula f : consistency::kAllFormulas) {
    const auto d = consistency::quadrature_check(f, 1000, 20261015);
    detail("%-9s max |closed form - quadrature| = %.3e over %zu points", consistency::formula_name(f),
           d.max_deviation, d.points);
    worst = std::max(worst, d.max_deviation);
    ok = ok && d.pass();
  }
  const double t = seconds_since(start);
  char buf[160];
  std::snprintf(buf, sizeof buf, "max deviation %.2e <= 1e-9, %.1f s < 60 s", worst, t);
  return {ok && t < 60.0, buf};
}

Verdict monte_carlo_frequencies() {
  const auto start = std::chrono::steady_clock::now();
  SchemeConfig cfg;
  cfg.eps1 = MeasurementStrength{0.5};
  cfg.eps2 = MeasurementStrength{0.5};
  cfg.a = DiscardWidth{0.4};
  cfg.ensemble_size = 1000000;
  RandomStream rng{hash_combine(20261015, 2)};
  const auto report = consistency::monte_carlo_check({0.3, -0.2, 0.5}, cfg, rng);
  double worst_z = 0.0;
  for (const auto& c : report.checks) {
    const double z = (c.observed - c.expected) / c.sigma;
    worst_z = std::max(worst_z, std::abs(z));
    detail("%-9s expected %.6f observed %.6f (%+.2f sigma)", c.label.c_str(), c.expected, c.observed, z);
  }
  const double t = seconds_since(start);
  char buf[160];
  std::snprintf(buf, sizeof buf, "worst |z| = %.2f <= 3 over 8 frequencies, %.1f s < 60 s", worst_z, t);
  return {report.pass() && t < 60.0, buf};
}

Verdict channel_checks() {
  bool ok = true;
  double worst_completeness = 0.0;
  for (PauliAxis axis : kAllAxes) {
    for (double eps : {0.1, 0.5, 1.0, 2.0}) {
      const Matrix2 c = oracle::kraus_completeness(axis, eps);
      const double d = std::max({std::abs(c.m00 - 1.0), std::abs(c.m01), std::abs(c.m10), std::abs(c.m11 - 1.0)});
      worst_completeness = std::max(worst_completeness, d);
    }
  }
  ok = ok && worst_completeness <= 1e-9;
  detail("Kraus completeness: max |integral - I| = %.3e", worst_completeness);

  double worst_factor = 0.0;
  const DensityMatrix plus_x{0.5, 0.5, 0.5, 0.5};
  for (double eps : {0.1, 0.5, 1.0, 2.0}) {
    const double factor = nonselective_channel(plus_x, PauliAxis::Z, MeasurementStrength{eps})(0, 1).real() / 0.5;
    const double overlap = oracle::coherence_overlap(eps);
    const double d = std::max(std::abs(factor - std::exp(-eps / 2)), std::abs(overlap - std::exp(-eps / 2)));
    worst_factor = std::max(worst_factor, d);
    detail("eps = %.1f: channel factor %.15f, overlap integral %.15f, e^{-eps/2} %.15f", eps, factor, overlap,
           std::exp(-eps / 2));
  }
  ok = ok && worst_factor <= 1e-12;

  RandomStream rng{hash_combine(20261015, 3)};
  const DensityMatrix rho = bloch_to_density({0.3, -0.2, 0.5});
  double worst_average = 0.0;
  constexpr int kSamples = 1000000;
  for (PauliAxis axis : kAllAxes) {
    const MeasurementStrength eps{0.8};
    complex s[4] = {};
    for (int i = 0; i < kSamples; ++i) {
      const DensityMatrix out = kraus_update(rho, axis, eps, sample_reading(rho, axis, eps, rng));
      s[0] += out(0, 0);
      s[1] += out(0, 1);
      s[2] += out(1, 0);
      s[3] += out(1, 1);
    }
    const DensityMatrix expected = nonselective_channel(rho, axis, eps);
    for (int k = 0; k < 4; ++k) {
      worst_average = std::max(worst_average, std::abs(s[k] / double(kSamples) - expected(k / 2, k % 2)));
    }
  }
  ok = ok && worst_average <= 5e-3;
  detail("selective average vs channel (10^6 samples per axis, eps = 0.8): max entry deviation %.3e",
         worst_average);

  char buf[200];
  std::snprintf(buf, sizeof buf, "completeness %.1e <= 1e-9, damping %.1e <= 1e-12, selective average %.1e <= 5e-3",
                worst_completeness, worst_factor, worst_average);
  return {ok, buf};
}

StageCounts counts_from(double p_plus, double p_minus, std::size_t n) {
  StageCounts c;
  c.n_plus = static_cast<std::size_t>(std::llround(p_plus * static_cast<double>(n)));
  c.n_minus = static_cast<std::size_t>(std::llround(p_minus * static_cast<double>(n)));
  c.n_discard = n - c.n_plus - c.n_minus;
  return c;
}

Verdict inversion_identity() {
  RandomStream rng{hash_combine(20261015, 4)};
  double worst = 0.0;
  constexpr std::size_t kN = std::size_t{1} << 50;
  for (int i = 0; i < 100; ++i) {
    const BlochVector b = random_state(rng, StateDistribution::BallUniform);
    SchemeConfig cfg;
    cfg.eps1 = MeasurementStrength{std::exp(std::log(0.05) + std::log(200.0) * rng.uniform())};
    cfg.eps2 = MeasurementStrength{std::exp(std::log(0.05) + std::log(200.0) * rng.uniform())};
    cfg.a = DiscardWidth{rng.uniform()};
    cfg.ensemble_size = kN;
    const OutcomeTriple tz = prob_z(b.z, cfg.eps1, cfg.a);
    const OutcomeTriple tx = prob_x(b.x, cfg.eps1, cfg.eps2, cfg.a);
    const auto ty = prob_y(b.y, cfg.eps1, cfg.eps2);
    const SchemeTally tally{counts_from(tz.p_plus, tz.p_minus, kN), counts_from(tx.p_plus, tx.p_minus, kN),
                            counts_from(ty.first, ty.second, kN)};
    const BlochVector est = estimate_weak(tally, cfg);
    for (PauliAxis axis : kAllAxes) worst = std::max(worst, std::abs(est[axis] - b[axis]));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |estimate - truth| = %.2e <= 1e-10 over 100 states (N = 2^50 tallies)", worst);
  return {worst <= 1e-10, buf};
}

// ---------------------------------------------------------------------------
// Replication

constexpr std::size_t kStates = 2000;
constexpr std::size_t kRuns = 1000;
const std::vector<double> kAGrid{0.0, 0.2, 0.4, 0.6, 0.8};

double binomial_sigma(std::size_t score, std::size_t states) {
  const double p = static_cast<double>(score) / static_cast<double>(states);
  return std::sqrt(static_cast<double>(states) * p * (1.0 - p));
}

struct Replication {
  double epsilon = 0.0;
  std::vector<SweepRow> n30;
  std::vector<SweepRow> n60;
};

// Picks eps from the default grid with an independently seeded scan at the
// full run count (so per-state means are as sharp as in the replication) on
// a smaller panel: the point whose a = 0.8 score is highest.
double choose_epsilon() {
  ExperimentPlan scan;
  scan.state_count = 400;
  scan.runs_per_state = kRuns;
  scan.ensemble_sizes = {30};
  scan.a_grid = {0.8};
  scan.estimator_mode = EstimatorMode::PaperNaive;
  scan.master_seed = 777;
  const auto start = std::chrono::steady_clock::now();
  const SweepResult r = run_sweep(scan);
  double best_eps = 0.0;
  std::size_t best = 0;
  for (const SweepRow& row : r.rows) {
    if (row.score > best) {
      best = row.score;
      best_eps = row.epsilon;
    }
  }
  detail("eps scan (S = %zu, R = %zu, N = 30, a = 0.8, seed 777, %zu grid points, %.0f s): best score %zu/%zu at "
         "eps = %.6f",
         scan.state_count, scan.runs_per_state, scan.epsilon_grid.size(), seconds_since(start), best,
         scan.state_count, best_eps);
  return best_eps;
}

std::vector<SweepRow> replicate(double eps, std::size_t n) {
  ExperimentPlan plan;
  plan.state_count = kStates;
  plan.runs_per_state = kRuns;
  plan.ensemble_sizes = {n};
  plan.epsilon_grid = {eps};
  plan.a_grid = kAGrid;
  plan.estimator_mode = EstimatorMode::PaperNaive;
  plan.master_seed = 1;
  const auto start = std::chrono::steady_clock::now();
  const SweepResult r = run_sweep(plan);
  detail("N = %zu: S = %zu, R = %zu, eps = %.6f, %.0f s", n, kStates, kRuns, eps, seconds_since(start));
  for (const SweepRow& row : r.rows) {
    detail("  a = %.1f  score %4zu  f_weak %.5f  f_proj %.5f  discard %.4f  failures %zu", row.a, row.score,
           row.mean_fidelity_weak, row.mean_fidelity_projective, row.discard_fraction, row.failures);
  }
  return r.rows;
}

Verdict replication_n30(const Replication& rep) {
  const auto& rows = rep.n30;
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double slack = 2.0 * binomial_sigma(rows[i - 1].score, kStates);
    if (static_cast<double>(rows[i].score) < static_cast<double>(rows[i - 1].score) - slack) monotone = false;
  }
  const bool crosses = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.score > kStates / 2; });
  bool fidelity_rises = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].mean_fidelity_weak > rows[i - 1].mean_fidelity_weak)) fidelity_rises = false;
  }
  const double gap_first = std::abs(rows.front().mean_fidelity_projective - rows.front().mean_fidelity_weak);
  const double gap_last = std::abs(rows.back().mean_fidelity_projective - rows.back().mean_fidelity_weak);
  const bool approaches = gap_last < gap_first;

  std::ostringstream s;
  s << "eps = " << rep.epsilon << ", scores";
  for (const auto& r : rows) s << ' ' << r.score;
  s << "; (i) nondecreasing within 2 sigma: " << (monotone ? "yes" : "no") << "; (ii) crosses 1000: "
    << (crosses ? "yes" : "no") << "; (iii) f_weak rises toward projective (gap " << gap_first << " -> " << gap_last
    << "): " << (fidelity_rises && approaches ? "yes" : "no");
  return {monotone && crosses && fidelity_rises && approaches, s.str()};
}

Verdict ensemble_size_effect(const Replication& rep) {
  bool ok = true;
  std::ostringstream s;
  s << "N = 60 vs N = 30 scores:";
  for (std::size_t i = 0; i < rep.n30.size(); ++i) {
    const double slack = 2.0 * binomial_sigma(rep.n30[i].score, kStates);
    const bool lower = static_cast<double>(rep.n60[i].score) <= static_cast<double>(rep.n30[i].score) + slack;
    ok = ok && lower;
    s << ' ' << rep.n60[i].score << '/' << rep.n30[i].score;
  }
  s << " (each N = 60 score must not exceed the N = 30 score by more than 2 sigma)";
  return {ok, s.str()};
}

Verdict determinism() {
  ExperimentPlan plan;
  plan.state_count = 60;
  plan.runs_per_state = 40;
  plan.ensemble_sizes = {30, 60};
  plan.epsilon_grid = {0.1, 0.35, 1.2, 4.0};
  plan.a_grid = kAGrid;
  plan.master_seed = 20261015;
  plan.estimator_mode = EstimatorMode::PaperNaive;
  std::vector<std::string> csv;
  for (unsigned workers : {1u, 4u, 16u}) {
    std::ostringstream out;
    write_sweep_csv(out, run_sweep(plan, {.workers = workers, .progress = {}}).rows);
    csv.push_back(out.str());
  }
  const bool same = csv[0] == csv[1] && csv[0] == csv[2];
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu-row sweep CSV (%zu bytes) byte-identical for workers 1, 4, 16: %s",
                plan.cells().size(), csv[0].size(), same ? "yes" : "no");
  return {same, buf};
}

Verdict baseline_sanity() {
  RandomStream rng{hash_combine(20261015, 8)};
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const BlochVector truth = random_state(rng, StateDistribution::BallUniform);
    const BlochVector est = run_projective_baseline(truth, 3000000, rng);
    for (PauliAxis axis : kAllAxes) worst = std::max(worst, std::abs(est[axis] - truth[axis]));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max component error %.4f <= 0.004 over 20 states at N = 3e6", worst);
  return {worst <= 0.004, buf};
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Verdict()>& check) {
    std::printf("criterion %d (%s): running\n", id, name);
    std::fflush(stdout);
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("criterion %d: %s - %s: %s\n", id, v.pass ? "PASS" : "FAIL", name, v.summary.c_str());
    std::fflush(stdout);
  };

  report(1, "analytic-oracle equivalence", analytic_oracles);
  report(2, "Monte Carlo agreement", monte_carlo_frequencies);
  report(3, "channel checks", channel_checks);
  report(4, "estimator inversion identity", inversion_identity);

  Replication rep;
  report(5, "replication at N = 30", [&] {
    rep.epsilon = choose_epsilon();
    rep.n30 = replicate(rep.epsilon, 30);
    return replication_n30(rep);
  });
  report(6, "ensemble-size effect", [&] {
    if (rep.n30.empty()) return Verdict{false, "criterion 5 produced no N = 30 rows"};
    rep.n60 = replicate(rep.epsilon, 60);
    return ensemble_size_effect(rep);
  });
  report(7, "determinism across worker counts", determinism);
  report(8, "projective baseline sanity", baseline_sanity);

  std::printf("acceptance: %d of 8 criteria failed (%.0f s)\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
