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

#pragma once

// Batch experiments: a fixed panel of random states, swept over
// (eps, a, N) cells, comparing the weak scheme against projective tomography.
//
// Every (cell, state, run) draws from its own stream derived by hashing, and
// all reductions happen in task-index order after the workers finish, so a
// sweep is a pure function of its plan regardless of the worker count.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "wmtomo/pipeline.hpp"
#include "wmtomo/qubit.hpp"
#include "wmtomo/random.hpp"

namespace wmtomo {

/// 40 log-spaced strengths in [0.05, 5].
inline std::vector<double> default_epsilon_grid() {
  constexpr int kPoints = 40;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    grid[i] = 0.05 * std::pow(100.0, static_cast<double>(i) / (kPoints - 1));
  }
  return grid;
}

struct ExperimentPlan {
  std::size_t state_count = 2000;
  std::size_t runs_per_state = 1000;
  std::vector<std::size_t> ensemble_sizes{30, 60};
  std::vector<double> epsilon_grid = default_epsilon_grid();
  std::vector<double> a_grid{0.0, 0.2, 0.4, 0.6, 0.8};
  StateDistribution distribution = StateDistribution::BallUniform;
  std::uint64_t master_seed = 1;
  EstimatorMode estimator_mode = EstimatorMode::Calibrated;
  bool clamp_estimates = false;

  void validate() const {
    if (state_count == 0) throw std::invalid_argument("state_count must be positive");
    if (runs_per_state == 0) throw std::invalid_argument("runs_per_state must be positive");
    if (ensemble_sizes.empty()) throw std::invalid_argument("ensemble_sizes must not be empty");
    if (epsilon_grid.empty()) throw std::invalid_argument("epsilon_grid must not be empty");
    if (a_grid.empty()) throw std::invalid_argument("a_grid must not be empty");
    for (auto n : ensemble_sizes) {
      if (n < 3) throw std::invalid_argument("ensemble_sizes entries must be at least 3");
    }
    for (double e : epsilon_grid) {
      if (!std::isfinite(e) || e <= 0.0) throw std::invalid_argument("epsilon_grid entries must be positive");
    }
    for (double a : a_grid) {
      if (!std::isfinite(a) || a < 0.0) throw std::invalid_argument("a_grid entries must be non-negative");
    }
  }

  /// Cells in output order: ensemble size, then eps, then a.
  std::vector<SchemeConfig> cells() const {
    std::vector<SchemeConfig> out;
    out.reserve(ensemble_sizes.size() * epsilon_grid.size() * a_grid.size());
    for (auto n : ensemble_sizes) {
      for (double e : epsilon_grid) {
        for (double a : a_grid) {
          SchemeConfig cfg;
          cfg.eps1 = MeasurementStrength{e};
          cfg.eps2 = MeasurementStrength{e};
          cfg.a = DiscardWidth{a};
          cfg.ensemble_size = n;
          cfg.estimator_mode = estimator_mode;
          cfg.clamp_estimates = clamp_estimates;
          out.push_back(cfg);
        }
      }
    }
    return out;
  }
};

struct SweepRow {
  double epsilon = 0.0;
  double a = 0.0;
  std::size_t ensemble = 0;
  double mean_fidelity_weak = 0.0;
  double mean_fidelity_projective = 0.0;
  std::size_t score = 0;
  std::size_t states = 0;
  std::size_t runs = 0;
  double discard_fraction = 0.0;
  std::size_t failures = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Stream for one (cell, state, run) task. Distinct inputs give unrelated
/// streams; equal inputs give identical ones.
inline RandomStream seed_substream(std::uint64_t master_seed, std::uint64_t cell_index, std::uint64_t state_index,
                                   std::uint64_t run_index) {
  std::uint64_t h = splitmix64_mix(master_seed ^ 0x77656b2d746f6d6fULL);
  h = hash_combine(h, cell_index);
  h = hash_combine(h, state_index);
  h = hash_combine(h, run_index);
  return RandomStream{h};
}

/// Cell identifier used for stream derivation. It depends on the cell's
/// physical parameters only, so reordering or extending grids leaves existing
/// cells' draws untouched. Estimator mode and clamping are excluded on purpose
/// so that estimator variants see the same measurement record.
inline std::uint64_t cell_key(const SchemeConfig& cfg) {
  std::uint64_t h = 0x63656c6cULL;
  h = hash_combine(h, std::bit_cast<std::uint64_t>(cfg.eps1.value()));
  h = hash_combine(h, std::bit_cast<std::uint64_t>(cfg.eps2.value()));
  h = hash_combine(h, std::bit_cast<std::uint64_t>(cfg.a.value()));
  h = hash_combine(h, static_cast<std::uint64_t>(cfg.ensemble_size));
  return h;
}

// Reserved cell id for drawing the state panel.
inline constexpr std::uint64_t kStatePanelCell = 0x70616e656cULL;

/// The S true states shared by every cell of a sweep.
inline std::vector<BlochVector> state_panel(std::uint64_t master_seed, std::size_t count, StateDistribution dist) {
  std::vector<BlochVector> states(count);
  for (std::size_t i = 0; i < count; ++i) {
    RandomStream rng = seed_substream(master_seed, kStatePanelCell, i, 0);
    states[i] = random_state(rng, dist);
  }
  return states;
}

struct StateEvaluation {
  double mean_fidelity_weak = 0.0;
  double mean_fidelity_projective = 0.0;
  double discard_fraction = 0.0;
  /// Runs where at least one weak stage could not be inverted; the missing
  /// components were replaced by 0.
  std::size_t failures = 0;
};

struct SubstreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t cell = 0;
  std::uint64_t state = 0;
};

namespace detail {

struct RunOutcome {
  double fidelity_weak;
  double fidelity_projective;
  double discard_fraction;
  bool failed;
};

// One weak-scheme run and one projective run, each spending N members.
inline RunOutcome single_run(const BlochVector& truth, const SchemeConfig& cfg, RandomStream& rng) {
  const SchemeTally tally = run_scheme_on_ensemble(truth, cfg, rng);
  const PartialEstimate partial = estimate_weak_partial(tally, cfg);
  BlochVector weak = partial.value_or(0.0);
  BlochVector projective = run_projective_baseline(truth, cfg.ensemble_size, rng);
  if (cfg.clamp_estimates) {
    weak = clamp_to_ball(weak);
    projective = clamp_to_ball(projective);
  }
  return {fidelity_score(truth, weak), fidelity_score(truth, projective), tally.discard_fraction(),
          !partial.complete()};
}

template <typename NextStream>
StateEvaluation accumulate_runs(const BlochVector& truth, const SchemeConfig& cfg, std::size_t runs,
                                NextStream&& next_stream) {
  if (runs == 0) throw std::invalid_argument("evaluate_state needs at least one run");
  cfg.validate();
  StateEvaluation out;
  for (std::size_t r = 0; r < runs; ++r) {
    RandomStream& rng = next_stream(r);
    const RunOutcome run = single_run(truth, cfg, rng);
    out.mean_fidelity_weak += run.fidelity_weak;
    out.mean_fidelity_projective += run.fidelity_projective;
    out.discard_fraction += run.discard_fraction;
    out.failures += run.failed ? 1 : 0;
  }
  const double inv = 1.0 / static_cast<double>(runs);
  out.mean_fidelity_weak *= inv;
  out.mean_fidelity_projective *= inv;
  out.discard_fraction *= inv;
  return out;
}

}  // namespace detail

/// R paired (weak, projective) runs on one true state, each run on its own
/// derived substream.
inline StateEvaluation evaluate_state(const BlochVector& truth, const SchemeConfig& cfg, std::size_t runs,
                                      const SubstreamKey& key) {
  RandomStream rng;
  return detail::accumulate_runs(truth, cfg, runs, [&](std::size_t r) -> RandomStream& {
    rng = seed_substream(key.master_seed, key.cell, key.state, r);
    return rng;
  });
}

/// Same, drawing every run from one caller-owned stream.
inline StateEvaluation evaluate_state(const BlochVector& truth, const SchemeConfig& cfg, std::size_t runs,
                                      RandomStream& rng) {
  return detail::accumulate_runs(truth, cfg, runs, [&](std::size_t) -> RandomStream& { return rng; });
}

struct SweepOptions {
  unsigned workers = 0;  // 0 = hardware concurrency
  /// Called with (finished, total) task counts, serialized by the harness.
  std::function<void(std::size_t, std::size_t)> progress;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t total_failures = 0;
};

/// Aggregates per-state evaluations of one cell in state order.
inline SweepRow reduce_cell(const SchemeConfig& cfg, std::size_t runs, const StateEvaluation* evals,
                            std::size_t count) {
  SweepRow row;
  row.epsilon = cfg.eps1.value();
  row.a = cfg.a.value();
  row.ensemble = cfg.ensemble_size;
  row.states = count;
  row.runs = runs;
  for (std::size_t s = 0; s < count; ++s) {
    const StateEvaluation& e = evals[s];
    row.mean_fidelity_weak += e.mean_fidelity_weak;
    row.mean_fidelity_projective += e.mean_fidelity_projective;
    row.discard_fraction += e.discard_fraction;
    row.failures += e.failures;
    // Ties count against the weak scheme.
    if (e.mean_fidelity_weak > e.mean_fidelity_projective) ++row.score;
  }
  const double inv = 1.0 / static_cast<double>(count);
  row.mean_fidelity_weak *= inv;
  row.mean_fidelity_projective *= inv;
  row.discard_fraction *= inv;
  return row;
}

inline SweepResult run_sweep(const ExperimentPlan& plan, const SweepOptions& options = {}) {
  plan.validate();
  const std::vector<SchemeConfig> cells = plan.cells();
  const std::vector<BlochVector> states = state_panel(plan.master_seed, plan.state_count, plan.distribution);
  std::vector<std::uint64_t> keys(cells.size());
  std::transform(cells.begin(), cells.end(), keys.begin(), cell_key);

  const std::size_t n_states = states.size();
  const std::size_t total = cells.size() * n_states;
  std::vector<StateEvaluation> evals(total);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> finished{0};
  std::mutex progress_mutex;
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      const std::size_t c = task / n_states;
      const std::size_t s = task % n_states;
      try {
        evals[task] = evaluate_state(states[s], cells[c], plan.runs_per_state,
                                     SubstreamKey{plan.master_seed, keys[c], static_cast<std::uint64_t>(s)});
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(total);
        return;
      }
      const std::size_t done = finished.fetch_add(1) + 1;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(done, total);
      }
    }
  };

  unsigned workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.workers;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(total, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  SweepResult result;
  result.rows.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    result.rows.push_back(reduce_cell(cells[c], plan.runs_per_state, evals.data() + c * n_states, n_states));
    result.total_failures += result.rows.back().failures;
  }
  return result;
}

}  // namespace wmtomo
