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

// Cross-checks of the closed-form outcome probabilities against quadrature
// and against Monte Carlo runs of the full measurement sequence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmtomo/analytic.hpp"
#include "wmtomo/oracle.hpp"
#include "wmtomo/pipeline.hpp"
#include "wmtomo/random.hpp"

namespace wmtomo::consistency {

enum class Formula { Z, X, Y, DiscardX };

inline constexpr Formula kAllFormulas[] = {Formula::Z, Formula::X, Formula::Y, Formula::DiscardX};

inline const char* formula_name(Formula f) {
  switch (f) {
    case Formula::Z: return "z";
    case Formula::X: return "x";
    case Formula::Y: return "y";
    case Formula::DiscardX: return "discard_x";
  }
  return "?";
}

inline std::optional<Formula> parse_formula(const std::string& name) {
  for (Formula f : kAllFormulas) {
    if (name == formula_name(f)) return f;
  }
  return std::nullopt;
}

/// Which x-stage discard expression to check: the one built from the second
/// stage's strength, or the printed one that reuses eps1.
enum class DiscardXVariant { SecondStage, PaperEps1 };

struct ParameterPoint {
  BlochVector state;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double a = 0.0;

  std::string describe() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "state=(%.6g,%.6g,%.6g) eps1=%.6g eps2=%.6g a=%.6g", state.x, state.y, state.z,
                  eps1, eps2, a);
    return buf;
  }
};

struct QuadratureDeviation {
  Formula formula = Formula::Z;
  std::size_t points = 0;
  double max_deviation = 0.0;
  ParameterPoint worst;
  double tolerance = 1e-9;

  bool pass() const { return max_deviation <= tolerance; }
};

struct ParameterRanges {
  double eps_min = 0.05;
  double eps_max = 10.0;
  double a_max = 1.0;
};

/// Random parameter point: the tested coordinate is uniform on [-1, 1] and the
/// remaining two fill a uniformly random point of the allowed disk, eps is
/// log-uniform, a is uniform.
inline ParameterPoint random_point(RandomStream& rng, PauliAxis tested, const ParameterRanges& ranges) {
  const double c = 2.0 * rng.uniform() - 1.0;
  const double radius = std::sqrt(std::max(0.0, 1.0 - c * c)) * std::sqrt(rng.uniform());
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double u = radius * std::cos(phi);
  const double v = radius * std::sin(phi);
  ParameterPoint p;
  switch (tested) {
    case PauliAxis::X: p.state = {c, u, v}; break;
    case PauliAxis::Y: p.state = {u, c, v}; break;
    case PauliAxis::Z: p.state = {u, v, c}; break;
  }
  const double log_lo = std::log(ranges.eps_min);
  const double log_hi = std::log(ranges.eps_max);
  p.eps1 = std::exp(log_lo + (log_hi - log_lo) * rng.uniform());
  p.eps2 = std::exp(log_lo + (log_hi - log_lo) * rng.uniform());
  p.a = ranges.a_max * rng.uniform();
  return p;
}

/// Largest absolute difference between closed form and oracle at one point.
inline double deviation_at(Formula formula, const ParameterPoint& p, DiscardXVariant variant) {
  const MeasurementStrength e1{p.eps1};
  const MeasurementStrength e2{p.eps2};
  const DiscardWidth a{p.a};
  switch (formula) {
    case Formula::Z: {
      const OutcomeTriple t = prob_z(p.state.z, e1, a);
      const auto o = oracle::prob_z(p.state.z, p.eps1, p.a);
      return std::max({std::abs(t.p_plus - o[0]), std::abs(t.p_minus - o[1]), std::abs(t.p_discard - o[2])});
    }
    case Formula::X: {
      const OutcomeTriple t = prob_x(p.state.x, e1, e2, a);
      const auto o = oracle::prob_x(p.state, p.eps1, p.eps2, p.a);
      return std::max({std::abs(t.p_plus - o[0]), std::abs(t.p_minus - o[1]), std::abs(t.p_discard - o[2])});
    }
    case Formula::Y: {
      const auto t = prob_y(p.state.y, e1, e2);
      const auto o = oracle::prob_y(p.state, p.eps1, p.eps2);
      return std::max(std::abs(t.first - o[0]), std::abs(t.second - o[1]));
    }
    case Formula::DiscardX: {
      const double closed =
          variant == DiscardXVariant::SecondStage ? prob_x(p.state.x, e1, e2, a).p_discard : printed_discard_x(e1, a);
      return std::abs(closed - oracle::prob_x(p.state, p.eps1, p.eps2, p.a)[2]);
    }
  }
  return 0.0;
}

inline PauliAxis tested_axis(Formula f) {
  switch (f) {
    case Formula::Z: return PauliAxis::Z;
    case Formula::Y: return PauliAxis::Y;
    default: return PauliAxis::X;
  }
}

/// Closed form vs quadrature over `points` random parameter points.
inline QuadratureDeviation quadrature_check(Formula formula, std::size_t points, std::uint64_t seed,
                                            DiscardXVariant variant = DiscardXVariant::SecondStage,
                                            double tolerance = 1e-9, const ParameterRanges& ranges = {}) {
  RandomStream rng{hash_combine(seed, static_cast<std::uint64_t>(formula))};
  QuadratureDeviation out;
  out.formula = formula;
  out.points = points;
  out.tolerance = tolerance;
  for (std::size_t i = 0; i < points; ++i) {
    const ParameterPoint p = random_point(rng, tested_axis(formula), ranges);
    const double d = deviation_at(formula, p, variant);
    if (d > out.max_deviation || i == 0) {
      out.max_deviation = d;
      out.worst = p;
    }
  }
  return out;
}

struct FrequencyCheck {
  std::string label;
  double expected = 0.0;
  double observed = 0.0;
  double sigma = 0.0;
  double n_sigma = 3.0;

  bool pass() const { return std::abs(observed - expected) <= n_sigma * sigma; }
};

struct MonteCarloReport {
  std::size_t samples = 0;
  std::vector<FrequencyCheck> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const FrequencyCheck& c) { return c.pass(); });
  }
};

/// Runs one ensemble of cfg.ensemble_size members through the measurement
/// sequence and compares each stage's outcome frequencies with the closed
/// forms, using n_sigma binomial bands.
inline MonteCarloReport monte_carlo_check(const BlochVector& state, const SchemeConfig& cfg, RandomStream& rng,
                                          double n_sigma = 3.0) {
  const SchemeTally tally = run_scheme_on_ensemble(state, cfg, rng);
  const double n = static_cast<double>(cfg.ensemble_size);
  MonteCarloReport report;
  report.samples = cfg.ensemble_size;
  auto add = [&](const std::string& label, double p, std::size_t count) {
    report.checks.push_back({label, p, static_cast<double>(count) / n, std::sqrt(p * (1.0 - p) / n), n_sigma});
  };
  const OutcomeTriple tz = prob_z(state.z, cfg.eps1, cfg.a);
  add("z:+1", tz.p_plus, tally.counts_z.n_plus);
  add("z:-1", tz.p_minus, tally.counts_z.n_minus);
  add("z:discard", tz.p_discard, tally.counts_z.n_discard);
  const OutcomeTriple tx = prob_x(state.x, cfg.eps1, cfg.eps2, cfg.a);
  add("x:+1", tx.p_plus, tally.counts_x.n_plus);
  add("x:-1", tx.p_minus, tally.counts_x.n_minus);
  add("x:discard", tx.p_discard, tally.counts_x.n_discard);
  const auto ty = prob_y(state.y, cfg.eps1, cfg.eps2);
  add("y:+1", ty.first, tally.counts_y.n_plus);
  add("y:-1", ty.second, tally.counts_y.n_minus);
  return report;
}

}  // namespace wmtomo::consistency
