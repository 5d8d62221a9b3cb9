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

// One tomography experiment on a finite ensemble.
//
// Every member passes through weak sigma_z (eps1), weak sigma_x (eps2) and a
// projective sigma_y. Ambiguous readings are discarded but the member itself
// is kept and carried on to the next stage.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "wmtomo/analytic.hpp"
#include "wmtomo/pointer.hpp"
#include "wmtomo/qubit.hpp"
#include "wmtomo/random.hpp"

namespace wmtomo {

enum class EstimatorMode {
  /// Unbiased inversion: frequencies over the full ensemble divided by the
  /// exact calibration slope of each stage.
  Calibrated,
  /// Frequencies over kept readings only, times the small-eps corrections
  /// (1, e^{eps1/2}, e^{(eps1+eps2)/2}).
  PaperNaive,
};

inline const char* estimator_name(EstimatorMode mode) {
  return mode == EstimatorMode::Calibrated ? "calibrated" : "paper-naive";
}

struct SchemeConfig {
  MeasurementStrength eps1{0.5};
  MeasurementStrength eps2{0.5};
  DiscardWidth a{0.0};
  std::size_t ensemble_size = 30;
  EstimatorMode estimator_mode = EstimatorMode::Calibrated;
  /// Project estimates back into the Bloch ball. Off for replication runs.
  bool clamp_estimates = false;

  void validate() const {
    if (ensemble_size < 3) {
      throw std::invalid_argument("ensemble size must be at least 3, got " + std::to_string(ensemble_size));
    }
    if (!eps1.is_positive() || !eps2.is_positive()) {
      throw std::invalid_argument("scheme measurement strengths must be strictly positive");
    }
  }
};

struct StageCounts {
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  std::size_t n_discard = 0;

  std::size_t total() const { return n_plus + n_minus + n_discard; }
  std::size_t kept() const { return n_plus + n_minus; }
  friend bool operator==(const StageCounts&, const StageCounts&) = default;
};

struct SchemeTally {
  StageCounts counts_z;
  StageCounts counts_x;
  StageCounts counts_y;

  const StageCounts& stage(PauliAxis axis) const {
    switch (axis) {
      case PauliAxis::X: return counts_x;
      case PauliAxis::Y: return counts_y;
      default: return counts_z;
    }
  }

  /// Fraction of weak-stage readings that fell in the discard window.
  double discard_fraction() const {
    const auto weak_total = counts_z.total() + counts_x.total();
    if (weak_total == 0) return 0.0;
    return static_cast<double>(counts_z.n_discard + counts_x.n_discard) / static_cast<double>(weak_total);
  }
};

/// Estimation could not be completed for a stage.
class EstimationFailure : public std::runtime_error {
 public:
  EstimationFailure(PauliAxis stage, const std::string& why)
      : std::runtime_error(std::string("estimation failed at stage ") + axis_name(stage) + ": " + why),
        stage_(stage) {}
  PauliAxis stage() const { return stage_; }

 private:
  PauliAxis stage_;
};

enum class Outcome { Plus, Minus, Discard };

/// q >= a reads +1, q <= -a reads -1, anything strictly inside is discarded.
/// At a = 0 the tie q = 0 reads +1.
inline Outcome classify_reading(PointerReading reading, DiscardWidth a) {
  if (reading.q >= a.value()) return Outcome::Plus;
  if (reading.q <= -a.value()) return Outcome::Minus;
  return Outcome::Discard;
}

namespace detail {

inline void record(StageCounts& counts, Outcome outcome) {
  switch (outcome) {
    case Outcome::Plus: ++counts.n_plus; break;
    case Outcome::Minus: ++counts.n_minus; break;
    case Outcome::Discard: ++counts.n_discard; break;
  }
}

}  // namespace detail

/// Runs the weak z, weak x, projective y sequence on each of N members.
inline SchemeTally run_scheme_on_ensemble(const BlochVector& truth, const SchemeConfig& cfg, RandomStream& rng) {
  cfg.validate();
  const DensityMatrix initial = bloch_to_density(truth);
  SchemeTally tally;
  for (std::size_t member = 0; member < cfg.ensemble_size; ++member) {
    DensityMatrix rho = initial;

    const PointerReading q1 = sample_reading(rho, PauliAxis::Z, cfg.eps1, rng);
    detail::record(tally.counts_z, classify_reading(q1, cfg.a));
    rho = kraus_update(rho, PauliAxis::Z, cfg.eps1, q1);

    const PointerReading q2 = sample_reading(rho, PauliAxis::X, cfg.eps2, rng);
    detail::record(tally.counts_x, classify_reading(q2, cfg.a));
    rho = kraus_update(rho, PauliAxis::X, cfg.eps2, q2);

    const bool y_plus = rng.bernoulli(0.5 * (1.0 + expectation(rho, PauliAxis::Y)));
    detail::record(tally.counts_y, y_plus ? Outcome::Plus : Outcome::Minus);
  }
  if (tally.counts_z.total() != cfg.ensemble_size || tally.counts_x.total() != cfg.ensemble_size ||
      tally.counts_y.total() != cfg.ensemble_size) {
    throw std::logic_error("ensemble size changed between stages");
  }
  return tally;
}

/// Per-axis estimates; an empty slot marks a stage that could not be inverted.
struct PartialEstimate {
  std::array<std::optional<double>, 3> components;  // indexed X, Y, Z

  std::optional<double>& operator[](PauliAxis axis) { return components[static_cast<int>(axis)]; }
  const std::optional<double>& operator[](PauliAxis axis) const { return components[static_cast<int>(axis)]; }

  bool complete() const { return components[0] && components[1] && components[2]; }

  /// Missing components are replaced with `fill`.
  BlochVector value_or(double fill) const {
    return {components[0].value_or(fill), components[1].value_or(fill), components[2].value_or(fill)};
  }
};

namespace detail {

inline double signed_difference(const StageCounts& c) {
  return static_cast<double>(c.n_plus) - static_cast<double>(c.n_minus);
}

template <typename Calibration>
std::optional<double> calibrated_component(const StageCounts& c, std::size_t n, Calibration&& calibration) {
  try {
    return signed_difference(c) / static_cast<double>(n) / calibration();
  } catch (const DegenerateCalibration&) {
    return std::nullopt;
  }
}

inline std::optional<double> naive_component(const StageCounts& c, double correction) {
  if (c.kept() == 0 || !std::isfinite(correction)) return std::nullopt;
  return signed_difference(c) / static_cast<double>(c.kept()) * correction;
}

}  // namespace detail

/// Inverts a tally into Bloch coordinates, leaving failed stages empty.
inline PartialEstimate estimate_weak_partial(const SchemeTally& tally, const SchemeConfig& cfg) {
  PartialEstimate out;
  if (cfg.estimator_mode == EstimatorMode::Calibrated) {
    const std::size_t n = cfg.ensemble_size;
    out[PauliAxis::Z] = detail::calibrated_component(tally.counts_z, n, [&] { return calibration_z(cfg.eps1, cfg.a); });
    out[PauliAxis::X] =
        detail::calibrated_component(tally.counts_x, n, [&] { return calibration_x(cfg.eps1, cfg.eps2, cfg.a); });
    out[PauliAxis::Y] =
        detail::calibrated_component(tally.counts_y, n, [&] { return calibration_y(cfg.eps1, cfg.eps2); });
  } else {
    const double e1 = cfg.eps1.value();
    const double e2 = cfg.eps2.value();
    out[PauliAxis::Z] = detail::naive_component(tally.counts_z, 1.0);
    out[PauliAxis::X] = detail::naive_component(tally.counts_x, std::exp(e1 / 2.0));
    out[PauliAxis::Y] = detail::naive_component(tally.counts_y, std::exp((e1 + e2) / 2.0));
  }
  return out;
}

/// Bloch estimate from a tally. Throws EstimationFailure naming the first
/// stage (in z, x, y order) that could not be inverted. Not clamped unless
/// cfg.clamp_estimates is set.
inline BlochVector estimate_weak(const SchemeTally& tally, const SchemeConfig& cfg) {
  const PartialEstimate partial = estimate_weak_partial(tally, cfg);
  for (PauliAxis axis : {PauliAxis::Z, PauliAxis::X, PauliAxis::Y}) {
    if (!partial[axis]) {
      throw EstimationFailure(axis, cfg.estimator_mode == EstimatorMode::PaperNaive
                                        ? "no kept readings or correction factor overflowed"
                                        : "calibration slope is degenerate");
    }
  }
  const BlochVector b = partial.value_or(0.0);
  return cfg.clamp_estimates ? clamp_to_ball(b) : b;
}

/// Sub-ensemble sizes (N_x, N_y, N_z) for the projective baseline. The
/// remainder of N / 3 goes to x first, then y.
inline std::array<std::size_t, 3> baseline_partition(std::size_t n) {
  const std::size_t base = n / 3;
  const std::size_t rem = n % 3;
  return {base + (rem >= 1 ? 1 : 0), base + (rem >= 2 ? 1 : 0), base};
}

/// Projective tomography: N split three ways, each part measured along one axis.
inline BlochVector run_projective_baseline(const BlochVector& truth, std::size_t n, RandomStream& rng) {
  if (n < 3) throw std::invalid_argument("projective baseline needs at least 3 members, got " + std::to_string(n));
  if (!truth.is_physical()) throw std::invalid_argument("true state is outside the Bloch ball");
  const auto sizes = baseline_partition(n);
  BlochVector estimate;
  for (PauliAxis axis : kAllAxes) {
    const std::size_t count = sizes[static_cast<int>(axis)];
    const double p_plus = 0.5 * (1.0 + truth[axis]);
    long long sum = 0;
    for (std::size_t i = 0; i < count; ++i) sum += rng.bernoulli(p_plus) ? 1 : -1;
    estimate[axis] = static_cast<double>(sum) / static_cast<double>(count);
  }
  return estimate;
}

}  // namespace wmtomo
