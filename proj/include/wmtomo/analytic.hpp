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

// Closed-form outcome probabilities for the weak z -> weak x -> projective y
// sequence, and the calibration slopes used to invert them.
//
// Pointer readings q >= a count as +1, q <= -a as -1, and -a < q < a is
// discarded. With s = sqrt(eps/2):
//
//   P(+) = [(1+z) erfc((a-1)s) - (z-1) erfc((a+1)s)] / 4
//   P(-) = [(1+z) erfc((a+1)s) - (z-1) erfc((a-1)s)] / 4
//   P(0) = [erf((a-1)s) + erf((a+1)s)] / 2
//
// The x stage sees the state after the (traced) z stage, whose x coordinate is
// damped by exp(-eps1/2); the y stage sees damping exp(-(eps1+eps2)/2).

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "wmtomo/pointer.hpp"
#include "wmtomo/special_functions.hpp"

namespace wmtomo {

/// Half-width of the discarded pointer interval (-a, a).
class DiscardWidth {
 public:
  constexpr DiscardWidth() = default;
  explicit DiscardWidth(double a) : a_(a) {
    if (!std::isfinite(a) || a < 0.0) {
      throw std::invalid_argument("discard width must be finite and non-negative, got " + std::to_string(a));
    }
  }
  constexpr double value() const { return a_; }

  friend bool operator==(const DiscardWidth&, const DiscardWidth&) = default;

 private:
  double a_ = 0.0;
};

struct OutcomeTriple {
  double p_plus = 0.0;
  double p_minus = 0.0;
  double p_discard = 0.0;

  double sum() const { return p_plus + p_minus + p_discard; }
};

/// A closed-form probability fell outside [0, 1] by more than rounding.
class ProbabilityConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A calibration slope is too small to invert.
class DegenerateCalibration : public std::runtime_error {
 public:
  DegenerateCalibration(PauliAxis stage, double value)
      : std::runtime_error(std::string("calibration for stage ") + axis_name(stage) + " is degenerate (" +
                           std::to_string(value) + ")"),
        stage_(stage) {}
  PauliAxis stage() const { return stage_; }

 private:
  PauliAxis stage_;
};

inline constexpr double kProbabilitySlack = 1e-10;
inline constexpr double kMinCalibration = 1e-12;

namespace detail {

inline double checked_probability(double p, const char* what) {
  if (p < -kProbabilitySlack || p > 1.0 + kProbabilitySlack || std::isnan(p)) {
    throw ProbabilityConsistencyError(std::string(what) + " evaluated to " + std::to_string(p));
  }
  return std::clamp(p, 0.0, 1.0);
}

inline void require_coordinate(double c, const char* name) {
  if (!(std::abs(c) <= 1.0)) {
    throw std::invalid_argument(std::string("|") + name + "| must be at most 1, got " + std::to_string(c));
  }
}

// Outcome triple for a pointer mixture with +1 weight (1+m)/2, where m is the
// expectation of the measured observable at the time of measurement.
inline OutcomeTriple pointer_outcomes(double m, double eps, double a, const char* what) {
  const double s = std::sqrt(eps / 2.0);
  const double lo = (a - 1.0) * s;
  const double hi = (a + 1.0) * s;
  const double erfc_lo = erfc(lo);
  const double erfc_hi = erfc(hi);
  OutcomeTriple t;
  t.p_plus = checked_probability(0.25 * ((1.0 + m) * erfc_lo - (m - 1.0) * erfc_hi), what);
  t.p_minus = checked_probability(0.25 * ((1.0 + m) * erfc_hi - (m - 1.0) * erfc_lo), what);
  t.p_discard = checked_probability(0.5 * (erf(lo) + erf(hi)), what);
  return t;
}

}  // namespace detail

inline OutcomeTriple prob_z(double z, MeasurementStrength eps1, DiscardWidth a) {
  detail::require_coordinate(z, "z");
  return detail::pointer_outcomes(z, eps1.value(), a.value(), "prob_z");
}

/// x-stage outcomes in terms of the original state's x.
inline OutcomeTriple prob_x(double x, MeasurementStrength eps1, MeasurementStrength eps2, DiscardWidth a) {
  detail::require_coordinate(x, "x");
  return detail::pointer_outcomes(std::exp(-eps1.value() / 2.0) * x, eps2.value(), a.value(), "prob_x");
}

/// The x-stage discard probability exactly as printed in the source
/// derivation, with eps1 where the second stage's eps2 belongs. Kept only so
/// the consistency checker can report how far it is off.
inline double printed_discard_x(MeasurementStrength eps1, DiscardWidth a) {
  const double s = std::sqrt(eps1.value() / 2.0);
  return 0.5 * (erf((a.value() - 1.0) * s) + erf((a.value() + 1.0) * s));
}

/// Projective y outcomes (+1, -1) after both weak stages.
inline std::pair<double, double> prob_y(double y, MeasurementStrength eps1, MeasurementStrength eps2) {
  detail::require_coordinate(y, "y");
  const double damped = std::exp(-0.5 * (eps1.value() + eps2.value())) * y;
  return {detail::checked_probability(0.5 * (1.0 + damped), "prob_y"),
          detail::checked_probability(0.5 * (1.0 - damped), "prob_y")};
}

/// Slope of P(+) - P(-) in z. Throws DegenerateCalibration below 1e-12.
inline double calibration_z(MeasurementStrength eps1, DiscardWidth a) {
  const double s = std::sqrt(eps1.value() / 2.0);
  const double c = 0.5 * (erfc((a.value() - 1.0) * s) - erfc((a.value() + 1.0) * s));
  if (!(c >= kMinCalibration)) throw DegenerateCalibration(PauliAxis::Z, c);
  return c;
}

inline double calibration_x(MeasurementStrength eps1, MeasurementStrength eps2, DiscardWidth a) {
  const double s = std::sqrt(eps2.value() / 2.0);
  const double c = 0.5 * std::exp(-eps1.value() / 2.0) *
                   (erf((1.0 + a.value()) * s) + erf((1.0 - a.value()) * s));
  if (!(c >= kMinCalibration)) throw DegenerateCalibration(PauliAxis::X, c);
  return c;
}

inline double calibration_y(MeasurementStrength eps1, MeasurementStrength eps2) {
  const double c = std::exp(-0.5 * (eps1.value() + eps2.value()));
  if (!(c >= kMinCalibration)) throw DegenerateCalibration(PauliAxis::Y, c);
  return c;
}

}  // namespace wmtomo
