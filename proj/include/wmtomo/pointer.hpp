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

// Von Neumann measurement with a Gaussian pointer, coupling g fixed to 1.
//
// Measuring sigma_axis with strength eps shifts the pointer by +1 or -1
// depending on the eigenvalue. The pointer position q is then distributed as
//
//   P(q) = p+ N(q; +1, 1/eps) + p- N(q; -1, 1/eps),   p+- = (1 +- <sigma_axis>)/2.
//
// Conditioned on a reading q, the system is updated by the Kraus operator
//
//   M(q) = (eps/2pi)^(1/4) [exp(-eps(q-1)^2/4) P+ + exp(-eps(q+1)^2/4) P-]
//
// with P+- the eigenprojectors of sigma_axis. Averaging over q leaves the
// populations alone and damps coherences by exp(-eps/2).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "wmtomo/qubit.hpp"
#include "wmtomo/random.hpp"

namespace wmtomo {

/// Measurement strength eps = 1/(pointer width)^2.
///
/// Zero is representable and means "no coupling"; operations that need a
/// finite pointer width (reading densities, sampling, Kraus updates) require
/// eps > 0 and check it themselves.
class MeasurementStrength {
 public:
  constexpr MeasurementStrength() = default;
  explicit MeasurementStrength(double epsilon) : epsilon_(epsilon) {
    if (!std::isfinite(epsilon) || epsilon < 0.0) {
      throw std::invalid_argument("measurement strength must be finite and non-negative, got " +
                                  std::to_string(epsilon));
    }
  }

  constexpr double value() const { return epsilon_; }
  bool is_positive() const { return epsilon_ > 0.0; }

  friend bool operator==(const MeasurementStrength&, const MeasurementStrength&) = default;

 private:
  double epsilon_ = 0.0;
};

struct PointerReading {
  double q = 0.0;
};

/// Thrown when both Kraus weights underflow for a reading far outside the
/// pointer's support.
class DegenerateUpdate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-Gaussian mixture density of the pointer position.
struct ReadingDensity {
  double weight_plus = 0.5;
  double weight_minus = 0.5;
  double variance = 1.0;

  static constexpr double center_plus = 1.0;
  static constexpr double center_minus = -1.0;

  double operator()(double q) const {
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance);
    const double dp = q - center_plus;
    const double dm = q - center_minus;
    return norm * (weight_plus * std::exp(-0.5 * dp * dp / variance) +
                   weight_minus * std::exp(-0.5 * dm * dm / variance));
  }
};

namespace detail {

inline void require_positive(MeasurementStrength eps, const char* what) {
  if (!eps.is_positive()) {
    throw std::invalid_argument(std::string(what) + " requires a strictly positive measurement strength");
  }
}

/// Probability of the +1 eigenvalue of sigma_axis.
inline double plus_probability(const DensityMatrix& rho, PauliAxis axis) {
  return std::clamp(0.5 * (1.0 + expectation(rho, axis)), 0.0, 1.0);
}

// Entries of the eigenprojector P+ = (I + sigma)/2; P- = I - P+.
struct Projector {
  complex p00, p01, p10, p11;
};

inline Projector plus_projector(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X: return {0.5, 0.5, 0.5, 0.5};
    case PauliAxis::Y: return {0.5, complex{0.0, -0.5}, complex{0.0, 0.5}, 0.5};
    case PauliAxis::Z: return {1.0, 0.0, 0.0, 0.0};
  }
  return {};
}

// A rho B for 2x2 matrices stored row-major.
struct Mat2 {
  complex a, b, c, d;
};

inline Mat2 mul(const Mat2& l, const Mat2& r) {
  return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
}

inline Mat2 to_mat(const DensityMatrix& rho) { return {rho(0, 0), rho(0, 1), rho(1, 0), rho(1, 1)}; }

// Operator m_plus P+ + m_minus P- for real weights.
inline Mat2 spectral_operator(PauliAxis axis, double m_plus, double m_minus) {
  const Projector p = plus_projector(axis);
  const complex one{1.0};
  return {m_plus * p.p00 + m_minus * (one - p.p00), m_plus * p.p01 - m_minus * p.p01,
          m_plus * p.p10 - m_minus * p.p10, m_plus * p.p11 + m_minus * (one - p.p11)};
}

// Packs a matrix known to be Hermitian with unit trace; the lower off-diagonal
// entry is taken as the conjugate of the upper one.
inline DensityMatrix pack_hermitian(const Mat2& m, double trace) {
  const double r00 = m.a.real() / trace;
  const double r11 = m.d.real() / trace;
  const complex r01 = 0.5 * (m.b + std::conj(m.c)) / trace;
  return DensityMatrix{complex{r00}, r01, std::conj(r01), complex{r11}};
}

}  // namespace detail

/// Row-major 2x2 complex matrix.
struct Matrix2 {
  complex m00, m01, m10, m11;
};

/// The normalized Kraus operator M(q), including the (eps/2pi)^(1/4) factor,
/// so that the integral of M(q)^dagger M(q) over q is the identity.
inline Matrix2 kraus_operator(PauliAxis axis, MeasurementStrength eps, PointerReading reading) {
  detail::require_positive(eps, "kraus_operator");
  const double e = eps.value();
  const double q = reading.q;
  const double norm = std::pow(e / (2.0 * std::numbers::pi), 0.25);
  const detail::Mat2 m = detail::spectral_operator(axis, norm * std::exp(-e * (q - 1.0) * (q - 1.0) / 4.0),
                                                   norm * std::exp(-e * (q + 1.0) * (q + 1.0) / 4.0));
  return {m.a, m.b, m.c, m.d};
}

inline ReadingDensity reading_density(const DensityMatrix& rho, PauliAxis axis, MeasurementStrength eps) {
  detail::require_positive(eps, "reading_density");
  const double p_plus = detail::plus_probability(rho, axis);
  return {p_plus, 1.0 - p_plus, 1.0 / eps.value()};
}

/// Draws a pointer reading: pick the Gaussian component by weight, then sample it.
inline PointerReading sample_reading(const DensityMatrix& rho, PauliAxis axis, MeasurementStrength eps,
                                     RandomStream& rng) {
  detail::require_positive(eps, "sample_reading");
  const double p_plus = detail::plus_probability(rho, axis);
  const double center = rng.uniform() < p_plus ? 1.0 : -1.0;
  return {center + rng.normal() / std::sqrt(eps.value())};
}

/// Conditional state after observing reading q.
///
/// Weight exponents are shifted by their maximum before exponentiation, so the
/// update is stable until the weight of the populated branch underflows
/// relative to the other (|q| of order 700/eps). Throws DegenerateUpdate then.
inline DensityMatrix kraus_update(const DensityMatrix& rho, PauliAxis axis, MeasurementStrength eps,
                                  PointerReading reading) {
  detail::require_positive(eps, "kraus_update");
  const double q = reading.q;
  if (!std::isfinite(q)) throw std::invalid_argument("pointer reading must be finite");
  const double log_plus = -eps.value() * (q - 1.0) * (q - 1.0) / 4.0;
  const double log_minus = -eps.value() * (q + 1.0) * (q + 1.0) / 4.0;
  const double shift = std::max(log_plus, log_minus);
  const double m_plus = std::exp(log_plus - shift);
  const double m_minus = std::exp(log_minus - shift);

  const detail::Mat2 m = detail::spectral_operator(axis, m_plus, m_minus);
  const detail::Mat2 out = detail::mul(detail::mul(m, detail::to_mat(rho)), m);
  const double trace = out.a.real() + out.d.real();
  if (!(trace > 1e-300)) {
    throw DegenerateUpdate("Kraus update normalization underflowed for reading q = " + std::to_string(q) +
                           " at eps = " + std::to_string(eps.value()));
  }
  return detail::pack_hermitian(out, trace);
}

/// Reading-averaged (apparatus-traced) state: coherences in the sigma_axis
/// eigenbasis are multiplied by exp(-eps/2).
inline DensityMatrix nonselective_channel(const DensityMatrix& rho, PauliAxis axis, MeasurementStrength eps) {
  const double damping = std::exp(-eps.value() / 2.0);
  const detail::Mat2 r = detail::to_mat(rho);
  const detail::Mat2 plus = detail::spectral_operator(axis, 1.0, 0.0);
  const detail::Mat2 minus = detail::spectral_operator(axis, 0.0, 1.0);
  const detail::Mat2 pp = detail::mul(detail::mul(plus, r), plus);
  const detail::Mat2 mm = detail::mul(detail::mul(minus, r), minus);
  const detail::Mat2 pm = detail::mul(detail::mul(plus, r), minus);
  const detail::Mat2 mp = detail::mul(detail::mul(minus, r), plus);
  const detail::Mat2 out{pp.a + mm.a + damping * (pm.a + mp.a), pp.b + mm.b + damping * (pm.b + mp.b),
                         pp.c + mm.c + damping * (pm.c + mp.c), pp.d + mm.d + damping * (pm.d + mp.d)};
  return detail::pack_hermitian(out, out.a.real() + out.d.real());
}

}  // namespace wmtomo
