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

// Numerical reference values for checking the closed forms.
//
// Nothing here uses erf or the closed-form probabilities. Outcome
// probabilities are obtained by integrating the pointer mixture density with
// adaptive Gauss-Kronrod quadrature, and the intermediate states come from the
// density-matrix channels in pointer.hpp.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>

#include "wmtomo/pointer.hpp"
#include "wmtomo/qubit.hpp"

namespace wmtomo::oracle {

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
std::pair<double, double> gauss_kronrod(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <typename F>
double adaptive(F& f, double lo, double hi, double tol, int depth) {
  const auto [value, error] = gauss_kronrod(f, lo, hi);
  if (error <= tol || depth >= 50) return value;
  const double mid = 0.5 * (lo + hi);
  return adaptive(f, lo, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, hi, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integral of f over the finite interval [lo, hi].
template <typename F>
double integrate(F&& f, double lo, double hi, double abs_tol = 1e-14) {
  if (hi <= lo) return 0.0;
  return detail::adaptive(f, lo, hi, abs_tol, 0);
}

/// Symmetric window outside of which every pointer density used here is below
/// exp(-800) relative to its peak.
inline double pointer_support(double eps) { return 1.0 + 40.0 / std::sqrt(eps); }

/// Normal density N(q; mean, 1/eps) written out directly.
inline double gaussian_density(double q, double mean, double eps) {
  const double d = q - mean;
  return std::sqrt(eps / (2.0 * std::numbers::pi)) * std::exp(-0.5 * eps * d * d);
}

/// (P(q >= a), P(q <= -a), P(-a < q < a)) for a pointer mixture with +1
/// weight `weight_plus`, by quadrature.
inline std::array<double, 3> mixture_outcomes(double weight_plus, double eps, double a) {
  auto density = [&](double q) {
    return weight_plus * gaussian_density(q, 1.0, eps) + (1.0 - weight_plus) * gaussian_density(q, -1.0, eps);
  };
  const double edge = std::max(pointer_support(eps), a + 1.0);
  // Break the outer intervals at the Gaussian centres so the adaptive
  // scheme always sees the peaks.
  auto piecewise = [&](double lo, double hi) {
    double total = 0.0;
    double cursor = lo;
    for (double cut : {-1.0, 1.0}) {
      if (cut > cursor && cut < hi) {
        total += integrate(density, cursor, cut);
        cursor = cut;
      }
    }
    return total + integrate(density, cursor, hi);
  };
  return {piecewise(a, edge), piecewise(-edge, -a), piecewise(-a, a)};
}

/// z-stage outcomes of the state with Bloch z coordinate `z`.
inline std::array<double, 3> prob_z(double z, double eps1, double a) {
  const DensityMatrix rho = bloch_to_density({0.0, 0.0, z});
  return mixture_outcomes(0.5 * (1.0 + expectation(rho, PauliAxis::Z)), eps1, a);
}

/// x-stage outcomes: trace out the z-stage pointer, then integrate the
/// x-basis mixture density of the resulting state.
inline std::array<double, 3> prob_x(const BlochVector& state, double eps1, double eps2, double a) {
  const DensityMatrix after_z = nonselective_channel(bloch_to_density(state), PauliAxis::Z, MeasurementStrength{eps1});
  return mixture_outcomes(0.5 * (1.0 + expectation(after_z, PauliAxis::X)), eps2, a);
}

/// Projective y outcomes after tracing out both weak stages.
inline std::array<double, 2> prob_y(const BlochVector& state, double eps1, double eps2) {
  DensityMatrix rho = bloch_to_density(state);
  rho = nonselective_channel(rho, PauliAxis::Z, MeasurementStrength{eps1});
  rho = nonselective_channel(rho, PauliAxis::X, MeasurementStrength{eps2});
  const double y = expectation(rho, PauliAxis::Y);
  return {0.5 * (1.0 + y), 0.5 * (1.0 - y)};
}

/// Overlap of the two pointer branches, which multiplies the coherences of
/// the traced-out state: integral of (eps/2pi)^(1/2) e^{-eps(q-1)^2/4} e^{-eps(q+1)^2/4}.
inline double coherence_overlap(double eps) {
  const double edge = pointer_support(eps);
  auto f = [&](double q) {
    return std::sqrt(eps / (2.0 * std::numbers::pi)) * std::exp(-eps * (q - 1.0) * (q - 1.0) / 4.0) *
           std::exp(-eps * (q + 1.0) * (q + 1.0) / 4.0);
  };
  return integrate(f, -edge, 0.0) + integrate(f, 0.0, edge);
}

/// Integral of M(q)^dagger M(q) dq; the identity for a complete measurement.
inline Matrix2 kraus_completeness(PauliAxis axis, double eps) {
  const MeasurementStrength strength{eps};
  const double edge = pointer_support(eps);
  auto entry = [&](int row, int col, bool imag) {
    auto f = [&](double q) {
      const Matrix2 m = kraus_operator(axis, strength, {q});
      const std::array<std::array<complex, 2>, 2> k{{{m.m00, m.m01}, {m.m10, m.m11}}};
      complex sum{};
      for (int i = 0; i < 2; ++i) sum += std::conj(k[i][row]) * k[i][col];
      return imag ? sum.imag() : sum.real();
    };
    double total = 0.0;
    const std::array<double, 4> cuts{-edge, -1.0, 1.0, edge};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(f, cuts[i], cuts[i + 1], 1e-15);
    return total;
  };
  auto both = [&](int row, int col) { return complex{entry(row, col, false), entry(row, col, true)}; };
  return {both(0, 0), both(0, 1), both(1, 0), both(1, 1)};
}

/// Total mass of a reading density; 1 for a normalized mixture.
inline double reading_mass(const ReadingDensity& density) {
  const double eps = 1.0 / density.variance;
  const double edge = pointer_support(eps);
  return integrate(density, -edge, -1.0) + integrate(density, -1.0, 1.0) + integrate(density, 1.0, edge);
}

}  // namespace wmtomo::oracle
