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

// Single-qubit states: density matrices, Bloch vectors, Pauli expectations,
// the squared-distance fidelity score, and random state panels.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "wmtomo/random.hpp"

namespace wmtomo {

using complex = std::complex<double>;

/// Absolute tolerance used for every density-matrix invariant.
inline constexpr double kStateTolerance = 1e-12;
/// Slack allowed on |b| <= 1 for physical Bloch vectors.
inline constexpr double kBlochTolerance = 1e-9;

enum class PauliAxis { X, Y, Z };

inline constexpr std::array<PauliAxis, 3> kAllAxes{PauliAxis::X, PauliAxis::Y, PauliAxis::Z};

inline const char* axis_name(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X: return "x";
    case PauliAxis::Y: return "y";
    case PauliAxis::Z: return "z";
  }
  return "?";
}

enum class StateDistribution { BallUniform, SurfaceUniform };

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double operator[](PauliAxis axis) const {
    switch (axis) {
      case PauliAxis::X: return x;
      case PauliAxis::Y: return y;
      case PauliAxis::Z: return z;
    }
    return 0.0;
  }
  double& operator[](PauliAxis axis) {
    switch (axis) {
      case PauliAxis::X: return x;
      case PauliAxis::Y: return y;
      default: return z;
    }
  }

  double norm_squared() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm_squared()); }
  bool is_physical() const { return norm() <= 1.0 + kBlochTolerance; }

  friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

/// 2x2 Hermitian, unit-trace, positive semidefinite matrix.
///
/// Construction validates every invariant at kStateTolerance and throws
/// std::invalid_argument on violation; nothing is silently repaired.
class DensityMatrix {
 public:
  /// |0><0|.
  DensityMatrix() : entries_{complex{1.0}, complex{}, complex{}, complex{}} {}

  DensityMatrix(complex r00, complex r01, complex r10, complex r11)
      : entries_{r00, r01, r10, r11} {
    validate();
  }

  const complex& operator()(int row, int col) const { return entries_[2 * row + col]; }

  double trace() const { return entries_[0].real() + entries_[3].real(); }

  /// Eigenvalues in ascending order.
  std::array<double, 2> eigenvalues() const {
    const double half_trace = 0.5 * (entries_[0].real() + entries_[3].real());
    const double half_diff = 0.5 * (entries_[0].real() - entries_[3].real());
    const double radius = std::sqrt(half_diff * half_diff + std::norm(entries_[1]));
    return {half_trace - radius, half_trace + radius};
  }

  friend bool operator==(const DensityMatrix&, const DensityMatrix&) = default;

 private:
  void validate() const {
    for (const auto& e : entries_) {
      if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
        throw std::invalid_argument("density matrix has a non-finite entry");
      }
    }
    if (std::abs(entries_[0].imag()) > kStateTolerance ||
        std::abs(entries_[3].imag()) > kStateTolerance) {
      throw std::invalid_argument("density matrix diagonal is not real");
    }
    if (std::abs(entries_[2] - std::conj(entries_[1])) > kStateTolerance) {
      throw std::invalid_argument("density matrix is not Hermitian");
    }
    if (std::abs(trace() - 1.0) > kStateTolerance) {
      throw std::invalid_argument("density matrix trace is " + std::to_string(trace()) + ", expected 1");
    }
    if (eigenvalues()[0] < -kStateTolerance) {
      throw std::invalid_argument("density matrix is not positive semidefinite");
    }
  }

  std::array<complex, 4> entries_;
};

/// rho = (I + b.sigma) / 2.
inline DensityMatrix bloch_to_density(const BlochVector& b) {
  if (!b.is_physical()) {
    throw std::invalid_argument("Bloch vector norm " + std::to_string(b.norm()) + " exceeds 1");
  }
  // Points within the rounding band just outside the sphere are pulled back
  // onto it so the result stays positive semidefinite.
  const double n = b.norm();
  const double scale = n > 1.0 ? 1.0 / n : 1.0;
  const complex off{0.5 * scale * b.x, -0.5 * scale * b.y};
  return DensityMatrix{complex{0.5 * (1.0 + scale * b.z)}, off, std::conj(off), complex{0.5 * (1.0 - scale * b.z)}};
}

inline BlochVector density_to_bloch(const DensityMatrix& rho) {
  return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), rho(0, 0).real() - rho(1, 1).real()};
}

/// Tr(rho sigma_axis).
inline double expectation(const DensityMatrix& rho, PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X: return 2.0 * rho(0, 1).real();
    case PauliAxis::Y: return -2.0 * rho(0, 1).imag();
    case PauliAxis::Z: return rho(0, 0).real() - rho(1, 1).real();
  }
  return 0.0;
}

/// One minus the squared Euclidean distance between two Bloch vectors.
/// Estimates may lie outside the ball, so the score can be negative.
inline double fidelity_score(const BlochVector& truth, const BlochVector& estimate) {
  const double dx = truth.x - estimate.x;
  const double dy = truth.y - estimate.y;
  const double dz = truth.z - estimate.z;
  return 1.0 - (dx * dx + dy * dy + dz * dz);
}

/// Radial projection onto the closed unit ball. Off by default everywhere.
inline BlochVector clamp_to_ball(const BlochVector& b) {
  const double n = b.norm();
  if (n <= 1.0) return b;
  return {b.x / n, b.y / n, b.z / n};
}

inline BlochVector random_state(RandomStream& rng, StateDistribution dist) {
  BlochVector dir;
  double n2 = 0.0;
  do {
    dir = {rng.normal(), rng.normal(), rng.normal()};
    n2 = dir.norm_squared();
  } while (n2 < 1e-300);
  const double inv = 1.0 / std::sqrt(n2);
  const double radius = dist == StateDistribution::BallUniform ? std::cbrt(rng.uniform()) : 1.0;
  return {dir.x * inv * radius, dir.y * inv * radius, dir.z * inv * radius};
}

}  // namespace wmtomo
