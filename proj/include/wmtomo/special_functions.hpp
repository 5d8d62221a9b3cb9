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

// Error function to ~1e-15 absolute accuracy.
//
//   |x| <= 3 : erf(x) = (2x/sqrt(pi)) exp(-x^2) sum_n (2x^2)^n / (1*3*...*(2n+1))
//              (all terms positive, so no cancellation)
//   |x| >  3 : erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
//              evaluated by the modified Lentz algorithm, then erf = 1 - erfc.
//
// erfc is defined as 1 - erf so the pair is exactly complementary in double
// arithmetic; its relative accuracy in the far tail is therefore limited.

#include <cmath>
#include <numbers>

namespace wmtomo {

namespace detail {

inline double erf_series(double x) {
  const double x2 = x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 200; ++n) {
    term *= 2.0 * x2 / (2.0 * n + 1.0);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return 2.0 * x / std::sqrt(std::numbers::pi) * std::exp(-x2) * sum;
}

// x > 0 only.
inline double erfc_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 500; ++k) {
    const double ak = 0.5 * k;
    d = x + ak * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + ak / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x * x) / (std::sqrt(std::numbers::pi) * f);
}

}  // namespace detail

inline double erf(double x) {
  if (std::isnan(x)) return x;
  const double ax = std::abs(x);
  double value;
  if (ax <= 3.0) {
    value = detail::erf_series(ax);
  } else if (ax < 27.0) {
    value = 1.0 - detail::erfc_continued_fraction(ax);
  } else {
    value = 1.0;
  }
  return x < 0.0 ? -value : value;
}

inline double erfc(double x) { return 1.0 - erf(x); }

}  // namespace wmtomo
