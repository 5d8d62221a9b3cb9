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

// Plain-text sweep output. Numbers are written with 17 significant digits so
// that files round-trip exactly and can be compared byte for byte.

#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include "wmtomo/harness.hpp"

namespace wmtomo {

inline constexpr const char* kSweepCsvHeader =
    "epsilon,a,ensemble,mean_fidelity_weak,mean_fidelity_projective,score,states,runs,discard_fraction,failures";

inline constexpr const char* kScoreCsvHeader = "epsilon,a,ensemble,score,states";

inline std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

inline void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    out << format_number(r.epsilon) << ',' << format_number(r.a) << ',' << r.ensemble << ','
        << format_number(r.mean_fidelity_weak) << ',' << format_number(r.mean_fidelity_projective) << ','
        << r.score << ',' << r.states << ',' << r.runs << ',' << format_number(r.discard_fraction) << ','
        << r.failures << '\n';
  }
}

inline void write_score_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kScoreCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    out << format_number(r.epsilon) << ',' << format_number(r.a) << ',' << r.ensemble << ',' << r.score << ','
        << r.states << '\n';
  }
}

}  // namespace wmtomo
