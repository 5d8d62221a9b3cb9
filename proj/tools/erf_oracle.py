#!/usr/bin/env python3
# Copyright 2026 The wmtomo Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates tests/erf_golden.inc with 50-digit mpmath reference values.

Usage: python3 tools/erf_oracle.py > tests/erf_golden.inc
"""

import mpmath

mpmath.mp.dps = 50


def points():
    # Dense grid over [-6, 6] plus the branch boundary of the C++ kernel.
    pts = [mpmath.mpf(i) / 40 for i in range(-240, 241)]
    pts += [mpmath.mpf(v) for v in ("2.999999", "3.000001", "0.5e-8", "-1e-12", "5.99")]
    return pts


def main():
    print("// Generated by tools/erf_oracle.py (mpmath, 50 digits). Do not edit.")
    print("// {x, erf(x)}")
    for x in points():
        print("{%s, %s}," % (mpmath.nstr(x, 20), mpmath.nstr(mpmath.erf(x), 20)))


if __name__ == "__main__":
    main()
