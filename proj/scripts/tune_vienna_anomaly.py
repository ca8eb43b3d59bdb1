#!/usr/bin/env python3
# Copyright 2026 The bellaudit Authors
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

"""Bisect shape_background_b1 so the mean B00/B01 normalized ratio of the
vienna-anomaly preset lands on a target (default 87%).

usage: tune_vienna_anomaly.py path/to/bellaudit [--target 87] [--seeds 8] [--n 1000000]
"""
import argparse
import json
import os
import statistics
import subprocess
import tempfile

HERE = os.path.dirname(os.path.abspath(__file__))
PRESET = os.path.join(HERE, "..", "presets", "vienna-anomaly.conf")


def ratio(tool, bg, seed, n, work):
    data = os.path.join(work, "v.tsv")
    subprocess.run([tool, "simulate", "--preset", PRESET, "--set", f"shape_background_b1={bg}",
                    "--n", str(n), "--seed", str(seed), "-o", data], check=True)
    out = subprocess.run([tool, "test", "shape", data, "--party", "B"], check=True, capture_output=True, text=True)
    return json.loads(out.stdout)["reports"][0]["inputs"]["max_normalized_ratio_percent"]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("tool")
    ap.add_argument("--target", type=float, default=87.0)
    ap.add_argument("--seeds", type=int, default=8)
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--lo", type=float, default=0.02)
    ap.add_argument("--hi", type=float, default=0.5)
    ap.add_argument("--steps", type=int, default=12)
    args = ap.parse_args()

    lo, hi = args.lo, args.hi
    with tempfile.TemporaryDirectory() as work:
        for _ in range(args.steps):
            mid = 0.5 * (lo + hi)
            r = statistics.mean(ratio(args.tool, mid, 1000 + s, args.n, work) for s in range(args.seeds))
            print(f"shape_background_b1={mid:.5f}  mean ratio {r:.3f}%")
            # More background at b = 1 means a lower ratio.
            if r > args.target:
                lo = mid
            else:
                hi = mid
    print(f"shape_background_b1={0.5 * (lo + hi):.4f}")


if __name__ == "__main__":
    main()
