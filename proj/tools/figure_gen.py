# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------


"""Plots mean energy efficiency per algorithm from an eehp_sim sweep CSV.

    python3 tools/figure_gen.py results.csv -o results.png [--kind power]

Rows with feasible = 0 and a NaN EE are failed trials and are left out of
the means; the annotation next to each point gives the trial count used.
"""

import argparse
import csv
import json
import math
import sys
from collections import defaultdict
from pathlib import Path

SCHEMA = "result_row/v1"
COLUMNS = [
    "sweep_kind", "sweep_value", "algorithm", "trial", "seed", "n_rf", "ee",
    "sum_se", "tx_power", "total_power", "feasible", "iterations",
]
X_LABELS = {
    "power": "total transmit power (W)",
    "antennas": "transmit antennas",
    "rf_chains": "RF chains",
    "ues": "UEs",
    "mrfc_convergence": "iteration",
}


class SchemaError(ValueError):
    pass


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file, expected header {','.join(COLUMNS)}")
        for i, (got, want) in enumerate(zip(header, COLUMNS)):
            if got != want:
                raise SchemaError(f"{path}: column {i + 1} is '{got}', expected '{want}'")
        if len(header) != len(COLUMNS):
            extra = header[len(COLUMNS):] or COLUMNS[len(header):]
            raise SchemaError(f"{path}: header length {len(header)}, expected {len(COLUMNS)} (column '{extra[0]}')")
        rows = [dict(zip(COLUMNS, r)) for r in reader if r]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def check_manifest(csv_path):
    manifest = Path(str(csv_path) + ".manifest.json")
    if not manifest.exists():
        return None
    meta = json.loads(manifest.read_text(encoding="utf-8"))
    if meta.get("csv_schema") != SCHEMA:
        raise SchemaError(f"{manifest}: csv_schema is '{meta.get('csv_schema')}', expected '{SCHEMA}'")
    return meta


def group_means(rows):
    """Returns {algorithm: [(x, mean_ee, n_trials), ...]} sorted by x."""
    acc = defaultdict(lambda: defaultdict(list))
    convergence = rows[0]["sweep_kind"] == "mrfc_convergence"
    for r in rows:
        ee = float(r["ee"])
        if math.isnan(ee):
            continue
        x = float(r["iterations"]) if convergence else float(r["sweep_value"])
        label = f"{r['algorithm']} K={r['sweep_value']}" if convergence else r["algorithm"]
        acc[label][x].append(ee)
    return {
        alg: [(x, sum(v) / len(v), len(v)) for x, v in sorted(points.items())]
        for alg, points in sorted(acc.items())
    }


def render(means, kind, output):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.4), dpi=100)
    for alg, pts in means.items():
        xs = [p[0] for p in pts]
        ys = [p[1] / 1e6 for p in pts]
        ax.plot(xs, ys, marker="o", label=alg)
        for x, y, n in zip(xs, ys, (p[2] for p in pts)):
            ax.annotate(f"n={n}", (x, y), textcoords="offset points", xytext=(0, 5), fontsize=6, ha="center")
    if kind == "power":
        ax.set_xscale("log")
    ax.set_xlabel(X_LABELS.get(kind, kind))
    ax.set_ylabel("energy efficiency (Mbit/J)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(output, metadata={"Software": None})
    plt.close(fig)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("-o", "--output", required=True)
    ap.add_argument("--kind", help="override the sweep kind used for axis labels")
    args = ap.parse_args(argv)
    try:
        check_manifest(args.csv)
        rows = read_rows(args.csv)
    except (SchemaError, OSError, json.JSONDecodeError) as e:
        print(f"figure_gen: {e}", file=sys.stderr)
        return 1
    means = group_means(rows)
    if not means:
        print(f"figure_gen: {args.csv}: every row is a failed trial", file=sys.stderr)
        return 1
    render(means, args.kind or rows[0]["sweep_kind"], args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
