#!/usr/bin/env python3
"""Sweep the load amplitude and track the stress window and energies.

For each amplitude the script records the L1 certificate margin, the
peak dual amplitude relative to its critical value, and the three branch
energies, then writes one CSV row per amplitude.  Past the L1 bound the
hypothesis certificate fails and the row says so; this is the empirical
face of the smallness condition that keeps the cubic in its three-root
window.

    python3 scripts/amplitude_sweep.py --steps 12 --output sweep.csv
"""

from __future__ import annotations

import argparse
import csv

import numpy as np

from dualwell.dual_algebra import critical_amplitude
from dualwell.energy import duality_gap
from dualwell.fields import all_branches, compute_F
from dualwell.problem import ProblemSpec, RadialGrid, balanced_linear_load, validate_load


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=12)
    parser.add_argument("--max-amplitude", type=float, default=4.0)
    parser.add_argument("--nodes", type=int, default=801)
    parser.add_argument("--dimension", type=int, default=2)
    parser.add_argument("--output", default="amplitude_sweep.csv")
    args = parser.parse_args()

    spec = ProblemSpec(nu=1.0, lam=1.0, R1=2.0, R2=1.0, n=args.dimension)
    grid = RadialGrid.uniform(spec, args.nodes)
    crit = critical_amplitude(spec.nu, spec.lam)

    rows = []
    for amplitude in np.linspace(args.max_amplitude / args.steps, args.max_amplitude, args.steps):
        load = balanced_linear_load(spec, float(amplitude))
        certificate = validate_load(load, spec)
        row = {
            "amplitude": f"{amplitude:.6f}",
            "l1_margin": f"{certificate.l1_norm / certificate.l1_bound:.6f}",
            "hypotheses_ok": certificate.passed,
        }
        if certificate.passed:
            stress = compute_F(load, spec, grid)
            row["peak_amplitude_fraction"] = f"{stress.max_interior_amplitude / crit:.6e}"
            for zeta, point in all_branches(stress, spec):
                energy = duality_gap(point, zeta, load, spec)
                row[f"I{point.branch}"] = f"{energy.primal:+.9e}"
        rows.append(row)
        state = "ok" if certificate.passed else "hypotheses FAILED"
        print(f"a = {amplitude:7.4f}  L1 margin {row['l1_margin']}  {state}")

    names = ["amplitude", "l1_margin", "hypotheses_ok", "peak_amplitude_fraction", "I1", "I2", "I3"]
    with open(args.output, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=names)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
