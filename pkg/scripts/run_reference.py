#!/usr/bin/env python3
"""Run the reference annulus instance end to end and write all artifacts.

Equivalent to `dualwell solve` on the built-in reference configuration;
kept as a script so the default experiment is reproducible from a clean
checkout with one command:

    python3 scripts/run_reference.py --output-dir outputs/reference
"""

from __future__ import annotations

import argparse

from dualwell.cli import parse_config, run


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output-dir", default="outputs/reference")
    parser.add_argument("--nodes", type=int, default=2001)
    parser.add_argument("--amplitude", type=float, default=0.2)
    parser.add_argument("--dimension", type=int, default=2)
    parser.add_argument("--quiet", action="store_true")
    args = parser.parse_args()

    config = parse_config(
        {
            "spec": {"nu": 1.0, "lambda": 1.0, "R1": 2.0, "R2": 1.0, "n": args.dimension},
            "load": {"type": "linear", "amplitude": args.amplitude},
            "grid": {"nodes": args.nodes},
            "stability": {"max_mode": 8 if args.dimension >= 2 else 0},
            "output": {"directory": args.output_dir, "formats": ["csv", "json", "plots"]},
        }
    )
    report = run(config, quiet=args.quiet)
    for branch in ("1", "2", "3"):
        entry = report["energies"][branch]
        verdict = report["stability"][branch]["verdict"]
        print(
            f"branch {branch}: I = {entry['primal']:+.9e}  "
            f"gap = {entry['gap']:.2e}  {verdict}"
        )


if __name__ == "__main__":
    main()
