"""Batch driver: config in, certified pipeline run out.

Reads a strict JSON configuration (unknown keys are errors, diagnostics
carry field paths), runs validate -> stress -> branches -> displacements
-> energies -> stability -> oracle, and writes machine-readable outputs:
fields.csv (17-significant-digit profiles), modes.csv (per-mode extreme
eigenvalues), report.json (deterministic up to its timestamp field), and
optional SVG profile plots.

Exit codes: 0 success, 2 config parse or specification error, 3 load
hypothesis failure (balance / unique zero / L1 bound), 4 numerical
failure (amplitude overflow, eigensolver breakdown, gap violation).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import LoadHypothesisError, NumericsError, SpecError
from .problem import (
    LoadFunction,
    ProblemSpec,
    RadialGrid,
    balanced_linear_load,
    tabulated_load,
    validate_load,
    validate_spec,
)
from .fields import all_branches, compute_F
from .energy import duality_gap
from .stability import classify, dual_curvature, mode_spectrum
from .oracle import DiscreteState, descend, discrete_energy, el_residual_direct, random_smooth_state
from . import __version__

#: Column order of fields.csv; the header row is mandatory and exact.
FIELD_COLUMNS = (
    "r", "f", "G", "F", "sigma_norm_sq",
    "zeta1", "zeta2", "zeta3",
    "u1", "u2", "u3",
    "strain1", "strain2", "strain3",
)

#: Node count of the oracle's own descent grid (the config schema has no
#: oracle grid field; descent cost grows quadratically with resolution).
ORACLE_NODES = 257

_TOP_KEYS = {"spec", "load", "grid", "stability", "oracle", "output"}
_FORMATS = {"csv", "json", "plots"}


def _mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise SpecError(f"{path}: expected an object, got {type(value).__name__}")
    return value


def _reject_unknown(section: dict, path: str, allowed: set[str]) -> None:
    for key in section:
        if key not in allowed:
            raise SpecError(f"{path}: unknown key {key!r}")


def _number(section: dict, path: str, key: str, *, default=None, integer=False, required=False):
    if key not in section:
        if required:
            raise SpecError(f"{path}.{key}: required field is missing")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(f"{path}.{key}: expected a number, got {value!r}")
    if integer:
        if float(value) != int(value):
            raise SpecError(f"{path}.{key}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


@dataclass(frozen=True)
class RunConfig:
    """Parsed and structurally checked configuration of one pipeline run."""

    spec: ProblemSpec
    load_type: str
    load_amplitude: float | None
    load_points: np.ndarray | None
    nodes: int
    max_mode: int
    elements: int
    oracle_enabled: bool
    oracle_starts: int
    oracle_seed: int
    output_dir: str
    formats: tuple[str, ...]


def parse_config(data: dict) -> RunConfig:
    """Strict schema walk; every diagnostic names the offending field path."""
    data = _mapping(data, "config")
    _reject_unknown(data, "config", _TOP_KEYS)
    for required in ("spec", "load"):
        if required not in data:
            raise SpecError(f"config.{required}: required section is missing")

    sec = _mapping(data["spec"], "spec")
    _reject_unknown(sec, "spec", {"nu", "lambda", "R1", "R2", "n"})
    spec = ProblemSpec(
        nu=_number(sec, "spec", "nu", required=True),
        lam=_number(sec, "spec", "lambda", required=True),
        R1=_number(sec, "spec", "R1", required=True),
        R2=_number(sec, "spec", "R2", required=True),
        n=_number(sec, "spec", "n", required=True, integer=True),
    )

    load = _mapping(data["load"], "load")
    load_type = load.get("type")
    if load_type == "linear":
        _reject_unknown(load, "load", {"type", "amplitude"})
        amplitude = _number(load, "load", "amplitude", required=True)
        if amplitude == 0.0:
            raise SpecError("load.amplitude: must be nonzero")
        points = None
    elif load_type == "table":
        _reject_unknown(load, "load", {"type", "points"})
        raw = load.get("points")
        if not isinstance(raw, list) or len(raw) < 2:
            raise SpecError("load.points: expected a list of at least two [r, f] pairs")
        for i, row in enumerate(raw):
            if (
                not isinstance(row, list)
                or len(row) != 2
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in row)
            ):
                raise SpecError(f"load.points[{i}]: expected a numeric [r, f] pair")
        amplitude = None
        points = np.asarray(raw, dtype=float)
    else:
        raise SpecError(f"load.type: expected 'linear' or 'table', got {load_type!r}")

    grid = _mapping(data.get("grid", {}), "grid")
    _reject_unknown(grid, "grid", {"nodes"})
    nodes = _number(grid, "grid", "nodes", default=2001, integer=True)
    if nodes < 3:
        raise SpecError(f"grid.nodes: need at least 3 nodes, got {nodes}")

    stability = _mapping(data.get("stability", {}), "stability")
    _reject_unknown(stability, "stability", {"max_mode", "elements"})
    max_mode = _number(
        stability, "stability", "max_mode", default=8 if spec.n >= 2 else 0, integer=True
    )
    if max_mode < 0:
        raise SpecError(f"stability.max_mode: must be >= 0, got {max_mode}")
    if max_mode >= 1 and spec.n == 1:
        raise SpecError("stability.max_mode: angular modes need n >= 2")
    elements = _number(stability, "stability", "elements", default=400, integer=True)
    if elements < 2:
        raise SpecError(f"stability.elements: need at least 2 elements, got {elements}")

    oracle = _mapping(data.get("oracle", {}), "oracle")
    _reject_unknown(oracle, "oracle", {"enabled", "starts", "seed"})
    enabled = oracle.get("enabled", True)
    if not isinstance(enabled, bool):
        raise SpecError(f"oracle.enabled: expected true or false, got {enabled!r}")
    starts = _number(oracle, "oracle", "starts", default=3, integer=True)
    if starts < 0:
        raise SpecError(f"oracle.starts: must be >= 0, got {starts}")
    seed = _number(oracle, "oracle", "seed", default=0, integer=True)

    output = _mapping(data.get("output", {}), "output")
    _reject_unknown(output, "output", {"directory", "formats"})
    directory = output.get("directory", ".")
    if not isinstance(directory, str) or not directory:
        raise SpecError(f"output.directory: expected a non-empty string, got {directory!r}")
    formats = output.get("formats", ["csv", "json"])
    if not isinstance(formats, list) or not formats:
        raise SpecError("output.formats: expected a non-empty list")
    for fmt in formats:
        if fmt not in _FORMATS:
            raise SpecError(f"output.formats: unknown format {fmt!r} (choose from csv, json, plots)")

    return RunConfig(
        spec=spec,
        load_type=load_type,
        load_amplitude=amplitude,
        load_points=points,
        nodes=nodes,
        max_mode=max_mode,
        elements=elements,
        oracle_enabled=enabled,
        oracle_starts=starts,
        oracle_seed=seed,
        output_dir=directory,
        formats=tuple(formats),
    )


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data)


def _checked_spec(config: RunConfig) -> ProblemSpec:
    report = validate_spec(config.spec)
    if not report.passed:
        details = "; ".join(f"{c.name} ({c.detail})" for c in report.failures())
        raise SpecError(f"invalid problem spec: {details}")
    return config.spec


def _build_load(config: RunConfig, spec: ProblemSpec) -> LoadFunction:
    if config.load_type == "linear":
        return balanced_linear_load(spec, config.load_amplitude)
    return tabulated_load(config.load_points)


def _checked_load(config: RunConfig, spec: ProblemSpec):
    load = _build_load(config, spec)
    report = validate_load(load, spec)
    if not report.passed:
        problems = []
        if not report.balance_ok:
            problems.append(f"balance residual {report.balance_residual:.3e} exceeds 1e-10")
        if not report.single_zero_ok:
            problems.append(f"expected exactly one interior zero, found {report.sign_changes}")
        if not report.l1_ok:
            problems.append(
                f"L1 norm {report.l1_norm:.6e} is not below the smallness bound {report.l1_bound:.6e}"
            )
        raise LoadHypothesisError("load hypotheses failed: " + "; ".join(problems))
    return load, report


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value]
    return value


def run(config: RunConfig, quiet: bool = False) -> dict:
    """Execute the full pipeline and write the requested artifacts.

    Returns the report dictionary (the same content as report.json).
    """
    def say(msg):
        if not quiet:
            print(msg)

    spec = _checked_spec(config)
    load, load_report = _checked_load(config, spec)
    say(
        f"load ok: balance residual {load_report.balance_residual:.3e}, "
        f"L1 {load_report.l1_norm:.6e} < {load_report.l1_bound:.6e}"
    )

    grid = RadialGrid.uniform(spec, config.nodes)
    stress = compute_F(load, spec, grid)
    say(
        f"stress ok: |F(R1)| = {stress.outer_residual:.3e}, "
        f"max amplitude {stress.max_interior_amplitude:.6e}"
    )
    branches = all_branches(stress, spec)

    energies = {}
    residuals = {}
    for z, cp in branches:
        report = duality_gap(cp, z, load, spec)
        energies[str(cp.branch)] = {
            "primal": report.primal,
            "dual": report.dual,
            "total_complementary": report.total_complementary,
            "gap": report.gap,
        }
        s = cp.strain_values
        constitutive = spec.nu * (0.5 * s * s - spec.lam) * s - stress.F_values * grid.nodes
        fd = el_residual_direct(DiscreteState(grid, cp.u_values), load, spec)
        residuals[str(cp.branch)] = {
            "constitutive_max": float(np.max(np.abs(constitutive))),
            "conservative_fd_max": float(np.max(np.abs(fd))),
        }
        say(f"branch {cp.branch}: I = {report.primal:+.9e}, gap = {report.gap:.3e}")

    stability_report = {}
    for z, cp in branches:
        spectrum = mode_spectrum(cp, spec, config.max_mode, config.elements)
        curvature = dual_curvature(z, spec)
        verdict = classify(spectrum, curvature, spec)
        stability_report[str(cp.branch)] = {
            "verdict": verdict.verdict,
            "modes": [
                {
                    "l": m.l,
                    "kappa": m.kappa,
                    "min_eigenvalue": m.min_eigenvalue,
                    "max_eigenvalue": m.max_eigenvalue,
                }
                for m in spectrum.modes
            ],
            "dual_curvature": {
                "positive": curvature.positive,
                "negative": curvature.negative,
                "zero": curvature.zero,
                "bracket_sign": curvature.bracket_sign,
                "form_sign": curvature.form_sign,
            },
        }
        say(f"branch {cp.branch}: {verdict.verdict}")

    oracle_report = {"enabled": config.oracle_enabled}
    if config.oracle_enabled:
        agreement = {}
        for z, cp in branches:
            direct = discrete_energy(DiscreteState(grid, cp.u_values), load, spec)
            primal = energies[str(cp.branch)]["primal"]
            agreement[str(cp.branch)] = {
                "discrete": direct,
                "primal": primal,
                "relative_difference": abs(direct - primal) / (1.0 + abs(primal)),
            }
        probes = []
        ogrid = RadialGrid.uniform(spec, ORACLE_NODES)
        rng = np.random.default_rng(config.oracle_seed)
        amp = 0.02 * np.sqrt(2.0 * spec.lam) * (spec.R1 - spec.R2)
        for k in range(config.oracle_starts):
            start = random_smooth_state(ogrid, amp, rng)
            result = descend(start, load, spec, max_iter=20_000)
            probes.append(
                {
                    "start": k,
                    "converged": result.converged,
                    "iterations": result.iterations,
                    "gradient_norm": result.gradient_norm,
                    "final_energy": result.final_energy,
                }
            )
            say(
                f"oracle probe {k}: E = {result.final_energy:+.9e} "
                f"({'converged' if result.converged else 'iteration cap'})"
            )
        oracle_report.update(
            {
                "nodes": ORACLE_NODES,
                "seed": config.oracle_seed,
                "energy_agreement": agreement,
                "probes": probes,
            }
        )

    report = {
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "spec": {
            "nu": spec.nu,
            "lambda": spec.lam,
            "R1": spec.R1,
            "R2": spec.R2,
            "n": spec.n,
            "sphere_area": spec.sphere_area,
            "volume": spec.volume,
        },
        "grid": {"nodes": config.nodes},
        "validation": {
            "balance_residual": load_report.balance_residual,
            "sign_changes": load_report.sign_changes,
            "zero_location": load_report.zero_location,
            "l1_norm": load_report.l1_norm,
            "l1_bound": load_report.l1_bound,
        },
        "stress": {
            "sign": stress.sign,
            "outer_residual": stress.outer_residual,
            "max_interior_amplitude": stress.max_interior_amplitude,
        },
        "energies": energies,
        "residuals": residuals,
        "stability": stability_report,
        "oracle": oracle_report,
    }
    report = _jsonable(report)

    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in config.formats:
        written.append(_write_fields_csv(outdir / "fields.csv", load, stress, branches, spec))
        written.append(_write_modes_csv(outdir / "modes.csv", stability_report))
    if "json" in config.formats:
        path = outdir / "report.json"
        path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
        written.append(path)
    if "plots" in config.formats:
        written.extend(emit_profile_plots(outdir / "fields.csv", outdir, quiet=True))
    for path in written:
        say(f"wrote {path}")
    return report


def _write_fields_csv(path: Path, load, stress, branches, spec) -> Path:
    r = stress.grid.nodes
    columns = {
        "r": r,
        "f": np.asarray(load(r), dtype=float),
        "G": stress.G_values,
        "F": stress.F_values,
        "sigma_norm_sq": stress.amplitude_values,
    }
    for z, cp in branches:
        columns[f"zeta{cp.branch}"] = z.zeta_values
        columns[f"u{cp.branch}"] = cp.u_values
        columns[f"strain{cp.branch}"] = cp.strain_values
    table = np.column_stack([columns[c] for c in FIELD_COLUMNS])
    with open(path, "w") as fh:
        fh.write(",".join(FIELD_COLUMNS) + "\n")
        for row in table:
            fh.write(",".join(f"{v:.16e}" for v in row) + "\n")
    return path


def _write_modes_csv(path: Path, stability_report: dict) -> Path:
    with open(path, "w") as fh:
        fh.write("branch,l,kappa,min_eigenvalue,max_eigenvalue\n")
        for branch in sorted(stability_report):
            for mode in stability_report[branch]["modes"]:
                fh.write(
                    f"{branch},{mode['l']},{mode['kappa']:.16e},"
                    f"{mode['min_eigenvalue']:.16e},{mode['max_eigenvalue']:.16e}\n"
                )
    return path


def read_fields_csv(path) -> dict[str, np.ndarray]:
    """Read a fields.csv back into column arrays, with hygiene checks."""
    try:
        with open(path) as fh:
            header = fh.readline().strip()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc
    if not header:
        raise SpecError(f"{path}: empty file, expected a header row")
    names = header.split(",")
    missing = [c for c in FIELD_COLUMNS if c not in names]
    if missing:
        raise SpecError(f"{path}: missing columns {missing}")
    with warnings.catch_warnings():
        # genfromtxt warns on a header-only file; the explicit error below
        # already covers that case.
        warnings.simplefilter("ignore")
        data = np.genfromtxt(path, delimiter=",", skip_header=1)
    if data.size == 0:
        raise SpecError(f"{path}: no data rows")
    data = np.atleast_2d(data)
    if data.shape[1] != len(names):
        raise SpecError(f"{path}: rows do not match the {len(names)}-column header")
    bad = np.nonzero(~np.isfinite(data).all(axis=1))[0]
    if bad.size:
        raise NumericsError(f"{path}: row {bad[0] + 2} contains NaN or infinite values")
    return {name: data[:, k] for k, name in enumerate(names)}


def emit_profile_plots(fields_csv, output_dir, quiet: bool = False) -> list[Path]:
    """Static SVG profile plots, one file per quantity family, deterministic."""
    data = read_fields_csv(fields_csv)
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "dualwell"
    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    r = data["r"]
    families = [
        ("displacements.svg", ("u1", "u2", "u3"), "u(r)"),
        ("dual_fields.svg", ("zeta1", "zeta2", "zeta3"), "zeta(r)"),
        ("stress.svg", ("F", "sigma_norm_sq"), "stress"),
    ]
    written = []
    for fname, cols, ylabel in families:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for col in cols:
            ax.plot(r, data[col], label=col)
        ax.set_xlabel("r")
        ax.set_ylabel(ylabel)
        ax.legend(loc="best")
        fig.tight_layout()
        path = outdir / fname
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)
        if not quiet:
            print(f"wrote {path}")
    return written


def _cmd_validate(args) -> int:
    config = load_config(args.config)
    spec_report = validate_spec(config.spec)
    if not args.quiet:
        for check in spec_report.checks:
            print(f"{'ok  ' if check.passed else 'FAIL'} {check.name}: {check.detail}")
    if not spec_report.passed:
        details = "; ".join(c.name for c in spec_report.failures())
        raise SpecError(f"invalid problem spec: {details}")
    _, load_report = _checked_load(config, config.spec)
    if not args.quiet:
        print(f"ok   balance residual {load_report.balance_residual:.3e}")
        print(f"ok   single interior zero at r = {load_report.zero_location}")
        print(f"ok   L1 norm {load_report.l1_norm:.6e} < bound {load_report.l1_bound:.6e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualwell",
        description="Solve the radial double-well problem by its dual cubic branches.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run the full pipeline from a JSON config")
    solve.add_argument("config", help="path to the JSON run configuration")
    solve.add_argument("--output-dir", help="override output.directory from the config")
    solve.add_argument("--quiet", action="store_true", help="suppress progress output")

    validate = sub.add_parser("validate", help="run only the spec and load hypothesis checks")
    validate.add_argument("config", help="path to the JSON run configuration")
    validate.add_argument("--quiet", action="store_true", help="suppress the check listing")

    plot = sub.add_parser("plot", help="render SVG profile plots from a fields.csv")
    plot.add_argument("fields_csv", help="path to a fields.csv produced by solve")
    plot.add_argument("--output-dir", default=".", help="directory for the SVG files")
    plot.add_argument("--quiet", action="store_true", help="suppress file listing")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            config = load_config(args.config)
            if args.output_dir:
                config = dataclasses.replace(config, output_dir=args.output_dir)
            run(config, quiet=args.quiet)
        elif args.command == "validate":
            _cmd_validate(args)
        elif args.command == "plot":
            emit_profile_plots(args.fields_csv, args.output_dir, quiet=args.quiet)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LoadHypothesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
