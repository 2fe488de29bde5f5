"""Tests for the batch driver: config parsing, outputs, exit codes."""

from __future__ import annotations

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dualwell.cli import (
    FIELD_COLUMNS,
    load_config,
    main,
    parse_config,
    read_fields_csv,
    run,
)
from dualwell.energy import duality_gap
from dualwell.errors import NumericsError, SpecError
from dualwell.fields import all_branches, compute_F
from dualwell.problem import ProblemSpec, RadialGrid, tabulated_load

BASE = {
    "spec": {"nu": 1.0, "lambda": 1.0, "R1": 2.0, "R2": 1.0, "n": 2},
    "load": {"type": "linear", "amplitude": 0.2},
}


def fast_config(**overrides) -> dict:
    config = {
        **BASE,
        "grid": {"nodes": 201},
        "stability": {"max_mode": 2, "elements": 100},
        "oracle": {"enabled": False},
    }
    config.update(overrides)
    return config


def write_config(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


class TestParseConfig:
    def test_defaults(self):
        config = parse_config(dict(BASE))
        assert config.nodes == 2001
        assert config.max_mode == 8
        assert config.elements == 400
        assert config.oracle_enabled is True
        assert config.oracle_starts == 3
        assert config.oracle_seed == 0
        assert config.output_dir == "."
        assert config.formats == ("csv", "json")

    def test_lambda_key_maps_to_the_well_parameter(self):
        config = parse_config(dict(BASE))
        assert config.spec.lam == 1.0

    def test_one_dimensional_default_has_no_angular_modes(self):
        data = {**BASE, "spec": {**BASE["spec"], "n": 1}}
        assert parse_config(data).max_mode == 0

    def test_angular_modes_rejected_in_one_dimension(self):
        data = {
            **BASE,
            "spec": {**BASE["spec"], "n": 1},
            "stability": {"max_mode": 2},
        }
        with pytest.raises(SpecError, match="stability.max_mode"):
            parse_config(data)

    @pytest.mark.parametrize(
        "mutate, fragment",
        [
            (lambda d: d.update(extra=1), "config"),
            (lambda d: d["spec"].update(mu=1.0), "spec"),
            (lambda d: d["load"].update(points=[]), "load"),
            (lambda d: d.update(grid={"node": 5}), "grid"),
            (lambda d: d.update(oracle={"starts": -1}), "oracle.starts"),
            (lambda d: d.update(output={"formats": ["csv", "yaml"]}), "output.formats"),
        ],
    )
    def test_unknown_or_invalid_keys_name_the_field_path(self, mutate, fragment):
        data = {"spec": dict(BASE["spec"]), "load": dict(BASE["load"])}
        mutate(data)
        with pytest.raises(SpecError, match=fragment):
            parse_config(data)

    def test_missing_sections_are_errors(self):
        with pytest.raises(SpecError, match="config.load"):
            parse_config({"spec": dict(BASE["spec"])})

    def test_zero_amplitude_rejected(self):
        data = {**BASE, "load": {"type": "linear", "amplitude": 0.0}}
        with pytest.raises(SpecError, match="load.amplitude"):
            parse_config(data)

    def test_table_load_points(self):
        data = {
            **BASE,
            "load": {"type": "table", "points": [[1.0, 0.1], [1.5, 0.0], [2.0, -0.1]]},
        }
        config = parse_config(data)
        assert config.load_type == "table"
        assert config.load_points.shape == (3, 2)

    def test_malformed_table_rows_rejected(self):
        data = {**BASE, "load": {"type": "table", "points": [[1.0, 0.1], [2.0]]}}
        with pytest.raises(SpecError, match=r"load.points\[1\]"):
            parse_config(data)


class TestLoadConfig:
    def test_reads_a_json_file(self, tmp_path):
        path = write_config(tmp_path, fast_config())
        config = load_config(path)
        assert config.nodes == 201

    def test_missing_file_is_a_spec_error(self, tmp_path):
        with pytest.raises(SpecError):
            load_config(tmp_path / "absent.json")

    def test_invalid_json_is_a_spec_error(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(SpecError):
            load_config(path)


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("solve")
    data = fast_config(output={"directory": str(outdir), "formats": ["csv", "json"]})
    report = run(parse_config(data), quiet=True)
    return outdir, report


class TestSolveOutputs:
    def test_files_exist(self, solved):
        outdir, _ = solved
        assert (outdir / "fields.csv").exists()
        assert (outdir / "modes.csv").exists()
        assert (outdir / "report.json").exists()

    def test_fields_csv_header_and_row_count(self, solved):
        outdir, _ = solved
        lines = (outdir / "fields.csv").read_text().strip().splitlines()
        assert lines[0] == ",".join(FIELD_COLUMNS)
        assert len(lines) == 1 + 201

    def test_report_sections(self, solved):
        _, report = solved
        for key in ("spec", "grid", "validation", "stress", "energies", "residuals", "stability", "oracle"):
            assert key in report
        assert report["oracle"] == {"enabled": False}
        assert report["stability"]["1"]["verdict"] == "local-min"
        assert report["stability"]["2"]["verdict"] == "radial-min-but-angular-unstable"
        assert report["stability"]["3"]["verdict"] == "local-max"

    def test_report_energies_match_the_library(self, solved):
        _, report = solved
        spec = ProblemSpec(nu=1.0, lam=1.0, R1=2.0, R2=1.0, n=2)
        from dualwell.problem import balanced_linear_load

        load = balanced_linear_load(spec, 0.2)
        grid = RadialGrid.uniform(spec, 201)
        stress = compute_F(load, spec, grid)
        for zeta, point in all_branches(stress, spec):
            expected = duality_gap(point, zeta, load, spec)
            assert_allclose(
                report["energies"][str(point.branch)]["primal"], expected.primal, rtol=1e-14
            )

    def test_modes_csv_lists_every_branch_and_mode(self, solved):
        outdir, _ = solved
        lines = (outdir / "modes.csv").read_text().strip().splitlines()
        assert lines[0] == "branch,l,kappa,min_eigenvalue,max_eigenvalue"
        assert len(lines) == 1 + 3 * 3

    def test_round_trip_through_the_csv_reproduces_energies(self, solved):
        outdir, report = solved
        data = read_fields_csv(outdir / "fields.csv")
        spec = ProblemSpec(nu=1.0, lam=1.0, R1=2.0, R2=1.0, n=2)
        load = tabulated_load(np.column_stack([data["r"], data["f"]]))
        grid = RadialGrid(data["r"])
        stress = compute_F(load, spec, grid)
        for zeta, point in all_branches(stress, spec):
            expected = duality_gap(point, zeta, load, spec)
            recorded = report["energies"][str(point.branch)]["primal"]
            assert abs(expected.primal - recorded) <= 1e-10 * max(1.0, abs(recorded))


class TestDeterminism:
    def test_reports_identical_except_the_timestamp(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for outdir in (out1, out2):
            data = fast_config(
                oracle={"enabled": True, "starts": 1, "seed": 9},
                output={"directory": str(outdir), "formats": ["json"]},
            )
            code = main(["solve", write_config(tmp_path, data, f"{outdir.name}.json"), "--quiet"])
            assert code == 0
        keep = lambda line: '"timestamp"' not in line
        text1 = [l for l in (out1 / "report.json").read_text().splitlines() if keep(l)]
        text2 = [l for l in (out2 / "report.json").read_text().splitlines() if keep(l)]
        assert text1 == text2


class TestExitCodes:
    def test_validate_good_config(self, tmp_path, capsys):
        path = write_config(tmp_path, fast_config())
        assert main(["validate", path]) == 0
        out = capsys.readouterr().out
        assert "balance residual" in out

    def test_validate_quiet_prints_nothing(self, tmp_path, capsys):
        path = write_config(tmp_path, fast_config())
        assert main(["validate", path, "--quiet"]) == 0
        assert capsys.readouterr().out == ""

    def test_bad_spec_exits_two(self, tmp_path, capsys):
        data = fast_config()
        data["spec"] = {**data["spec"], "R1": 0.5}
        assert main(["validate", write_config(tmp_path, data)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_unknown_key_exits_two(self, tmp_path):
        data = fast_config()
        data["grid"] = {"nodes": 201, "refine": True}
        assert main(["solve", write_config(tmp_path, data), "--quiet"]) == 2

    def test_unbalanced_load_exits_three(self, tmp_path):
        data = fast_config(load={"type": "table", "points": [[1.0, 1.0], [2.0, 1.0]]})
        assert main(["validate", write_config(tmp_path, data)]) == 3

    def test_oversized_load_exits_three(self, tmp_path):
        data = fast_config(load={"type": "linear", "amplitude": 5.0})
        assert main(["validate", write_config(tmp_path, data)]) == 3

    def test_corrupt_fields_csv_exits_four(self, tmp_path):
        path = tmp_path / "fields.csv"
        header = ",".join(FIELD_COLUMNS)
        row = ",".join(["1.0"] * len(FIELD_COLUMNS))
        bad = ",".join(["nan"] + ["1.0"] * (len(FIELD_COLUMNS) - 1))
        path.write_text(f"{header}\n{row}\n{bad}\n")
        assert main(["plot", str(path), "--output-dir", str(tmp_path)]) == 4


class TestPlots:
    def test_plot_emits_the_three_profile_files(self, tmp_path):
        outdir = tmp_path / "out"
        data = fast_config(output={"directory": str(outdir), "formats": ["csv", "json", "plots"]})
        assert main(["solve", write_config(tmp_path, data), "--quiet"]) == 0
        for name in ("displacements.svg", "dual_fields.svg", "stress.svg"):
            assert (outdir / name).exists()

    def test_plots_are_byte_identical_across_runs(self, tmp_path):
        outdir = tmp_path / "out"
        data = fast_config(output={"directory": str(outdir), "formats": ["csv"]})
        assert main(["solve", write_config(tmp_path, data), "--quiet"]) == 0
        plots1 = tmp_path / "p1"
        plots2 = tmp_path / "p2"
        for plots in (plots1, plots2):
            code = main(
                ["plot", str(outdir / "fields.csv"), "--output-dir", str(plots), "--quiet"]
            )
            assert code == 0
        for name in ("displacements.svg", "dual_fields.svg", "stress.svg"):
            assert (plots1 / name).read_bytes() == (plots2 / name).read_bytes()


class TestReadFieldsCsv:
    def test_missing_column_is_a_spec_error(self, tmp_path):
        path = tmp_path / "fields.csv"
        path.write_text("r,f\n1.0,2.0\n")
        with pytest.raises(SpecError, match="missing columns"):
            read_fields_csv(path)

    def test_empty_file_is_a_spec_error(self, tmp_path):
        path = tmp_path / "fields.csv"
        path.write_text("")
        with pytest.raises(SpecError, match="empty"):
            read_fields_csv(path)

    def test_nan_rows_are_a_numerics_error(self, tmp_path):
        path = tmp_path / "fields.csv"
        header = ",".join(FIELD_COLUMNS)
        bad = ",".join(["1.0"] * (len(FIELD_COLUMNS) - 1) + ["inf"])
        path.write_text(f"{header}\n{bad}\n")
        with pytest.raises(NumericsError, match="row 2"):
            read_fields_csv(path)
