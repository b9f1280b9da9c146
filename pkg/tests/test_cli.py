import json
from pathlib import Path

import numpy as np
import pytest

from dynsym.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from dynsym.config import ConfigError, dump_config, parse_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

MINIMAL = """
packets:
  left: {a: 0.1, b: 0.333, c: -2.5}
  right: {a: 0.1, b: -0.333, c: 2.5}
mass: 1
"""


def run(tmp_path, command, text, *extra):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(text)
    out = tmp_path / f"{command}.csv"
    code = main([command, "--config", str(cfg), "--out", str(out), *extra])
    return code, out


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


class TestParse:
    def test_defaults_and_round_trip(self):
        cfg = parse_config(MINIMAL)
        assert cfg.eta == 1 and cfg.grid.points == 2001 and cfg.mc.seed == 0
        assert cfg.quadrature == {"rel_tol": 1e-9, "abs_tol": 1e-12, "max_subdivisions": 2000}
        assert parse_config(dump_config(cfg)) == cfg

    def test_numeric_strings_accepted(self):
        cfg = parse_config(MINIMAL + "quadrature: {rel_tol: 1e-10}\n")
        assert cfg.quadrature["rel_tol"] == 1e-10

    def test_bad_width_names_field(self):
        with pytest.raises(ConfigError, match=r"left\.a") as exc:
            parse_config(MINIMAL.replace("a: 0.1, b: 0.333", "a: -0.1, b: 0.333"))
        assert exc.value.line == 3

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="foo") as exc:
            parse_config(MINIMAL + "foo: 1\n")
        assert exc.value.line == 6

    @pytest.mark.parametrize("snippet", [
        "eta: 2\n", "mc: {trajectories: 0}\n", "grid: {t_min: 3, t_max: 1}\n", "grid: {points: 1}\n",
        "detector: {center: 0}\n", "range_l: -1\n", "mass: yes\n", "mc: {seed: 1.5}\n",
    ])
    def test_rejections(self, snippet):
        with pytest.raises(ConfigError):
            parse_config(MINIMAL + snippet)

    def test_missing_packets(self):
        with pytest.raises(ConfigError, match="packets"):
            parse_config("mass: 1\n")

    def test_syntax_error_has_line(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("packets:\n  left: {a: 1\n")
        assert exc.value.line is not None

    def test_fingerprint_tracks_physics_only(self):
        base = parse_config(MINIMAL)
        assert base.fingerprint("pc") == parse_config(MINIMAL + "mc: {workers: 4}\n").fingerprint("pc")
        assert base.fingerprint("pc") != parse_config(MINIMAL + "mc: {seed: 1}\n").fingerprint("pc")
        assert base.fingerprint("pc") != parse_config(MINIMAL.replace("c: 2.5", "c: 2.6")).fingerprint("pc")
        assert base.fingerprint("pc") != base.fingerprint("density")

    @pytest.mark.parametrize("name", ["fig2a_set1", "fig2a_set2", "fig2a_set3", "fig2b", "collision3d"])
    def test_shipped_configs_parse(self, name):
        parse_config((CONFIGS / f"{name}.yaml").read_text())


class TestCommands:
    def test_density_columns(self, tmp_path):
        code, out = run(tmp_path, "density", (CONFIGS / "fig2a_set1.yaml").read_text(), "--grid-points", "301")
        assert code == EXIT_OK
        header, data = read_csv(out)
        assert header == ["t_c", "rho_cl", "rho_quantum"] and data.shape == (301, 3)
        assert np.all(data[:, 1:] >= 0)
        assert np.all(np.trapezoid(data[:, 1:], data[:, 0], axis=0) <= 1 + 1e-6)
        summary = json.loads(Path(str(out) + ".summary.json").read_text())
        assert {"fingerprint", "tolerances", "wall_time_s", "results"} <= set(summary)

    def test_pc_reports_total(self, tmp_path):
        code, out = run(tmp_path, "pc", MINIMAL, "--grid-points", "201")
        assert code == EXIT_OK
        summary = json.loads(Path(str(out) + ".summary.json").read_text())
        assert summary["results"]["p_c_total"] == pytest.approx(0.7469, abs=0.002)
        header, data = read_csv(out)
        assert header == ["t", "p_c"] and np.all(np.diff(data[:, 1]) >= 0)

    def test_signal_ordering(self, tmp_path):
        code, out = run(tmp_path, "signal", (CONFIGS / "fig2b.yaml").read_text(), "--grid-points", "151")
        assert code == EXIT_OK
        _, data = read_csv(out)
        j = np.argmax(data[:, 2])
        assert data[j, 1] > data[j, 2]

    def test_signal_needs_detector(self, tmp_path):
        code, _ = run(tmp_path, "signal", MINIMAL)
        assert code == EXIT_CONFIG

    def test_trajectories_listing(self, tmp_path):
        code, out = run(tmp_path, "trajectories", MINIMAL + "mc: {trajectories: 50}\n", "--grid-points", "101")
        assert code == EXIT_OK
        listing = out.with_suffix(".jumps.csv").read_text().splitlines()
        assert listing[0] == "index,jump_time" and len(listing) == 51

    def test_zero_trajectories_rejected_before_work(self, tmp_path):
        code, out = run(tmp_path, "trajectories", MINIMAL + "mc: {trajectories: 0}\n")
        assert code == EXIT_CONFIG and not out.exists()

    def test_density3d(self, tmp_path):
        text = (CONFIGS / "collision3d.yaml").read_text().replace("samples: 1000000", "samples: 50000")
        code, out = run(tmp_path, "density3d", text)
        assert code == EXIT_OK
        summary = json.loads(Path(str(out) + ".summary.json").read_text())
        assert 0 < summary["results"]["collision_fraction"] < 1

    def test_density3d_needs_range(self, tmp_path):
        code, _ = run(tmp_path, "density3d", MINIMAL)
        assert code == EXIT_CONFIG

    def test_numerical_failure_exit_code(self, tmp_path):
        code, _ = run(tmp_path, "density", MINIMAL + "quadrature: {max_subdivisions: 1}\n", "--grid-points", "5")
        assert code == EXIT_NUMERIC

    def test_missing_config_file(self, tmp_path):
        assert main(["pc", "--config", str(tmp_path / "nope.yaml"), "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG

    def test_byte_identical_reruns(self, tmp_path):
        text = MINIMAL + "mc: {trajectories: 200, seed: 5}\n"
        outs = []
        for sub in ("one", "two"):
            d = tmp_path / sub
            d.mkdir()
            code, out = run(d, "trajectories", text, "--grid-points", "101")
            assert code == EXIT_OK
            outs.append(out)
        assert outs[0].read_bytes() == outs[1].read_bytes()
        assert outs[0].with_suffix(".jumps.csv").read_bytes() == outs[1].with_suffix(".jumps.csv").read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        text = MINIMAL + "mc: {trajectories: 200}\n"
        _, a = run(tmp_path, "trajectories", text, "--grid-points", "51", "--seed", "1")
        first = a.read_bytes()
        _, b = run(tmp_path, "trajectories", text, "--grid-points", "51", "--seed", "2")
        assert first != b.read_bytes()
