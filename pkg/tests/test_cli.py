"""Command-line front end: config parsing, file formats, exit codes."""

import re

import numpy as np
import pytest

from ndcgi.cli import main

HEADER = "axis_value,w_psf_m,w_fov_m,magnification,turbulent_flag"
SCIENTIFIC = re.compile(r"^-?\d\.\d{8}e[+-]\d{2,3}$")

TINY_CONFIG = """\
[geometry]
lambda_s = 532e-9
lambda_r = 635e-9
z1 = 0.5
z2 = 0.25

[speckle]
omega = 0.5e-3
l_c = 96e-6
grid_n = 64
pitch = 48e-6

[object]
kind = pinhole
radius = 96e-6
rough_surface = true

[run]
realizations = 6
master_seed = 11
"""


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.ini"
    path.write_text(TINY_CONFIG)
    return path


class TestPsfSweep:
    def test_writes_csv_with_exact_header(self, tiny_config, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["psf-sweep", "--config", str(tiny_config),
                     "--axis", "lambda_r",
                     "--values", "600e-9,635e-9,700e-9",
                     "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == HEADER
        assert len(lines) == 4
        for line in lines[1:]:
            fields = line.split(",")
            assert len(fields) == 5
            for value in fields[:4]:
                assert SCIENTIFIC.match(value), value
            assert fields[4] in ("0", "1")

    def test_byte_identical_reruns(self, tiny_config, tmp_path):
        args = ["psf-sweep", "--config", str(tiny_config), "--axis", "z3",
                "--values", "0.3,0.4,0.5"]
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_empty_values_is_config_error_without_file(self, tiny_config,
                                                       tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = main(["psf-sweep", "--config", str(tiny_config),
                     "--axis", "lambda_r", "--values", "", "--out", str(out)])
        assert code == 2
        assert not out.exists()
        assert "error" in capsys.readouterr().err

    def test_bad_axis_is_usage_error(self, tiny_config, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["psf-sweep", "--config", str(tiny_config), "--axis", "z1",
                  "--values", "1.0", "--out", str(tmp_path / "x.csv")])
        assert err.value.code == 2

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["psf-sweep", "--config", str(tmp_path / "nope.ini"),
                     "--axis", "z3", "--values", "0.4",
                     "--out", str(tmp_path / "x.csv")])
        assert code == 2

    def test_builtin_desk_profile_resolves(self, tmp_path):
        out = tmp_path / "desk.csv"
        code = main(["psf-sweep", "--config", "desk", "--axis", "lambda_r",
                     "--values", "635e-9", "--out", str(out)])
        assert code == 0
        assert out.read_text().splitlines()[0] == HEADER


class TestSimulate:
    def test_outputs_and_determinism(self, tiny_config, tmp_path):
        out1 = tmp_path / "run1"
        out2 = tmp_path / "run2"
        for out in (out1, out2):
            code = main(["simulate", "--config", str(tiny_config),
                         "--out", str(out)])
            assert code == 0
        for name in ("ghost_raw.csv", "ghost_image.pgm"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        m1 = (out1 / "manifest.txt").read_text().splitlines()
        m2 = (out2 / "manifest.txt").read_text().splitlines()
        assert len(m1) == len(m2) == 5
        for l1, l2 in zip(m1, m2):
            if l1.startswith("wall_time="):
                assert l2.startswith("wall_time=")
            else:
                assert l1 == l2

    def test_pgm_structure(self, tiny_config, tmp_path):
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(tiny_config),
                     "--out", str(out)]) == 0
        blob = (out / "ghost_image.pgm").read_bytes()
        header = b"P5\n64 64\n65535\n"
        assert blob.startswith(header)
        data = np.frombuffer(blob[len(header):], dtype=">u2")
        assert data.size == 64 * 64
        assert data.min() == 0 and data.max() == 65535

    def test_raw_csv_is_full_grid_scientific(self, tiny_config, tmp_path):
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(tiny_config),
                     "--out", str(out)]) == 0
        lines = (out / "ghost_raw.csv").read_text().splitlines()
        assert len(lines) == 64
        first = lines[0].split(",")
        assert len(first) == 64
        assert all(SCIENTIFIC.match(v) for v in first)

    def test_manifest_fields(self, tiny_config, tmp_path):
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(tiny_config),
                     "--out", str(out), "--seed", "99"]) == 0
        manifest = dict(line.split("=", 1) for line in
                        (out / "manifest.txt").read_text().splitlines())
        assert set(manifest) == {"config_digest", "command", "outputs",
                                 "wall_time", "seed"}
        assert manifest["seed"] == "99"
        assert re.fullmatch(r"[0-9a-f]{64}", manifest["config_digest"])
        assert manifest["outputs"] == "ghost_raw.csv,ghost_image.pgm"

    def test_seed_override_changes_output(self, tiny_config, tmp_path):
        out1 = tmp_path / "s1"
        out2 = tmp_path / "s2"
        assert main(["simulate", "--config", str(tiny_config),
                     "--out", str(out1)]) == 0
        assert main(["simulate", "--config", str(tiny_config),
                     "--out", str(out2), "--seed", "12345"]) == 0
        assert (out1 / "ghost_raw.csv").read_bytes() != \
            (out2 / "ghost_raw.csv").read_bytes()

    def test_worker_count_does_not_change_bytes(self, tiny_config, tmp_path):
        out1 = tmp_path / "w1"
        out2 = tmp_path / "w2"
        assert main(["simulate", "--config", str(tiny_config),
                     "--out", str(out1), "--workers", "1"]) == 0
        assert main(["simulate", "--config", str(tiny_config),
                     "--out", str(out2), "--workers", "2"]) == 0
        assert (out1 / "ghost_raw.csv").read_bytes() == \
            (out2 / "ghost_raw.csv").read_bytes()

    def test_sampling_violation_is_runtime_error_with_hint(self, tmp_path,
                                                           capsys):
        config = tmp_path / "bad.ini"
        config.write_text(TINY_CONFIG.replace("z1 = 0.5", "z1 = 50.0"))
        code = main(["simulate", "--config", str(config),
                     "--out", str(tmp_path / "run")])
        assert code == 3
        message = capsys.readouterr().err
        assert "pitch" in message and "grid" in message

    def test_malformed_config_is_config_error(self, tmp_path, capsys):
        config = tmp_path / "broken.ini"
        config.write_text(TINY_CONFIG.replace("omega = 0.5e-3",
                                              "omega = half"))
        code = main(["simulate", "--config", str(config),
                     "--out", str(tmp_path / "run")])
        assert code == 2
        assert "omega" in capsys.readouterr().err

    def test_missing_section_is_config_error(self, tmp_path, capsys):
        config = tmp_path / "broken.ini"
        config.write_text(TINY_CONFIG.replace("[run]", "[walk]"))
        code = main(["simulate", "--config", str(config),
                     "--out", str(tmp_path / "run")])
        assert code == 2
        assert "run" in capsys.readouterr().err

    def test_inconsistent_speckle_is_config_error(self, tmp_path, capsys):
        config = tmp_path / "broken.ini"
        config.write_text(TINY_CONFIG.replace("l_c = 96e-6", "l_c = 50e-6"))
        code = main(["simulate", "--config", str(config),
                     "--out", str(tmp_path / "run")])
        assert code == 2
        err = capsys.readouterr().err
        assert "l_c" in err


class TestValidate:
    def test_unknown_level_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["validate", "bogus"])
        assert err.value.code == 2

    def test_quick_level_passes_and_reports(self, tmp_path, capsys):
        report_path = tmp_path / "report.txt"
        code = main(["validate", "quick", "--out", str(report_path)])
        out = capsys.readouterr().out
        assert code == 0
        lines = [l for l in out.splitlines() if l.startswith("PASS")]
        assert len(lines) == 6
        for line in lines:
            assert "criterion" in line and "tolerance" in line
        assert report_path.read_text().strip().endswith("criteria passed")
