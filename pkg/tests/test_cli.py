import math
from pathlib import Path

import numpy as np
import pytest

from bernfit import approx, kkt
from bernfit.cli import main, samples_path


def read_table(path):
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    return header, np.array(rows)


class TestErrorTable:
    def test_columns_and_values(self, tmp_path):
        out = tmp_path / "errors.csv"
        rc = main(
            [
                "--func", "f1",
                "--mmin", "2",
                "--mmax", "5",
                "--elevate", "0",
                "--elevate", "10",
                "--methods", "project,kkt,kkt-mass,bernstein,p1",
                "--out", str(out),
            ]
        )
        assert rc == 0
        header, rows = read_table(out)
        assert header == ["m", "project", "kkt0", "kkt10", "kkt-mass0",
                          "kkt-mass10", "bernstein", "p1"]
        assert rows[:, 0].tolist() == [2.0, 3.0, 4.0, 5.0]
        # the projection is feasible for f1, so every constrained column
        # coincides with the projection column
        for col in (2, 3):
            assert np.max(np.abs(rows[:, col] - rows[:, 1])) < 1e-9
        # cross-check one cell against a direct computation
        f = approx.get_function("f1")
        pr = approx.project(f, 3)
        assert rows[1, 1] == pytest.approx(approx.l2_error(f, pr), abs=1e-15)

    def test_determinism(self, tmp_path):
        args = [
            "--func", "f1",
            "--mmin", "0",
            "--mmax", "6",
            "--elevate", "0",
            "--elevate", "10",
            "--methods", "project,kkt",
            "--out", None,
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args[-1] = str(a)
        assert main(list(args)) == 0
        args[-1] = str(b)
        assert main(list(args)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_monotone_projection_column(self, tmp_path):
        out = tmp_path / "mono.csv"
        assert main(["--func", "f0", "--mmax", "8", "--methods", "project",
                     "--out", str(out)]) == 0
        _, rows = read_table(out)
        proj = rows[:, 1]
        assert np.all(proj[1:] <= proj[:-1] + 1e-12)

    def test_2d_run(self, tmp_path):
        out = tmp_path / "g0.csv"
        rc = main(
            [
                "--func", "g0",
                "--dim", "2",
                "--mmin", "0",
                "--mmax", "4",
                "--methods", "project,kkt",
                "--out", str(out),
            ]
        )
        assert rc == 0
        header, rows = read_table(out)
        assert header == ["m", "project", "kkt0"]
        assert np.all(rows[:, 2] >= rows[:, 1] - 1e-12)
        assert np.all(np.diff(rows[:, 1]) <= 1e-12)
        assert np.all(np.diff(rows[:, 2]) <= 1e-12)

    def test_expression_function(self, tmp_path):
        out = tmp_path / "expr.csv"
        rc = main(["--func", "0.5*(sin(2*pi*x)+1)", "--mmax", "3",
                   "--methods", "project", "--out", str(out)])
        assert rc == 0
        ref = tmp_path / "ref.csv"
        assert main(["--func", "f0", "--mmax", "3", "--methods", "project",
                     "--out", str(ref)]) == 0
        assert out.read_text().strip().splitlines()[1:] == \
            ref.read_text().strip().splitlines()[1:]


class TestSamples:
    def test_grid_and_feasibility(self, tmp_path):
        out = tmp_path / "errors.csv"
        rc = main(
            [
                "--func", "f0",
                "--mmin", "5",
                "--mmax", "5",
                "--methods", "project,kkt",
                "--samples-degree", "5",
                "--out", str(out),
            ]
        )
        assert rc == 0
        spath = samples_path(out)
        assert spath.name == "errors_samples.csv"
        header, rows = read_table(spath)
        assert header == ["x", "f", "project", "kkt0"]
        assert rows.shape[0] == 512
        assert rows[0, 0] == 0.0 and rows[-1, 0] == 1.0
        # constrained column is nonnegative on the grid
        assert rows[:, 3].min() >= -1e-9
        # unconstrained projection does dip below zero for f0 at m=5
        assert rows[:, 2].min() < -1e-4


class TestFailureHandling:
    def test_partial_failure_exit_code(self, tmp_path, capsys):
        out = tmp_path / "errors.csv"
        rc = main(["--func", "f1", "--mmin", "0", "--mmax", "1",
                   "--methods", "project,bernstein", "--out", str(out)])
        assert rc == 2  # bernstein is undefined at m = 0
        _, rows = read_table(out)
        assert math.isnan(rows[0, 2])
        assert not math.isnan(rows[1, 2])
        err = capsys.readouterr().err
        assert "bernstein" in err and "m=0" in err

    def test_subset_guard_becomes_nan(self, tmp_path):
        out = tmp_path / "errors.csv"
        rc = main(["--func", "f1", "--mmin", "12", "--mmax", "12",
                   "--elevate", "10", "--methods", "kkt", "--out", str(out)])
        assert rc == 2
        _, rows = read_table(out)
        assert math.isnan(rows[0, 1])


class TestSpecErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ["--func", "nope", "--mmax", "3", "--out", "x.csv"],
            ["--func", "f0", "--mmax", "13", "--out", "x.csv"],
            ["--func", "f0", "--mmax", "3", "--elevate", "11", "--out", "x.csv"],
            ["--func", "f0", "--mmax", "3", "--methods", "magic", "--out", "x.csv"],
            ["--func", "g0", "--dim", "2", "--mmax", "5", "--out", "x.csv"],
            ["--func", "g0", "--dim", "2", "--mmax", "2", "--methods", "cone",
             "--out", "x.csv"],
            ["--func", "g0", "--dim", "2", "--mmax", "2", "--elevate", "1",
             "--out", "x.csv"],
            ["--func", "f0", "--mmin", "4", "--mmax", "2", "--out", "x.csv"],
            ["--func", "f0", "--mmax", "3", "--samples-degree", "9", "--out", "x.csv"],
            ["--func", "f1", "--dim", "2", "--mmax", "2", "--out", "x.csv"],
            ["--mmax", "3", "--out", "x.csv"],
        ],
    )
    def test_exit_one(self, argv, tmp_path):
        argv = [a if a != "x.csv" else str(tmp_path / "x.csv") for a in argv]
        assert main(argv) == 1
