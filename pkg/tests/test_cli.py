import json
import subprocess
import sys

from barbilliard.cli import CSV_HEADER, main


def run_cli(args):
    proc = subprocess.run(
        [sys.executable, "-m", "barbilliard", *args],
        capture_output=True,
        text=True,
    )
    return proc


class TestRho:
    def test_canonical_two_fifths(self, capsys):
        code = main(["rho", "--t", "0.9", "--r", "-0.0526315789473684", "--iters", "20000"])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["condition_report"]["cond48"] is True
        assert out["rotation"]["rho_p"] == 2
        assert out["rotation"]["rho_q"] == 5
        assert out["rho_verdict"] == "equals"
        assert len(out["orbits"]) >= 1
        assert len(out["orbits"][0]) == 5

    def test_equilateral_third(self, capsys):
        v = "-0.25,0.4330127018922193,-0.25,-0.4330127018922193,0.5,0"
        code = main(["rho", f"--vertices={v}", "--iters", "20000"])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["rotation"]["rho_p"] == 1
        assert out["rotation"]["rho_q"] == 3
        assert "orbits" not in out

    def test_degenerate_vertices(self, capsys):
        code = main(["rho", "--vertices", "0,0.5,0,-0.5,0,0"])
        out = json.loads(capsys.readouterr().out)
        assert code == 2
        assert out["error"] == "DegenerateBody"

    def test_missing_triangle_spec(self, capsys):
        code = main(["rho", "--t", "0.9"])
        out = json.loads(capsys.readouterr().out)
        assert code == 2
        assert out["error"] == "InvalidArgument"


class TestSweep:
    def test_small_grid_csv(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = main(
            [
                "sweep", "--t", "0.88:0.92:2", "--r=-0.03:-0.01:3",
                "--iters", "1500", "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 7
        summary = capsys.readouterr().out
        assert "rows=6" in summary
        for line in lines[1:]:
            fields = line.split(",")
            assert len(fields) == 13
            assert fields[6] in ("true", "false")
            # sandwich rows certify 2/5 or are flagged, never contradicted
            if fields[6] == "true" and fields[11] != "uncertified":
                assert (fields[9], fields[10]) == ("2", "5")

    def test_jobs_parallel_identical(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        args = ["sweep", "--t", "0.86:0.9:2", "--r=-0.03:-0.02:2",
                "--iters", "1500", "--seed", "5"]
        assert main(args + ["--jobs", "1", "--out", str(a)]) == 0
        assert main(args + ["--jobs", "2", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_relative_interval_mode(self, tmp_path, capsys):
        out = tmp_path / "rel.csv"
        code = main(
            [
                "sweep", "--t", "0.3:0.9:3", "--r", "0.1:0.9:3",
                "--r-mode", "relative_interval", "--iters", "1500",
                "--seed", "7", "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()[1:]
        assert all(line.split(",")[6] == "true" for line in lines)
        assert all(line.split(",")[12] == "true" for line in lines)

    def test_grid_flag_overrides_steps(self, tmp_path, capsys):
        out = tmp_path / "grid.csv"
        code = main(
            [
                "sweep", "--t", "0.88:0.92", "--r=-0.03:-0.01", "--grid", "2x3",
                "--iters", "1500", "--out", str(out),
            ]
        )
        assert code == 0
        assert len(out.read_text().splitlines()) == 7

    def test_single_cell_grid(self, tmp_path, capsys):
        out = tmp_path / "one.csv"
        code = main(
            [
                "sweep", "--t", "0.9:0.9:1", "--r=-0.02:-0.02:1",
                "--iters", "1500", "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        assert lines[1].startswith("0.9,-0.02,")

    def test_unwritable_path(self, capsys):
        code = main(
            [
                "sweep", "--t", "0.88:0.92:2", "--r=-0.03:-0.01:2",
                "--iters", "1500", "--out", "/nonexistent-dir/x.csv",
            ]
        )
        assert code == 3

    def test_bad_grid_rejected(self, capsys):
        code = main(
            [
                "sweep", "--t", "0.88:0.92:2", "--r=-0.03:-0.01:2",
                "--iters", "10", "--out", "/tmp/x.csv",
            ]
        )
        assert code == 2


class TestTauCmd:
    def test_counts(self, capsys):
        code = main(["tau", "--pair=0,0.9,0,-0.9", "--point=-0.02,0", "--n", "2"])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["count"] == 2
        assert len(out["roots"]) == 2

    def test_zero_case(self, capsys):
        code = main(["tau", "--pair=0,0.9,0,-0.9", "--point=-0.003,0", "--n", "2"])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["count"] == 0

    def test_point_on_line(self, capsys):
        code = main(["tau", "--pair=0,0.9,0,-0.9", "--point=0,0.2", "--n", "2"])
        out = json.loads(capsys.readouterr().out)
        assert code == 2
        assert out["error"] == "PointOnLine"


class TestRender:
    def test_svg_content(self, tmp_path):
        out = tmp_path / "fig.svg"
        code = main(
            ["render", "--t", "0.9", "--r=-0.0526315789473684", "--steps", "5",
             "--out", str(out)]
        )
        assert code == 0
        svg = out.read_text()
        assert svg.startswith("<svg")
        assert 'viewBox="-1.1 -1.1 2.2 2.2"' in svg
        assert 'stroke-width="0.005"' in svg
        assert "<polygon" in svg and "<path" in svg

    def test_byte_determinism(self, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        args = ["render", "--t", "0.7", "--r=-0.05", "--steps", "7"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_steps_zero_minimal(self, tmp_path):
        out = tmp_path / "c.svg"
        assert main(["render", "--t", "0.5", "--r=-0.2", "--out", str(out)]) == 0
        assert "<path" not in out.read_text()

    def test_period_three_orbit_drawn_closed(self, tmp_path):
        # equilateral configuration, started on the periodic point (-1, 0):
        # six steps retrace the closed triangle twice
        v = "-0.25,0.4330127018922193,-0.25,-0.4330127018922193,0.5,0"
        out = tmp_path / "tri.svg"
        assert main(["render", f"--vertices={v}", "--steps", "6",
                     "--start", "0.5", "--out", str(out)]) == 0
        svg = out.read_text()
        token = svg.split('<path d="M ')[1].split('"')[0]
        coords = token.replace(" L ", " ").split()
        first = (float(coords[0]), float(coords[1]))
        fourth = (float(coords[6]), float(coords[7]))
        assert abs(first[0] - fourth[0]) < 1e-9
        assert abs(first[1] - fourth[1]) < 1e-9
        assert "crimson" not in svg  # no period-5 overlay here

    def test_steps_capped(self, capsys):
        code = main(["render", "--t", "0.5", "--r=-0.2", "--steps", "20000",
                     "--out", "/tmp/never.svg"])
        assert code == 2


class TestVerify:
    def test_consistent_verdict(self, capsys):
        code = main(["verify", "--t", "0.9", "--r=-0.02", "--iters", "20000"])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["condition"] is True
        assert out["rho_verdict"] == "equals"
        assert out["consistent"] is True

    def test_below_verdict(self, capsys):
        code = main(["verify", "--t", "0.9", "--r=-0.3", "--iters", "20000"])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["rho_verdict"] == "below"
        assert out["consistent"] is True


class TestSubprocessEntry:
    def test_console_invocation(self):
        proc = run_cli(["tau", "--pair=0,0.9,0,-0.9", "--point=-0.003,0"])
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["count"] == 0
