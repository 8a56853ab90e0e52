import numpy as np
import pytest

from projheat import cli, io
from projheat.dynamics import read_orbit_csv, read_ppm
from projheat.polygon import Polygon
from projheat.posdom import DominanceCertificate

SKEWED = """# a convex pentagon
0 0
4 0
5 3
2 5
-1 2
"""


@pytest.fixture
def pentagon(tmp_path):
    path = tmp_path / "pent.txt"
    path.write_text(SKEWED)
    return path


@pytest.fixture
def poly_file(tmp_path):
    path = tmp_path / "p.poly"
    path.write_text("0 : 11/10\n1 : -2\n2 : 1\n")
    return path


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_iterate_writes_csv(tmp_path, pentagon, capsys):
    out = tmp_path / "o.csv"
    code, text, _ = run(capsys, "iterate", "--input", pentagon, "--lambda", "1/phi", "--steps", 30, "--out", out)
    assert code == 0 and "rows written" in text
    rows = read_orbit_csv(out)
    assert [r.step for r in rows] == list(range(len(rows)))
    assert abs(rows[-1].x - 0.6180339887) < 1e-9


def test_iterate_moduli_with_negative_lambda(tmp_path, capsys):
    out = tmp_path / "o.csv"
    code, _, _ = run(capsys, "iterate", "--moduli", "0.3,0.6", "--lambda", "-1/phi", "--steps", 5, "--out", out)
    assert code == 0
    assert len(read_orbit_csv(out)) >= 2


@pytest.mark.parametrize("lam, expected", [("1", "CollapsedToPoint"), ("3", "DegeneratedToLine")])
def test_classify(pentagon, capsys, lam, expected):
    code, text, _ = run(capsys, "classify", "--input", pentagon, "--lambda", lam)
    assert code == 0 and text.startswith(expected + " at step")


def test_classify_inconclusive_exit_2(capsys):
    code, _, err = run(capsys, "classify", "--moduli", "0.3,0.4", "--lambda", "1", "--max-steps", 1)
    assert code == 2 and "error" in err


def test_julia(tmp_path, capsys):
    out = tmp_path / "j.ppm"
    code, text, _ = run(capsys, "julia", "--lambda", "phi", "--window", "-2,-2,2,2", "--res", 16, 8,
                        "--max-iter", 40, "--out", out)
    assert code == 0
    img = read_ppm(out)
    assert img.shape == (8, 16, 3)
    counts = [int(line.split(":")[1]) for line in text.strip().splitlines()]
    assert sum(counts) == 128


def test_posdom_and_replay(tmp_path, poly_file, capsys):
    cert = tmp_path / "c.cert"
    code, text, _ = run(capsys, "posdom", "--poly", poly_file, "--variant", "wpd", "--max-depth", 10, "--out", cert)
    assert code == 0 and "depth 2" in text
    first = cert.read_bytes()
    assert DominanceCertificate.from_text(first.decode()).depth >= 2
    run(capsys, "posdom", "--poly", poly_file, "--variant", "wpd", "--max-depth", 10, "--out", cert)
    assert cert.read_bytes() == first
    code, text, _ = run(capsys, "replay", cert)
    assert code == 0 and "certificate verified" in text


def test_replay_rejects_tampered(tmp_path, poly_file, capsys):
    cert = tmp_path / "c.cert"
    run(capsys, "posdom", "--poly", poly_file, "--out", cert)
    text = cert.read_text().replace("11/10", "9/10")
    assert "9/10" in text
    cert.write_text(text)
    code, _, err = run(capsys, "replay", cert)
    assert code != 0 and "error" in err


def test_posdom_cannot_certify(tmp_path, capsys):
    path = tmp_path / "neg.poly"
    path.write_text("0 0 : -1/2\n1 0 : 1\n")
    code, _, err = run(capsys, "posdom", "--poly", path, "--out", tmp_path / "c.cert")
    assert code == 2 and "error" in err
    assert not (tmp_path / "c.cert").exists()


def test_center_of_regular_pentagon(tmp_path, capsys):
    # affine image of the regular pentagon with coordinates in Q(sqrt5)
    path = tmp_path / "reg.txt"
    path.write_text("1 0\n-1/4+1/4*sqrt5 1\n-1/4-1/4*sqrt5 1/phi\n-1/4-1/4*sqrt5 -1/phi\n-1/4+1/4*sqrt5 -1\n")
    for extra in ((), ("--star",)):
        code, text, _ = run(capsys, "center", "--input", path, *extra)
        assert code == 0
        x, y = (float(v) for v in text.split("affine")[1].strip(" ()\n").split(","))
        assert (x, y) == (0.0, 0.0)


def test_center_of_float_pentagon(tmp_path, capsys):
    path = tmp_path / "reg.txt"
    io.write_polygon(Polygon.regular(5), path)
    code, text, _ = run(capsys, "center", "--input", path)
    x, y = (float(v) for v in text.split("affine")[1].strip(" ()\n").split(","))
    assert code == 0 and abs(x) < 1e-9 and abs(y) < 1e-9


def test_collapse_point_and_line(pentagon, capsys):
    code, text, _ = run(capsys, "collapse", "--input", pentagon, "--lambda", "1")
    assert code == 0 and text.startswith("point [")
    code, text, _ = run(capsys, "collapse", "--input", pentagon, "--lambda", "3")
    assert code == 0 and text.startswith("line [")
    coeffs = np.array([float(v) for v in text[text.index("[") + 1:text.index("]")].split()])
    assert np.linalg.norm(coeffs) > 0


@pytest.mark.parametrize("argv", [
    ["center", "--input", "/nonexistent/file.txt"],
    ["classify", "--moduli", "0.3,0.4", "--lambda", "banana"],
    ["classify", "--moduli", "0.3", "--lambda", "1"],
    ["julia", "--lambda", "1", "--window", "0,0,1", "--out", "x.ppm"],
    ["iterate", "--moduli", "0.3,0.4", "--lambda", "1", "--bogus", "--out", "x.csv"],
    ["frobnicate"],
    [],
])
def test_invalid_input_exit_1(argv, capsys):
    assert cli.main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_bad_polygon_file_exit_1(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("0 0\n1 0\n1 1\n")
    code, _, _ = run(capsys, "center", "--input", path)
    assert code == 1


def test_verify_subset(capsys):
    code, text, _ = run(capsys, "verify", "--only", "3,8")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0].startswith("[PASS]  3.") and lines[1].startswith("[PASS]  8.")
    assert lines[-1] == "2/2 criteria passed"


def test_verify_reports_failure(capsys):
    code, text, _ = run(capsys, "verify", "--only", "6")
    assert code == 1 and text.startswith("[FAIL]")
