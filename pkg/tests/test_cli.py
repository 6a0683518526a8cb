import json
from fractions import Fraction as F

import pytest

from conftest import CIRCLE_DOMAIN, ELLIPSOID, HYPERQUADRIC, SPHERE
from crcalc.cli import (EXIT_GEOMETRY, EXIT_OK, EXIT_PARSE, EXIT_VERIFY, REPORT_SCHEMA, main,
                        sample_points, snap_point)
from crcalc.expr import expand, parse, to_jet

ELL_AB = "1 - abs2(z) - abs2(w) - t*(A*re(z)^2 + B*re(w)^2)"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def lines(out):
    return [json.loads(x) for x in out.splitlines()]


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def rho_at(expr, bp, t=None):
    return to_jet(expr, bp, 0, t=t).constant_term()


# -- invariants --------------------------------------------------------------

def test_sphere_reports_vanish(capsys):
    code, out, _ = run(capsys, "invariants", SPHERE, "--sample", "5", "--seed", "3")
    assert code == EXIT_OK
    recs = lines(out)
    assert len(recs) == 5
    for r in recs:
        assert r["Q11"] == {"re": "0", "im": "0"} and r["O"] == {"re": "0", "im": "0"}
        assert r["R"] == "2" and r["extras"]["S"] == "-1/4"
        assert rho_at(SPHERE, [F(c) for c in r["point"]]) == 0


def test_report_schema(capsys):
    jsonschema = pytest.importorskip("jsonschema")
    for mode in ("exact", "float"):
        code, out, _ = run(capsys, "invariants", ELLIPSOID, "--bind", "t=1/10", "--sample", "2",
                           "--mode", mode)
        assert code == EXIT_OK
        for r in lines(out):
            jsonschema.validate(r, REPORT_SCHEMA)


def test_hyperquadric_origin(capsys, tmp_path):
    pts = write(tmp_path, "p.txt", "# origin\n0, 0, 0, 0\n")
    code, out, _ = run(capsys, "invariants", HYPERQUADRIC, "--points", pts)
    assert code == EXIT_OK
    (r,) = lines(out)
    assert r["R"] == "0" and r["Q11"] == {"re": "0", "im": "0"} and r["O"]["re"] == "0"


def test_csv_projection(capsys):
    code, out, _ = run(capsys, "invariants", SPHERE, "--sample", "2", "--format", "csv")
    rows = out.splitlines()
    assert code == EXIT_OK and len(rows) == 3
    assert rows[0].startswith("point_0,point_1,point_2,point_3,gauge,R,A11_re,A11_im")


def test_float_projection_of_nearby_point(capsys, tmp_path):
    pts = write(tmp_path, "p.txt", "0.6 0 0.8000001 0\n")
    code, out, _ = run(capsys, "invariants", SPHERE, "--points", pts, "--mode", "float")
    assert code == EXIT_OK
    p = lines(out)[0]["point"]
    assert abs(sum(x * x for x in p) - 1) < 1e-12


def test_exact_snap_of_nearby_point(capsys, tmp_path):
    pts = write(tmp_path, "p.txt", "3/5 0 0.8000001 0\n")
    code, out, _ = run(capsys, "invariants", SPHERE, "--points", pts)
    assert code == EXIT_OK
    assert rho_at(SPHERE, [F(c) for c in lines(out)[0]["point"]]) == 0


# -- samplers ------------------------------------------------------------------

@pytest.mark.parametrize("expr,t", [(SPHERE, None), (ELLIPSOID, F(1, 10)), (HYPERQUADRIC, None),
                                    ("2*im(w) - abs2(z) - 3*abs2(z)^4", None)])
def test_exact_samples_lie_on_surface(expr, t):
    poly = expand(parse(expr))
    pts = sample_points(poly, 4, seed=7, exact=True, t=t)
    assert len(set(pts)) == 4
    for p in pts:
        assert all(isinstance(c, F) for c in p)
        assert rho_at(poly, p, t) == 0


def test_float_samples():
    poly = expand(parse(CIRCLE_DOMAIN))
    for p in sample_points(poly, 3, seed=1, exact=False):
        assert abs(complex(rho_at(poly, p))) < 1e-12


def test_snap_point_exact_on_circle_slice():
    poly = expand(parse(CIRCLE_DOMAIN))
    p = snap_point(poly, (0.6, 0.0, 0.8, 0.0))
    assert p == (F(3, 5), 0, F(4, 5), 0)


# -- exit codes ----------------------------------------------------------------

def test_exit_parse(capsys):
    code, _, err = run(capsys, "invariants", "1 - abs2(z) - (w", "--sample", "1")
    assert code == EXIT_PARSE
    assert "position 16" in err


def test_exit_unbound(capsys):
    code, _, err = run(capsys, "invariants", "1 - a*abs2(z) - abs2(w)", "--sample", "1")
    assert code == EXIT_PARSE and "'a'" in err


def test_exit_geometry(capsys, tmp_path):
    origin = write(tmp_path, "o.txt", "0 0 0 0\n")
    code, _, err = run(capsys, "invariants", "2*im(w) + abs2(z)", "--points", origin)
    assert code == EXIT_GEOMETRY and "NotStrictlyPseudoconvex" in err
    code, _, err = run(capsys, "invariants", "abs2(z) + abs2(w)", "--points", origin)
    assert code == EXIT_GEOMETRY and "SingularGradient" in err
    off = write(tmp_path, "off.txt", "1 1 0 0\n")
    code, _, _ = run(capsys, "invariants", SPHERE, "--points", off)
    assert code == EXIT_GEOMETRY


def test_exit_verification(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "gauge", "--mode", "float", "--sample", "1",
                       "--tol", "verify=1e-40")
    assert code == EXIT_VERIFY
    assert lines(out)[-1]["ok"] is False


def test_bad_flag_values(capsys):
    assert run(capsys, "invariants", SPHERE, "--tol", "bogus=1")[0] == EXIT_PARSE
    assert run(capsys, "verify", "--suite", "nope")[0] == EXIT_PARSE
    with pytest.raises(SystemExit) as e:
        main(["invariants", SPHERE, "--mode", "fuzzy"])
    assert e.value.code == 2


# -- determinism and configuration ---------------------------------------------

def test_seeded_runs_are_byte_identical(capsys):
    argv = ["invariants", ELLIPSOID, "--bind", "t=1/10", "--sample", "3", "--seed", "11"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    c = run(capsys, *argv, "--jobs", "2")[1]
    d = run(capsys, *argv[:-1], "12")[1]
    assert a == b == c
    assert a != d


def test_config_file(capsys, tmp_path):
    cfg = write(tmp_path, "run.cfg",
                "# flat run file\nmode = float\nsample = 2\nseed = 4\nbind = t=1/10\n"
                "tol = verify=1e-9, project=1e-5\nformat = csv\n")
    via_file = run(capsys, "invariants", ELLIPSOID, "--config", cfg)[1]
    via_flags = run(capsys, "invariants", ELLIPSOID, "--mode", "float", "--sample", "2",
                    "--seed", "4", "--bind", "t=1/10", "--format", "csv")[1]
    assert via_file == via_flags
    # flags override the file
    out = run(capsys, "invariants", ELLIPSOID, "--config", cfg, "--format", "jsonl",
              "--sample", "1")[1]
    assert len(lines(out)) == 1


def test_output_file(capsys, tmp_path):
    dest = tmp_path / "out.jsonl"
    code, out, _ = run(capsys, "invariants", SPHERE, "--sample", "1", "-o", str(dest))
    assert code == EXIT_OK and out == ""
    assert json.loads(dest.read_text())["R"] == "2"


# -- verify ----------------------------------------------------------------------

def test_verify_complex_exact(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "complex")
    recs = lines(out)
    assert code == EXIT_OK
    assert all(r["residual"] == "0" for r in recs[:-1])
    assert recs[-1] == {"summary": "verify", "suite": "complex", "checks": 5, "failed": 0,
                        "ok": True}


def test_verify_gauge_float(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "gauge", "--mode", "float", "--sample", "2")
    assert code == EXIT_OK
    recs = lines(out)
    info = [r for r in recs if r.get("informational")]
    assert info and all(r["residual"] > 1e-3 for r in info)


def test_verify_tractor_sphere(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "tractor", "--sample", "2")
    assert code == EXIT_OK and lines(out)[-1]["ok"]


def test_verify_all_with_surface(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "all", "--sample", "1", "--mode", "float",
                       "--surface", "2*im(w) - abs2(z) - a*re(z)^4", "--bind", "a=1/2")
    assert code == EXIT_OK
    suites = {r["suite"] for r in lines(out)[:-1]}
    assert suites == {"structure", "bianchi", "complex", "tractor", "gauge"}


# -- scan ----------------------------------------------------------------------

def test_scan_ellipsoid(capsys):
    code, out, _ = run(capsys, "scan", ELL_AB, "--bind", "A=2", "--bind", "B=3",
                       "--sample", "3", "--seed", "2")
    assert code == EXIT_OK
    *rows, summary = lines(out)
    assert summary["Q11"] == 2 and summary["O"] == 2 and summary["t_dependence"]
    for r in rows:
        assert r["Q11"][1] == {"re": "0", "im": "0"} and r["O"][1] == {"re": "0", "im": "0"}


def test_scan_trivial_family(capsys, tmp_path):
    pts = write(tmp_path, "p.txt", "1 0 0 0\n3/5 0 4/5 0\n")
    code, out, _ = run(capsys, "scan", SPHERE + " + t*(abs2(z) + abs2(w) - 1)", "--points", pts,
                       "--t-order", "1")
    assert code == EXIT_OK
    summary = lines(out)[-1]
    assert summary["Q11"] is None and summary["O"] is None and not summary["t_dependence"]


def test_scan_bump(capsys, tmp_path):
    pts = write(tmp_path, "p.txt", "0 0 1 0\n")
    code, out, _ = run(capsys, "scan", SPHERE + " - t*abs2(z)^4", "--points", pts,
                       "--t-order", "1", "--order", "9")
    row, summary = lines(out)
    assert row["O"][1] == {"re": "32", "im": "0"}
    assert summary["O"] == 1


def test_scan_needs_t(capsys):
    code, _, err = run(capsys, "scan", SPHERE, "--sample", "1")
    assert code == EXIT_PARSE and "t" in err
    code, _, _ = run(capsys, "scan", ELLIPSOID, "--bind", "t=1", "--sample", "1")
    assert code == EXIT_PARSE


# -- symmetry ------------------------------------------------------------------

def test_symmetry_circle_domain(capsys, tmp_path):
    pts = write(tmp_path, "p.txt", "1 0 0 0\n0 1 0 0\n3/5 0 4/5 0\n0 3/5 0 4/5\n")
    code, out, _ = run(capsys, "symmetry", CIRCLE_DOMAIN, "0", "i*w", "--points", pts)
    recs = lines(out)
    assert code == EXIT_OK
    assert all(r["max"] <= 1e-6 and not r["above_threshold"] for r in recs)
    assert any(r["tangent_to_H"] for r in recs)
    assert any(r["kappa_max"] > 0 for r in recs)


def test_symmetry_sphere_rotation(capsys):
    code, out, _ = run(capsys, "symmetry", SPHERE, "i*z", "0", "--sample", "2")
    assert code == EXIT_OK
    assert all(r["max"] == 0 and r["kappa_max"] == 0 for r in lines(out))


def test_symmetry_non_symmetry_is_reported(capsys):
    code, out, _ = run(capsys, "symmetry", ELLIPSOID, "-im(z) + (6/5)*i*re(z)", "0",
                       "--bind", "t=1/10", "--sample", "2")
    assert code == EXIT_OK
    assert all(r["above_threshold"] for r in lines(out))


def test_symmetry_not_tangent(capsys):
    code, _, err = run(capsys, "symmetry", ELLIPSOID, "0", "i*w", "--bind", "t=1/10",
                       "--sample", "1")
    assert code == EXIT_GEOMETRY and "NotTangent" in err
