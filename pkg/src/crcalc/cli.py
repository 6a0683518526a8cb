"""Command-line front end.

    crcalc invariants SURFACE   per-point invariant reports
    crcalc verify --suite NAME  identity suites with per-check residuals
    crcalc scan FAMILY          t-jets of Q_11 and O for a family in t
    crcalc symmetry SURFACE XZ XW
                                prolonged symmetry residuals of X = XZ d_z + XW d_w + c.c.

Every flag can also be given in a flat ``key = value`` file passed with
``--config``; flags on the command line win.  Exit codes: 0 ok, 2 parse,
3 geometry, 4 verification failure.
"""

import argparse
import configparser
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import numpy as np

from .errors import (CRCalcError, ExprSyntaxError, GeometryError, NotOnSurface, NotTangent,
                     OrderExhausted, UnboundSymbol)
from .expr import eval_poly, expand, mentions_t, parse, to_jet
from .numeric import Gauss, Jet

__all__ = ["main", "RunConfig", "REPORT_SCHEMA", "sample_points", "read_points", "snap_point",
           "report_record", "EXIT_OK", "EXIT_PARSE", "EXIT_GEOMETRY", "EXIT_VERIFY"]

EXIT_OK, EXIT_PARSE, EXIT_GEOMETRY, EXIT_VERIFY = 0, 2, 3, 4

TOL_DEFAULTS = {"verify": 1e-8, "project": 1e-6, "jet": 1e-8, "symmetry": 1e-6, "zero": 1e-8}
SUITES = ("structure", "bianchi", "complex", "tractor", "gauge")

SPHERE = "1 - abs2(z) - abs2(w)"
ELLIPSOID = "1 - abs2(z) - abs2(w) - t*(2*re(z)^2 + 3*re(w)^2)"
GAUGE_UPSILONS = ("re(z)*im(w)", "abs2(w) + im(z)", "re(z^2)")

_NUM = {"anyOf": [{"type": "string", "pattern": r"^-?\d+(/\d+)?$"}, {"type": "number"}]}
_CPLX = {"type": "object", "properties": {"re": _NUM, "im": _NUM}, "required": ["re", "im"],
         "additionalProperties": False}

REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "point": {"type": "array", "items": _NUM, "minItems": 4, "maxItems": 4},
        "gauge": {"type": "string"},
        "R": _NUM,
        "A11": _CPLX,
        "Q11": _CPLX,
        "O": _CPLX,
        "bianchi_residual": _NUM,
        "extras": {"type": "object",
                   "properties": {"T1": _CPLX, "S": _NUM, "Y1": _CPLX},
                   "required": ["T1", "S", "Y1"], "additionalProperties": False},
    },
    "required": ["point", "gauge", "R", "A11", "Q11", "O", "bianchi_residual", "extras"],
    "additionalProperties": False,
}


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    mode: str = "exact"
    order: int = 10
    points: str = None
    sample: int = 5
    seed: int = 0
    bindings: dict = field(default_factory=dict)
    t_order: int = 2
    format: str = "jsonl"
    tol: dict = field(default_factory=lambda: dict(TOL_DEFAULTS))
    suite: str = "all"
    surface: str = None
    jobs: int = 1

    @property
    def exact(self):
        return self.mode == "exact"

    @property
    def t(self):
        return self.bindings.get("t")

    @property
    def params(self):
        return {k: v for k, v in self.bindings.items() if k != "t"}


def _pairs(items, what):
    out = {}
    for item in items:
        for part in item.split(","):
            part = part.strip()
            if not part:
                continue
            key, sep, val = part.partition("=")
            if not sep:
                raise ValueError(f"{what} entry {part!r} is not name=value")
            out[key.strip()] = val.strip()
    return out


def load_config_file(path):
    """Read a flat ``key = value`` file; keys are flag names without dashes."""
    with open(path) as fh:
        text = fh.read()
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    cp.optionxform = str
    cp.read_string("[run]\n" + text)
    return {k.replace("_", "-"): v for k, v in cp["run"].items()}


def resolve_config(args):
    """Merge builtin defaults, the config file and the flags, in that order."""
    fileopts = load_config_file(args.config) if args.config else {}
    cfg = RunConfig()

    def pick(name, conv):
        val = getattr(args, name.replace("-", "_"), None)
        if val is None and name in fileopts:
            val = fileopts[name]
        return conv(val) if val is not None else None

    for name, attr, conv in (("mode", "mode", str), ("order", "order", int),
                             ("points", "points", str), ("sample", "sample", int),
                             ("seed", "seed", int), ("t-order", "t_order", int),
                             ("format", "format", str), ("suite", "suite", str),
                             ("surface", "surface", str), ("jobs", "jobs", int)):
        val = pick(name, conv)
        if val is not None:
            setattr(cfg, attr, val)
    if cfg.mode not in ("exact", "float"):
        raise ValueError(f"mode must be exact or float, got {cfg.mode!r}")
    if cfg.format not in ("jsonl", "csv"):
        raise ValueError(f"format must be jsonl or csv, got {cfg.format!r}")
    binds = _pairs([fileopts["bind"]] if "bind" in fileopts else [], "bind")
    binds.update(_pairs(args.bind or [], "bind"))
    cfg.bindings = {k: _number(v, cfg.exact) for k, v in binds.items()}
    tols = _pairs([fileopts["tol"]] if "tol" in fileopts else [], "tol")
    tols.update(_pairs(args.tol or [], "tol"))
    for k, v in tols.items():
        if k not in TOL_DEFAULTS:
            raise ValueError(f"unknown tolerance {k!r}; known: {', '.join(TOL_DEFAULTS)}")
        cfg.tol[k] = float(v)
    return cfg


def _number(text, exact):
    q = Fraction(text.strip())
    return q if exact else float(q)


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------

def read_points(path, exact=True):
    """One point per line: four reals (decimal or p/q), comma or space separated."""
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.replace(",", " ").split()
            if len(toks) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 coordinates, got {len(toks)}")
            out.append(tuple(_number(t, exact) for t in toks))
    return out


def _rho_float(poly, x, t):
    j = to_jet(poly, x, 1, t=t, exact=False)
    grad = np.array([j.coeff(tuple(1 if m == k else 0 for m in range(4))).real
                     for k in range(4)])
    return complex(j.constant_term()).real, grad


def project(poly, x, t=None, tol=1e-13, steps=60):
    """Newton steps along the gradient until rho(x) = 0 to ``tol``."""
    x = np.asarray([float(c) for c in x])
    tf = None if t is None else float(t)
    for _ in range(steps):
        r, g = _rho_float(poly, x, tf)
        gg = float(g @ g)
        if gg == 0:
            raise GeometryError("gradient vanishes during projection")
        if abs(r) <= tol * max(1.0, np.sqrt(gg)):
            return x
        x = x - r * g / gg
    raise GeometryError("projection to the surface did not converge")


def _restrict(poly, p0, d, t):
    """Coefficients of s -> rho(p0 + s d) for exact rational p0 and d."""
    deg = max(poly.degree(), 1)
    s = Jet.variable(0, 1, deg, True, (Fraction(0),), Fraction(0))
    z = s.scale(Gauss(d[0], d[1])) + s.like(Gauss(p0[0], p0[1]))
    w = s.scale(Gauss(d[2], d[3])) + s.like(Gauss(p0[2], p0[3]))
    j = eval_poly(poly, (z, z.conj(), w, w.conj()), Fraction(t or 0))
    coeffs = [j.coeff((n,)).re for n in range(deg + 1)]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _qsqrt(q):
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    return Fraction(a, b) if a * a == q.numerator and b * b == q.denominator else None


def _rational_roots(c, near):
    """Rational roots of sum c[n] s^n, closest to ``near`` first."""
    n = len(c) - 1
    if n < 1:
        return []
    if n == 1:
        roots = [-c[0] / c[1]]
    elif n == 2:
        r = _qsqrt(c[1] * c[1] - 4 * c[2] * c[0])
        roots = [] if r is None else [(-c[1] + r) / (2 * c[2]), (-c[1] - r) / (2 * c[2])]
    else:
        roots = []
        for z in np.roots([float(x) for x in reversed(c)]):
            if abs(z.imag) > 1e-9:
                continue
            for den in (10, 100, 1000, 10000):
                q = Fraction(z.real).limit_denominator(den)
                if sum(cn * q ** k for k, cn in enumerate(c)) == 0:
                    roots.append(q)
                    break
    return sorted(set(roots), key=lambda q: abs(float(q) - near))


def _anchor(poly, t):
    """A rational point of the surface on a coordinate axis, if there is one."""
    if _restrict(poly, (0,) * 4, (0,) * 4, t)[0] == 0:
        return (Fraction(0),) * 4
    for k in range(4):
        d = tuple(Fraction(int(m == k)) for m in range(4))
        roots = _rational_roots(_restrict(poly, (0,) * 4, d, t), 1.0)
        if roots:
            return tuple(roots[0] * x for x in d)
    return None


def snap_point(poly, x, t=None, den=100, anchor=None, chord_den=12):
    """A rational point with rho = 0 exactly, close to the float point ``x``.

    First one coordinate is solved for with the other three rounded; then
    the chord through a rational anchor point in a rounded direction is
    tried, which always succeeds on quadrics.
    """
    x = [float(c) for c in x]
    q = [Fraction(c).limit_denominator(den) for c in x]
    _, g = _rho_float(poly, x, None if t is None else float(t))
    for k in sorted(range(4), key=lambda m: -abs(g[m])):
        d = tuple(Fraction(int(m == k)) for m in range(4))
        base = tuple(Fraction(0) if m == k else q[m] for m in range(4))
        roots = _rational_roots(_restrict(poly, base, d, t), x[k])
        if roots and abs(float(roots[0]) - x[k]) < 1e-2:
            return tuple(roots[0] if m == k else q[m] for m in range(4))
    anchor = _anchor(poly, t) if anchor is None else anchor
    if anchor is not None:
        d = tuple(Fraction(c - float(a)).limit_denominator(chord_den)
                  for c, a in zip(x, anchor))
        if any(d):
            c = _restrict(poly, anchor, d, t)[1:]
            for s in _rational_roots(c, 1.0):
                if s != 0:
                    return tuple(a + s * di for a, di in zip(anchor, d))
    raise NotOnSurface(f"no exact rational point found near {tuple(round(c, 6) for c in x)}; "
                       "pass --points or use --mode float")


def sample_points(poly, k, seed, exact=True, t=None):
    """``k`` seeded points: normalized Gaussians projected onto the surface."""
    rng = np.random.default_rng(seed)
    out = []
    anchor = _anchor(poly, t) if exact else None
    tries = 0
    while len(out) < k:
        tries += 1
        if tries > 50 * k:
            raise GeometryError(f"could only sample {len(out)} of {k} points")
        g = rng.normal(size=4)
        x = project(poly, g / np.linalg.norm(g), t)
        p = snap_point(poly, x, t, anchor=anchor) if exact else tuple(float(c) for c in x)
        if p not in out:
            out.append(p)
    return out


def _check_point(poly, p, cfg):
    """Accept, project or reject a user-supplied point."""
    r, _ = _rho_float(poly, [float(c) for c in p], None if cfg.t is None else float(cfg.t))
    if cfg.exact:
        if _restrict(poly, p, (0,) * 4, cfg.t)[0] == 0:
            return tuple(Fraction(c) for c in p)
        if abs(r) > cfg.tol["project"]:
            raise NotOnSurface(f"rho = {r:.3g} at {p}")
        return snap_point(poly, project(poly, p, cfg.t), cfg.t)
    if abs(r) > cfg.tol["project"]:
        raise NotOnSurface(f"rho = {r:.3g} at {p}")
    return tuple(float(c) for c in project(poly, p, cfg.t))


def resolve_points(poly, cfg):
    if cfg.points:
        return [_check_point(poly, p, cfg) for p in read_points(cfg.points, cfg.exact)]
    return sample_points(poly, cfg.sample, cfg.seed, cfg.exact, cfg.t)


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------

def _real(x):
    if isinstance(x, Gauss):
        x = x.re
    if isinstance(x, (Fraction, int)):
        return str(Fraction(x))
    return float(np.real(x))


def _cplx(x):
    if isinstance(x, Gauss):
        return {"re": _real(x.re), "im": _real(x.im)}
    x = complex(x)
    return {"re": x.real, "im": x.imag}


def _resid(x):
    return _real(x) if isinstance(x, Fraction) else float(x)


def report_record(rep):
    return {"point": [_real(c) for c in rep.point], "gauge": rep.gauge, "R": _real(rep.R),
            "A11": _cplx(rep.A11), "Q11": _cplx(rep.Q11), "O": _cplx(rep.O),
            "bianchi_residual": _real(rep.bianchi_residual),
            "extras": {"T1": _cplx(rep.T1), "S": _real(rep.S), "Y1": _cplx(rep.Y1)}}


def _flatten(rec, prefix=""):
    out = {}
    for k, v in rec.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "_"))
        elif isinstance(v, list):
            for i, x in enumerate(v):
                if isinstance(x, dict):
                    out.update(_flatten(x, f"{key}_{i}_"))
                else:
                    out[f"{key}_{i}"] = x
        else:
            out[key] = v
    return out


def emit(records, fmt, stream):
    if fmt == "jsonl":
        for r in records:
            stream.write(json.dumps(r, separators=(",", ":")) + "\n")
        return
    rows = [_flatten(r) for r in records]
    cols = []
    for r in rows:
        cols.extend(c for c in r if c not in cols)
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    wr.writeheader()
    wr.writerows(rows)
    stream.write(buf.getvalue())


def _map(fn, items, jobs):
    """Ordered map, in worker processes when ``jobs`` > 1."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _poly(text, cfg):
    return expand(parse(text), cfg.params)


def _invariants_one(job):
    from .invariants import invariant_report
    text, bp, cfg = job
    rep = invariant_report(_poly(text, cfg), bp, order=cfg.order, mode=cfg.mode,
                           bindings=cfg.params, t=cfg.t, tol=cfg.tol["jet"])
    return report_record(rep)


def cmd_invariants(args, cfg, out):
    poly = _poly(args.surface, cfg)
    pts = resolve_points(poly, cfg)
    emit(_map(_invariants_one, [(args.surface, p, cfg) for p in pts], cfg.jobs), cfg.format, out)
    return EXIT_OK


def _scan_one(job):
    from .invariants import family_scan
    text, bp, cfg = job
    res = family_scan(_poly(text, cfg), [bp], t_order=cfg.t_order,
                      order=max(cfg.order, 8 + cfg.t_order), mode=cfg.mode,
                      bindings=cfg.params, tol=cfg.tol["jet"])
    return res


def cmd_scan(args, cfg, out):
    from .invariants import FamilyScanResult
    if not mentions_t(parse(args.family)):
        raise ExprSyntaxError("family does not mention t", 0, ("t",))
    if "t" in cfg.bindings:
        raise ValueError("t is the scan parameter and cannot be bound")
    poly = _poly(args.family, cfg)
    base = RunConfig(**{**cfg.__dict__, "bindings": {**cfg.bindings, "t": Fraction(0)}})
    pts = resolve_points(poly, base)
    parts = _map(_scan_one, [(args.family, p, cfg) for p in pts], cfg.jobs)
    res = FamilyScanResult("t", cfg.t_order, [], [], [], [])
    for r in parts:
        res.points += r.points
        res.Q11 += r.Q11
        res.O += r.O
        res.gauge += r.gauge
    recs = [{"point": [_real(c) for c in p], "gauge": g, "Q11": [_cplx(c) for c in q],
             "O": [_cplx(c) for c in o]}
            for p, g, q, o in zip(res.points, res.gauge, res.Q11, res.O)]
    ztol = 0.0 if cfg.exact else cfg.tol["zero"]
    first = {k: res.first_nonvanishing(k, ztol) for k in ("Q11", "O")}
    summary = {"summary": "first nonvanishing t-order",
               "Q11": first["Q11"], "O": first["O"],
               "t_dependence": any(v is not None for v in first.values())}
    if cfg.format == "jsonl":
        emit(recs + [summary], "jsonl", out)
    else:
        emit(recs, "csv", out)
        out.write(f"# summary: Q11 first order {first['Q11']}, O first order {first['O']}\n")
    return EXIT_OK


def _symmetry_one(job):
    from .pseudohermitian import Hypersurface, build_coframe
    from .tractor import symmetry_residual, tractor_curvature
    text, field_, bp, cfg = job
    hs = Hypersurface(_poly(text, cfg), bp, order=cfg.order, mode=cfg.mode,
                      bindings=cfg.params, t=cfg.t, tol=cfg.tol["jet"])
    ph = build_coframe(hs)
    curv = tractor_curvature(ph)
    r = symmetry_residual(field_, ph, curv)
    per = r.at_point()
    return {"point": [_real(c) for c in bp], "gauge": ph.chart.gauge,
            "residual": {d: float(v) for d, v in per.items()}, "max": float(r.max),
            "kappa_max": float(curv.k10.value_max_abs()),
            "tangent_to_H": bool(r.tangent_to_H),
            "above_threshold": bool(r.max > cfg.tol["symmetry"])}


def cmd_symmetry(args, cfg, out):
    poly = _poly(args.surface, cfg)
    field_ = (args.xz, args.xw)
    for f in field_:
        parse(f)
    pts = resolve_points(poly, cfg)
    recs = _map(_symmetry_one, [(args.surface, field_, p, cfg) for p in pts], cfg.jobs)
    emit(recs, cfg.format, out)
    return EXIT_OK


def cmd_verify(args, cfg, out):
    from .suites import run_suite
    names = SUITES if cfg.suite == "all" else (cfg.suite,)
    if any(n not in SUITES for n in names):
        raise ValueError(f"unknown suite {cfg.suite!r}; known: {', '.join(SUITES + ('all',))}")
    checks = []
    for name in names:
        checks.extend(run_suite(name, cfg))
    failed = sum(1 for c in checks if not c["pass"])
    recs = checks + [{"summary": "verify", "suite": cfg.suite, "checks": len(checks),
                      "failed": failed, "ok": failed == 0}]
    if cfg.format == "jsonl":
        emit(recs, "jsonl", out)
    else:
        emit(checks, "csv", out)
    return EXIT_OK if failed == 0 else EXIT_VERIFY


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file mirroring the flags")
    common.add_argument("--mode", choices=("exact", "float"))
    common.add_argument("--order", type=int, help="jet order N")
    src = common.add_mutually_exclusive_group()
    src.add_argument("--points", help="file with one basepoint per line")
    src.add_argument("--sample", type=int, help="number of seeded sample points")
    common.add_argument("--seed", type=int)
    common.add_argument("--bind", action="append", metavar="NAME=VALUE",
                        help="bind a parameter (repeatable); t=value fixes the family parameter")
    common.add_argument("--t-order", type=int, dest="t_order")
    common.add_argument("--format", choices=("jsonl", "csv"))
    common.add_argument("--tol", action="append", metavar="KEY=VALUE",
                        help=f"tolerance override; keys: {', '.join(TOL_DEFAULTS)}")
    common.add_argument("--jobs", type=int, help="worker processes (output order is fixed)")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    p = argparse.ArgumentParser(prog="crcalc", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("invariants", parents=[common], help="per-point invariant reports")
    s.add_argument("surface", help="real defining function in z, w")
    s.set_defaults(run=cmd_invariants)
    s = sub.add_parser("verify", parents=[common], help="run identity suites")
    s.add_argument("--suite", help=f"one of {', '.join(SUITES)}, all")
    s.add_argument("--surface", help="defining function for the jet suites")
    s.set_defaults(run=cmd_verify)
    s = sub.add_parser("scan", parents=[common], help="t-jets of a family")
    s.add_argument("family", help="defining function in z, w and t")
    s.set_defaults(run=cmd_scan)
    s = sub.add_parser("symmetry", parents=[common], help="symmetry residuals")
    s.add_argument("surface")
    s.add_argument("xz", help="d_z component of the vector field")
    s.add_argument("xw", help="d_w component of the vector field")
    s.set_defaults(run=cmd_symmetry)
    return p


def _fail(code, msg):
    print(f"crcalc: {msg}", file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    for name in ("suite", "surface"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        cfg = resolve_config(args)
        if args.output:
            with open(args.output, "w", newline="") as fh:
                return args.run(args, cfg, fh)
        return args.run(args, cfg, sys.stdout)
    except ExprSyntaxError as e:
        return _fail(EXIT_PARSE, f"parse error: {e}")
    except UnboundSymbol as e:
        return _fail(EXIT_PARSE, f"parse error: {e}; bind it with --bind")
    except (NotTangent, GeometryError) as e:
        return _fail(EXIT_GEOMETRY, f"geometry error ({type(e).__name__}): {e}")
    except OrderExhausted as e:
        return _fail(EXIT_PARSE, f"{e}; raise --order")
    except (ValueError, OSError) as e:
        return _fail(EXIT_PARSE, str(e))
    except CRCalcError as e:
        return _fail(EXIT_VERIFY, f"{type(e).__name__}: {e}")


if __name__ == "__main__":
    sys.exit(main())
