"""Standard and adjoint tractors over a pseudohermitian pack.

Relative to a contact form a standard tractor is a column
``(sigma, mu^1, rho)`` with component types

    sigma : (0, 0; 0, 1)     mu^1 : (-1, 0; -1, 0)     rho : (0, 0; -1, 0)

and an adjoint tractor is a trace-free 3x3 matrix acting on columns that is
skew-Hermitian for ``h_AB = antidiag(1, h, 1)``.  The connection is written

    nabla_d v = D_d v + G_d v,        nabla_d s = D_d s + G_d s - s G_d

where ``D`` is the Tanaka-Webster derivative coupled to any extra indices
already carried by ``v``.  Curvature is obtained by applying the defining
commutators to the three basis tractors.
"""

from fractions import Fraction

from .errors import NotTangent, WeightError
from .numeric import Gauss
from .pseudohermitian import (TensorField, _weight_factor, apply_vec, pair,
                              upsilon_field, PHData)
from .sphere import SphereTensor, integrate
from .weights import SCALAR, TensorType, norm_dir

__all__ = ["Tractor", "TractorMatrix", "AdjointTractor", "CurvatureComponent", "SLOTS",
           "connection_matrix", "tractor_connection", "adjoint_connection", "tractor_metric",
           "tractor_transform", "gauge_consistency", "tractor_curvature", "y1_field",
           "bgg_split", "symmetry_residual", "SymmetryResidual", "obstruction_divergence",
           "symmetry_integral", "skew_hermitian_residual"]

SIGMA = TensorType(0, 0, 0, 1)
MU = TensorType(-1, 0, -1, 0)
RHO = TensorType(0, 0, -1, 0)
SLOTS = (SIGMA, MU, RHO)

EXTRA = {"1": TensorType(1, 0, 0, 0), "1b": TensorType(0, 1, 0, 0), "0": TensorType(0, 0, -1, -1)}


def _iu(ph):
    return Gauss(0, 1) if ph.exact else 1j


def _q(ph, n, d):
    return Fraction(n, d) if ph.exact else n / d


def _const(ph, c, ttype):
    return TensorField(ph.h.like(c), ttype, ph)


class Tractor:
    """A standard tractor, possibly carrying extra (form) indices."""

    __slots__ = ("comps",)

    def __init__(self, sigma, mu, rho):
        self.comps = (sigma, mu, rho)
        ex = self.extra
        for c, slot in zip(self.comps, SLOTS):
            if c.ttype != slot + ex:
                raise WeightError(f"tractor slot has type {c.ttype}, expected {slot + ex}")

    @classmethod
    def from_jets(cls, ph, sigma, mu, rho, extra=SCALAR):
        return cls(*(TensorField(j, s + extra, ph) for j, s in zip((sigma, mu, rho), SLOTS)))

    @classmethod
    def basis(cls, ph, k):
        return cls.from_jets(ph, *(ph.h.like(1 if m == k else 0) for m in range(3)))

    @property
    def ph(self):
        return self.comps[0].ph

    @property
    def extra(self):
        return self.comps[0].ttype - SIGMA

    @property
    def sigma(self):
        return self.comps[0]

    @property
    def mu(self):
        return self.comps[1]

    @property
    def rho(self):
        return self.comps[2]

    def __getitem__(self, k):
        return self.comps[k]

    def __add__(self, other):
        return Tractor(*(a + b for a, b in zip(self.comps, other.comps)))

    def __sub__(self, other):
        return Tractor(*(a - b for a, b in zip(self.comps, other.comps)))

    def __neg__(self):
        return Tractor(*(-a for a in self.comps))

    def scale(self, c):
        return Tractor(*(a.scale(c) for a in self.comps))

    def times(self, f):
        """Multiply every slot by the TensorField ``f``."""
        return Tractor(*(f * a for a in self.comps))

    def D(self, direction):
        return tractor_connection(direction, self)

    def values(self):
        return tuple(c.value() for c in self.comps)

    def max_abs(self):
        return max(c.jet.max_abs() for c in self.comps)

    def __repr__(self):
        return f"Tractor{self.values()} extra {self.extra}"


class TractorMatrix:
    """A 3x3 matrix of TensorFields acting on standard tractors.

    Entry ``(r, c)`` has type ``SLOTS[r] - SLOTS[c] + extra``.
    """

    __slots__ = ("rows", "extra", "ph")

    def __init__(self, rows, extra, ph):
        self.rows = [list(r) for r in rows]
        self.extra = extra
        self.ph = ph
        for r in range(3):
            for c in range(3):
                want = SLOTS[r] - SLOTS[c] + extra
                if self.rows[r][c].ttype != want:
                    raise WeightError(f"entry ({r + 1},{c + 1}) has type "
                                      f"{self.rows[r][c].ttype}, expected {want}")

    @classmethod
    def build(cls, ph, entries, extra=SCALAR):
        """From a sparse dict ``{(r, c): TensorField}``; other entries are zero."""
        rows = [[entries.get((r, c)) or _const(ph, 0, SLOTS[r] - SLOTS[c] + extra)
                 for c in range(3)] for r in range(3)]
        return cls(rows, extra, ph)

    @classmethod
    def from_columns(cls, cols, extra):
        """From tractors ``cols[c]`` = image of basis tractor c."""
        ph = cols[0].ph
        rows = [[TensorField(cols[c][r].jet, SLOTS[r] - SLOTS[c] + extra, ph) for c in range(3)]
                for r in range(3)]
        return cls(rows, extra, ph)

    def __getitem__(self, rc):
        r, c = rc
        return self.rows[r][c]

    def _zip(self, other, op):
        return TractorMatrix([[op(a, b) for a, b in zip(ra, rb)]
                              for ra, rb in zip(self.rows, other.rows)], self.extra, self.ph)

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return self.map(lambda a: -a, self.extra)

    def map(self, fn, extra):
        return TractorMatrix([[fn(a) for a in r] for r in self.rows], extra, self.ph)

    def scale(self, c):
        return self.map(lambda a: a.scale(c), self.extra)

    def times(self, f):
        return self.map(lambda a: f * a, self.extra + f.ttype)

    def up(self):
        """Contract a trailing lower 1bar (or 1) index with h^{1 1bar}."""
        return self.map(self.ph.up, self.extra + TensorType(-1, -1, -1, -1))

    def __matmul__(self, other):
        if isinstance(other, Tractor):
            out = []
            for r in range(3):
                acc = None
                for c in range(3):
                    term = self.rows[r][c] * other[c]
                    acc = term if acc is None else acc + term
                out.append(acc)
            return Tractor(*out)
        rows = []
        for r in range(3):
            row = []
            for c in range(3):
                acc = None
                for k in range(3):
                    term = self.rows[r][k] * other.rows[k][c]
                    acc = term if acc is None else acc + term
                row.append(acc)
            rows.append(row)
        return TractorMatrix(rows, self.extra + other.extra, self.ph)

    def D(self, direction):
        return adjoint_connection(direction, self)

    def trace(self):
        return self.rows[0][0].jet + self.rows[1][1].jet + self.rows[2][2].jet

    def values(self):
        return [[a.value() for a in r] for r in self.rows]

    def max_abs(self):
        return max(a.jet.max_abs() for r in self.rows for a in r)

    def value_max_abs(self):
        return max(abs(complex(a.value())) for r in self.rows for a in r)

    def nonzero_slots(self, tol=0.0):
        """Positions (1-based) whose jets exceed ``tol``."""
        return [(r + 1, c + 1) for r in range(3) for c in range(3)
                if self.rows[r][c].jet.max_abs() > tol]

    def __repr__(self):
        return f"TractorMatrix({self.values()}, extra {self.extra})"


# ---------------------------------------------------------------------------
# connection
# ---------------------------------------------------------------------------

def _pack(ph):
    cache = getattr(ph, "_tractor_pack", None)
    if cache is None:
        A = ph.A11
        T1b = ph.T1.conj()
        cache = {"A_1b^1": ph.up(A.conj()), "A^1b_1": ph.up(A), "T1b": T1b,
                 "T^1": ph.up(T1b), "Rh": ph.R * ph.Hfield}
        ph._tractor_pack = cache
    return cache


def connection_matrix(ph, direction):
    """G_d with nabla_d v = D_d v + G_d v."""
    d = norm_dir(direction)
    iu = _iu(ph)
    q = lambda n, m: _q(ph, n, m)
    P = _pack(ph)
    R, A, T1, S = ph.R, ph.A11, ph.T1, ph.S
    if d == "1":
        e = {(1, 0): R.scale(q(1, 4)), (1, 2): _const(ph, 1, SCALAR),
             (2, 0): -T1, (2, 1): A.scale(-iu)}
    elif d == "1b":
        e = {(0, 1): -ph.Hfield, (1, 0): P["A_1b^1"].scale(-iu), (2, 0): P["T1b"],
             (2, 1): P["Rh"].scale(-q(1, 4))}
    else:
        e = {(0, 0): R.scale(-iu * q(1, 12)), (0, 2): _const(ph, iu, SCALAR),
             (1, 0): P["T^1"].scale(-2 * iu), (1, 1): R.scale(iu * q(1, 6)),
             (2, 0): S.scale(-iu), (2, 1): T1.scale(-2 * iu), (2, 2): R.scale(-iu * q(1, 12))}
    return TractorMatrix.build(ph, e, EXTRA[d])


def tractor_connection(direction, v, ph=None):
    """nabla_d of a standard tractor (coupled to its extra indices)."""
    d = norm_dir(direction)
    ph = v.ph if ph is None else ph
    G = connection_matrix(ph, d)
    Gv = G @ v
    return Tractor(*(c.D(d) + g for c, g in zip(v.comps, Gv.comps)))


def adjoint_connection(direction, s):
    """nabla_d of a tractor endomorphism: D_d s + G_d s - s G_d."""
    d = norm_dir(direction)
    G = connection_matrix(s.ph, d)
    Ds = s.map(lambda a: a.D(d), s.extra + EXTRA[d])
    return Ds + (G @ s) - (s @ G)


def tractor_metric(v, w):
    """h(v, w) = sigma conj(rho') + rho conj(sigma') + h mu^1 conj(mu'^1)."""
    ph = v.ph
    return (v.sigma * w.rho.conj() + v.rho * w.sigma.conj()
            + ph.Hfield * v.mu * w.mu.conj())


def skew_hermitian_residual(s, partner=None):
    """Max jet size of M^T H + H conj(P) and of the trace of M.

    ``P`` defaults to ``M``.  For a derivative in a complex direction pass
    the derivative in the conjugate direction as ``partner``: nabla_1 s and
    nabla_1bar s together form the derivative along real vectors.
    """
    h = s.ph.h
    P = s if partner is None else partner
    M = [[a.jet for a in r] for r in s.rows]
    N = [[a.jet.conj() for a in r] for r in P.rows]
    worst = s.trace().max_abs()
    for i in range(3):
        for j in range(3):
            lhs = M[2 - j][i] * h if j == 1 else M[2 - j][i]
            rhs = N[2 - i][j] * h if i == 1 else N[2 - i][j]
            worst = max(worst, (lhs + rhs).max_abs())
    return worst


# ---------------------------------------------------------------------------
# change of contact form
# ---------------------------------------------------------------------------

def tractor_transform(v, Y, target=None):
    """Components of ``v`` relative to ``e^Y theta``.

    ``Y`` is a scalar TensorField on ``v.ph``; the result lives on
    ``target`` (the rescaled pack) when given.
    """
    ph = v.ph
    target = ph if target is None else target
    iu = _iu(ph)
    half = _q(ph, 1, 2)
    Y1 = Y.D("1")
    Yu1 = ph.up(Y.D("1b"))
    Y0 = Y.D("0")
    sig = v.sigma
    mu = v.mu + Yu1 * v.sigma
    rho = v.rho - Y1 * v.mu - ((Yu1 * Y1) - Y0.scale(iu)).scale(half) * v.sigma
    out = []
    for c in (sig, mu, rho):
        f = _weight_factor(Y, c.ttype.scaling())
        out.append(TensorField(f * c.jet, c.ttype, target))
    return Tractor(*out)


def gauge_consistency(v, Y, ph_hat=None):
    """Residuals of nabla-hat(v-hat) against the transformed nabla v, per direction."""
    ph = v.ph
    if ph_hat is None:
        theta_hat = tuple(Y.jet.exp() * c for c in ph.theta)
        ph_hat = PHData(ph.chart, theta_hat)
    iu = _iu(ph)
    vh = tractor_transform(v, Y, ph_hat)
    d1, d1b, d0 = (tractor_connection(d, v) for d in ("1", "1b", "0"))
    Yu1 = ph.up(Y.D("1b"))
    Yu1b = ph.up(Y.D("1"))
    d0_new = d0 - d1.times(Yu1).scale(iu) + d1b.times(Yu1b).scale(iu)
    out = {}
    for d, old in (("1", d1), ("1b", d1b), ("0", d0_new)):
        want = tractor_transform(old, Y, ph_hat)
        got = tractor_connection(d, vh, ph_hat)
        out[d] = (got - want).max_abs()
    return out


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

class CurvatureComponent:
    """kappa_{1 1bar}, kappa_{10}, kappa_{1bar 0} as TractorMatrix values."""

    def __init__(self, k11b, k10, k1b0):
        self.k11b = k11b
        self.k10 = k10
        self.k1b0 = k1b0

    @property
    def Y1(self):
        return self.k10[2, 0]

    @property
    def Q11(self):
        iu = _iu(self.k10.ph)
        return self.k10[2, 1].scale(-iu)

    def max_abs(self):
        return {"11b": self.k11b.max_abs(), "10": self.k10.max_abs(),
                "1b0": self.k1b0.max_abs()}


def _k11b(v):
    ph = v.ph
    n1, n1b, n0 = (tractor_connection(d, v) for d in ("1", "1b", "0"))
    return (tractor_connection("1", n1b) - tractor_connection("1b", n1)
            + n0.times(ph.Hfield).scale(_iu(ph)))


def _k10(v, bar=False):
    ph = v.ph
    a, b = ("1b", "1") if bar else ("1", "1b")
    na, nb, n0 = (tractor_connection(d, v) for d in (a, b, "0"))
    P = _pack(ph)
    coef = P["A_1b^1"] if bar else P["A^1b_1"]
    return tractor_connection(a, n0) - tractor_connection("0", na) - nb.times(coef)


def tractor_curvature(ph):
    """Curvature components assembled from the commutators on a basis."""
    basis = [Tractor.basis(ph, k) for k in range(3)]
    k11b = TractorMatrix.from_columns([_k11b(e) for e in basis], TensorType(1, 1, 0, 0))
    k10 = TractorMatrix.from_columns([_k10(e) for e in basis], TensorType(1, 0, -1, -1))
    k1b0 = TractorMatrix.from_columns([_k10(e, bar=True) for e in basis],
                                      TensorType(0, 1, -1, -1))
    return CurvatureComponent(k11b, k10, k1b0)


def y1_field(ph):
    """Y_1 = -i nabla_1 S + nabla_0 T_1 + i/2 R T_1 - 3 A_11 T^1."""
    iu = _iu(ph)
    Tu = _pack(ph)["T^1"]
    return (ph.S.D("1").scale(-iu) + ph.T1.D("0") + (ph.R * ph.T1).scale(iu * _q(ph, 1, 2))
            - (ph.A11 * Tu).scale(3))


def obstruction_divergence(ph, curv=None):
    """nabla^1 kappa_{10} as a TractorMatrix; its (3,1) entry is -i X."""
    curv = tractor_curvature(ph) if curv is None else curv
    return adjoint_connection("1b", curv.k10).up()


# ---------------------------------------------------------------------------
# adjoint tractors and symmetries
# ---------------------------------------------------------------------------

class AdjointTractor:
    """An adjoint tractor with its named slots and matrix."""

    def __init__(self, mu, upsilon1, u, nu1, lam):
        ph = u.ph
        iu = _iu(ph)
        self.mu, self.upsilon1, self.u, self.nu1, self.lam = mu, upsilon1, u, nu1, lam
        ups_up = ph.up(upsilon1.conj())
        nu_low = ph.down(nu1.conj())
        im_mu = TensorField(mu.jet.imag(), mu.ttype, ph)
        self.matrix = TractorMatrix.build(ph, {
            (0, 0): mu, (0, 1): upsilon1, (0, 2): u.scale(iu),
            (1, 0): nu1, (1, 1): im_mu.scale(-2 * iu), (1, 2): -ups_up,
            (2, 0): lam.scale(iu), (2, 1): -nu_low, (2, 2): -mu.conj()})

    def D(self, direction):
        return adjoint_connection(direction, self.matrix)


def bgg_split(u, ph=None):
    """L u for a real density ``u`` of weight (1,1) (a TensorField or jet)."""
    if not isinstance(u, TensorField):
        u = TensorField(u, TensorType(0, 0, 1, 1), ph)
    ph = u.ph
    if u.ttype != TensorType(0, 0, 1, 1):
        raise WeightError(f"L acts on weight (1,1) densities, got {u.ttype}")
    iu = _iu(ph)
    q = lambda n, m: _q(ph, n, m)
    R, S, T1 = ph.R, ph.S, ph.T1
    P = _pack(ph)
    Tu = P["T^1"]
    Aup = ph.up(ph.up(ph.A11.conj()))
    ups = u.D("1").scale(iu)
    ups_up = ph.up(ups.conj())
    mu = (u.D("0") - ph.up(ups.D("1b")) - (u * R).scale(iu * q(1, 4))).scale(q(1, 3))
    mub = mu.conj()
    nu = (ups_up.D("0").scale(iu) + ph.up(mu.D("1b")).scale(2) - ph.up(mub.D("1b"))
          + (Aup * ups).scale(2 * iu) - (u * Tu).scale(3 * iu)).scale(q(1, 3))
    nu_low = ph.down(nu.conj())
    re_mu = TensorField(mu.jet.real(), mu.ttype, ph)
    im_mu = TensorField(mu.jet.imag(), mu.ttype, ph)
    lam = (re_mu.D("0").scale(2 * iu) + ph.up(nu_low.D("1b")) - nu.D("1")
           - (R * im_mu).scale(iu * q(3, 2)) + (ups_up * T1 - ups * Tu).scale(3)
           - (S * u).scale(2 * iu))
    lam = lam.scale(1 / (4 * iu) if not ph.exact else Gauss(0, Fraction(-1, 4)))
    return AdjointTractor(mu, ups, u, nu, lam)


class SymmetryResidual:
    """Per-direction residual matrices of nabla(L u) + X -| kappa."""

    def __init__(self, residuals, u, X1, tangent_to_H):
        self.residuals = residuals
        self.u = u
        self.X1 = X1
        self.tangent_to_H = tangent_to_H

    def at_point(self):
        return {d: m.value_max_abs() for d, m in self.residuals.items()}

    @property
    def max(self):
        return max(self.at_point().values())

    def __repr__(self):
        return f"SymmetryResidual(max={self.max:.3g}, tangent_to_H={self.tangent_to_H})"


def _chart_vector(ph, X):
    chart = ph.chart
    xz, xw = (chart.pullback(c) for c in X)
    amb = [xz.real(), xz.imag(), xw.real(), xw.imag()]
    s = chart.solve_var
    vec = tuple(amb[k] for k in range(4) if k != s)
    miss = apply_vec(vec, chart.x[s]) - amb[s]
    tol = ph.tol
    if (miss.max_abs() != 0) if ph.exact else (miss.max_abs() > tol * max(1.0, xz.max_abs(),
                                                                            xw.max_abs())):
        raise NotTangent(f"vector field is not tangent to the hypersurface "
                         f"(residual {float(miss.max_abs()):.3g})")
    return vec


def symmetry_residual(X, ph, curv=None):
    """Residual of the prolonged symmetry equation for X = Xz d_z + Xw d_w + c.c.

    ``X`` is a pair of expressions ``(Xz, Xw)``.  The residual in direction
    1 is nabla_1 s - u kappa_10, in 1bar nabla_1bar s - u kappa_1bar0, and
    in 0 nabla_0 s + X^1 kappa_10 + X^1bar kappa_1bar0, with s = L u,
    u = theta(X), X^1 = theta^1(X).
    """
    vec = _chart_vector(ph, X)
    u = TensorField(pair(ph.theta, vec).real(), TensorType(0, 0, 1, 1), ph)
    X1 = TensorField(pair(ph.theta1, vec), TensorType(-1, 0, 0, 0), ph)
    curv = tractor_curvature(ph) if curv is None else curv
    s = bgg_split(u)
    res = {
        "1": s.D("1") - curv.k10.times(u),
        "1b": s.D("1b") - curv.k1b0.times(u),
        "0": s.D("0") + curv.k10.times(X1) + curv.k1b0.times(X1.conj()),
    }
    u0 = u.value()
    tangent_H = (u0 == 0) if ph.exact else abs(complex(u0)) <= ph.tol
    return SymmetryResidual(res, u, X1, tangent_H)


def symmetry_integral(u, Q):
    """Integral of u^2 |Q|^2 over S^3 in units of pi^2.

    ``u`` has weight (1,1) and ``Q`` type (2,0;-1,-1); h = 1 on the sphere.
    """
    if not isinstance(u, SphereTensor) or not isinstance(Q, SphereTensor):
        raise WeightError("symmetry_integral needs sphere tensors")
    if u.ttype != TensorType(0, 0, 1, 1):
        raise WeightError(f"u must have weight (1,1), got {u.ttype}")
    if Q.ttype != TensorType(2, 0, -1, -1):
        raise WeightError(f"Q must have type (2,0;-1,-1), got {Q.ttype}")
    dens = (u * u * Q * Q.conj()).raise_pair().raise_pair()
    return integrate(dens)
