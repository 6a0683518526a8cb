"""Pseudohermitian structure of a real hypersurface in C^2, as jets.

Pipeline: a defining function ``rho`` is Taylor-expanded about a basepoint,
the hypersurface is written as a graph over three of the four real ambient
coordinates (the chart), and everything downstream is a jet on that chart.

* contact form ``theta = Re(i d'rho)`` restricted to the chart;
* Reeb field ``T`` from ``theta(T) = 1``, ``T -| dtheta = 0``;
* ``theta^1 = dz - dz(T) theta`` (or ``dw``), ``Z1`` dual to it;
* ``h`` from ``dtheta = i h theta^1 ^ theta^1bar``;
* connection form, torsion and curvature from the structure equations.

The family parameter ``t``, when adjoined, is the last chart variable; it is
carried along passively and never differentiated.

Jet budget at order N: theta N-1, frame and h N-2, omega and A N-3, R N-4.
"""

from fractions import Fraction

from .errors import (ConsistencyFailure, NotReal, NotStrictlyPseudoconvex, SingularGradient,
                     WeightError)
from .expr import Poly, eval_poly, expand, parse, poly_diff, to_jet
from .numeric import Gauss, Jet, jet_graph_solve
from .weights import H, HINV, SCALAR, TensorType, norm_dir

__all__ = ["Hypersurface", "Chart", "PHData", "TensorField", "build_coframe",
           "solve_structure", "covariant_derivative", "rescale", "RescaleResult",
           "pseudohermitian"]

SPATIAL = 3

T_A = TensorType(2, 0, 0, 0)
T_R = TensorType(0, 0, -1, -1)
T_T1 = TensorType(1, 0, -1, -1)
T_S = TensorType(0, 0, -2, -2)


def _as_poly(rho, bindings):
    if isinstance(rho, Poly):
        return rho
    if isinstance(rho, str):
        rho = parse(rho)
    return expand(rho, bindings)


def _imag_unit(exact):
    return Gauss(0, 1) if exact else 1j


# ---------------------------------------------------------------------------
# forms and vector fields on the chart
# ---------------------------------------------------------------------------

def apply_vec(vec, f):
    """Apply a chart vector field (3 jet components) to a jet."""
    out = None
    for j in range(SPATIAL):
        term = vec[j] * f.partial(j)
        out = term if out is None else out + term
    return out


def pair(form, vec):
    return form[0] * vec[0] + form[1] * vec[1] + form[2] * vec[2]


def d_form(form):
    """Exterior derivative of a 1-form: dict {(j, k): jet} for j < k."""
    return {(j, k): form[k].partial(j) - form[j].partial(k)
            for j in range(SPATIAL) for k in range(j + 1, SPATIAL)}


def eval_2form(omega, x, y):
    out = None
    for (j, k), c in omega.items():
        term = c * (x[j] * y[k] - x[k] * y[j])
        out = term if out is None else out + term
    return out


def wedge(a, b):
    return {(j, k): a[j] * b[k] - a[k] * b[j]
            for j in range(SPATIAL) for k in range(j + 1, SPATIAL)}


def cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _conj_vec(v):
    return tuple(c.conj() for c in v)


def _lin(*terms):
    """Sum of (scalar-or-jet, form) products, componentwise."""
    out = None
    for coef, form in terms:
        comp = tuple(coef * c for c in form)
        out = comp if out is None else tuple(x + y for x, y in zip(out, comp))
    return out


# ---------------------------------------------------------------------------
# hypersurface and chart
# ---------------------------------------------------------------------------

class Hypersurface:
    """A real hypersurface ``rho = 0`` with a basepoint and jet settings.

    Parameters
    ----------
    rho : str, Expr or Poly
        Real defining function of ``z, w`` (and ``t`` for families).
    basepoint : sequence of 4 reals
        ``(Re z, Im z, Re w, Im w)``; must satisfy ``rho = 0``.
    order : int
        Jet order N.
    mode : "exact" or "float"
    bindings : dict
        Values of free parameters.
    t : number, optional
        Value substituted for ``t`` (ignored when ``adjoin_t``).
    adjoin_t : bool
        Treat ``t`` as a jet variable about ``t = 0``.
    solve_var : int, optional
        Ambient coordinate solved for; default is the largest gradient entry.
    theta1 : pair of expressions, optional
        Coefficients ``(a, b)`` so that ``theta^1`` is the pullback of
        ``a dz + b dw`` corrected by a multiple of ``theta``.  The default is
        ``dz`` when ``|rho_w| >= |rho_z|`` at the basepoint, else ``dw``.
    """

    def __init__(self, rho, basepoint, order=10, mode="exact", bindings=None, t=None,
                 adjoin_t=False, solve_var=None, tol=1e-8, theta1=None):
        if mode not in ("exact", "float"):
            raise ValueError("mode must be 'exact' or 'float'")
        self.source = rho
        self.bindings = dict(bindings or {})
        self.poly = _as_poly(rho, self.bindings)
        if not self.poly.is_real():
            raise NotReal("defining function is not real")
        self.exact = mode == "exact"
        self.mode = mode
        if self.exact:
            self.basepoint = tuple(Fraction(x) for x in basepoint)
        else:
            self.basepoint = tuple(float(x) for x in basepoint)
        if len(self.basepoint) != 4:
            raise ValueError("basepoint needs 4 real coordinates")
        self.order = order
        self.t = t
        self.adjoin_t = adjoin_t
        self.solve_var = solve_var
        self.tol = tol
        self.theta1_spec = theta1
        if not adjoin_t and t is None and self.poly.t_degree() > 0:
            t = 0
            self.t = 0

    def ambient_jet(self, order=None):
        return to_jet(self.poly, self.basepoint, self.order if order is None else order,
                      t=self.t, adjoin_t=self.adjoin_t, exact=self.exact)

    def gradient(self):
        j = self.ambient_jet(1)
        nv = j.nvars
        grads = []
        for k in range(4):
            e = tuple(1 if m == k else 0 for m in range(nv))
            grads.append(j.coeff(e).real)
        return grads

    def chart(self):
        return Chart(self)


class Chart:
    """Graph parametrization of a hypersurface near its basepoint."""

    def __init__(self, hs):
        self.hs = hs
        exact = hs.exact
        rho = hs.ambient_jet()
        grads = self.gradient = [rho.coeff(tuple(1 if m == k else 0 for m in range(rho.nvars))).real
                                 for k in range(4)]
        if hs.solve_var is None:
            s = max(range(4), key=lambda k: abs(grads[k]))
        else:
            s = hs.solve_var
        if all(g == 0 for g in grads) or (not exact and max(abs(g) for g in grads) <= hs.tol):
            raise SingularGradient("d rho vanishes at the basepoint")
        self.solve_var = s
        g = jet_graph_solve(rho, s, tol=hs.tol)
        self.nvars = g.nvars
        self.order = g.order
        bp = g.basepoint
        self.basepoint = bp
        xs, dx = [], []
        j = 0
        for k in range(4):
            if k == s:
                xs.append(g)
                dx.append(tuple(g.partial(m) for m in range(SPATIAL)))
            else:
                xs.append(Jet.variable(j, self.nvars, self.order, exact, bp, bp[j]))
                dx.append(tuple(g.like(1 if m == j else 0) for m in range(SPATIAL)))
                j += 1
        iu = _imag_unit(exact)
        self.x = xs
        self.z = xs[0] + xs[1].scale(iu)
        self.w = xs[2] + xs[3].scale(iu)
        self.dz = tuple(a + b.scale(iu) for a, b in zip(dx[0], dx[1]))
        self.dw = tuple(a + b.scale(iu) for a, b in zip(dx[2], dx[3]))
        self.tj = Jet.variable(self.nvars - 1, self.nvars, self.order, exact, bp, bp[-1]) \
            if hs.adjoin_t else hs.t
        self.gens = (self.z, self.z.conj(), self.w, self.w.conj())
        self.rho_z = self.pullback(poly_diff(hs.poly, 0))
        self.rho_w = self.pullback(poly_diff(hs.poly, 2))
        self.use_dz = abs(complex(self.rho_w.constant_term())) >= abs(complex(self.rho_z.constant_term()))
        if hs.theta1_spec is None:
            self.base_form = self.dz if self.use_dz else self.dw
            self.gauge = "theta1 = dz" if self.use_dz else "theta1 = dw"
        else:
            a, b = (self.pullback(c) for c in hs.theta1_spec)
            self.base_form = _lin((a, self.dz), (b, self.dw))
            self.gauge = f"theta1 = ({hs.theta1_spec[0]}) dz + ({hs.theta1_spec[1]}) dw"
        self.gauge += f"; theta = Re(i d'rho); chart solves x{s + 1}"

    @property
    def exact(self):
        return self.hs.exact

    def pullback(self, f):
        """Restrict an ambient polynomial (str, Expr or Poly) to the chart."""
        p = _as_poly(f, self.hs.bindings)
        return eval_poly(p, self.gens, self.tj if self.tj is not None else 0)

    def contact_form(self):
        """theta = Re(i d'rho) on the chart."""
        iu = _imag_unit(self.exact)
        form = _lin((self.rho_z, self.dz), (self.rho_w, self.dw))
        return tuple(c.scale(iu).real() for c in form)


# ---------------------------------------------------------------------------
# coframe and structure
# ---------------------------------------------------------------------------

class PHData:
    """Coframe, Levi form, connection, torsion and curvatures on a chart."""

    def __init__(self, chart, theta):
        self.chart = chart
        self.exact = chart.exact
        self.tol = chart.hs.tol
        iu = _imag_unit(self.exact)
        self.theta = theta
        self.dtheta = d_form(theta)
        om = self.dtheta
        v = (om[(1, 2)], -om[(0, 2)], om[(0, 1)])
        self.T = tuple(c / pair(theta, v) for c in v)
        base = chart.base_form
        bT = pair(base, self.T)
        self.theta1 = tuple(b - bT * t for b, t in zip(base, theta))
        self.theta1b = _conj_vec(self.theta1)
        c = cross(theta, self.theta1b)
        self.Z1 = tuple(x / pair(self.theta1, c) for x in c)
        self.Z1b = _conj_vec(self.Z1)
        h = eval_2form(self.dtheta, self.Z1, self.Z1b).scale(-iu)
        self._check_real(h, "h")
        self.h = h.real()
        h0 = self.h.constant_term().real
        if h0 <= 0 if self.exact else h0 <= self.tol:
            raise NotStrictlyPseudoconvex(f"Levi form h(p) = {h0} is not positive")
        self.hinv = self.h.inverse()
        self._solve()

    # -- helpers -----------------------------------------------------------

    def _check_real(self, j, name):
        if self.exact:
            if any(j.im):
                raise ConsistencyFailure(f"{name} is not real")
        elif j.imag().max_abs() > self.tol * max(1.0, j.max_abs()):
            raise ConsistencyFailure(f"{name} is not real")

    def frame(self, direction):
        d = norm_dir(direction)
        return {"1": self.Z1, "1b": self.Z1b, "0": self.T}[d]

    def coframe(self):
        return (self.theta, self.theta1, self.theta1b)

    def apply(self, direction, f):
        return apply_vec(self.frame(direction), f)

    def _solve(self):
        dth1 = d_form(self.theta1)
        a = eval_2form(dth1, self.T, self.Z1)
        b = eval_2form(dth1, self.T, self.Z1b)
        c = eval_2form(dth1, self.Z1, self.Z1b)
        self.dtheta1 = dth1
        alpha = -a
        gamma = c
        beta = self.hinv * apply_vec(self.Z1, self.h) - gamma.conj()
        self.A1_1b = b
        # redundant real equation: omega + conj(omega) = h^{-1} dh along T
        resid = alpha + alpha.conj() - self.hinv * apply_vec(self.T, self.h)
        self.consistency_residual = resid
        if self.exact:
            if not resid.is_zero():
                raise ConsistencyFailure("omega + conj(omega) != h^{-1} dh along T")
        elif resid.max_abs() > self.tol * max(1.0, alpha.max_abs()):
            raise ConsistencyFailure(f"reality residual {resid.max_abs():.3g}")
        self.omega_frame = {"0": alpha, "1": beta, "1b": gamma}
        self.omegab_frame = {"0": alpha.conj(), "1": gamma.conj(), "1b": beta.conj()}
        self.omega = _lin((alpha, self.theta), (beta, self.theta1), (gamma, self.theta1b))
        A11 = self.h * b.conj()
        self.A11 = TensorField(A11, T_A, self)
        domega = d_form(self.omega)
        self.domega = domega
        R = eval_2form(domega, self.Z1, self.Z1b) * self.hinv
        self._check_real(R, "R")
        self.R = TensorField(R.real(), T_R, self)
        self.W1 = eval_2form(domega, self.Z1, self.T)
        A = self.A11
        divA = self.up(A.D("1b"))                  # nabla^1 A_11
        self.T1 = (self.R.D("1") - divA.scale(4 * _imag_unit(self.exact))).scale(Fraction(1, 12)
                                                                                  if self.exact else 1 / 12)
        T1b = self.T1.conj()
        Aup = self.up(self.up(A.conj()))           # A^{11}
        S = -(self.up(self.T1.D("1b")) + self.up(T1b.D("1")) + (self.R * self.R).scale(
            Fraction(1, 16) if self.exact else 1 / 16) - Aup * A)
        self.S = S

    # -- tensors -----------------------------------------------------------

    def field(self, jet, ttype=SCALAR):
        return TensorField(jet, ttype, self)

    def up(self, t):
        """Contract with h^{1 1bar}."""
        return TensorField(t.jet * self.hinv, t.ttype + HINV, self)

    def down(self, t):
        return TensorField(t.jet * self.h, t.ttype + H, self)

    @property
    def Hfield(self):
        return TensorField(self.h, H, self)

    def structure_residuals(self):
        """Max residuals of the two structure equations (jets)."""
        iu = _imag_unit(self.exact)
        th, th1, th1b = self.theta, self.theta1, self.theta1b
        lhs1 = self.dtheta
        rhs1 = {k: v.scale(iu) * self.h for k, v in wedge(th1, th1b).items()}
        r1 = max((lhs1[k] - rhs1[k]).max_abs() for k in lhs1)
        w1 = wedge(th1, self.omega)
        w2 = wedge(th, th1b)
        r2 = max((self.dtheta1[k] - w1[k] - self.A1_1b * w2[k]).max_abs() for k in w1)
        return {"dtheta": r1, "dtheta1": r2}

    def duality_residual(self):
        cof = self.coframe()
        fr = (self.T, self.Z1, self.Z1b)
        worst = 0.0
        for i, f in enumerate(cof):
            for j, v in enumerate(fr):
                worst = max(worst, (pair(f, v) - (1 if i == j else 0)).max_abs())
        return worst

    def at_basepoint(self):
        return {"h": self.h.constant_term(), "A11": self.A11.value(), "R": self.R.value(),
                "T1": self.T1.value(), "S": self.S.value()}


class TensorField:
    """One frame component of a weighted tensor on a chart, with its type."""

    __slots__ = ("jet", "ttype", "ph")

    def __init__(self, jet, ttype, ph):
        self.jet = jet
        self.ttype = ttype
        self.ph = ph

    def _same(self, other):
        if self.ttype != other.ttype:
            raise WeightError(f"cannot add types {self.ttype} and {other.ttype}")

    def __add__(self, other):
        self._same(other)
        return TensorField(self.jet + other.jet, self.ttype, self.ph)

    def __sub__(self, other):
        self._same(other)
        return TensorField(self.jet - other.jet, self.ttype, self.ph)

    def __neg__(self):
        return TensorField(-self.jet, self.ttype, self.ph)

    def __mul__(self, other):
        if isinstance(other, TensorField):
            return TensorField(self.jet * other.jet, self.ttype + other.ttype, self.ph)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c):
        return TensorField(self.jet.scale(c), self.ttype, self.ph)

    def conj(self):
        return TensorField(self.jet.conj(), self.ttype.conj(), self.ph)

    def D(self, direction):
        return covariant_derivative(self, direction, self.ph)

    def up(self):
        return self.ph.up(self)

    def value(self):
        return self.jet.constant_term()

    @property
    def order(self):
        return self.jet.order

    def __repr__(self):
        return f"TensorField({self.ttype}, order {self.jet.order}, value {self.value()})"


def covariant_derivative(t, direction, ph):
    """Tanaka-Webster derivative of a weighted component in a frame direction."""
    d = norm_dir(direction)
    a, b = t.ttype.connection_coeffs()
    out = apply_vec(ph.frame(d), t.jet)
    coef = None
    if a:
        coef = ph.omega_frame[d].scale(a)
    if b:
        term = ph.omegab_frame[d].scale(b)
        coef = term if coef is None else coef + term
    if coef is not None:
        out = out + coef * t.jet
    return TensorField(out, t.ttype.after(d), ph)


def build_coframe(hs, theta=None):
    """Chart, coframe, Levi form and structure for a hypersurface.

    ``theta`` overrides the contact form (used for rescaling).
    """
    chart = hs.chart() if isinstance(hs, Hypersurface) else hs
    if theta is None:
        theta = chart.contact_form()
    return PHData(chart, theta)


def pseudohermitian(rho, basepoint, **kw):
    """Convenience: Hypersurface + build_coframe."""
    return build_coframe(Hypersurface(rho, basepoint, **kw))


def solve_structure(ph):
    """The structure equations are solved during construction; returns ``ph``."""
    return ph


# ---------------------------------------------------------------------------
# rescaling
# ---------------------------------------------------------------------------

class RescaleResult:
    """The rescaled pack computed two ways.

    ``direct`` is rebuilt from ``e^Y theta``; ``formula`` holds the numeric
    jets of R, A11, T1, S for the new contact form obtained from the
    transformation laws applied to the old pack.  ``A11`` uses the law
    A + Y_11 - Y_1 Y_1 and ``A11_corrected`` the law A + i(Y_11 - Y_1 Y_1).
    """

    def __init__(self, direct, formula, upsilon):
        self.direct = direct
        self.formula = formula
        self.upsilon = upsilon

    def differences(self):
        out = {}
        for key, jet in self.formula.items():
            new = getattr(self.direct, key.split("_")[0]).jet
            out[key] = (new - jet).max_abs()
        return out


def upsilon_field(ph, upsilon):
    """Y pulled back to the chart, shifted to vanish at the basepoint in exact mode."""
    y = ph.chart.pullback(upsilon)
    y = y.real()
    if ph.exact:
        y = y - y.constant_term()
    return TensorField(y, SCALAR, ph)


def rescale(ph, upsilon):
    """Pack for theta' = e^Y theta, directly and via transformation laws.

    In exact mode Y is replaced by Y - Y(p) so that e^Y has a rational jet.
    """
    Y = upsilon_field(ph, upsilon)
    e = Y.jet.exp()
    theta_hat = tuple(e * c for c in ph.theta)
    direct = PHData(ph.chart, theta_hat)
    return RescaleResult(direct, transformed_fields(ph, Y), Y)


def transformed_fields(ph, Y):
    """Numeric jets of R, A11, T1, S after theta -> e^Y theta, from the laws."""
    exact = ph.exact
    iu = _imag_unit(exact)
    half = Fraction(1, 2) if exact else 0.5
    q = (lambda n, d: Fraction(n, d)) if exact else (lambda n, d: n / d)
    R, A, T1, S = ph.R, ph.A11, ph.T1, ph.S
    Y1 = Y.D("1")
    Y1b = Y.D("1b")
    Y0 = Y.D("0")
    Yu1 = ph.up(Y1b)                 # Y^1
    Yu1b = ph.up(Y1)                 # Y^1bar
    Y11 = Y1.D("1")
    Y11b = Y1.D("1b")                # Y_{1 1bar} = nabla_1bar nabla_1 Y
    Y1b1 = Y1b.D("1")
    Y1b1b = Y1b.D("1b")
    Y01 = Y0.D("1")
    Y01b = Y0.D("1b")
    Y00 = Y0.D("0")
    T1b = T1.conj()
    Ab = A.conj()
    R_hat = R - (ph.up(Y11b) + ph.up(Y1b1) + Yu1 * Y1).scale(2)
    A_hat = A + Y11 - Y1 * Y1
    A_hat_i = A + (Y11 - Y1 * Y1).scale(iu)
    T1_hat = (T1 + Y01.scale(iu * half) + (R * Y1).scale(q(1, 4)) - (A * Yu1).scale(iu)
              + (Y11 * Yu1).scale(half) - (Y11b * Yu1b).scale(half)
              - (Y1 * Y1 * Yu1).scale(half))
    S_hat = (S + Y00.scale(half) - (Yu1 * T1 + Yu1b * T1b).scale(3)
             + (Y01b * Yu1b - Y01 * Yu1).scale(iu)
             + (A * Yu1 * Yu1 - Ab * Yu1b * Yu1b).scale(iu * q(3, 2))
             - (Y0 * Y0).scale(q(1, 4)) - (R * Y1 * Yu1).scale(q(3, 4))
             - (Y11 * Yu1 * Yu1 + Y1b1b * Yu1b * Yu1b).scale(half)
             + ((Y11b + Y1b1) * Yu1 * Yu1b).scale(half)
             + (Y1 * Yu1 * Y1 * Yu1).scale(q(3, 4)))
    out = {}
    for key, f in (("R", R_hat), ("A11", A_hat), ("A11_corrected", A_hat_i), ("T1", T1_hat),
                   ("S", S_hat)):
        out[key] = _weight_factor(Y, f.ttype.scaling()) * f.jet
    return out


def _weight_factor(Y, k):
    if k == 0:
        return Y.jet.like(1)
    return Y.jet.scale(k).exp()
