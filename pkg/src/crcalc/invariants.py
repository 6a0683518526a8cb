"""Cartan umbilical tensor, obstruction density and family scans.

With the pack of a hypersurface in hand:

    Q_11 = -1/6 R_,11 - i/2 R A_11 + A_11,0 + 2i/3 (nabla^1 A_11)_,1
    X    = nabla^1 nabla^1 Q_11 - i A^11 Q_11,     O = X / 3

Q_11 is kept as a jet so that X reuses the derivative engine.  At jet order
N, Q is valid to order N-6 and X to N-8.  The overall sign of Q_11 is the
one fixed by the formula above; other normalizations differ by a sign.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import OrderExhausted
from .numeric import Gauss
from .pseudohermitian import Hypersurface, build_coframe

__all__ = ["cartan_tensor", "obstruction_raw", "obstruction", "bianchi_residual",
           "r_bianchi_residual", "InvariantReport", "invariant_report", "family_scan",
           "FamilyScanResult", "NORMAL_FORM_CONSTANT", "normal_form_probe", "Q_SIGN_CONVENTION"]

Q_SIGN_CONVENTION = "Q_11 = -1/6 R_,11 - i/2 R A_11 + A_11,0 + 2i/3 nabla_1 nabla^1 A_11"

# X(0) = c * a for rho = 2 Im w - |z|^2 - a |z|^8 with theta^1 = dz at the origin.
NORMAL_FORM_CONSTANT = Fraction(96)


def _iu(ph):
    return Gauss(0, 1) if ph.exact else 1j


def _q(ph, n, d):
    return Fraction(n, d) if ph.exact else n / d


def _need(ph, extra):
    if ph.chart.order < extra:
        raise OrderExhausted(f"jet order {ph.chart.order} is too small; need at least {extra}")


def cartan_tensor(ph):
    """Q_11 as a TensorField of type (2, 0; -1, -1)."""
    _need(ph, 6)
    iu = _iu(ph)
    R, A = ph.R, ph.A11
    divA = ph.up(A.D("1b"))
    Q = (R.D("1").D("1").scale(-_q(ph, 1, 6)) - (R * A).scale(iu * _q(ph, 1, 2))
         + A.D("0") + divA.D("1").scale(iu * _q(ph, 2, 3)))
    return Q


def obstruction_raw(ph, Q=None):
    """X = nabla^1 nabla^1 Q_11 - i A^11 Q_11 as a TensorField of type (0, 0; -3, -3)."""
    _need(ph, 8)
    Q = cartan_tensor(ph) if Q is None else Q
    iu = _iu(ph)
    Aup = ph.up(ph.up(ph.A11.conj()))
    return ph.up(ph.up(Q.D("1b")).D("1b")) - (Aup * Q).scale(iu)


def obstruction(ph, Q=None):
    """O = X / 3 as a TensorField."""
    return obstruction_raw(ph, Q).scale(_q(ph, 1, 3))


def bianchi_residual(ph, X=None):
    """Imaginary part of X at the basepoint."""
    X = obstruction_raw(ph) if X is None else X
    return X.value().imag


def r_bianchi_residual(ph):
    """nabla_0 R - 2 Re(nabla^1 nabla^1 A_11) as a jet."""
    A = ph.A11
    dd = ph.up(ph.up(A.D("1b")).D("1b"))
    return ph.R.D("0").jet - dd.jet.real().scale(2)


@dataclass
class InvariantReport:
    point: tuple
    gauge: str
    R: object
    A11: object
    Q11: object
    O: object
    X: object
    bianchi_residual: object
    T1: object
    S: object
    Y1: object
    h: object
    mode: str = "exact"
    extras: dict = field(default_factory=dict)


def invariant_report(rho, basepoint, order=10, mode="exact", bindings=None, t=None,
                     theta1=None, tol=1e-8, ph=None):
    """Evaluate the pack and invariants of ``rho`` at ``basepoint``."""
    from .tractor import y1_field
    if ph is None:
        hs = Hypersurface(rho, basepoint, order=order, mode=mode, bindings=bindings, t=t,
                          theta1=theta1, tol=tol)
        ph = build_coframe(hs)
    Q = cartan_tensor(ph)
    X = obstruction_raw(ph, Q)
    O = X.value() * _q(ph, 1, 3)
    return InvariantReport(
        point=tuple(ph.chart.hs.basepoint), gauge=ph.chart.gauge, R=ph.R.value(),
        A11=ph.A11.value(), Q11=Q.value(), O=O, X=X.value(),
        bianchi_residual=X.value().imag, T1=ph.T1.value(), S=ph.S.value(),
        Y1=y1_field(ph).value(), h=ph.h.constant_term(), mode=ph.chart.hs.mode)


def normal_form_probe(a, order=10, mode="exact"):
    """X(0) for rho = 2 Im w - |z|^2 - a z^4 zb^4 with theta^1 = dz."""
    hs = Hypersurface("2*im(w) - abs2(z) - a*z^4*conj(z)^4", (0, 0, 0, 0), order=order,
                      mode=mode, bindings={"a": a}, theta1=("1", "0"))
    ph = build_coframe(hs)
    return obstruction_raw(ph).value()


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

@dataclass
class FamilyScanResult:
    parameter: str
    t_order: int
    points: list              # basepoints
    Q11: list                 # per point: list of t-coefficients
    O: list
    gauge: list = field(default_factory=list)

    def first_nonvanishing(self, key, tol=0.0):
        """Smallest k >= 1 with a nonzero t^k coefficient at some point, else None."""
        rows = getattr(self, key)
        for k in range(1, self.t_order + 1):
            if any(abs(complex(r[k])) > tol for r in rows):
                return k
        return None


def _t_coeffs(jet, k):
    nv = jet.nvars
    return [jet.coeff((0,) * (nv - 1) + (j,)) for j in range(k + 1)]


def family_scan(family, basepoints, t_order=2, order=10, mode="exact", bindings=None,
                theta1=None, tol=1e-8):
    """t-jets of Q_11 and O at each basepoint for a family with parameter t."""
    need = 8 + t_order
    if order < need:
        raise OrderExhausted(f"t-order {t_order} needs jet order >= {need}")
    res = FamilyScanResult("t", t_order, [], [], [])
    for bp in basepoints:
        hs = Hypersurface(family, bp, order=order, mode=mode, bindings=bindings,
                          adjoin_t=True, theta1=theta1, tol=tol)
        ph = build_coframe(hs)
        Q = cartan_tensor(ph)
        O = obstruction(ph, Q)
        res.points.append(tuple(hs.basepoint))
        res.Q11.append(_t_coeffs(Q.jet, t_order))
        res.O.append(_t_coeffs(O.jet, t_order))
        res.gauge.append(ph.chart.gauge)
    return res
