"""The bigraded deformation complex of the CR 3-sphere.

Everything here is computed on the exact sphere backbone with the standard
coframe (h = 1, A = 0, R = 2).  Tensors are stored as the component that
multiplies ``theta^1 (x) Z_1bar`` (the (2,0) part) or ``theta^1bar (x) Z_1``
(the (0,2) part).  With h = 1 an upper index is numerically the same as the
opposite lower one, and its type is tracked by adding ``HINV``.

    E(1,1) --D, Dbar--> Def --Rnat, R+, R-, Rnat_bar--> Curv --D*, Dbar*--> E(-3,-3)
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotImaginary, NotReal, WeightError
from .numeric import Gauss
from .sphere import Density, SpherePoly, SphereTensor, D, frame_apply, integrate
from .weights import HINV, TensorType

__all__ = ["F_TYPE", "DEF20", "DEF02", "CURV20", "CURV02", "BIAN",
           "DeformationTensor", "CurvTensor", "HamiltonianField", "LinearizedObstruction",
           "as_potential", "hamiltonian_field", "op_D", "op_Dbar", "op_Dstar", "op_Dbarstar",
           "op_Rnatural", "op_Rnatural_bar", "op_Rplus", "op_Rminus", "D_J", "R_J", "D_J_star",
           "pairing", "global_pairing", "hermitian_pairing", "variational_deformation",
           "linearized_obstruction", "LINEARIZED_CONSTANT", "obstruction_from_curvature",
           "positivity_chain", "be_first_variation"]

I = Gauss(0, 1)

F_TYPE = TensorType(0, 0, 1, 1)
DEF20 = TensorType(1, -1, 0, 0)
DEF02 = DEF20.conj()
CURV20 = TensorType(1, -1, -2, -2)
CURV02 = CURV20.conj()
BIAN = TensorType(0, 0, -3, -3)
R_DENSITY = Density(2, (-1, -1))

# composed operator -(4/3) D* R+ Dbar f against f_{1b1b}{}^{1b1b}{}_{11}{}^{11}
LINEARIZED_CONSTANT = Fraction(1, 9)


def _up(s, n=1):
    for _ in range(n):
        s = SphereTensor(s.poly, s.ttype + HINV)
    return s


def _check(s, ttype, what):
    if s.ttype != ttype:
        raise WeightError(f"{what} needs type {ttype}, got {s.ttype}")
    return s


def as_potential(f):
    """Accept a SpherePoly or a (1,1) SphereTensor and return the latter."""
    if isinstance(f, SphereTensor):
        return _check(f, F_TYPE, "potential")
    if not isinstance(f, SpherePoly):
        f = SpherePoly.const(f)
    return Density(f, (1, 1))


def _zero(ttype):
    return SphereTensor(SpherePoly.const(0), ttype)


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------

@dataclass
class DeformationTensor:
    """E = e20 theta^1 (x) Z_1bar + e02 theta^1bar (x) Z_1."""

    e20: SphereTensor
    e02: SphereTensor

    def __post_init__(self):
        _check(self.e20, DEF20, "(2,0) part")
        _check(self.e02, DEF02, "(0,2) part")

    @classmethod
    def from_phi(cls, phi):
        """Real deformation 2i phi theta^1 (x) Z_1bar - 2i conj(phi) theta^1bar (x) Z_1."""
        e20 = phi.scale(2 * I)
        return cls(e20, e20.conj())

    @property
    def phi(self):
        return self.e20.scale(Gauss(0, Fraction(-1, 2)))

    @property
    def is_real(self):
        return self.e02 == self.e20.conj()

    def conj(self):
        return DeformationTensor(self.e02.conj(), self.e20.conj())

    def __add__(self, other):
        return DeformationTensor(self.e20 + other.e20, self.e02 + other.e02)

    def __sub__(self, other):
        return DeformationTensor(self.e20 - other.e20, self.e02 - other.e02)

    def scale(self, c):
        return DeformationTensor(self.e20.scale(c), self.e02.scale(c))

    def is_zero(self):
        return self.e20.is_zero() and self.e02.is_zero()


@dataclass
class CurvTensor:
    """F = f20 theta^1 (x) Z_1bar + f02 theta^1bar (x) Z_1, weight (-2,-2)."""

    f20: SphereTensor
    f02: SphereTensor

    def __post_init__(self):
        _check(self.f20, CURV20, "(2,0) part")
        _check(self.f02, CURV02, "(0,2) part")

    def conj(self):
        return CurvTensor(self.f02.conj(), self.f20.conj())

    def __add__(self, other):
        return CurvTensor(self.f20 + other.f20, self.f02 + other.f02)

    def scale(self, c):
        return CurvTensor(self.f20.scale(c), self.f02.scale(c))

    def is_zero(self):
        return self.f20.is_zero() and self.f02.is_zero()


# ---------------------------------------------------------------------------
# contact Hamiltonian fields
# ---------------------------------------------------------------------------

@dataclass
class HamiltonianField:
    """V_f = f T + i f^1 Z_1 - i f^1bar Z_1bar."""

    T: SpherePoly
    Z1: SpherePoly
    Z1b: SpherePoly

    def ambient(self):
        """(X^z, X^w) with V = X^z d_z + X^w d_w + c.c."""
        z, w = SpherePoly.monomial(1, 0, 0, 0), SpherePoly.monomial(0, 0, 1, 0)
        zb, wb = z.conj(), w.conj()
        xz = (self.T * z).scale(I) + self.Z1 * wb
        xw = (self.T * w).scale(I) - self.Z1 * zb
        return xz, xw

    def apply(self, p):
        """Derivative of the sphere polynomial ``p`` along V."""
        return (self.T * frame_apply("0", p) + self.Z1 * frame_apply("1", p)
                + self.Z1b * frame_apply("1b", p))


def hamiltonian_field(f):
    """Frame components of the contact Hamiltonian field with real potential ``f``."""
    f = as_potential(f)
    if not f.poly.is_real():
        raise NotReal("Hamiltonian potential must be real")
    f_up = frame_apply("1b", f.poly)        # f^1 = f_{,1bar} with h = 1
    f_upb = frame_apply("1", f.poly)
    return HamiltonianField(f.poly, f_up.scale(I), f_upb.scale(-I))


# ---------------------------------------------------------------------------
# the operators
# ---------------------------------------------------------------------------

def op_D(f):
    """(2,0) part of D_J f: nabla_1 nabla^1bar f."""
    return _up(D(as_potential(f), ["1", "1"]))


def op_Dbar(f):
    """(0,2) part of D_J f: nabla_1bar nabla^1 f."""
    return _up(D(as_potential(f), ["1b", "1b"]))


def op_Dstar(F):
    """nabla^1 nabla_1bar F_1^1bar on a (2,0) curvature component."""
    return _up(D(_check(F, CURV20, "D*"), ["1b", "1b"]))


def op_Dbarstar(F):
    return _up(D(_check(F, CURV02, "Dbar*"), ["1", "1"]))


def op_Rnatural(e):
    """Rnat on a (2,0) deformation component ``e = 2i phi``.

    The fourth order term carries +1/6: this is the sign forced by the real
    linearized scalar curvature and by both complex identities.
    """
    _check(e, DEF20, "Rnat")
    phi = e.scale(Gauss(0, Fraction(-1, 2)))
    t4 = _up(D(phi, ["1b", "1b", "1", "1"]), 2)
    t00 = D(phi, ["0", "0"])
    t0 = _up(D(phi, ["0", "1b", "1"]))
    tr = R_DENSITY * D(phi, ["0"])
    out = (t4.scale(Fraction(1, 6)) - t00 - t0.scale(Gauss(0, Fraction(2, 3)))
           + tr.scale(Gauss(0, Fraction(1, 2))))
    return out.scale(I)


def op_Rplus(e):
    """R+ on a (0,2) deformation component ``e = 2i phi``; lands in (2,0)."""
    _check(e, DEF02, "R+")
    phi = e.scale(Gauss(0, Fraction(-1, 2)))
    return _up(D(phi, ["1"] * 4), 2).scale(Gauss(0, Fraction(-1, 6)))


def op_Rnatural_bar(e):
    return op_Rnatural(e.conj()).conj()


def op_Rminus(e):
    return op_Rplus(e.conj()).conj()


def D_J(f):
    return DeformationTensor(op_D(f), op_Dbar(f))


def R_J(E):
    return CurvTensor(op_Rnatural(E.e20) + op_Rplus(E.e02),
                      op_Rnatural_bar(E.e02) + op_Rminus(E.e20))


def D_J_star(F):
    return op_Dstar(F.f20) + op_Dbarstar(F.f02)


def pairing(E, F):
    """<E, F> = E^{11} F_{11} + E_{11} F^{11}, a (-2,-2) density."""
    return E.e02 * F.f20 + E.e20 * F.f02


def global_pairing(E, F):
    return integrate(pairing(E, F))


def hermitian_pairing(E, F):
    """Integral of E_{11} conj(F_{11}) + E_{1b1b} conj(F_{1b1b})."""
    return integrate(E.e20 * F.f20.conj() + E.e02 * F.f02.conj())


# ---------------------------------------------------------------------------
# embedded deformations
# ---------------------------------------------------------------------------

def variational_deformation(f):
    """E = -2 (D conj(f) + Dbar f) for the complex potential f = theta(psi-dot)."""
    f = as_potential(f)
    return DeformationTensor(op_D(f.conj()).scale(-2), op_Dbar(f).scale(-2))


@dataclass
class LinearizedObstruction:
    composed: SphereTensor      # -(4/3) D* R+ Dbar f
    direct: SphereTensor        # f_{1b1b}^{1b1b}_{11}^{11}
    constant: Fraction          # composed = constant * direct

    @property
    def density(self):
        """The first variation of O itself.

        Q enters the complex as the coefficient i Q_1^1bar, so D* of the
        (2,0) part is 3i O and the composed operator carries a factor i.
        """
        return self.composed.scale(-I)


def linearized_obstruction(f):
    """First variation of O along an imaginary wiggle potential ``f``."""
    f = as_potential(f)
    if not f.poly.is_imaginary():
        raise NotImaginary("wiggle potential must be imaginary")
    composed = op_Dstar(op_Rplus(op_Dbar(f))).scale(Fraction(-4, 3))
    direct = _up(D(f, ["1b", "1b", "1", "1", "1", "1", "1b", "1b"]), 4)
    return LinearizedObstruction(composed, direct, LINEARIZED_CONSTANT)


def obstruction_from_curvature(F):
    """O = D*(F^(2,0)) / 3i for a curvature tensor F (for instance R_J E)."""
    return op_Dstar(F.f20).scale(Gauss(0, Fraction(-1, 3)))


def positivity_chain(f):
    """The three integrals of the integration-by-parts chain, in units of pi^2.

    Returns (int f^{11}_{11} conj(L8 f), int f^{11}_{11}^{1b1b} conj(f6),
    int |f6|^2) with f6 = f_{1b1b}^{1b1b}_{11} and L8 f = f6^{11}.  All three
    agree for every f.
    """
    f = as_potential(f)
    f4 = _up(D(f, ["1b", "1b", "1", "1"]), 2).poly
    f6 = D(f, ["1b", "1b", "1", "1", "1", "1"]).poly
    f8 = frame_apply("1b", frame_apply("1b", f6))
    f4u = frame_apply("1", frame_apply("1", f4))
    return (integrate(f4 * f8.conj()), integrate(f4u * f6.conj()), integrate(f6 * f6.conj()))


def be_first_variation(f, O):
    """(3 / 2 pi^2) Im of the integral of f O.

    The sphere integral is a rational multiple of pi^2, so the result is an
    exact rational.
    """
    f = as_potential(f)
    if O.ttype.effective_weight() != (-3, -3):
        raise WeightError(f"obstruction density has weight {O.ttype.effective_weight()}")
    return Fraction(3, 2) * integrate(f * O).imag
