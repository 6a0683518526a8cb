"""Exact calculus on the unit sphere S^3 in C^2.

Functions are polynomials in ``z, zb, w, wb`` reduced modulo
``z zb + w wb = 1`` by the rewrite ``z zb -> 1 - w wb``.  The standard
pseudohermitian structure is

    theta = i (z dzb + w dwb),  theta^1 = w dz - z dw,
    Z1 = wb d_z - zb d_w,  T = i (z d_z + w d_w - zb d_zb - wb d_wb),

with ``h = 1``, ``omega = -2i theta``, ``A = 0`` and ``R = 2``.  Integrals
are over ``theta ^ dtheta`` and returned as rational multiples of pi^2.
"""

from fractions import Fraction
from math import comb

from .errors import WeightError
from .numeric import Gauss, as_gauss
from .weights import SCALAR, TensorType, norm_dir

__all__ = ["SpherePoly", "SphereTensor", "Density", "normalize", "frame_apply",
           "tw_derivative", "integrate", "VOLUME", "OMEGA_T", "R_SPHERE"]

OMEGA_T = Gauss(0, -2)       # omega_1^1(T)
R_SPHERE = Fraction(2)
VOLUME = Fraction(4)         # integral of theta ^ dtheta over S^3, in units of pi^2

_I = Gauss(0, 1)


def _reduce_monomial(a, b, c, d, coeff, out):
    m = min(a, b)
    if m == 0:
        key = (a, b, c, d)
        out[key] = out.get(key, 0) + coeff
        return
    a, b = a - m, b - m
    for k in range(m + 1):
        key = (a, b, c + k, d + k)
        out[key] = out.get(key, 0) + coeff * (comb(m, k) * (-1) ** k)


class SpherePoly:
    """Polynomial on S^3 in normal form: no monomial has both z and zb."""

    __slots__ = ("terms",)

    def __init__(self, terms=None, _normal=False):
        if _normal:
            self.terms = {k: v for k, v in terms.items() if v}
            return
        out = {}
        for (a, b, c, d), v in (terms or {}).items():
            v = as_gauss(v)
            if v:
                _reduce_monomial(a, b, c, d, v, out)
        self.terms = {k: v for k, v in out.items() if v}

    @classmethod
    def const(cls, c):
        return cls({(0, 0, 0, 0): c})

    @classmethod
    def monomial(cls, a, b, c, d, coeff=1):
        return cls({(a, b, c, d): coeff})

    @classmethod
    def from_poly(cls, poly):
        """From an expression Poly in (z, zb, w, wb, t) without t."""
        terms = {}
        for k, v in poly.terms.items():
            if k[4]:
                raise ValueError("sphere polynomials cannot depend on t")
            terms[k[:4]] = terms.get(k[:4], 0) + v
        return cls(terms)

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, SpherePoly):
            other = SpherePoly.const(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return SpherePoly(out, _normal=True)

    __radd__ = __add__

    def __neg__(self):
        return SpherePoly({k: -v for k, v in self.terms.items()}, _normal=True)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, SpherePoly):
            return self.scale(other)
        out = {}
        for (a, b, c, d), u in self.terms.items():
            for (a2, b2, c2, d2), v in other.terms.items():
                _reduce_monomial(a + a2, b + b2, c + c2, d + d2, u * v, out)
        return SpherePoly(out, _normal=True)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = SpherePoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def scale(self, c):
        c = as_gauss(c)
        return SpherePoly({k: v * c for k, v in self.terms.items()}, _normal=True)

    def conj(self):
        return SpherePoly({(b, a, d, c): v.conj() for (a, b, c, d), v in self.terms.items()},
                          _normal=True)

    def real(self):
        return (self + self.conj()).scale(Fraction(1, 2))

    def imag(self):
        return (self - self.conj()).scale(Gauss(0, Fraction(-1, 2)))

    def is_zero(self):
        return not self.terms

    def is_real(self):
        return self == self.conj()

    def is_imaginary(self):
        return self == -self.conj()

    def degree(self):
        return max((sum(k) for k in self.terms), default=0)

    def __call__(self, z, w):
        zb, wb = complex(z).conjugate(), complex(w).conjugate()
        return sum(complex(v) * z ** a * zb ** b * w ** c * wb ** d
                   for (a, b, c, d), v in self.terms.items())

    def __eq__(self, other):
        if not isinstance(other, SpherePoly):
            other = SpherePoly.const(other)
        return self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "SpherePoly(0)"
        names = ("z", "zb", "w", "wb")
        parts = []
        for k in sorted(self.terms):
            mono = "*".join(n + (f"^{e}" if e > 1 else "") for n, e in zip(names, k) if e)
            parts.append(f"({self.terms[k]})" + (f"*{mono}" if mono else ""))
        return "SpherePoly(" + " + ".join(parts) + ")"


def normalize(p):
    """Normal form of a raw ``{(a, b, c, d): coeff}`` polynomial."""
    if isinstance(p, SpherePoly):
        return p
    return SpherePoly(p)


# ---------------------------------------------------------------------------
# frame
# ---------------------------------------------------------------------------

def _apply_raw(direction, p):
    out = {}

    def add(key, val):
        if min(key) >= 0:
            out[key] = out.get(key, 0) + val

    for (a, b, c, d), v in p.terms.items():
        if direction == "1":        # wb d_z - zb d_w
            if a:
                add((a - 1, b, c, d + 1), v * a)
            if c:
                add((a, b + 1, c - 1, d), v * (-c))
        elif direction == "1b":     # w d_zb - z d_wb
            if b:
                add((a, b - 1, c + 1, d), v * b)
            if d:
                add((a + 1, b, c, d - 1), v * (-d))
        else:                       # i (z d_z + w d_w - zb d_zb - wb d_wb)
            k = a + c - b - d
            if k:
                add((a, b, c, d), v * Gauss(0, k))
    return SpherePoly(out)


def frame_apply(direction, p):
    """Apply Z1, Z1bar or T (also written 1, 1b, 0) to a sphere polynomial."""
    return _apply_raw(norm_dir(direction), p)


# ---------------------------------------------------------------------------
# weighted tensors
# ---------------------------------------------------------------------------

class SphereTensor:
    """One frame component of a weighted tensor on S^3 (h = 1)."""

    __slots__ = ("poly", "ttype")

    def __init__(self, poly, ttype=SCALAR):
        if not isinstance(poly, SpherePoly):
            poly = SpherePoly.const(poly)
        self.poly = poly
        self.ttype = ttype

    @property
    def weight(self):
        return (self.ttype.w, self.ttype.wp)

    def _same(self, other):
        if self.ttype != other.ttype:
            raise WeightError(f"cannot add types {self.ttype} and {other.ttype}")

    def __add__(self, other):
        self._same(other)
        return SphereTensor(self.poly + other.poly, self.ttype)

    def __sub__(self, other):
        self._same(other)
        return SphereTensor(self.poly - other.poly, self.ttype)

    def __neg__(self):
        return SphereTensor(-self.poly, self.ttype)

    def __mul__(self, other):
        if isinstance(other, SphereTensor):
            return SphereTensor(self.poly * other.poly, self.ttype + other.ttype)
        return SphereTensor(self.poly.scale(other), self.ttype)

    __rmul__ = __mul__

    def scale(self, c):
        return SphereTensor(self.poly.scale(c), self.ttype)

    def conj(self):
        return SphereTensor(self.poly.conj(), self.ttype.conj())

    def raise_pair(self):
        """Contract with h^{1 1bar} = 1 (type shifts by (-1,-1,-1,-1))."""
        t = self.ttype
        return SphereTensor(self.poly, TensorType(t.p - 1, t.q - 1, t.w - 1, t.wp - 1))

    def retype(self, ttype):
        return SphereTensor(self.poly, ttype)

    def D(self, direction):
        return tw_derivative(direction, self)

    def is_zero(self):
        return self.poly.is_zero()

    def __eq__(self, other):
        return (isinstance(other, SphereTensor) and self.ttype == other.ttype
                and self.poly == other.poly)

    __hash__ = None

    def __repr__(self):
        return f"SphereTensor({self.poly!r}, {self.ttype})"


def Density(poly, weight=(0, 0)):
    """Scalar density of weight ``(w, w')`` on S^3."""
    if not isinstance(poly, SpherePoly):
        poly = SpherePoly.const(poly)
    return SphereTensor(poly, TensorType(0, 0, weight[0], weight[1]))


def tw_derivative(direction, s):
    """Tanaka-Webster covariant derivative of a sphere tensor component.

    Only direction 0 carries a connection term since omega = -2i theta.
    """
    d = norm_dir(direction)
    poly = _apply_raw(d, s.poly)
    if d == "0":
        a, b = s.ttype.connection_coeffs()
        c = a * OMEGA_T + b * OMEGA_T.conj()
        if c:
            poly = poly + s.poly.scale(c)
    return SphereTensor(poly, s.ttype.after(d))


def D(s, word):
    """Iterated derivative; ``word`` like ["1b", "1b", "1", "1"] applied left to right."""
    for d in word:
        s = tw_derivative(d, s)
    return s


def integrate(d):
    """Integral over S^3 against theta ^ dtheta, in units of pi^2.

    The argument must have effective weight (-2, -2); a bare SpherePoly is
    taken to be such a density.
    """
    if isinstance(d, SphereTensor):
        if d.ttype.effective_weight() != (-2, -2):
            raise WeightError(f"integrand has weight {d.ttype.effective_weight()}, need (-2, -2)")
        poly = d.poly
    else:
        poly = d
    total = Gauss(0)
    for (a, b, c, e), v in poly.terms.items():
        if a == 0 and b == 0 and c == e:
            total = total + v * Fraction(VOLUME, c + 1)
    return total
