"""Exact Gaussian-rational scalars and truncated multivariate jets.

A :class:`Jet` is a Taylor polynomial in ``nvars`` real offset variables,
truncated at total degree ``order``.  Monomials are stored densely in
graded-lexicographic order, so the jet of order ``n`` is a prefix of the jet
of order ``N >= n`` and truncation is slicing.

Two coefficient modes share one code path:

* exact: numerators are numpy object arrays of Python ints over a single
  common positive denominator ``den``;
* float: numerators are float64 arrays and ``den`` is 1.

Real and imaginary parts are kept in separate arrays.  Products are
computed with a cached pair table and ``np.add.reduceat``.
"""

from fractions import Fraction
from functools import lru_cache
import math
import numbers

import numpy as np

from .errors import (DivisionByZeroConstantTerm, NotOnSurface, OrderExhausted,
                     ShapeMismatch, SingularGradient)

__all__ = ["Gauss", "Jet", "jet_arith", "jet_partial", "jet_graph_solve",
           "monomials", "as_gauss"]


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

class Gauss:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def parse(cls, text):
        """Parse ``"p/q"``, ``"a+bi"``-free rational strings (real only)."""
        return cls(Fraction(text))

    def _coerce(self, other):
        if isinstance(other, Gauss):
            return other
        if isinstance(other, (numbers.Rational, str)):
            return Gauss(other)
        if isinstance(other, numbers.Complex) and not isinstance(other, numbers.Real):
            return Gauss(Fraction(other.real), Fraction(other.imag))
        if isinstance(other, numbers.Real):
            return Gauss(Fraction(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Gauss(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Gauss(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Gauss(self.re * o.re - self.im * o.im,
                     self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("Gauss division by zero")
        return Gauss((self.re * o.re + self.im * o.im) / n,
                     (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return Gauss(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (Gauss(1) / self) ** (-n)
        out, base = Gauss(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return Gauss(self.re, -self.im)

    conj = conjugate

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __abs__(self):
        return math.sqrt(self.abs2())

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"Gauss({_fmt_frac(self.re)}, {_fmt_frac(self.im)})"

    def __str__(self):
        if self.im == 0:
            return _fmt_frac(self.re)
        if self.re == 0:
            return f"{_fmt_frac(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"{_fmt_frac(self.re)}{sign}{_fmt_frac(abs(self.im))}i"


I = Gauss(0, 1)


def _fmt_frac(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def as_gauss(x):
    """Convert an int, Fraction, decimal string or Gauss to :class:`Gauss`."""
    if isinstance(x, Gauss):
        return x
    if isinstance(x, str):
        return Gauss(Fraction(x))
    if isinstance(x, numbers.Complex) and not isinstance(x, numbers.Real):
        return Gauss(Fraction(x.real), Fraction(x.imag))
    return Gauss(Fraction(x))


def _split_rational(c):
    """Return (nr, ni, d) with c = (nr + i ni) / d, d > 0."""
    c = as_gauss(c)
    d = math.lcm(c.re.denominator, c.im.denominator)
    return c.re.numerator * (d // c.re.denominator), c.im.numerator * (d // c.im.denominator), d


# ---------------------------------------------------------------------------
# monomial tables
# ---------------------------------------------------------------------------

def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def monomials(nvars, order):
    """Exponent tuples of total degree <= order in graded-lex order."""
    out = []
    for d in range(order + 1):
        out.extend(_compositions(d, nvars))
    return tuple(out)


@lru_cache(maxsize=None)
def _index(nvars, order):
    return {m: k for k, m in enumerate(monomials(nvars, order))}


@lru_cache(maxsize=None)
def _size(nvars, order):
    if order < 0:
        return 0
    return math.comb(order + nvars, nvars)


@lru_cache(maxsize=None)
def _product_table(nvars, order):
    mons = monomials(nvars, order)
    idx = _index(nvars, order)
    ii, jj, kk = [], [], []
    for i, a in enumerate(mons):
        room = order - sum(a)
        for j in range(_size(nvars, room)):
            b = mons[j]
            ii.append(i)
            jj.append(j)
            kk.append(idx[tuple(x + y for x, y in zip(a, b))])
    kk = np.asarray(kk, dtype=np.int64)
    perm = np.argsort(kk, kind="stable")
    kk = kk[perm]
    starts = np.flatnonzero(np.r_[True, kk[1:] != kk[:-1]])
    return (np.asarray(ii, dtype=np.int64)[perm],
            np.asarray(jj, dtype=np.int64)[perm], starts)


@lru_cache(maxsize=None)
def _partial_table(nvars, order, var):
    mons = monomials(nvars, order)
    idx = _index(nvars, order - 1)
    src, dst, fac = [], [], []
    for k, m in enumerate(mons):
        if m[var]:
            src.append(k)
            dst.append(idx[m[:var] + (m[var] - 1,) + m[var + 1:]])
            fac.append(m[var])
    return (np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64),
            np.asarray(fac, dtype=np.int64))


def _zeros(n, exact):
    return np.zeros(n, dtype=object) if exact else np.zeros(n)


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------

class Jet:
    """Truncated Taylor expansion in ``nvars`` offset variables.

    Parameters
    ----------
    nvars, order : int
        Number of variables and truncation degree.
    re, im : array
        Numerators of the real and imaginary parts, one entry per monomial.
    den : int
        Common denominator (exact mode only).
    exact : bool
        Coefficient mode.
    basepoint : tuple or None
        Coordinates of the expansion point, used only for bookkeeping.
    """

    __slots__ = ("nvars", "order", "re", "im", "den", "exact", "basepoint")

    def __init__(self, nvars, order, re, im, den=1, exact=True, basepoint=None, *,
                 _reduce=True):
        self.nvars = nvars
        self.order = order
        self.exact = exact
        self.basepoint = basepoint
        if exact:
            if den < 0:
                re, im, den = -re, -im, -den
            if _reduce and den != 1:
                g = math.gcd(den, *re.tolist(), *im.tolist())
                if g > 1:
                    re = re // g
                    im = im // g
                    den //= g
        self.re, self.im, self.den = re, im, den

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, nvars, order, exact=True, basepoint=None):
        n = _size(nvars, order)
        return cls(nvars, order, _zeros(n, exact), _zeros(n, exact), 1, exact, basepoint)

    @classmethod
    def constant(cls, value, nvars, order, exact=True, basepoint=None):
        out = cls.zero(nvars, order, exact, basepoint)
        if exact:
            nr, ni, d = _split_rational(value)
            out.re[0], out.im[0], out.den = nr, ni, d
        else:
            value = complex(value)
            out.re[0], out.im[0] = value.real, value.imag
        return out

    @classmethod
    def variable(cls, var, nvars, order, exact=True, basepoint=None, value=0):
        """Jet of ``value + x_var`` (``x_var`` the offset variable)."""
        out = cls.constant(value, nvars, order, exact, basepoint)
        if order >= 1:
            e = tuple(1 if k == var else 0 for k in range(nvars))
            out.re[_index(nvars, order)[e]] = out.den if exact else 1.0
        return out

    @classmethod
    def from_dict(cls, coeffs, nvars, order, exact=True, basepoint=None):
        """Build from ``{exponent tuple: scalar}``; degrees above order dropped."""
        idx = _index(nvars, order)
        n = _size(nvars, order)
        if exact:
            vals = {e: as_gauss(c) for e, c in coeffs.items() if sum(e) <= order}
            d = 1
            for c in vals.values():
                d = math.lcm(d, c.re.denominator, c.im.denominator)
            re, im = _zeros(n, True), _zeros(n, True)
            for e, c in vals.items():
                re[idx[e]] += c.re.numerator * (d // c.re.denominator)
                im[idx[e]] += c.im.numerator * (d // c.im.denominator)
            return cls(nvars, order, re, im, d, True, basepoint)
        re, im = _zeros(n, False), _zeros(n, False)
        for e, c in coeffs.items():
            if sum(e) <= order:
                c = complex(c)
                re[idx[e]] += c.real
                im[idx[e]] += c.imag
        return cls(nvars, order, re, im, 1, False, basepoint)

    def like(self, value):
        """Constant jet with this jet's shape."""
        return Jet.constant(value, self.nvars, self.order, self.exact, self.basepoint)

    # -- shape -------------------------------------------------------------

    def _check(self, other):
        if self.nvars != other.nvars:
            raise ShapeMismatch(f"jets in {self.nvars} and {other.nvars} variables")
        if self.exact != other.exact:
            raise ShapeMismatch("cannot mix exact and float jets")
        if (self.basepoint is not None and other.basepoint is not None
                and self.basepoint != other.basepoint):
            raise ShapeMismatch("jets expanded about different basepoints")

    def _bp(self, other):
        return self.basepoint if self.basepoint is not None else other.basepoint

    def truncate(self, order):
        if order >= self.order:
            return self
        n = _size(self.nvars, order)
        return Jet(self.nvars, order, self.re[:n].copy(), self.im[:n].copy(), self.den,
                   self.exact, self.basepoint)

    def _padded(self, order):
        # zero-extend; only for internal Newton iterations
        if order <= self.order:
            return self.truncate(order)
        n = _size(self.nvars, order)
        re, im = _zeros(n, self.exact), _zeros(n, self.exact)
        m = len(self.re)
        re[:m], im[:m] = self.re, self.im
        return Jet(self.nvars, order, re, im, self.den, self.exact, self.basepoint,
                   _reduce=False)

    def with_order(self, order):
        """Relabel the validity order (truncating or zero-padding)."""
        return self._padded(order)

    # -- coefficient access ------------------------------------------------

    def coeff(self, exponent):
        k = _index(self.nvars, self.order).get(tuple(exponent))
        if k is None:
            raise KeyError(exponent)
        return self._scalar(k)

    def _scalar(self, k):
        if self.exact:
            return Gauss(Fraction(int(self.re[k]), self.den), Fraction(int(self.im[k]), self.den))
        return complex(self.re[k], self.im[k])

    def constant_term(self):
        return self._scalar(0)

    value = constant_term

    def items(self):
        """Yield ``(exponent, scalar)`` for nonzero coefficients."""
        for k, e in enumerate(monomials(self.nvars, self.order)):
            if self.re[k] or self.im[k]:
                yield e, self._scalar(k)

    def to_dict(self):
        return dict(self.items())

    def to_float(self):
        if not self.exact:
            return self
        re = np.array([float(Fraction(int(x), self.den)) for x in self.re])
        im = np.array([float(Fraction(int(x), self.den)) for x in self.im])
        return Jet(self.nvars, self.order, re, im, 1, False, self.basepoint)

    def is_zero(self, tol=0.0):
        if self.exact:
            return not (any(self.re) or any(self.im))
        return self.max_abs() <= tol

    def max_abs(self):
        if self.exact:
            return max((abs(complex(self._scalar(k))) for k in range(len(self.re))), default=0.0)
        if len(self.re) == 0:
            return 0.0
        return float(np.max(np.hypot(self.re, self.im)))

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return other
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return self + self.like(other)
        n = min(self.order, o.order)
        a, b = self.truncate(n), o.truncate(n)
        if self.exact:
            if a.den == b.den:
                re, im, d = a.re + b.re, a.im + b.im, a.den
            else:
                d = math.lcm(a.den, b.den)
                fa, fb = d // a.den, d // b.den
                re, im = a.re * fa + b.re * fb, a.im * fa + b.im * fb
            return Jet(self.nvars, n, re, im, d, True, self._bp(o))
        return Jet(self.nvars, n, a.re + b.re, a.im + b.im, 1, False, self._bp(o))

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.nvars, self.order, -self.re, -self.im, self.den, self.exact,
                   self.basepoint, _reduce=False)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -as_scalar(other, self.exact))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        """Multiply by a scalar (Gauss, rational or complex)."""
        if self.exact:
            nr, ni, d = _split_rational(c)
            if ni == 0:
                return Jet(self.nvars, self.order, self.re * nr, self.im * nr, self.den * d,
                           True, self.basepoint)
            return Jet(self.nvars, self.order, self.re * nr - self.im * ni,
                       self.re * ni + self.im * nr, self.den * d, True, self.basepoint)
        c = complex(c)
        return Jet(self.nvars, self.order, self.re * c.real - self.im * c.imag,
                   self.re * c.imag + self.im * c.real, 1, False, self.basepoint)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return self.scale(other)
        n = min(self.order, o.order)
        ii, jj, starts = _product_table(self.nvars, n)
        m = _size(self.nvars, n)
        ar, ai, br, bi = self.re[:m], self.im[:m], o.re[:m], o.im[:m]
        xr, xi, yr, yi = ar[ii], ai[ii], br[jj], bi[jj]
        if self.exact:
            a_real = not any(ai)
            b_real = not any(bi)
            if a_real and b_real:
                re = np.add.reduceat(xr * yr, starts)
                im = _zeros(m, True)
            elif a_real:
                re = np.add.reduceat(xr * yr, starts)
                im = np.add.reduceat(xr * yi, starts)
            elif b_real:
                re = np.add.reduceat(xr * yr, starts)
                im = np.add.reduceat(xi * yr, starts)
            else:
                re = np.add.reduceat(xr * yr - xi * yi, starts)
                im = np.add.reduceat(xr * yi + xi * yr, starts)
            return Jet(self.nvars, n, re, im, self.den * o.den, True, self._bp(o))
        re = np.add.reduceat(xr * yr - xi * yi, starts)
        im = np.add.reduceat(xr * yi + xi * yr, starts)
        return Jet(self.nvars, n, re, im, 1, False, self._bp(o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return self.scale(1 / as_scalar(other, self.exact))
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse().scale(other)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out, base = self.like(1), self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def conj(self):
        return Jet(self.nvars, self.order, self.re, -self.im, self.den, self.exact,
                   self.basepoint, _reduce=False)

    conjugate = conj

    def real(self):
        return Jet(self.nvars, self.order, self.re, _zeros(len(self.re), self.exact),
                   self.den, self.exact, self.basepoint)

    def imag(self):
        return Jet(self.nvars, self.order, self.im, _zeros(len(self.re), self.exact),
                   self.den, self.exact, self.basepoint)

    def inverse(self):
        """Multiplicative inverse by Newton iteration x <- x (2 - b x)."""
        c0 = self.constant_term()
        if c0 == 0:
            raise DivisionByZeroConstantTerm("jet has zero constant term")
        x = Jet.constant(1 / c0, self.nvars, 0, self.exact, self.basepoint)
        prec = 1
        while prec <= self.order:
            prec = min(2 * prec, self.order + 1)
            n = prec - 1
            b = self.truncate(n)
            xn = x._padded(n)
            x = xn * (2 - b * xn)
        return x.truncate(self.order)

    def exp(self):
        """Exponential; in exact mode the constant term must vanish."""
        c0 = self.constant_term()
        if self.exact and c0 != 0:
            raise ValueError("exact jet exponential needs a zero constant term")
        x = self - c0
        out = self.like(1)
        for k in range(self.order, 0, -1):
            out = 1 + (x * out).scale(Fraction(1, k) if self.exact else 1.0 / k)
        if not self.exact:
            out = out.scale(complex(np.exp(c0)))
        return out

    def partial(self, var):
        """Formal partial derivative; the result has order ``order - 1``."""
        if not 0 <= var < self.nvars:
            raise ShapeMismatch(f"variable index {var} out of range")
        if self.order <= 0:
            raise OrderExhausted("cannot differentiate a jet of order 0")
        src, dst, fac = _partial_table(self.nvars, self.order, var)
        n = _size(self.nvars, self.order - 1)
        re, im = _zeros(n, self.exact), _zeros(n, self.exact)
        re[dst] = self.re[src] * fac
        im[dst] = self.im[src] * fac
        return Jet(self.nvars, self.order - 1, re, im, self.den, self.exact, self.basepoint)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        if (self.nvars, self.order, self.exact) != (other.nvars, other.order, other.exact):
            return False
        if self.exact:
            return (self.den == other.den and all(self.re == other.re)
                    and all(self.im == other.im))
        return bool(np.array_equal(self.re, other.re) and np.array_equal(self.im, other.im))

    __hash__ = None

    def __repr__(self):
        terms = []
        for e, c in self.items():
            mono = "*".join(f"x{k + 1}" + (f"^{p}" if p > 1 else "") for k, p in enumerate(e) if p)
            terms.append(f"({c})" + (f"*{mono}" if mono else ""))
        body = " + ".join(terms) if terms else "0"
        return f"Jet[{self.nvars} vars, order {self.order}]({body})"


def as_scalar(x, exact):
    return as_gauss(x) if exact else complex(x)


# ---------------------------------------------------------------------------
# operation-style API
# ---------------------------------------------------------------------------

def jet_arith(a, b, op):
    """Apply ``op`` in {"add", "sub", "mul", "div"} to two jets."""
    if not isinstance(a, Jet) or not isinstance(b, Jet):
        raise TypeError("jet_arith expects two jets")
    a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown jet operation {op!r}")


def jet_partial(a, var):
    return a.partial(var)


def _split_by_power(rho, var):
    """Write rho = sum_j P_j x_var^j with P_j jets in the other variables."""
    m, n = rho.nvars, rho.order
    idx = _index(m - 1, n)
    size = _size(m - 1, n)
    parts_re = [_zeros(size, rho.exact) for _ in range(n + 1)]
    parts_im = [_zeros(size, rho.exact) for _ in range(n + 1)]
    for k, e in enumerate(monomials(m, n)):
        j = e[var]
        kk = idx[e[:var] + e[var + 1:]]
        parts_re[j][kk] = rho.re[k]
        parts_im[j][kk] = rho.im[k]
    bp = None
    if rho.basepoint is not None:
        bp = tuple(rho.basepoint[:var]) + tuple(rho.basepoint[var + 1:])
    return [Jet(m - 1, n, parts_re[j], parts_im[j], rho.den, rho.exact, bp)
            for j in range(n + 1)]


def jet_graph_solve(rho, solve_var, tol=1e-12):
    """Solve ``rho(x) = 0`` for variable ``solve_var`` as a graph.

    ``rho`` is a jet in ``m`` variables; the result is a jet ``g`` in the
    remaining ``m - 1`` variables (in their original order) with constant
    term equal to the basepoint value of ``solve_var`` (0 if no basepoint is
    recorded), such that substituting ``g`` back gives zero through degree
    ``order``.
    """
    parts = _split_by_power(rho, solve_var)
    c0 = parts[0].constant_term()
    grad = parts[1].constant_term() if rho.order >= 1 else 0
    if rho.exact:
        if c0 != 0:
            raise NotOnSurface("rho does not vanish at the basepoint")
        if grad == 0:
            raise SingularGradient(f"d rho / d x{solve_var + 1} vanishes at the basepoint")
    else:
        if abs(complex(c0)) > tol * max(1.0, abs(complex(grad))):
            raise NotOnSurface(f"|rho(basepoint)| = {abs(complex(c0)):.3g}")
        if abs(complex(grad)) <= tol:
            raise SingularGradient(f"d rho / d x{solve_var + 1} vanishes at the basepoint")
    n = rho.order
    delta = Jet.zero(parts[0].nvars, 0, rho.exact, parts[0].basepoint)
    prec = 1
    while prec <= n:
        prec = min(2 * prec, n + 1)
        k = prec - 1
        d = delta._padded(k)
        # Horner for F(d) and F'(d); terms with j > k vanish to this order
        f = parts[k].truncate(k)
        fp = f.scale(k)
        for j in range(k - 1, -1, -1):
            pj = parts[j].truncate(k)
            f = f * d + pj
            if j >= 1:
                fp = fp * d + pj.scale(j)
        delta = d - f / fp
    if rho.basepoint is not None and rho.basepoint[solve_var] != 0:
        return delta + rho.basepoint[solve_var]
    return delta
