"""Index and density-weight bookkeeping shared by both backbones.

A :class:`TensorType` ``(p, q, w, wp)`` records the signed number of lower
``1`` indices (upper ``1`` counts -1), the signed number of lower ``1bar``
indices, and the density weight ``(w, wp)``.  The Tanaka-Webster connection
acts on such a component in the frame direction ``e`` by

    -p * omega(e) - q * conj(omega)(e) + ((w - wp) / 6) * (omega(e) - conj(omega)(e))

so that the Levi form ``h`` of type ``(1, 1, 1, 1)`` is parallel.  A
derivative in direction ``0`` lowers the weight by ``(1, 1)``, which leaves
the connection unchanged but records how ``T`` rescales.  Under
``theta -> e^Y theta`` a component of this type scales by ``e^{k Y}`` at
leading order with ``k = (w + wp) / 2``.
"""

from dataclasses import dataclass
from fractions import Fraction

__all__ = ["TensorType", "SCALAR", "H", "HINV", "DIRECTIONS", "norm_dir"]

DIRECTIONS = ("1", "1b", "0")

_ALIASES = {"1": "1", "Z1": "1", "1b": "1b", "1bar": "1b", "Z1bar": "1b", "Z1b": "1b",
            "0": "0", "T": "0"}


def norm_dir(d):
    try:
        return _ALIASES[str(d)]
    except KeyError:
        raise ValueError(f"unknown direction {d!r}; use 1, 1b or 0") from None


@dataclass(frozen=True)
class TensorType:
    p: int = 0
    q: int = 0
    w: Fraction = Fraction(0)
    wp: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "w", Fraction(self.w))
        object.__setattr__(self, "wp", Fraction(self.wp))
        if (self.w - self.wp).denominator != 1:
            raise ValueError("w - w' must be an integer")

    def __add__(self, other):
        return TensorType(self.p + other.p, self.q + other.q, self.w + other.w, self.wp + other.wp)

    def __neg__(self):
        return TensorType(-self.p, -self.q, -self.w, -self.wp)

    def __sub__(self, other):
        return self + (-other)

    def conj(self):
        return TensorType(self.q, self.p, self.wp, self.w)

    def after(self, direction):
        """Type of the covariant derivative in ``direction``."""
        d = norm_dir(direction)
        if d == "1":
            return TensorType(self.p + 1, self.q, self.w, self.wp)
        if d == "1b":
            return TensorType(self.p, self.q + 1, self.w, self.wp)
        # T has weight (-1, -1) as a component of the weighted contact form
        return TensorType(self.p, self.q, self.w - 1, self.wp - 1)

    def scaling(self):
        """Exponent k in the leading rescaling factor e^{k Y}."""
        return (self.w + self.wp) / 2

    def effective_weight(self):
        """Density weight once indices are traded for weights via h = 1.

        A lower 1 index counts as weight (-2, 1) and a lower 1bar as (1, -2).
        """
        diff = (self.w - self.wp) - 3 * (self.p - self.q)
        tot = (self.w + self.wp) - (self.p + self.q)
        return ((tot + diff) / 2, (tot - diff) / 2)

    def connection_coeffs(self):
        """(a, b) with connection term a * omega(e) + b * conj(omega)(e)."""
        k = (self.w - self.wp) / 6
        return (-self.p + k, -self.q - k)

    def __str__(self):
        return f"({self.p},{self.q};{self.w},{self.wp})"


SCALAR = TensorType()
H = TensorType(1, 1, 1, 1)
HINV = TensorType(-1, -1, -1, -1)
