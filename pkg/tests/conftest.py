from fractions import Fraction as F
from functools import lru_cache
import random

from crcalc.pseudohermitian import Hypersurface, build_coframe

SPHERE = "1 - abs2(z) - abs2(w)"
HYPERQUADRIC = "2*im(w) - abs2(z)"
ELLIPSOID = "1 - (abs2(z)+abs2(w)) - t*(2*re(z)^2 + 3*re(w)^2)"
CIRCLE_DOMAIN = "1 - abs2(w) - abs2(z) - re(z)^2*im(z)^2"
STD_FRAME = ("w", "-z")

SPHERE_POINTS = [(0, 0, 1, 0), (0, F(3, 5), 0, F(4, 5)), (F(2, 3), F(1, 3), F(2, 3), 0),
                 (F(1, 2), F(1, 2), F(1, 2), F(1, 2)), (F(6, 7), F(2, 7), 0, F(3, 7))]
ELL_T = F(1, 10)


def quadric_points(a, start, n, seed=0):
    """Rational points on sum a_i x_i^2 = 1 by chords through ``start``."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        d = [F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(4)]
        den = sum(ai * di * di for ai, di in zip(a, d))
        if den == 0:
            continue
        s = -2 * sum(ai * pi * di for ai, pi, di in zip(a, start, d)) / den
        p = tuple(pi + s * di for pi, di in zip(start, d))
        if s != 0 and max(abs(x) for x in p) < 2 and p not in out:
            out.append(p)
    return out


def ellipsoid_points(n, seed=0, t=ELL_T):
    return quadric_points((1 + 2 * t, 1, 1 + 3 * t, 1), (0, F(3, 5), 0, F(4, 5)), n, seed)


def sphere_points(n, seed=0):
    return quadric_points((1, 1, 1, 1), (0, 0, 1, 0), n, seed)


@lru_cache(maxsize=None)
def pack(rho, bp, order=10, mode="exact", t=None, theta1=None, bindings=None):
    hs = Hypersurface(rho, bp, order=order, mode=mode, t=t, theta1=theta1,
                      bindings=dict(bindings) if bindings else None)
    return build_coframe(hs)


def sphere_pack(bp, order=10):
    return pack(SPHERE, bp, order, theta1=STD_FRAME)


def ellipsoid_pack(bp, order=10, mode="exact"):
    return pack(ELLIPSOID, bp, order, mode, t=ELL_T if mode == "exact" else float(ELL_T))
