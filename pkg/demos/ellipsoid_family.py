"""Local invariants of the sphere and of a one-parameter family of ellipsoids.

Run with ``python3 demos/ellipsoid_family.py``.
"""

from fractions import Fraction as F

from crcalc.invariants import family_scan, invariant_report

SPHERE = "1 - abs2(z) - abs2(w)"
FAMILY = "1 - abs2(z) - abs2(w) - t*(2*re(z)^2 + 3*re(w)^2)"

# On the sphere every local invariant is constant: R = 2, Q = 0, O = 0.
rep = invariant_report(SPHERE, (F(3, 5), 0, F(4, 5), 0))
print("sphere   R =", rep.R, " Q11 =", rep.Q11, " O =", rep.O, " S =", rep.S)

# Away from t = 0 the ellipsoid is curved.
rep = invariant_report(FAMILY, (F(10, 11), 0, 0, F(1, 11)), t=F(1, 10))
print("ellipsoid at t = 1/10:")
print("  R   =", float(rep.R.re))
print("  A11 =", complex(rep.A11))
print("  Q11 =", complex(rep.Q11))
print("  O   =", complex(rep.O), " (real, as the Bianchi identity forces)")

# The t-jets show that Q and O are second order in t.
pts = [(0, 0, 1, 0), (F(3, 5), 0, F(4, 5), 0), (0, F(3, 5), 0, F(4, 5))]
res = family_scan(FAMILY, pts, t_order=2)
for p, q, o in zip(res.points, res.Q11, res.O):
    where = ", ".join(str(c) for c in p)
    print(f"  ({where})  Q: {' '.join(str(c) for c in q)}   O: {' '.join(str(c) for c in o)}")
print("first nonvanishing order: Q", res.first_nonvanishing("Q11"),
      " O", res.first_nonvanishing("O"))
