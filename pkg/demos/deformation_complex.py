"""The deformation complex of the sphere, checked against the jet engine.

A wiggle rho_t = 1 - |z|^2 - |w|^2 - t g has imaginary potential f = i g / 2.
The complex predicts the first variation of O as a polynomial on the sphere;
the jet engine computes the t^1 coefficient of O pointwise.  They agree.
"""

from fractions import Fraction as F

from crcalc.deformation import (linearized_obstruction, op_D, op_Dbar, positivity_chain,
                                variational_deformation, R_J, be_first_variation)
from crcalc.invariants import family_scan
from crcalc.numeric import Gauss
from crcalc.sphere import SpherePoly

I = Gauss(0, 1)
z, w = SpherePoly.monomial(1, 0, 0, 0), SpherePoly.monomial(0, 0, 1, 0)

g = (z * z.conj()) ** 4
f = g.scale(F(1, 2) * I)
L = linearized_obstruction(f)
print("O-dot for g = |z|^8:", L.density.poly)
print("composed / direct constant:", L.constant)

pts = [(0, 0, 1, 0), (F(3, 5), 0, F(4, 5), 0), (F(1, 2), F(1, 2), F(1, 2), F(1, 2))]
scan = family_scan("1 - abs2(z) - abs2(w) - t*abs2(z)^4", pts, t_order=1, order=9)
for p, o in zip(pts, scan.O):
    zz, ww = complex(p[0], p[1]), complex(p[2], p[3])
    print(f"  {tuple(str(c) for c in p)}: jets {complex(o[1]).real:.6f}   complex {complex(L.density.poly(zz, ww)).real:.6f}")

# The linearized curvature of a variational deformation, and the chain of
# integrations by parts behind positivity.
E = variational_deformation(f)
print("R_J(E) (2,0) part has", len(R_J(E).f20.poly.terms), "terms")
print("positivity chain (units of pi^2):", [str(x) for x in positivity_chain(f)])
print("first variation of the global invariant:", be_first_variation(f, L.density))

# D kills the potentials of infinitesimal automorphisms such as |z|^2.
print("D |z|^2 =", op_D(z * z.conj()).poly, "  Dbar |z|^2 =", op_Dbar(z * z.conj()).poly)
