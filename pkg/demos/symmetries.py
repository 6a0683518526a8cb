"""Infinitesimal symmetries and the tractor curvature.

For a symmetry X with u = theta(X), the adjoint tractor L u is parallel up
to curvature: the residual below vanishes.  A field that is not a symmetry
leaves a residual.
"""

from fractions import Fraction as F

from crcalc.pseudohermitian import Hypersurface, build_coframe
from crcalc.tractor import symmetry_residual, tractor_curvature

DOMAIN = "1 - abs2(w) - abs2(z) - re(z)^2*im(z)^2"

for bp in [(1, 0, 0, 0), (F(3, 5), 0, F(4, 5), 0), (0, F(2, 3), F(1, 3), F(2, 3))]:
    ph = build_coframe(Hypersurface(DOMAIN, bp, order=10))
    kappa = tractor_curvature(ph).k10.value_max_abs()
    rot = symmetry_residual(("0", "i*w"), ph)
    other = symmetry_residual(("0", "i*w*abs2(z)"), ph)
    print(f"{tuple(str(c) for c in bp)}: |kappa_10| = {kappa:.4f}, rotation residual "
          f"{rot.max:.2g} (tangent to H: {rot.tangent_to_H}), non-symmetry residual {other.max:.3f}")
