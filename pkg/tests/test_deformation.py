import itertools
import random
from fractions import Fraction as F

import pytest

from conftest import SPHERE, STD_FRAME, sphere_points
from crcalc.deformation import (CURV02, CURV20, DEF20, LINEARIZED_CONSTANT, CurvTensor,
                                DeformationTensor, D_J, D_J_star, R_J, be_first_variation,
                                global_pairing, hamiltonian_field, linearized_obstruction,
                                obstruction_from_curvature, op_D, op_Dbar, op_Dbarstar, op_Dstar,
                                op_Rminus, op_Rnatural, op_Rplus, positivity_chain,
                                variational_deformation)
from crcalc.errors import NotImaginary, NotReal, WeightError
from crcalc.invariants import family_scan
from crcalc.numeric import Gauss
from crcalc.sphere import Density, SpherePoly, SphereTensor, frame_apply, integrate

I = Gauss(0, 1)
Z = SpherePoly.monomial(1, 0, 0, 0)
W = SpherePoly.monomial(0, 0, 1, 0)
BUMP = (Z * Z.conj()) ** 4


def random_poly(deg, seed, terms=6):
    rng = random.Random(seed)
    p = SpherePoly.const(0)
    for _ in range(terms):
        e = [rng.randint(0, deg) for _ in range(4)]
        while sum(e) > deg:
            e[max(range(4), key=lambda i: e[i])] -= 1
        p = p + SpherePoly.monomial(*e, Gauss(rng.randint(-3, 3), rng.randint(-3, 3)))
    return p


def normal_monomials(deg):
    for m in itertools.product(range(deg + 1), repeat=4):
        if sum(m) <= deg and min(m[0], m[1]) == 0:
            yield SpherePoly.monomial(*m)


def sympy_Z1Z1(p, pts):
    """Apply Z1 twice to the ambient polynomial with sympy and evaluate."""
    sp = pytest.importorskip("sympy")
    z, zb, w, wb = sp.symbols("z zb w wb")
    expr = sum(complex(v) * z**a * zb**b * w**c * wb**d for (a, b, c, d), v in p.terms.items())
    for _ in range(2):
        expr = wb * sp.diff(expr, z) - zb * sp.diff(expr, w)
    fn = sp.lambdify((z, zb, w, wb), expr)
    return [fn(zz, zz.conjugate(), ww, ww.conjugate()) for zz, ww in pts]


# -- Hamiltonian fields ------------------------------------------------------

def test_reeb_field():
    V = hamiltonian_field(SpherePoly.const(1))
    assert V.T == SpherePoly.const(1)
    assert V.Z1.is_zero() and V.Z1b.is_zero()


def test_hamiltonian_rotation():
    # |z|^2 is theta of the rotation i z d_z
    xz, xw = hamiltonian_field(Z * Z.conj()).ambient()
    assert xz == Z.scale(I) and xw.is_zero()


def test_hamiltonian_components():
    f = (Z * W.conj() + Z.conj() * W).scale(F(1, 2))
    V = hamiltonian_field(f)
    assert V.Z1 == (W * W - Z * Z).scale(F(1, 2) * I)
    assert V.Z1b == V.Z1.conj()


@pytest.mark.parametrize("seed", range(4))
def test_hamiltonian_preserves_contact(seed):
    f = random_poly(4, seed).real()
    xz, xw = hamiltonian_field(f).ambient()
    # tangent: Re(zb X^z + wb X^w) = 0
    assert (Z.conj() * xz + W.conj() * xw).real().is_zero()
    # L_V theta (Z_1) = Z_1 f + dtheta(V, Z_1), with dtheta = i(dz^dzb + dw^dwb)
    lie = frame_apply("1", f) + (Z.conj() * xw.conj() - W.conj() * xz.conj()).scale(I)
    assert lie.is_zero()


def test_hamiltonian_not_real():
    with pytest.raises(NotReal):
        hamiltonian_field(Z)


# -- D, Dbar and their adjoints ---------------------------------------------

def test_D_constant_and_conjugate():
    assert op_D(SpherePoly.const(1)).is_zero()
    f = (Z * Z * W.conj() + Z.conj() * Z.conj() * W) + W * W.conj()
    assert op_Dbar(f) == op_D(f).conj()


def test_D_pinned():
    assert op_D(Z * W.conj()).is_zero() and op_Dbar(Z * W.conj()).is_zero()
    f = Z * Z * W.conj() ** 3
    assert op_D(f).poly == SpherePoly.monomial(0, 0, 0, 5).scale(2)
    pts = [(complex(a, b), complex(c, d)) for a, b, c, d in sphere_points(4, seed=9)]
    g = random_poly(5, 3)
    want = sympy_Z1Z1(g, pts)
    got = [complex(op_D(g).poly(zz, ww)) for zz, ww in pts]
    assert max(abs(a - b) for a, b in zip(want, got)) < 1e-9


@pytest.mark.parametrize("seed", range(20))
def test_adjointness(seed):
    f = random_poly(6, seed)
    G = SphereTensor(random_poly(6, seed + 100), CURV20)
    Gb = SphereTensor(random_poly(6, seed + 200), CURV02)
    lhs = integrate(op_D(f) * G.conj())
    assert lhs == integrate(Density(f, (1, 1)) * op_Dstar(G).conj())
    lhs = integrate(op_Dbar(f) * Gb.conj())
    assert lhs == integrate(Density(f, (1, 1)) * op_Dbarstar(Gb).conj())
    Fc = CurvTensor(G, Gb)
    assert global_pairing(D_J(f), Fc) == integrate(Density(f, (1, 1)) * D_J_star(Fc))


# -- the complex -------------------------------------------------------------

def test_complex_identities_all_monomials():
    count = 0
    for p in normal_monomials(6):
        assert (op_Rnatural(op_D(p)) + op_Rplus(op_Dbar(p))).is_zero()
        e = Density(p).retype(DEF20)
        assert (op_Dstar(op_Rnatural(e)) + op_Dbarstar(op_Rminus(e))).is_zero()
        count += 1
    assert count == 140


@pytest.mark.parametrize("seed", range(3))
def test_complex_full_operators(seed):
    f = random_poly(6, seed + 40)
    assert R_J(D_J(f)).is_zero()
    E = DeformationTensor(Density(random_poly(5, seed), (0, 0)).retype(DEF20),
                          Density(random_poly(5, seed + 1), (0, 0)).retype(DEF20.conj()))
    assert D_J_star(R_J(E)).is_zero()


def test_Rnatural_pinned():
    # antiholomorphic components are in the kernel; the rest are regression values
    for p in (W.conj() ** 2, Z.conj() ** 2, SpherePoly.const(0)):
        assert op_Rnatural(Density(p).retype(DEF20)).is_zero()
    assert op_Rnatural(Density(Z * Z).retype(DEF20)).poly == (Z * Z).scale(15)
    assert op_Rnatural(Density(1).retype(DEF20)).poly == SpherePoly.const(6)
    e = Density(Z * W.conj()).retype(DEF20)
    assert op_Rnatural(e).poly == (Z * W.conj()).scale(F(10, 3))


# -- embedded deformations ---------------------------------------------------

def test_variational_real_is_trivial():
    f = random_poly(4, 7).real()
    E = variational_deformation(f)
    assert E.is_real
    want = D_J(f).scale(-2)
    assert E.e20 == want.e20 and E.e02 == want.e02
    assert R_J(E).is_zero()


def test_variational_imaginary():
    f = random_poly(4, 8).imag().scale(I)
    E = variational_deformation(f)
    assert E.e20 == op_D(f).scale(2) and E.e02 == op_Dbar(f).scale(-2)
    assert variational_deformation(SpherePoly.const(0)).is_zero()


def test_linearized_trivial_cases():
    assert linearized_obstruction(SpherePoly.const(I)).density.is_zero()
    # i |z|^2 is i times a symmetry potential, so Dbar f = 0
    f = (Z * Z.conj()).scale(I)
    assert op_Dbar(f).is_zero()
    assert linearized_obstruction(f).density.is_zero()
    with pytest.raises(NotImaginary):
        linearized_obstruction(Z * Z.conj())


@pytest.mark.parametrize("seed", range(4))
def test_linearized_constant(seed):
    f = random_poly(6, seed + 60).imag().scale(I)
    L = linearized_obstruction(f)
    assert L.composed == L.direct.scale(LINEARIZED_CONSTANT)
    assert L.density == obstruction_from_curvature(R_J(variational_deformation(f)))
    assert L.density.poly.is_real()


def test_linearized_pinned():
    g = Z * Z * W.conj() ** 2 + Z.conj() ** 2 * W * W
    L = linearized_obstruction(g.scale(F(1, 2) * I))
    assert L.density.poly == g.scale(32)
    assert L.density.ttype.effective_weight() == (-3, -3)


@pytest.mark.parametrize("seed", range(10))
def test_positivity_chain(seed):
    f = random_poly(5, seed + 80).imag().scale(I)
    a, b, c = positivity_chain(f)
    assert a == b == c
    assert c.imag == 0 and c.real >= 0


def test_positivity_chain_kernel():
    assert positivity_chain((Z * Z.conj()).scale(I)) == (0, 0, 0)


def cross_check(g, pts, frame=None):
    """t^1 coefficients of Q and O for u - t g from jets, against the complex."""
    scan = family_scan(SPHERE + " - t*(" + g[0] + ")", pts, t_order=1, order=9, theta1=frame)
    f = g[1].scale(F(1, 2) * I)
    Odot = linearized_obstruction(f).density.poly
    Qdot = R_J(variational_deformation(f)).f20.poly
    for bp, q, o in zip(pts, scan.Q11, scan.O):
        zz, ww = complex(bp[0], bp[1]), complex(bp[2], bp[3])
        assert abs(complex(o[1]) - complex(Odot(zz, ww))) < 1e-6
        # Q enters the complex as i Q; theta^1 = dz is wb times the standard one
        lam = 1 if frame else ww.conjugate()
        assert abs(complex(q[1]) - -1j * complex(Qdot(zz, ww)) / lam ** 2) < 1e-6
    return Odot


def test_bump_family_cross_backbone():
    Odot = cross_check(("abs2(z)^4", BUMP), [(0, 0, 1, 0), (F(3, 5), 0, F(4, 5), 0)])
    assert Odot(0, 1) == 32
    cross_check(("abs2(z)^4", BUMP), sphere_points(2, seed=11), STD_FRAME)


def test_harmonic_family_cross_backbone():
    g = Z * Z * W.conj() ** 2 + Z.conj() ** 2 * W * W
    cross_check(("2*re(z^2*conj(w)^2)", g), [(F(3, 5), 0, F(4, 5), 0)] + sphere_points(1, seed=12),
                STD_FRAME)


def test_be_first_variation():
    O = Density(W * W.conj(), (-3, -3))
    assert be_first_variation((Z * Z.conj()).scale(I), O) == 1
    assert be_first_variation(Z * Z.conj(), O) == 0
    assert be_first_variation(Z.scale(I), Density(0, (-3, -3))) == 0
    with pytest.raises(WeightError):
        be_first_variation(Z, Density(1, (-2, -2)))


def test_be_first_variation_bump():
    # mu-dot = (3/2) Im int f O-dot; for f imaginary this is -(3/2)|.|-like and sign-definite
    f = BUMP.scale(F(1, 2) * I)
    Odot = linearized_obstruction(f).density
    val = be_first_variation(f, Odot)
    g = Density(BUMP.scale(F(1, 2)), (1, 1))
    assert val == F(3, 2) * integrate(g * Odot).real
    assert val > 0
