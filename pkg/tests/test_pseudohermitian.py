from fractions import Fraction as F

import pytest

from conftest import (ELLIPSOID, HYPERQUADRIC, SPHERE, SPHERE_POINTS, ellipsoid_pack,
                      ellipsoid_points, pack, sphere_pack)
from crcalc.errors import NotOnSurface, NotReal, NotStrictlyPseudoconvex, SingularGradient
from crcalc.invariants import r_bianchi_residual
from crcalc.numeric import Gauss
from crcalc.pseudohermitian import Hypersurface, build_coframe, rescale, upsilon_field
from crcalc.weights import TensorType

I = Gauss(0, 1)


def is_const(jet, value):
    return (jet - jet.like(value)).is_zero()


@pytest.mark.parametrize("bp", SPHERE_POINTS)
def test_sphere_standard_frame(bp):
    ph = sphere_pack(bp)
    assert is_const(ph.h, 1)
    assert is_const(ph.omega_frame["0"], Gauss(0, -2))
    assert ph.omega_frame["1"].is_zero() and ph.omega_frame["1b"].is_zero()
    assert ph.A11.jet.is_zero()
    assert is_const(ph.R.jet, 2)
    assert ph.T1.jet.is_zero()
    assert is_const(ph.S.jet, F(-1, 4))


def test_sphere_default_frame_scalar_curvature():
    # theta^1 = dz here is wb times the standard one; R and S do not see it
    ph = pack(SPHERE, (0, F(3, 5), 0, F(4, 5)), 8)
    assert ph.chart.gauge.startswith("theta1 = dz")
    assert is_const(ph.R.jet, 2)
    assert ph.A11.jet.is_zero()
    assert is_const(ph.S.jet, F(-1, 4))


def test_hyperquadric_origin():
    ph = pack(HYPERQUADRIC, (0, 0, 0, 0), 8)
    assert ph.chart.gauge.startswith("theta1 = dz")
    assert ph.h.constant_term() == 1
    assert is_const(ph.h, 1)
    assert ph.R.jet.is_zero() and ph.A11.jet.is_zero()
    assert ph.T1.jet.is_zero() and ph.S.jet.is_zero()


def test_errors():
    with pytest.raises(SingularGradient):
        build_coframe(Hypersurface("abs2(z) + abs2(w)", (0, 0, 0, 0), order=4))
    with pytest.raises(NotStrictlyPseudoconvex):
        build_coframe(Hypersurface("2*im(w) + abs2(z)", (0, 0, 0, 0), order=4))
    with pytest.raises(NotOnSurface):
        build_coframe(Hypersurface(SPHERE, (1, 1, 0, 0), order=4))
    with pytest.raises(NotReal):
        Hypersurface("i*abs2(z) - w", (0, 0, 0, 0))


@pytest.mark.parametrize("bp", ellipsoid_points(2, seed=3))
def test_ellipsoid_structure_residuals(bp):
    ph = ellipsoid_pack(bp, 7)
    assert ph.duality_residual() == 0
    assert ph.structure_residuals() == {"dtheta": 0, "dtheta1": 0}
    assert ph.consistency_residual.is_zero()
    # the theta^1 ^ theta coefficient of d omega is nabla^1 A_11
    assert (ph.W1 - ph.up(ph.A11.D("1b")).jet).is_zero()
    assert r_bianchi_residual(ph).is_zero()


def test_float_pack_matches_exact():
    bp = (F(10, 11), 0, 0, F(1, 11))
    ex = ellipsoid_pack(bp, 8)
    fl = ellipsoid_pack(tuple(float(x) for x in bp), 8, "float")
    assert fl.duality_residual() < 1e-12
    assert max(fl.structure_residuals().values()) < 1e-10
    for name in ("R", "A11", "T1", "S"):
        a = complex(getattr(ex, name).value())
        b = complex(getattr(fl, name).value())
        assert abs(a - b) < 1e-9 * max(1, abs(a)), name


def test_first_derivative_is_frame_derivative():
    ph = ellipsoid_pack((F(10, 11), 0, 0, F(1, 11)), 6)
    f = ph.field(ph.chart.pullback("z*conj(w) + re(w)^2"))
    assert (f.D("1").jet - ph.apply("1", f.jet)).is_zero()
    assert f.D("1").ttype == TensorType(1, 0, 0, 0)


@pytest.mark.parametrize("w,wp", [(1, -2), (2, -1), (0, 1), (3, 3), (-1, 0)])
def test_density_commutators(w, wp):
    ph = ellipsoid_pack((F(10, 11), 0, 0, F(1, 11)), 8)
    f = ph.field(ph.chart.pullback("z*conj(w)^2 + re(z)"), TensorType(0, 0, w, wp))
    k = F(w - wp, 3)
    lhs = f.D("1b").D("1") - f.D("1").D("1b") + (ph.Hfield * f.D("0")).scale(I)
    rhs = (ph.R * ph.Hfield * f).scale(k)
    assert (lhs.jet - rhs.jet).is_zero()
    Aud = ph.up(ph.A11)                       # A^{1bar}_1
    lhs = f.D("0").D("1") - f.D("1").D("0") - Aud * f.D("1b")
    rhs = (Aud.D("1b") * f).scale(k)
    assert (lhs.jet - rhs.jet).is_zero()


def test_rescale_zero_is_identity():
    ph = ellipsoid_pack((F(10, 11), 0, 0, F(1, 11)), 8)
    res = rescale(ph, "0")
    assert all(v == 0 for v in res.differences().values())
    for name in ("R", "A11", "T1", "S"):
        assert (getattr(res.direct, name).jet - getattr(ph, name).jet).is_zero()


@pytest.mark.parametrize("ups", ["re(z)*im(w)", "abs2(z) - 2*re(w)", "im(z^2*conj(w))"])
def test_rescale_two_paths(ups):
    ph = ellipsoid_pack((F(10, 11), 0, 0, F(1, 11)), 9)
    d = rescale(ph, ups).differences()
    assert d["R"] == 0 and d["T1"] == 0 and d["S"] == 0
    assert d["A11_corrected"] == 0


def test_torsion_law_without_i_fails():
    ph = ellipsoid_pack((F(10, 11), 0, 0, F(1, 11)), 8)
    d = rescale(ph, "re(z)*im(w)").differences()
    assert d["A11"] > 0 and d["A11_corrected"] == 0


def test_sphere_torsion_rescale():
    ph = sphere_pack((0, F(3, 5), 0, F(4, 5)), 8)
    d = rescale(ph, "re(z*conj(w))").differences()
    assert d["A11_corrected"] == 0 and d["R"] == 0


def test_hyperquadric_r_rescale():
    ph = pack(HYPERQUADRIC, (0, 0, 0, 0), 8)
    res = rescale(ph, "im(z^2)")
    assert res.differences()["R"] == 0
    assert not res.direct.R.jet.is_zero()


def test_float_rescale():
    ph = ellipsoid_pack((10 / 11, 0.0, 0.0, 1 / 11), 9, "float")
    d = rescale(ph, "re(z)*im(w) + 0.3").differences()
    for k in ("R", "A11_corrected", "T1", "S"):
        assert d[k] < 1e-8, k


def test_upsilon_shift_exact():
    ph = ellipsoid_pack((F(10, 11), 0, 0, F(1, 11)), 7)
    Y = upsilon_field(ph, "re(w) + 7")
    assert Y.value() == 0


def test_ellipsoid_at_t_zero_is_sphere():
    ph = pack(ELLIPSOID, (0, F(3, 5), 0, F(4, 5)), 6, t=F(0))
    assert is_const(ph.R.jet, 2)
