from fractions import Fraction as F
import random

import pytest

from crcalc.errors import ExprSyntaxError, UnboundSymbol
from crcalc.expr import (BinOp, Call, Neg, Num, Pow, Sym, conj_expr, expand, format_expr,
                         free_params, parse, to_jet)
from crcalc.numeric import Gauss

SPHERE = "1 - abs2(z) - abs2(w)"
ELLIPSOID = "1 - (abs2(z)+abs2(w)) - t*(2*re(z)^2 + 3*re(w)^2)"
PROBE = "2*im(w) - abs2(z) - a*z^4*conj(z)^4"


def test_parse_examples():
    assert parse("5") == Num(F(5))
    assert parse(SPHERE) == BinOp("-", BinOp("-", Num(F(1)), Call("abs2", Sym("z"))),
                                  Call("abs2", Sym("w")))
    e = parse(ELLIPSOID)
    assert isinstance(e, BinOp) and e.op == "-"
    assert free_params(parse(PROBE)) == ["a"]
    assert parse("-x^2") == Neg(Pow(Sym("x"), 2))
    assert parse("0.25") == Num(F(1, 4))
    assert parse("3/4") == Num(F(3, 4))


@pytest.mark.parametrize("text, pos", [
    ("1 + ", 4), ("z ^ w", 4), ("(z", 2), ("z $ w", 2), ("re z", 3), ("z w", 2), ("z^1.5", 2),
])
def test_syntax_errors(text, pos):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text)
    assert info.value.position == pos
    assert info.value.expected


def random_expr(rng, depth):
    if depth == 0 or rng.random() < 0.2:
        c = rng.choice(["num", "z", "w", "t", "a", "i"])
        if c == "num":
            return Num(F(rng.randint(0, 9), rng.randint(1, 4)))
        return Sym(c)
    kind = rng.choice(["bin", "neg", "pow", "call"])
    if kind == "bin":
        return BinOp(rng.choice("+-*"), random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if kind == "neg":
        return Neg(random_expr(rng, depth - 1))
    if kind == "pow":
        return Pow(random_expr(rng, depth - 1), rng.randint(0, 3))
    return Call(rng.choice(["conj", "re", "im", "abs2"]), random_expr(rng, depth - 1))


def test_round_trip():
    rng = random.Random(0)
    for _ in range(300):
        e = random_expr(rng, 4)
        assert parse(format_expr(e)) == e


def test_double_conjugation():
    rng = random.Random(1)
    b = {"a": F(2, 3)}
    for _ in range(60):
        e = random_expr(rng, 3)
        assert expand(conj_expr(conj_expr(e)), b) == expand(e, b)
        assert expand(conj_expr(e), b) == expand(e, b).conj()
        assert expand(Call("conj", e), b) == expand(conj_expr(e), b)


def test_unbound():
    with pytest.raises(UnboundSymbol):
        expand(parse(PROBE))
    with pytest.raises(UnboundSymbol):
        to_jet(ELLIPSOID, (0, 0, 1, 0), 2)


def test_constant_jet():
    j = to_jet("5", (0, 0, 0, 0), 3)
    assert j.to_dict() == {(0, 0, 0, 0): 5}


def test_sphere_jet_at_pole():
    j = to_jet(SPHERE, (0, 0, 1, 0), 2)
    # 1 - x1^2 - x2^2 - (1 + x3)^2 - x4^2
    assert j.to_dict() == {(0, 0, 1, 0): -2, (2, 0, 0, 0): -1, (0, 2, 0, 0): -1,
                           (0, 0, 2, 0): -1, (0, 0, 0, 2): -1}


def test_ellipsoid_t_adjoined():
    j = to_jet(ELLIPSOID, (0, 0, 1, 0), 3, adjoin_t=True)
    t_lin = {e[:4]: c for e, c in j.items() if e[4] == 1}
    # -(2 x1^2 + 3 (1 + x3)^2)
    assert t_lin == {(0, 0, 0, 0): -3, (0, 0, 1, 0): -6, (0, 0, 2, 0): -3, (2, 0, 0, 0): -2}
    assert all(e[4] <= 1 for e, _ in j.items())


def test_conjugation_symmetry_of_jets():
    rng = random.Random(4)
    for _ in range(20):
        e = random_expr(rng, 3)
        a = to_jet(e, (F(1, 2), 0, F(1, 3), -1), 4, t=F(1, 5), bindings={"a": 1})
        b = to_jet(Call("conj", e), (F(1, 2), 0, F(1, 3), -1), 4, t=F(1, 5), bindings={"a": 1})
        assert b == a.conj()


def test_reality():
    e = parse("re(z^2*w) + im(z*conj(w))^2 - 3*abs2(z - i*w)")
    j = to_jet(e, (F(1, 3), F(-1, 2), 2, F(1, 7)), 5)
    assert not any(j.im)
    assert expand(e).is_real()


def test_float_mode():
    j = to_jet(SPHERE, (0.6, 0, 0.8, 0), 2, exact=False)
    assert abs(j.constant_term()) < 1e-15
    assert abs(j.coeff((1, 0, 0, 0)) + 1.2) < 1e-15
