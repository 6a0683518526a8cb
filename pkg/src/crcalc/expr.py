"""Expression language for defining functions and auxiliary scalars.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | atom ('^' uint)?
    atom   := number | ident | ident '(' expr ')' | '(' expr ')'

Reserved identifiers are the ambient coordinates ``z`` and ``w``, the family
parameter ``t``, the imaginary unit ``i`` and the helpers ``conj``, ``re``,
``im``, ``abs2``.  Any other identifier is a real parameter that must be
bound before evaluation.  Numbers are decimal or ``p/q`` and are read
exactly.

Expansion turns an expression into a polynomial in ``(z, zb, w, wb, t)``
with Gaussian-rational coefficients; ``to_jet`` then Taylor-expands it
about a real ambient point ``(x1, x2, x3, x4)`` with ``z = x1 + i x2`` and
``w = x3 + i x4``.
"""

from dataclasses import dataclass
from fractions import Fraction
import re as _re

from .errors import ExprSyntaxError, UnboundSymbol
from .numeric import Gauss, Jet, as_gauss

__all__ = ["Expr", "Num", "Sym", "Call", "BinOp", "Neg", "Pow", "parse", "format_expr",
           "conj_expr", "expand", "free_params", "mentions_t", "to_jet", "Poly",
           "FUNCTIONS", "COORDS", "poly_diff", "eval_poly"]

FUNCTIONS = ("conj", "re", "im", "abs2")
COORDS = ("z", "w", "t", "i")


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

class Expr:
    __slots__ = ()

    def __str__(self):
        return format_expr(self)


@dataclass(frozen=True)
class Num(Expr):
    value: Fraction


@dataclass(frozen=True)
class Sym(Expr):
    name: str


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exp: int


# ---------------------------------------------------------------------------
# tokenizer and parser
# ---------------------------------------------------------------------------

_TOKEN = _re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:/\d+)?)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)"
                     r"|(?P<op>[-+*^()]))")


def _tokenize(text):
    pos, out = 0, []
    while True:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad,
                                  ("number", "identifier", "+", "-", "*", "^", "(", ")"))
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def fail(self, expected):
        kind, val, pos = self.peek()
        what = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {what}", pos, expected)

    def expect(self, val):
        if self.peek()[1] != val or self.peek()[0] != "op":
            self.fail((val,))
        return self.take()

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            node = BinOp("*", node, self.factor())
        return node

    def factor(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.factor())
        node = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.peek()
            if kind != "num" or not val.isdigit():
                self.fail(("nonnegative integer",))
            self.take()
            node = Pow(node, int(val))
        return node

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return Num(_read_number(val))
        if kind == "id":
            self.take()
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                self.fail(("operator", "end of input"))
            return Sym(val)
        if kind == "op" and val == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        self.fail(("number", "identifier", "(", "-"))


def _read_number(text):
    if "/" in text:
        p, q = text.split("/")
        if int(q) == 0:
            raise ZeroDivisionError(f"zero denominator in literal {text}")
        return Fraction(Fraction(p), int(q))
    return Fraction(text)


def parse(text):
    """Parse ``text`` into an :class:`Expr`; raises ExprSyntaxError."""
    p = _Parser(text)
    node = p.expr()
    if p.peek()[0] != "end":
        p.fail(("+", "-", "*", "end of input"))
    return node


def format_expr(e):
    """Fully parenthesized text form; ``parse(format_expr(e)) == e``."""
    if isinstance(e, Num):
        v = e.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({format_expr(e.arg)})"
    if isinstance(e, BinOp):
        return f"({format_expr(e.left)} {e.op} {format_expr(e.right)})"
    if isinstance(e, Neg):
        return f"(-{format_expr(e.arg)})"
    if isinstance(e, Pow):
        return f"({format_expr(e.base)}^{e.exp})"
    raise TypeError(f"not an expression: {e!r}")


def conj_expr(e):
    """Syntactic conjugate; parameters and literals are real."""
    if isinstance(e, Num):
        return e
    if isinstance(e, Sym):
        if e.name in ("z", "w"):
            return Call("conj", e)
        if e.name == "i":
            return Neg(e)
        return e
    if isinstance(e, Call):
        if e.fn == "conj":
            return e.arg
        if e.fn in ("re", "im", "abs2"):
            return e
    if isinstance(e, BinOp):
        return BinOp(e.op, conj_expr(e.left), conj_expr(e.right))
    if isinstance(e, Neg):
        return Neg(conj_expr(e.arg))
    if isinstance(e, Pow):
        return Pow(conj_expr(e.base), e.exp)
    raise TypeError(f"not an expression: {e!r}")


def _walk(e):
    yield e
    if isinstance(e, (Call, Neg)):
        yield from _walk(e.arg)
    elif isinstance(e, BinOp):
        yield from _walk(e.left)
        yield from _walk(e.right)
    elif isinstance(e, Pow):
        yield from _walk(e.base)


def free_params(e):
    """Names of parameters that need a binding, sorted."""
    return sorted({n.name for n in _walk(e) if isinstance(n, Sym) and n.name not in COORDS})


def mentions_t(e):
    return any(isinstance(n, Sym) and n.name == "t" for n in _walk(e))


# ---------------------------------------------------------------------------
# polynomial expansion
# ---------------------------------------------------------------------------

class Poly:
    """Polynomial in (z, zb, w, wb, t) with Gauss coefficients."""

    __slots__ = ("terms",)
    NV = 5

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def const(cls, c):
        return cls({(0,) * cls.NV: as_gauss(c)})

    @classmethod
    def gen(cls, k):
        e = [0] * cls.NV
        e[k] = 1
        return cls({tuple(e): Gauss(1)})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Poly(out)

    def __neg__(self):
        return Poly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out.get(k, 0) + va * vb
        return Poly(out)

    def __pow__(self, n):
        out, base = Poly.const(1), self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def scale(self, c):
        c = as_gauss(c)
        return Poly({k: v * c for k, v in self.terms.items()})

    def conj(self):
        return Poly({(k[1], k[0], k[3], k[2], k[4]): v.conj() for k, v in self.terms.items()})

    def is_real(self):
        return self == self.conj()

    def degree(self):
        return max((sum(k[:4]) for k in self.terms), default=0)

    def t_degree(self):
        return max((k[4] for k in self.terms), default=0)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        return f"Poly({self.terms!r})"


_GEN = {"z": 0, "w": 2, "t": 4}


def expand(e, bindings=None):
    """Expand ``e`` to a :class:`Poly`, substituting bound parameters."""
    bindings = bindings or {}
    if isinstance(e, Num):
        return Poly.const(e.value)
    if isinstance(e, Sym):
        if e.name in _GEN:
            return Poly.gen(_GEN[e.name])
        if e.name == "i":
            return Poly.const(Gauss(0, 1))
        if e.name not in bindings:
            raise UnboundSymbol(e.name)
        val = as_gauss(bindings[e.name])
        if val.im != 0:
            raise ValueError(f"parameter {e.name} must be real")
        return Poly.const(val)
    if isinstance(e, Call):
        a = expand(e.arg, bindings)
        if e.fn == "conj":
            return a.conj()
        if e.fn == "re":
            return (a + a.conj()).scale(Fraction(1, 2))
        if e.fn == "im":
            return (a - a.conj()).scale(Gauss(0, Fraction(-1, 2)))
        if e.fn == "abs2":
            return a * a.conj()
    if isinstance(e, BinOp):
        a, b = expand(e.left, bindings), expand(e.right, bindings)
        return a + b if e.op == "+" else a - b if e.op == "-" else a * b
    if isinstance(e, Neg):
        return -expand(e.arg, bindings)
    if isinstance(e, Pow):
        return expand(e.base, bindings) ** e.exp
    raise TypeError(f"not an expression: {e!r}")


def _as_poly(e, bindings):
    if isinstance(e, Poly):
        return e
    if isinstance(e, str):
        e = parse(e)
    return expand(e, bindings)


def to_jet(e, basepoint, order, t=None, adjoin_t=False, exact=True, bindings=None):
    """Taylor-expand ``e`` about the real ambient point ``basepoint``.

    With ``adjoin_t`` the parameter ``t`` becomes a fifth jet variable
    expanded about ``t = 0`` (or about ``t`` if a value is also given).
    Otherwise a numeric ``t`` is substituted; expressions mentioning ``t``
    without either raise UnboundSymbol.
    """
    p = _as_poly(e, bindings)
    nv = 5 if adjoin_t else 4
    if exact:
        bp = tuple(Fraction(x) for x in basepoint)
    else:
        bp = tuple(float(x) for x in basepoint)
    tval = 0 if t is None else (Fraction(t) if exact else float(t))
    if adjoin_t:
        bp = bp + (tval,)
    elif t is None and p.t_degree() > 0:
        raise UnboundSymbol("t")
    x = [Jet.variable(k, nv, order, exact, bp, bp[k]) for k in range(nv)]
    iu = Gauss(0, 1) if exact else 1j
    z = x[0] + x[1].scale(iu)
    w = x[2] + x[3].scale(iu)
    return eval_poly(p, (z, z.conj(), w, w.conj()), x[4] if adjoin_t else tval)


def poly_diff(p, k):
    """Formal derivative of a Poly in generator ``k`` (0..4 = z, zb, w, wb, t)."""
    out = {}
    for mono, c in p.terms.items():
        n = mono[k]
        if n:
            m = mono[:k] + (n - 1,) + mono[k + 1:]
            out[m] = out.get(m, 0) + c * n
    return Poly(out)


def eval_poly(p, gens, t):
    """Evaluate a Poly with jets ``gens = (z, zb, w, wb)`` and ``t`` a jet or number."""
    p = p if isinstance(p, Poly) else expand(p)
    proto = gens[0]
    exact = proto.exact
    t_is_jet = isinstance(t, Jet)
    cache = {}

    def power(k, n):
        key = (k, n)
        if key not in cache:
            base = gens[k] if k < 4 else t
            cache[key] = base if n == 1 else power(k, n - 1) * base
        return cache[key]

    out = proto.like(0)
    for mono, c in p.terms.items():
        term = None
        scal = c if exact else complex(c)
        for k, n in enumerate(mono):
            if n == 0:
                continue
            if k == 4 and not t_is_jet:
                scal = scal * t ** n
                continue
            f = power(k, n)
            term = f if term is None else term * f
        out = out + (scal if term is None else term.scale(scal))
    return out
