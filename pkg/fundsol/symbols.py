"""
Homogeneous elliptic symbols p_k and the operators P(D) they quantize.

Two forms are supported:
  Polynomial   : sum of c_e xi^e with every |e| = k, k even, rational c_e
  RadialPower  : c |xi|^alpha with c > 0 and any real alpha > 0

Expression grammar (parse_symbol):
    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' natural)?
    base   := variable | rational | '(' expr ')'
    variable := 'x' natural           (1-indexed, <= n)
    'norm^a' (a a positive decimal) only as the whole expression,
    optionally preceded by 'rational *'.

Ellipticity is checked numerically: a dense sphere scan followed by a local
Nelder–Mead polish of the best scan points. The minimum found is cached as
ellipticity_margin and must exceed 1e-9.
"""

import dataclasses
import re
from fractions import Fraction

import numpy as np
import scipy.optimize

from .errors import (NotElliptic, NotHomogeneous, NotUnit, OddDegree, ParseError,
                     UnsupportedDimension, UnsupportedSymbolForm)
from .quadrature import MAX_DIMENSION, sphere_rule

ELLIPTICITY_THRESHOLD = 1e-9
UNIT_TOLERANCE = 1e-12
SCAN_POINTS = 10000
POLISH_STARTS = 3

_RATIONAL = r"\d+/\d+|\d+(?:\.\d+)?"
_TOKEN = re.compile(r"\s*(?:(?P<num>(?:%s))|(?P<var>x\d+)|(?P<norm>norm)|(?P<op>[-+*^()]))" % _RATIONAL)
_RADIAL = re.compile(r"^\s*(?:(?P<scale>(?:%s))\s*\*\s*)?norm\s*(?:\^\s*(?P<alpha>\d+(?:\.\d+)?))?\s*$"
                     % _RATIONAL)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError("unexpected character %r at position %d in %r"
                             % (text[pos:pos + 1], pos, text))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


def _rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError("invalid rational %r" % text)


def _poly_mul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, Fraction(0)) + ca * cb
    return {e: c for e, c in out.items() if c != 0}


def _poly_add(a, b, sign=1):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, Fraction(0)) + sign * c
    return {e: c for e, c in out.items() if c != 0}


class _Parser:
    """Recursive descent over the token list; polynomials are {exponent: Fraction}."""

    def __init__(self, text, n):
        self.text = text
        self.n = n
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, len(self.text))

    def _take(self):
        tok = self._peek()
        self.pos += 1
        return tok

    def _expect(self, value):
        kind, val, where = self._take()
        if val != value:
            raise ParseError("expected %r at position %d in %r" % (value, where, self.text))

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression")
        poly = self._expr()
        kind, val, where = self._peek()
        if kind is not None:
            raise ParseError("unexpected %r at position %d in %r" % (val, where, self.text))
        return poly

    def _expr(self):
        poly = self._term()
        while self._peek()[1] in ("+", "-"):
            sign = 1 if self._take()[1] == "+" else -1
            poly = _poly_add(poly, self._term(), sign)
        return poly

    def _term(self):
        poly = self._factor()
        while self._peek()[1] == "*":
            self._take()
            poly = _poly_mul(poly, self._factor())
        return poly

    def _factor(self):
        base = self._base()
        if self._peek()[1] != "^":
            return base
        self._take()
        kind, val, where = self._take()
        if kind != "num" or not val.isdigit():
            raise ParseError("exponent must be a natural number at position %d in %r"
                             % (where, self.text))
        out = {(0,) * self.n: Fraction(1)}
        for _ in range(int(val)):
            out = _poly_mul(out, base)
        return out

    def _base(self):
        kind, val, where = self._take()
        if kind == "num":
            c = _rational(val)
            return {(0,) * self.n: c} if c != 0 else {}
        if kind == "var":
            index = int(val[1:])
            if not 1 <= index <= self.n:
                raise ParseError("variable %s out of range for dimension %d" % (val, self.n))
            exp = [0] * self.n
            exp[index - 1] = 1
            return {tuple(exp): Fraction(1)}
        if val == "(":
            poly = self._expr()
            self._expect(")")
            return poly
        if kind == "norm":
            raise ParseError("'norm^a' must be the whole expression, optionally scaled: %r"
                             % self.text)
        raise ParseError("unexpected %r at position %d in %r"
                         % (val if val is not None else "end of input", where, self.text))


def parse_polynomial(text, n):
    """Parse a polynomial expression in x1..xn into {exponent tuple: Fraction}."""
    return _Parser(text, n).parse()


# ---------------------------------------------------------------------------
# Symbols
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class Polynomial:
    terms: tuple  # ((exponent tuple, Fraction), ...)


@dataclasses.dataclass(frozen=True)
class RadialPower:
    scale: float
    exponent: float


@dataclasses.dataclass(frozen=True)
class HomogeneousSymbol:
    """A validated p_k. Build through parse_symbol, polynomial_symbol or radial_symbol."""
    dimension: int
    degree: object  # int for polynomials and integral radial powers, else float
    form: object
    ellipticity_margin: float
    sphere_max: float
    text: str = ""

    @property
    def is_polynomial(self):
        return isinstance(self.form, Polynomial)

    @property
    def integer_degree(self):
        return isinstance(self.degree, int)

    def describe(self):
        return self.text or _render(self.form, self.dimension)

    def eval(self, xi):
        """p_k(xi) for one point (float) or an array of points (..., n)."""
        return _evaluate(self.form, xi)

    def restrict_to_sphere(self, theta):
        theta = np.asarray(theta, dtype=float)
        norm = np.linalg.norm(theta, axis=-1)
        if np.any(np.abs(norm - 1.0) > UNIT_TOLERANCE):
            raise NotUnit("|theta| = %r is off the unit sphere" % norm)
        return self.eval(theta)

    def as_polynomial(self):
        """Exponent/coefficient pairs of p_k, if p_k is a polynomial multiplier."""
        if self.is_polynomial:
            return self.form.terms
        alpha = self.form.exponent
        if self.integer_degree and self.degree % 2 == 0:
            square = {tuple(2 if j == i else 0 for j in range(self.dimension)): Fraction(1)
                      for i in range(self.dimension)}
            poly = {(0,) * self.dimension: Fraction(self.form.scale).limit_denominator(10 ** 12)}
            for _ in range(self.degree // 2):
                poly = _poly_mul(poly, square)
            return tuple(sorted(poly.items()))
        raise UnsupportedSymbolForm(
            "c|xi|^%g is not a polynomial multiplier (exponent must be an even integer)" % alpha)


def _evaluate(form, xi):
    xi = np.asarray(xi, dtype=float)
    if isinstance(form, RadialPower):
        value = form.scale * np.linalg.norm(xi, axis=-1) ** form.exponent
    else:
        value = np.zeros(xi.shape[:-1])
        for exp, c in form.terms:
            value = value + float(c) * np.prod(xi ** np.asarray(exp), axis=-1)
    if xi.ndim == 1:
        return float(value)
    return value


def _render(form, n):
    if isinstance(form, RadialPower):
        return "%s*norm^%s" % (form.scale, form.exponent)
    parts = []
    for exp, c in form.terms:
        mono = "*".join("x%d^%d" % (i + 1, e) if e > 1 else "x%d" % (i + 1)
                        for i, e in enumerate(exp) if e)
        parts.append(mono if c == 1 else "%s*%s" % (c, mono))
    return " + ".join(parts)


def _scan_nodes(n):
    level = 1
    while True:
        rule = sphere_rule(n, level)
        if len(rule) >= SCAN_POINTS:
            return rule.nodes
        level += 1


def _polish(form, start, sign):
    """Local extremum of sign * p on the sphere, via p(x/|x|) over R^n."""

    def objective(x):
        norm = np.linalg.norm(x)
        if norm == 0.0:
            return np.inf
        return sign * _evaluate(form, x / norm)

    result = scipy.optimize.minimize(objective, start, method="Nelder-Mead",
                                     options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
    return sign * float(result.fun), result.x / np.linalg.norm(result.x)


def _sphere_extrema(form, n):
    nodes = _scan_nodes(n)
    values = _evaluate(form, nodes)
    order = np.argsort(values)
    lowest, where = float(values[order[0]]), nodes[order[0]]
    for i in order[:POLISH_STARTS]:
        value, point = _polish(form, nodes[i], 1.0)
        if value < lowest:
            lowest, where = value, point
    highest = float(values[order[-1]])
    for i in order[-POLISH_STARTS:]:
        highest = max(highest, _polish(form, nodes[i], -1.0)[0])
    return lowest, where, highest


def _check_dimension(n):
    if not 2 <= n <= MAX_DIMENSION:
        raise UnsupportedDimension("symbols are supported for 2 <= n <= %d, got %d"
                                   % (MAX_DIMENSION, n))


def polynomial_symbol(terms, n, text=""):
    """Validate {exponent: coefficient} as an even-degree elliptic homogeneous polynomial."""
    _check_dimension(n)
    poly = {tuple(e): Fraction(c) for e, c in dict(terms).items() if Fraction(c) != 0}
    degrees = sorted({sum(e) for e in poly})
    if not degrees:
        raise NotElliptic("the zero polynomial is not elliptic")
    if len(degrees) > 1:
        raise NotHomogeneous("mixed total degrees %s in %r" % (degrees, text or poly))
    k = degrees[0]
    if k == 0:
        raise NotElliptic("a constant symbol does not vanish at xi = 0")
    if k % 2:
        raise OddDegree("polynomial of odd degree %d cannot be elliptic" % k)
    form = Polynomial(tuple(sorted(poly.items())))
    lowest, where, highest = _sphere_extrema(form, n)
    if lowest <= ELLIPTICITY_THRESHOLD:
        raise NotElliptic("min of p over the sphere is %.3g at theta=%s"
                          % (lowest, np.array2string(where, precision=4)))
    return HomogeneousSymbol(n, k, form, lowest, highest, text)


def radial_symbol(scale, alpha, n, text=""):
    """c |xi|^alpha with c > 0, alpha > 0."""
    _check_dimension(n)
    scale, alpha = float(scale), float(alpha)
    if scale <= 0.0:
        raise NotElliptic("radial scale must be positive, got %r" % scale)
    if alpha <= 0.0:
        raise NotHomogeneous("radial exponent must be positive, got %r" % alpha)
    degree = int(alpha) if alpha.is_integer() else alpha
    return HomogeneousSymbol(n, degree, RadialPower(scale, alpha), scale, scale, text)


def parse_symbol(text, dimension):
    """Parse and validate a symbol expression; see the module docstring for the grammar."""
    m = _RADIAL.match(text)
    if m:
        scale = float(_rational(m.group("scale"))) if m.group("scale") else 1.0
        alpha = float(m.group("alpha")) if m.group("alpha") else 1.0
        return radial_symbol(scale, alpha, dimension, text=text.strip())
    _check_dimension(dimension)
    return polynomial_symbol(parse_polynomial(text, dimension), dimension, text=text.strip())


def apply_operator(s, f):
    """P(D) f: the test function with transform p_k(xi) f^(xi)."""
    if f.dimension != s.dimension:
        raise ValueError("symbol dimension %d != test function dimension %d"
                         % (s.dimension, f.dimension))
    terms = s.as_polynomial()
    return f.multiply_polynomial((e, float(c)) for e, c in terms)
