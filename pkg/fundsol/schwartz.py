"""
Exactly manipulable Schwartz test functions, stored on the Fourier side.

A TestFunction is a finite sum of GaussTerms

    f^(xi) = sum_t  poly_t(xi) * exp(-s_t |xi|^2 / 2) * exp(i <b_t, xi>)

with complex polynomial coefficients, widths s_t > 0 and modulations b_t.
The Fourier convention is f^(xi) = int exp(-i <y, xi>) f(y) dy, so spatial
values come out of value_at_origin() (closed-form Gaussian moments) and
translate(). Multiplying by a polynomial symbol keeps the class closed,
which is what makes the operator action exact.

JSON form (CLI round-tripping):
{
    "dimension": 2,
    "terms": [
        {"poly": {"0,0": [6.283185307179586, 0.0]}, "width": 1.0, "modulation": [0.0, 0.0]}
    ]
}
"""

import dataclasses
import json
import math

import numpy as np

from .errors import DepthExceeded

MAX_DERIVATIVE = 64


# ---------------------------------------------------------------------------
# Polynomials: sorted tuples of (exponent tuple, complex coefficient)
# ---------------------------------------------------------------------------

def freeze_poly(items):
    """Merge duplicate exponents, drop zeros, sort. Accepts a dict or pairs."""
    merged = {}
    pairs = items.items() if isinstance(items, dict) else items
    for exp, coef in pairs:
        exp = tuple(int(e) for e in exp)
        merged[exp] = merged.get(exp, 0j) + complex(coef)
    return tuple(sorted((e, c) for e, c in merged.items() if c != 0))


def poly_multiply(a, b):
    out = {}
    for ea, ca in a:
        for eb, cb in b:
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0j) + complex(ca) * complex(cb)
    return freeze_poly(out)


@dataclasses.dataclass(frozen=True)
class GaussTerm:
    poly: tuple
    width: float
    modulation: tuple

    @property
    def degree(self):
        return max((sum(e) for e, _ in self.poly), default=0)


@dataclasses.dataclass(frozen=True)
class TestFunction:
    """Fourier-side data f^ of a Schwartz function on R^n."""
    __test__ = False  # not a pytest class

    dimension: int
    terms: tuple

    def __post_init__(self):
        for term in self.terms:
            if not term.width > 0.0:
                raise ValueError("Gaussian width must be positive, got %r" % term.width)
            if len(term.modulation) != self.dimension:
                raise ValueError("modulation has %d entries, dimension is %d"
                                 % (len(term.modulation), self.dimension))
            for exp, _ in term.poly:
                if len(exp) != self.dimension:
                    raise ValueError("exponent %r does not match dimension %d"
                                     % (exp, self.dimension))

    # --- linear structure ---

    def __add__(self, other):
        if other.dimension != self.dimension:
            raise ValueError("cannot add test functions of dimension %d and %d"
                             % (self.dimension, other.dimension))
        return TestFunction(self.dimension, self.terms + other.terms)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        terms = tuple(dataclasses.replace(t, poly=freeze_poly((e, scalar * c) for e, c in t.poly))
                      for t in self.terms)
        return TestFunction(self.dimension, terms)

    __rmul__ = __mul__

    # --- envelope data used to size radial rules ---

    def degree(self):
        return max((t.degree for t in self.terms), default=0)

    def decay_width(self):
        return min((t.width for t in self.terms), default=1.0)

    def tail_bound(self, radius):
        """Upper bound for |f^(xi)| on |xi| = radius (sharp once radius^2 >= degree/width)."""
        total = 0.0
        for t in self.terms:
            envelope = math.exp(-0.5 * t.width * radius * radius)
            total += sum(abs(c) * radius ** sum(e) for e, c in t.poly) * envelope
        return total

    def multiply_polynomial(self, poly):
        """Test function whose transform is poly(xi) * f^(xi)."""
        poly = freeze_poly(poly)
        terms = tuple(dataclasses.replace(t, poly=poly_multiply(t.poly, poly))
                      for t in self.terms)
        return TestFunction(self.dimension, terms)

    # --- JSON ---

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "terms": [{
                "poly": {",".join(str(e) for e in exp): [c.real, c.imag] for exp, c in t.poly},
                "width": t.width,
                "modulation": list(t.modulation),
            } for t in self.terms],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(',', ':'))

    @classmethod
    def from_dict(cls, data):
        n = int(data["dimension"])
        terms = []
        for raw in data.get("terms", []):
            poly = freeze_poly(
                (tuple(int(x) for x in key.split(",")), complex(val[0], val[1]))
                for key, val in raw["poly"].items())
            modulation = tuple(float(b) for b in raw.get("modulation", [0.0] * n))
            terms.append(GaussTerm(poly, float(raw["width"]), modulation))
        return cls(n, tuple(terms))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def gaussian(n, s):
    """Spatial f(x) = exp(-s|x|^2/2); stored f^(xi) = (2 pi/s)^{n/2} exp(-|xi|^2/(2s))."""
    if n < 1 or s <= 0.0:
        raise ValueError("gaussian needs n >= 1 and s > 0, got n=%r s=%r" % (n, s))
    amplitude = (2.0 * math.pi / s) ** (n / 2.0)
    term = GaussTerm(((((0,) * n), complex(amplitude)),), 1.0 / s, (0.0,) * n)
    return TestFunction(n, (term,))


def polynomial_gaussian(poly, n, s):
    """poly(xi) times the transform of gaussian(n, s)."""
    return gaussian(n, s).multiply_polynomial(poly)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def eval_fourier(f, xi):
    """f^(xi) for one point (complex) or an array of points (..., n)."""
    xi = np.asarray(xi, dtype=float)
    pts = xi.reshape(-1, f.dimension)
    total = np.zeros(len(pts), dtype=complex)
    sq = np.sum(pts * pts, axis=1)
    for t in f.terms:
        if not t.poly:
            continue
        exps = np.array([e for e, _ in t.poly])
        coefs = np.array([c for _, c in t.poly])
        poly = np.prod(pts[:, None, :] ** exps[None, :, :], axis=2) @ coefs
        total += poly * np.exp(-0.5 * t.width * sq + 1j * (pts @ np.asarray(t.modulation)))
    if xi.ndim == 1:
        return complex(total[0])
    return total.reshape(xi.shape[:-1])


def _ray_polynomials(term, thetas):
    """Coefficients in t of poly(t*theta), one row per theta."""
    coeffs = np.zeros((len(thetas), term.degree + 1), dtype=complex)
    for exp, c in term.poly:
        coeffs[:, sum(exp)] += c * np.prod(thetas ** np.asarray(exp), axis=1)
    return coeffs


def _derivative_chain(coeffs, a, beta, m):
    """Q_0..Q_m with d^j/dt^j [q(t) e^{-a t^2/2 + i beta t}] = Q_j(t) e^{...}.

    Q_{j+1} = Q_j' + (-a t + i beta) Q_j, rows indexed by ray.
    """
    chain = [coeffs]
    q = coeffs
    for _ in range(m):
        rows, width = q.shape
        nxt = np.zeros((rows, width + 1), dtype=complex)
        nxt[:, :width - 1] += q[:, 1:] * np.arange(1, width)
        nxt[:, 1:] -= a[:, None] * q
        nxt[:, :width] += 1j * beta[:, None] * q
        chain.append(nxt)
        q = nxt
    return chain


def _horner(coeffs, t):
    acc = np.zeros(t.shape, dtype=complex) + coeffs[:, -1][:, None]
    for d in range(coeffs.shape[1] - 2, -1, -1):
        acc = acc * t + coeffs[:, d][:, None]
    return acc


def ray_derivatives(f, thetas, orders, t):
    """
    Exact t-derivatives of t -> f^(t*theta) for many rays at once.

    Args:
        f: TestFunction
        thetas: (N, n) ray directions (need not be unit)
        orders: iterable of derivative orders (each <= 64)
        t: (M,) points shared by every ray, or (N, M) per-ray points

    Returns:
        dict order -> complex array (N, M)
    """
    orders = sorted(set(int(m) for m in orders))
    top = orders[-1]
    if orders[0] < 0 or top > MAX_DERIVATIVE:
        raise DepthExceeded("derivative order must lie in [0, %d], got %d"
                            % (MAX_DERIVATIVE, top))
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    t = np.asarray(t, dtype=float)
    if t.ndim == 1:
        t = np.broadcast_to(t, (len(thetas), len(t)))

    out = {m: np.zeros(t.shape, dtype=complex) for m in orders}
    for term in f.terms:
        if not term.poly:
            continue
        a = term.width * np.sum(thetas * thetas, axis=1)
        beta = thetas @ np.asarray(term.modulation)
        chain = _derivative_chain(_ray_polynomials(term, thetas), a, beta, top)
        envelope = np.exp(-0.5 * a[:, None] * t * t + 1j * beta[:, None] * t)
        for m in orders:
            out[m] += _horner(chain[m], t) * envelope
    return out


def ray_derivative(f, theta, m, r):
    """d^m/dr^m [f^(r*theta)] at one radius r."""
    values = ray_derivatives(f, [theta], [m], np.array([float(r)]))
    return complex(values[m][0, 0])


def _axis_moments(top, s, beta):
    """I_e = int x^e exp(-s x^2/2 + i beta x) dx for e = 0..top.

    I_{e+1} = (i beta I_e + e I_{e-1}) / s, from integrating by parts.
    """
    moments = [math.sqrt(2.0 * math.pi / s) * math.exp(-beta * beta / (2.0 * s)) + 0j]
    prev = 0j
    for e in range(top):
        nxt = (1j * beta * moments[e] + e * prev) / s
        prev = moments[e]
        moments.append(nxt)
    return moments


def value_at_origin(f):
    """f(0) = (2 pi)^{-n} int f^ in closed form; no quadrature."""
    n = f.dimension
    total = 0j
    for t in f.terms:
        if not t.poly:
            continue
        top = max(max(e) for e, _ in t.poly)
        axes = [_axis_moments(top, t.width, b) for b in t.modulation]
        for exp, c in t.poly:
            product = c
            for axis, e in enumerate(exp):
                product *= axes[axis][e]
            total += product
    return total / (2.0 * math.pi) ** n


def translate(f, x0):
    """Test function y -> f(x0 - y); transform exp(-i <x0, xi>) f^(-xi).

    Pairing a distribution S with the result gives (S * f)(x0).
    """
    x0 = tuple(float(x) for x in x0)
    if len(x0) != f.dimension:
        raise ValueError("shift has %d entries, dimension is %d" % (len(x0), f.dimension))
    terms = []
    for t in f.terms:
        poly = tuple((e, c if sum(e) % 2 == 0 else -c) for e, c in t.poly)
        modulation = tuple(-b - x for b, x in zip(t.modulation, x0))
        terms.append(GaussTerm(poly, t.width, modulation))
    return TestFunction(f.dimension, tuple(terms))
