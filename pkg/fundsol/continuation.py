"""
The meromorphic family z -> <p(z-1), f> = (2 pi)^{-n} int p(xi)^{z-1} f^(xi) dxi.

Pulling back by y = r p(theta)^{1/k} turns the pairing into a one-dimensional
Mellin-type integral of the amplitude

    G(y) = y^{n-1} int_{S^{n-1}} f^(y p(theta)^{-1/k} theta) p(theta)^{-n/k} dtheta,

    <p(z-1), f> = (2 pi)^{-n} int_0^inf y^w G(y) dy,     w = k (z - 1).

m integrations by parts continue it to Re(w) + max(n-1, m) > -1:

    (2 pi)^{-n} (-1)^m / prod_{j=1..m} (w + j) * int_0^inf y^{w+m} G^{(m)}(y) dy.

Laurent coefficients around z = 0 (or any candidate pole) come from the
trapezoid rule on a circle, i.e. an FFT of the values at the contour nodes.
"""

import dataclasses
import math

import numpy as np

from .config import RunConfig
from .errors import DepthExceeded, InvalidConfig, OnPole, StripViolation
from .log import debug as _log_debug, warn as _log_warn
from .pairing import pullback_weights, radial_rule_for, sphere_profile
from .quadrature import sphere_rule
from .schwartz import MAX_DERIVATIVE, value_at_origin
from .symbols import apply_operator

POLE_TOLERANCE = 1e-10
NOISE_FLOOR = 1e-9
MAX_POLE_ORDER = 8
NULL_TOLERANCE = 1e-8


def _log_d(msg):
    _log_debug("Continuation", msg)


def _log_w(msg):
    _log_warn("Continuation", msg)


# ---------------------------------------------------------------------------
# Amplitude G
# ---------------------------------------------------------------------------

def g_amplitude(s, f, y1, sphere, workers=1):
    """G(y1), the pullback of f^ under y = r p(theta)^{1/k}."""
    return g_derivative(s, f, 0, y1, sphere, workers)


def g_derivative(s, f, m, y1, sphere, workers=1):
    """d^m G / dy^m at y1; the m-th ray derivative picks up p(theta)^{-m/k}."""
    weights, scales = pullback_weights(s, sphere)
    profile = sphere_profile(f, sphere.nodes, weights, scales, [m], [float(y1)], workers)
    return complex(profile[m][0])


# ---------------------------------------------------------------------------
# Laurent expansion
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class LaurentExpansion:
    center: complex
    pole_order: int
    coefficients: dict  # j -> mu_j
    contour_radius: float
    node_count: int

    def mu(self, j):
        return self.coefficients[j]

    def evaluate(self, z):
        """Truncated series sum_j mu_j (z - center)^j."""
        h = complex(z) - self.center
        return sum(c * h ** j for j, c in sorted(self.coefficients.items()))

    def to_rows(self):
        return [{"j": j, "re": c.real, "im": c.imag, "abs": abs(c)}
                for j, c in sorted(self.coefficients.items())]


class MeromorphicFamily:
    """
    <p(z-1), f> for one symbol and one test function.

    G^{(m)} on the radial nodes does not depend on z, so each order is
    computed once and reused across every contour node.
    """

    def __init__(self, s, f, config=None):
        if f.dimension != s.dimension:
            raise ValueError("symbol dimension %d != test function dimension %d"
                             % (s.dimension, f.dimension))
        self.symbol = s
        self.f = f
        self.config = config or RunConfig()
        self.sphere = sphere_rule(s.dimension, self.config.sphere_level)
        self.weights, self.scales = pullback_weights(s, self.sphere)
        self.width = f.decay_width() * s.sphere_max ** (-2.0 / float(s.degree))
        self._profiles = {}

    @property
    def base_order(self):
        k = self.symbol.degree
        return k if self.symbol.integer_degree else int(math.floor(k)) + 1

    def _profile(self, m, top):
        key = (m, top)
        if key not in self._profiles:
            rule = radial_rule_for(self.symbol, self.f, self.config, width=self.width,
                                   extra_degree=2 * m + top)
            values = sphere_profile(self.f, self.sphere.nodes, self.weights, self.scales,
                                    [m], rule.nodes, self.config.workers)[m]
            self._profiles[key] = (rule, values)
            _log_d("G^(%d) cached on %d radial nodes, R=%.4g" % (m, len(rule), rule.radius))
        return self._profiles[key]

    def order_for(self, z, depth=0):
        """Integrations by parts used at z; OnPole at a genuine candidate pole."""
        n = self.symbol.dimension
        w = float(self.symbol.degree) * (complex(z) - 1.0)
        m = self.base_order + int(depth)
        if m > MAX_DERIVATIVE:
            raise DepthExceeded("%d integrations by parts exceed the derivative limit %d"
                                % (m, MAX_DERIVATIVE))
        if w.real + max(n - 1, m) <= -1.0:
            raise StripViolation("z=%s is outside the strip of %d integrations by parts"
                                 % (complex(z), m))
        for j in range(1, m + 1):
            if abs(w + j) < POLE_TOLERANCE:
                if j <= n - 1:
                    # G vanishes to order n-1 at 0: fewer integrations suffice.
                    return j - 1
                raise OnPole("z=%s sits on the candidate pole w=-%d" % (complex(z), j))
        return m

    def evaluate(self, z, depth=0):
        z = complex(z)
        k = float(self.symbol.degree)
        w = k * (z - 1.0)
        m = self.order_for(z, depth)
        top = max(int(math.ceil(k)), int(math.ceil(w.real)))
        rule, values = self._profile(m, top)
        powers = np.exp((w + m) * np.log(rule.nodes))
        integral = np.dot(rule.weights, powers * values)
        factor = (-1.0) ** m / np.prod([w + j for j in range(1, m + 1)])
        return complex(factor * integral / (2.0 * math.pi) ** self.symbol.dimension)

    def laurent(self, center=0.0, radius=None, nodes=None, j_min=-2, j_max=4, depth=0):
        """
        Laurent coefficients of z -> <p(z-1), f> around `center`.

        mu_j = (1/2 pi i) oint f(z) (z - center)^{-j-1} dz by the trapezoid
        rule on |z - center| = radius; a node landing on a pole moves every
        node by half a step and the contour is evaluated once more.
        """
        k = float(self.symbol.degree)
        radius = radius if radius is not None else self.config.contour_radius_for(k)
        count = nodes if nodes is not None else self.config.contour_nodes
        center = complex(center)
        reach = max(-j_min, j_max, MAX_POLE_ORDER + 1)
        if reach >= count // 2:
            raise InvalidConfig("coefficients up to |j|=%d alias on %d contour nodes; "
                                "use more than %d nodes" % (reach, count, 2 * reach))
        try:
            phase, values = self._contour(center, radius, count, 0.0, depth)
        except OnPole as e:
            _log_w("%s; shifting contour nodes by half a step" % e)
            phase, values = self._contour(center, radius, count, math.pi / count, depth)

        spectrum = np.fft.fft(values) / count

        def coefficient(j):
            return complex(spectrum[j % count] * radius ** (-j) * np.exp(-1j * j * phase))

        mu0 = abs(coefficient(0))
        floor = NOISE_FLOOR * max(1.0, mu0)
        order = 0
        for j in range(1, MAX_POLE_ORDER + 1):
            if abs(coefficient(-j)) > floor:
                order = j
        low = min(j_min, -order - 1)
        coefficients = {j: coefficient(j) for j in range(low, j_max + 1)}
        noisy = [j for j in range(1, j_max + 1) if NOISE_FLOOR * radius ** (-j) > mu0]
        if noisy:
            _log_w("mu_j for j >= %d may be dominated by noise amplified by radius^-j "
                   "(radius %g, |mu_0| %.3g)" % (noisy[0], radius, mu0))
        return LaurentExpansion(center, order, coefficients, float(radius), int(count))

    def _contour(self, center, radius, count, phase, depth):
        angles = phase + 2.0 * math.pi * np.arange(count) / count
        points = center + radius * np.exp(1j * angles)
        return phase, np.array([self.evaluate(z, depth) for z in points])


def pz_pairing(s, f, z, depth=0, config=None):
    """<p(z-1), f> through the amplitude G and `depth` extra integrations by parts."""
    return MeromorphicFamily(s, f, config).evaluate(z, depth)


def pz_pairing_polar(s, f, z, config=None):
    """
    (2 pi)^{-n} int int r^{k(z-1)+n-1} p(theta)^{z-1} f^(r theta) dr dtheta, directly.

    Only converges for Re(k(z-1)) + n - 1 > -1; used to cross-check the
    pullback route.
    """
    config = config or RunConfig()
    z = complex(z)
    n, k = s.dimension, float(s.degree)
    w = k * (z - 1.0)
    if w.real + n - 1 <= -1.0:
        raise StripViolation("polar form needs Re(k(z-1)) > -n, got z=%s" % z)
    sphere = sphere_rule(n, config.sphere_level)
    p = s.eval(sphere.nodes)
    weights = sphere.weights * np.exp((z - 1.0) * np.log(p))
    rule = radial_rule_for(s, f, config, extra_degree=max(0, int(math.ceil(w.real))))
    profile = sphere_profile(f, sphere.nodes, weights, np.ones(len(sphere)), [0], rule.nodes,
                             config.workers)[0]
    value = np.dot(rule.weights, np.exp(w * np.log(rule.nodes)) * profile)
    return complex(value / (2.0 * math.pi) ** n)


def laurent(s, f, radius=None, nodes=None, j_min=-2, j_max=4, config=None):
    """Laurent expansion of <p(z-1), f> at z = 0; mu_0 is a fundamental solution."""
    return MeromorphicFamily(s, f, config).laurent(0.0, radius, nodes, j_min, j_max)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class DeltaReport:
    symbol: str
    test_fn: str
    lhs: complex
    rhs: complex
    singular_max: float
    tolerance: float

    @property
    def abs_err(self):
        return abs(self.lhs - self.rhs)

    @property
    def passed(self):
        scale = 1.0 + abs(self.rhs)
        return bool(self.abs_err <= self.tolerance * scale
                    and self.singular_max <= self.tolerance * scale)

    def to_dict(self):
        return {
            "symbol": self.symbol,
            "test_fn": self.test_fn,
            "lhs": self.lhs.real,
            "rhs": self.rhs.real,
            "abs_err": self.abs_err,
            "pass": self.passed,
        }


def verify_delta_limit(s, f, config=None, test_fn=""):
    """lim_{z->0} <p(z-1), P(D) f> against f(0); the singular part must vanish."""
    config = config or RunConfig()
    expansion = laurent(s, apply_operator(s, f), config=config)
    singular = max((abs(c) for j, c in expansion.coefficients.items() if j < 0), default=0.0)
    return DeltaReport(s.describe(), test_fn, expansion.mu(0), value_at_origin(f),
                       float(singular), config.tolerance)


@dataclasses.dataclass(frozen=True)
class NullReport:
    j: int
    mu_f: complex
    mu_pf: complex

    @property
    def scale(self):
        return abs(self.mu_f) + 1.0

    @property
    def passed(self):
        return bool(abs(self.mu_pf) <= NULL_TOLERANCE * self.scale)

    @property
    def vacuous(self):
        return bool(abs(self.mu_f) <= NULL_TOLERANCE)

    def to_dict(self):
        return {"j": self.j, "mu_f": abs(self.mu_f), "mu_pf": abs(self.mu_pf),
                "pass": self.passed, "vacuous": self.vacuous}


def verify_null_relations(s, f, j, config=None):
    """<mu_j, P(D) f> = 0 for j < 0, the pairing form of P(D) mu_j = 0."""
    if j >= 0:
        raise ValueError("null relations concern negative j, got %d" % j)
    low = min(j, -2)
    mu_f = laurent(s, f, j_min=low, config=config).mu(j)
    mu_pf = laurent(s, apply_operator(s, f), j_min=low, config=config).mu(j)
    report = NullReport(j, mu_f, mu_pf)
    if report.vacuous:
        _log_w("mu_%d(f) vanishes for %s; the null relation holds trivially" % (j, s.describe()))
    return report


@dataclasses.dataclass(frozen=True)
class PoleReport:
    j: int
    location: float
    residue: complex
    pole_order: int
    depth: int
    status: str

    def to_dict(self):
        return {"j": self.j, "z": self.location, "re": self.residue.real,
                "im": self.residue.imag, "abs": abs(self.residue),
                "pole_order": self.pole_order, "status": self.status}


def _scan_depth(family, j, radius):
    """Extra integrations by parts so the whole circle around -j/k lies in the strip."""
    k = float(family.symbol.degree)
    n = family.symbol.dimension
    lowest = k * (-j / k - radius - 1.0)
    if lowest + n - 1 > -1.0:
        return 0
    needed = int(math.floor(-1.0 - lowest)) + 1
    return max(0, needed - family.base_order)


def pole_scan(s, f, j_list, config=None):
    """Residues at the candidate poles z = -j/k."""
    config = config or RunConfig()
    family = MeromorphicFamily(s, f, config)
    k = float(s.degree)
    radius = 1.0 / (4.0 * k)
    reports = []
    for j in j_list:
        if j < 1:
            raise ValueError("candidate poles are indexed by j >= 1, got %d" % j)
        depth = _scan_depth(family, j, radius)
        if depth > 4 * k:
            raise StripViolation("candidate pole -%d/%g needs depth %d > %g"
                                 % (j, k, depth, 4 * k))
        if depth:
            _log_w("depth raised to %d for the candidate pole at z=%.6g" % (depth, -j / k))
        expansion = family.laurent(-j / k, radius, config.contour_nodes, -2, 2, depth)
        residue = expansion.mu(-1)
        floor = NOISE_FLOOR * max(1.0, abs(expansion.mu(0)))
        status = "pole" if abs(residue) > floor else "vanishing residue at candidate pole"
        reports.append(PoleReport(int(j), -j / k, residue, expansion.pole_order, depth, status))
    return reports
