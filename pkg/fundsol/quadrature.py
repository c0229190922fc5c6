"""
Deterministic quadrature rules.

  SphereRule  : product rules on S^{n-1}: trapezoid on the circle,
                Gauss–Legendre x trapezoid on S^2, Gauss–Jacobi per polar
                angle x trapezoid in the azimuth for n >= 4.
  RadialRule  : composite 16-point Gauss–Legendre on [0, R]: geometric
                panels (ratio 1/4) toward r = 0 resolve r^a (a > -1) and
                log(r) singularities, uniform panels out to the radius R
                where the Gaussian tail drops below eps_tail.

Node counts per level:
  n = 2   16*2^level angles
  n = 3   4*2^level polar x 8*2^level azimuth
  n >= 4  2^(level-1) per polar angle x 2^level azimuth
"""

import dataclasses
import math

import numpy as np
import scipy.optimize
import scipy.special

from .errors import BadTolerance, InvalidConfig, UnsupportedDimension

MAX_DIMENSION = 8
GAUSS_POINTS = 16
GRADING_RATIO = 0.25

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GAUSS_POINTS)


def sphere_area(n):
    """|S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


# ---------------------------------------------------------------------------
# Sphere
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True, eq=False)
class SphereRule:
    """Nodes (N, n) on the unit sphere and positive weights summing to |S^{n-1}|."""
    dimension: int
    nodes: np.ndarray
    weights: np.ndarray
    order: int
    level: int

    def __len__(self):
        return len(self.weights)

    def integrate(self, values):
        """Weighted sum over the node axis (axis 0) of `values`."""
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


def _polar_count(n, level):
    if n == 3:
        return 4 * 2 ** level
    return 2 ** (level - 1)


def sphere_rule(n, level):
    """
    Build the level-`level` product rule on S^{n-1}.

    Args:
        n: ambient dimension, 2 <= n <= 8
        level: refinement level >= 1; each level doubles the node count
               along every angle

    Returns:
        SphereRule
    """
    if n < 2 or n > MAX_DIMENSION:
        raise UnsupportedDimension("sphere rules exist for 2 <= n <= %d, got n=%d"
                                   % (MAX_DIMENSION, n))
    if level < 1:
        raise InvalidConfig("sphere level must be >= 1, got %d" % level)

    if n == 2:
        count = 16 * 2 ** level
        phi = 2.0 * math.pi * np.arange(count) / count
        nodes = np.column_stack((np.cos(phi), np.sin(phi)))
        weights = np.full(count, 2.0 * math.pi / count)
        return SphereRule(2, nodes, weights, count - 1, level)

    polar = _polar_count(n, level)
    azimuth = 2 * polar
    psi = 2.0 * math.pi * np.arange(azimuth) / azimuth
    nodes = np.column_stack((np.cos(psi), np.sin(psi)))
    weights = np.full(azimuth, 2.0 * math.pi / azimuth)

    # Polar angles from the innermost (measure sin(phi) dphi) outward
    # (measure sin^{n-2}(phi) dphi); x = cos(phi) turns sin^m(phi) dphi into
    # the Jacobi weight (1 - x^2)^{(m-1)/2} dx.
    for power in range(1, n - 1):
        a = 0.5 * (power - 1)
        x, w = scipy.special.roots_jacobi(polar, a, a)
        s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
        inner = len(weights)
        grown = np.empty((polar * inner, nodes.shape[1] + 1))
        grown[:, 0] = np.repeat(x, inner)
        grown[:, 1:] = (s[:, None, None] * nodes[None, :, :]).reshape(polar * inner, -1)
        nodes = grown
        weights = (w[:, None] * weights[None, :]).ravel()

    # Renormalise rounding drift off the unit sphere.
    nodes = nodes / np.linalg.norm(nodes, axis=1)[:, None]
    order = min(2 * polar - 1, azimuth - 1)
    return SphereRule(n, nodes, weights, order, level)


# ---------------------------------------------------------------------------
# Radial
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True, eq=False)
class RadialRule:
    """Composite rule on [0, R].

    variant "plain" integrates h; variant "log_weighted" carries log(r) in
    its weights and integrates log(r) h(r).
    """
    nodes: np.ndarray
    weights: np.ndarray
    radius: float
    variant: str
    decay_width: float
    eps_tail: float
    panels: int
    grading: int
    degree: int

    def __len__(self):
        return len(self.nodes)

    def log_weighted(self):
        if self.variant == "log_weighted":
            return self
        return dataclasses.replace(self, weights=self.weights * np.log(self.nodes),
                                   variant="log_weighted")

    def coarse(self):
        """Same construction with half the panels, for two-level estimates."""
        rule = radial_rule(self.decay_width, self.eps_tail, max(1, self.panels // 2),
                           grading=max(1, self.grading // 2), degree=self.degree)
        return rule.log_weighted() if self.variant == "log_weighted" else rule


def tail_radius(decay_width, eps_tail, degree=0):
    """Smallest R with R^degree * exp(-decay_width R^2 / 2) < eps_tail."""
    s = float(decay_width)
    log_eps = math.log(eps_tail)
    if degree <= 0:
        return math.sqrt(-2.0 * log_eps / s)

    def excess(r):
        return degree * math.log(r) - 0.5 * s * r * r - log_eps

    lo = math.sqrt(degree / s)
    if excess(lo) <= 0.0:
        return lo
    hi = 2.0 * lo + math.sqrt(-2.0 * log_eps / s)
    while excess(hi) > 0.0:
        hi *= 2.0
    return scipy.optimize.brentq(excess, lo, hi, xtol=1e-12)


def radial_rule(decay_width, eps_tail=1e-16, panels=24, grading=32, degree=0):
    """
    Build a RadialRule for integrands bounded by r^degree exp(-s r^2 / 2).

    Args:
        decay_width: Gaussian width s of the integrand envelope
        eps_tail: tail bound at the truncation radius, in (0, 1)
        panels: uniform panels between the knee and R
        grading: geometric panels between 0 and the knee
        degree: polynomial degree of the envelope (moves R outward)
    """
    if not 0.0 < eps_tail < 1.0:
        raise BadTolerance("eps_tail must lie in (0, 1), got %r" % eps_tail)
    if decay_width <= 0.0:
        raise BadTolerance("decay width must be positive, got %r" % decay_width)
    if panels < 1 or grading < 1:
        raise InvalidConfig("panels and grading must be >= 1")

    radius = tail_radius(decay_width, eps_tail, degree)
    knee = min(1.0 / math.sqrt(decay_width), 0.5 * radius)
    graded = knee * GRADING_RATIO ** np.arange(grading, -1, -1)
    uniform = np.linspace(knee, radius, panels + 1)
    edges = np.concatenate(([0.0], graded, uniform[1:]))

    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_X[None, :]
    weights = half[:, None] * _GL_W[None, :]
    return RadialRule(nodes.ravel(), weights.ravel(), radius, "plain", float(decay_width),
                      float(eps_tail), int(panels), int(grading), int(degree))


def integrate(h, rule):
    """Sum of rule weights times h evaluated on the node array."""
    return np.dot(rule.weights, np.asarray(h(rule.nodes)))


def log_weighted_integral(h, rule):
    """
    Integral of log(u) h(u) over (0, inf).

    h is called once with the node array and must return an array of the
    same length (real or complex).
    """
    if rule.variant != "log_weighted":
        rule = rule.log_weighted()
    return np.dot(rule.weights, np.asarray(h(rule.nodes)))


def integrate_with_estimate(h, rule, log_weight=False):
    """(value, |value - coarse value|) for the plain or log-weighted integral."""
    fn = log_weighted_integral if log_weight else integrate
    value = fn(h, rule)
    return value, float(abs(value - fn(h, rule.coarse())))
