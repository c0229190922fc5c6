"""
Closed-form pairing <S, f> with the fundamental solution S of P(D).

  k < n   <S, f> = (2 pi)^{-n} int_0^inf r^{-k} A(r) dr
  k >= n  <S, f> = (-1)^k [ -C_{k,n} A^{(k-1)}(0) + D_{k,n} int_0^inf log(u) A^{(k)}(u) du ]

where A(r) = r^{n-1} int_{S^{n-1}} f^(r theta) p(theta)^{-1} dtheta is the
spherical average. The (-1)^k factor comes from the k integrations by parts
and only matters for odd k (integral radial powers).

Every r-derivative of A is exact: Leibniz over r^{n-1} times closed-form
ray derivatives of f^ (see schwartz.ray_derivatives). The same sphere
profile engine also serves the pulled-back amplitude G of the continuation
module, with rays rescaled by p(theta)^{-1/k}.
"""

import dataclasses
import functools
import math

import numpy as np

from .config import RunConfig
from .errors import NonIntegerDegree, WrongBranch
from .log import warn as _log_warn
from .quadrature import log_weighted_integral, radial_rule, sphere_rule
from .runtime import map_ordered
from .schwartz import ray_derivatives, translate

SPHERE_CHUNK = 256
TAIL_WARN = 1e-8


def _log_w(msg):
    _log_warn("Pairing", msg)


@dataclasses.dataclass(frozen=True)
class PairingResult:
    value: complex
    branch: str
    local_term: complex = None
    nonlocal_term: complex = None
    error_estimate: float = 0.0
    diagnostics: dict = dataclasses.field(default_factory=dict, compare=False)

    def to_dict(self):
        def real(z):
            return None if z is None else float(complex(z).real)

        value = complex(self.value)
        return {
            "value": value.real,
            "imag": value.imag,
            "branch": self.branch,
            "local_term": real(self.local_term),
            "nonlocal_term": real(self.nonlocal_term),
            "error_estimate": float(self.error_estimate),
            "diagnostics": {k: float(np.real(v)) for k, v in self.diagnostics.items()},
        }


# ---------------------------------------------------------------------------
# Sphere profiles
# ---------------------------------------------------------------------------

def average_weights(s, sphere):
    """(weights, ray scales) for A: w/p(theta) along the unscaled rays."""
    p = s.eval(sphere.nodes)
    return sphere.weights / p, np.ones(len(sphere))


def pullback_weights(s, sphere):
    """(weights, ray scales) for G: w p^{-n/k} along rays scaled by p^{-1/k}."""
    p = s.eval(sphere.nodes)
    k = float(s.degree)
    return sphere.weights * p ** (-s.dimension / k), p ** (-1.0 / k)


def sphere_profile(f, nodes, weights, scales, orders, radii, workers=1):
    """
    sum_theta weights(theta) * d^m/dy^m [ y^{n-1} f^(scales(theta) y theta) ]

    for every m in `orders`, at every y in `radii`. Sphere nodes are processed
    in fixed-size chunks whose partial sums are reduced in chunk order.

    Returns:
        dict order -> complex array shaped like radii
    """
    n = f.dimension
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    orders = sorted(set(int(m) for m in orders))
    needed = sorted({m - i for m in orders for i in range(min(m, n - 1) + 1)})

    def chunk(bounds):
        lo, hi = bounds
        c = scales[lo:hi]
        ray = ray_derivatives(f, nodes[lo:hi], needed, c[:, None] * radii[None, :])
        w = weights[lo:hi]
        out = {}
        for m in orders:
            acc = np.zeros(len(radii), dtype=complex)
            for i in range(min(m, n - 1) + 1):
                j = m - i
                coef = math.comb(m, i) * math.perm(n - 1, i)
                acc += coef * radii ** (n - 1 - i) * ((w * c ** j) @ ray[j])
            out[m] = acc
        return out

    bounds = [(lo, min(lo + SPHERE_CHUNK, len(nodes))) for lo in range(0, len(nodes), SPHERE_CHUNK)]
    parts = map_ordered(chunk, bounds, workers)
    return {m: functools.reduce(np.add, (part[m] for part in parts)) for m in orders}


def spherical_average(s, f, r, rule, workers=1):
    """A(f^)(r) = r^{n-1} int f^(r theta) p(theta)^{-1} dtheta."""
    return spherical_average_derivative(s, f, 0, r, rule, workers)


def spherical_average_derivative(s, f, m, r, rule, workers=1):
    """d^m A(f^)/dr^m at r (exact Leibniz expansion)."""
    weights, scales = average_weights(s, rule)
    profile = sphere_profile(f, rule.nodes, weights, scales, [m], [float(r)], workers)
    return complex(profile[m][0])


# ---------------------------------------------------------------------------
# Universal constants
# ---------------------------------------------------------------------------

def _integer_degree(k):
    if isinstance(k, (int, np.integer)):
        value = int(k)
    elif float(k).is_integer():
        value = int(k)
    else:
        raise NonIntegerDegree("the constants need an integer degree, got k=%r" % k)
    if value < 1:
        raise ValueError("degree must be >= 1, got %d" % value)
    return value


def constant_c(k, n):
    """C_{k,n} = (-1)^{k+1} H_{k-1} / ((2 pi)^n (k-1)!)."""
    k = _integer_degree(k)
    harmonic = math.fsum(1.0 / j for j in range(1, k))
    return (-1) ** (k + 1) * harmonic / ((2.0 * math.pi) ** n * math.factorial(k - 1))


def constant_d(k, n):
    """D_{k,n} = (-1)^{k-1} / ((2 pi)^n (k-1)!)."""
    k = _integer_degree(k)
    return (-1) ** (k - 1) / ((2.0 * math.pi) ** n * math.factorial(k - 1))


# ---------------------------------------------------------------------------
# Branches
# ---------------------------------------------------------------------------

def pair_subcritical(s, f, sphere, radial, workers=1):
    n, k = s.dimension, s.degree
    if k >= n:
        raise WrongBranch("subcritical formula needs k < n, got k=%g n=%d" % (k, n))
    weights, scales = average_weights(s, sphere)
    profile = sphere_profile(f, sphere.nodes, weights, scales, [0], radial.nodes, workers)[0]
    value = np.dot(radial.weights, radial.nodes ** (-float(k)) * profile) / (2.0 * math.pi) ** n
    return PairingResult(complex(value), "subcritical")


def anisotropy_shift(s, f, sphere, workers=1):
    """
    Laurent constant minus the closed-form value for k >= n:

        (2 pi)^{-n} / (k (k-1)!) int log p(theta) p(theta)^{-1}
                                     d^{k-1}/dr^{k-1}[r^{n-1} f^(r theta)](0) dtheta

    Zero when p is constant on the sphere. As a distribution it is a
    polynomial of degree k-n, so P(D) annihilates it.
    """
    if s.degree < s.dimension:
        return 0j
    k = _integer_degree(s.degree)
    p = s.eval(sphere.nodes)
    if np.ptp(p) == 0.0:
        return 0j
    weights = sphere.weights * np.log(p) / p
    profile = sphere_profile(f, sphere.nodes, weights, np.ones(len(sphere)), [k - 1], [0.0],
                             workers)
    scale = (2.0 * math.pi) ** s.dimension * k * math.factorial(k - 1)
    return complex(profile[k - 1][0]) / scale


def pair_supercritical(s, f, sphere, radial_log, workers=1):
    n = s.dimension
    if s.degree < n:
        raise WrongBranch("supercritical formula needs k >= n, got k=%g n=%d" % (s.degree, n))
    k = _integer_degree(s.degree)
    weights, scales = average_weights(s, sphere)
    origin = sphere_profile(f, sphere.nodes, weights, scales, [k - 1], [0.0], workers)[k - 1][0]
    if radial_log.variant != "log_weighted":
        radial_log = radial_log.log_weighted()

    def top_derivative(u):
        return sphere_profile(f, sphere.nodes, weights, scales, [k], u, workers)[k]

    sign = -1.0 if k % 2 else 1.0
    local_term = sign * -constant_c(k, n) * complex(origin)
    nonlocal_term = sign * constant_d(k, n) * complex(log_weighted_integral(top_derivative, radial_log))
    return PairingResult(local_term + nonlocal_term, "supercritical", local_term, nonlocal_term)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def radial_rule_for(s, f, config, width=None, extra_degree=0):
    """Radial rule sized for f^ times the polynomial weights of the pairing integrals."""
    k = int(math.ceil(s.degree))
    return radial_rule(width if width is not None else f.decay_width(), config.eps_tail,
                       config.radial_panels, config.radial_grading,
                       degree=f.degree() + s.dimension + k + extra_degree)


def _pair_at(s, f, config, level, coarse_radial=False):
    sphere = sphere_rule(s.dimension, level)
    radial = radial_rule_for(s, f, config)
    if coarse_radial:
        radial = radial.coarse()
    if s.degree < s.dimension:
        result = pair_subcritical(s, f, sphere, radial, config.workers)
    else:
        result = pair_supercritical(s, f, sphere, radial.log_weighted(), config.workers)
    tail = f.tail_bound(radial.radius)
    if tail > TAIL_WARN:
        _log_w("test function tail %.3g at R=%.4g exceeds %g" % (tail, radial.radius, TAIL_WARN))
    return result, sphere


def pair(s, f, config=None):
    """
    <S, f> by the closed form; branch chosen by k < n or k >= n.

    error_estimate is the sum of diagnostics["sphere_error"],
    |value(level) - value(level - 1)| (level 2 stands in for level 0), and
    diagnostics["radial_error"], the change under a radial rule with half
    the panels. Supercritical results carry diagnostics["anisotropy_shift"],
    the difference to the Laurent constant of the meromorphic family.
    """
    config = config or RunConfig()
    if f.dimension != s.dimension:
        raise ValueError("symbol dimension %d != test function dimension %d"
                         % (s.dimension, f.dimension))
    fine, sphere = _pair_at(s, f, config, config.sphere_level)
    other = config.sphere_level - 1 if config.sphere_level > 1 else 2
    coarse, _ = _pair_at(s, f, config, other)
    radial_coarse, _ = _pair_at(s, f, config, config.sphere_level, coarse_radial=True)
    sphere_error = float(abs(fine.value - coarse.value))
    radial_error = float(abs(fine.value - radial_coarse.value))
    diagnostics = {"sphere_nodes": float(len(sphere)), "sphere_error": sphere_error,
                   "radial_error": radial_error}
    if fine.branch == "supercritical":
        diagnostics["anisotropy_shift"] = anisotropy_shift(s, f, sphere, config.workers)
    return dataclasses.replace(fine, error_estimate=sphere_error + radial_error,
                               diagnostics=diagnostics)


def potential_at(s, f, x0, config=None):
    """u(x0) = (S * f)(x0), the solution of P(D) u = f evaluated at x0."""
    return pair(s, translate(f, x0), config).value
