"""
Closed-form reference values for the radial and Gaussian cases.

Double-precision forms use scipy.special; the constants that need a series
or a derivative (Laurent constant of 2^{z-1} Gamma(z), the product
derivative behind C_{k,n}) are computed with mpmath at 30 digits.
"""

import math

import mpmath
import numpy as np
import scipy.special

from .quadrature import sphere_area

EULER_GAMMA = float(mpmath.euler)


def radial_gaussian_family(z, n, k):
    """
    <p(z-1), gaussian(n, 1)> for p = |xi|^k:

        (2 pi)^{-n/2} |S^{n-1}| 2^{(b-1)/2} Gamma((b+1)/2),   b = k(z-1) + n - 1.
    """
    b = k * (complex(z) - 1.0) + n - 1
    value = (2.0 * math.pi) ** (-n / 2.0) * sphere_area(n) * 2.0 ** ((b - 1.0) / 2.0) \
        * scipy.special.gamma((b + 1.0) / 2.0)
    return complex(value)


def radial_gaussian_residue(z0, n, k):
    """Residue of radial_gaussian_family at a pole z0 of Gamma((b+1)/2)."""
    b = k * (z0 - 1.0) + n - 1
    order = -(b + 1.0) / 2.0
    if order < 0 or not float(order).is_integer():
        return 0.0
    order = int(round(order))
    gamma_residue = (-1.0) ** order / math.factorial(order)
    # Gamma((b+1)/2) ~ residue / ((b+1)/2 + order) and (b+1)/2 + order = k (z - z0) / 2.
    return (2.0 * math.pi) ** (-n / 2.0) * sphere_area(n) * 2.0 ** ((b - 1.0) / 2.0) \
        * gamma_residue * 2.0 / k


def log_regime_constant():
    """Constant term of 2^{z-1} Gamma(z) at z = 0: (log 2 - gamma) / 2."""
    with mpmath.workdps(30):
        series = mpmath.taylor(lambda z: 2 ** (z - 1) * mpmath.gamma(z + 1), 0, 1)
        return float(series[1])


def newtonian_gaussian(x):
    """u(x) = (1/(4 pi)) int exp(-|y|^2/2) / |x - y| dy = sqrt(pi/2) erf(|x|/sqrt 2) / |x|."""
    r = float(np.linalg.norm(np.atleast_1d(x)))
    if r == 0.0:
        return 1.0
    return math.sqrt(math.pi / 2.0) * math.erf(r / math.sqrt(2.0)) / r


def riesz_gaussian(n, alpha, scale=1.0, s=1.0):
    """
    Subcritical pairing of c|xi|^alpha (alpha < n) with gaussian(n, s):

        (2 pi)^{-n} |S^{n-1}| c^{-1} (2 pi/s)^{n/2} (1/2) (2s)^{(a+1)/2} Gamma((a+1)/2),
        a = n - 1 - alpha.
    """
    a = n - 1 - alpha
    return (2.0 * math.pi) ** (-n) * sphere_area(n) / scale * (2.0 * math.pi / s) ** (n / 2.0) \
        * 0.5 * (2.0 * s) ** ((a + 1.0) / 2.0) * scipy.special.gamma((a + 1.0) / 2.0)


def harmonic_constant_c(k, n):
    """(-1)^{k+1} (gamma + psi(k)) / ((2 pi)^n Gamma(k)) via the digamma function."""
    return (-1) ** (k + 1) * (EULER_GAMMA + float(scipy.special.digamma(k))) \
        / ((2.0 * math.pi) ** n * math.gamma(k))


def constant_c_numeric(k, n):
    """
    C_{k,n} = (2 pi)^{-n} k^{-1} d/dz prod_{j=1}^{k-1} (kz - j)^{-1} at z = 0.

    The product is (-1)^{k-1}/(k-1)! at 0 with log-derivative k H_{k-1}.
    """
    product = lambda z: mpmath.fprod([1 / (k * z - j) for j in range(1, k)])
    with mpmath.workdps(30):
        derivative = mpmath.diff(product, 0)
        return float(derivative / (k * (2 * mpmath.pi) ** n))
