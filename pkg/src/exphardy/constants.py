"""Closed-form constants of the exponential-weight Hardy inequality family.

Each constant is computed from its defining formula; where a formula contains
an integral, the quadrature module provides an independent cross-check (see
the test suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import AboveThreshold, BelowThreshold, InvalidParam
from .quadrature import QuadratureSpec, integrate

__all__ = [
    "BlissParams",
    "sharp_coefficient",
    "c_n",
    "harmonic",
    "rough_constants",
    "decay_exponent",
    "moser_bound",
    "bliss_constant",
    "sphere_volume",
    "gamma",
]

# Lanczos approximation, g = 7, 9 terms: relative error below 1e-12 for
# arguments in [0.5, 50], which covers every gamma evaluation in this module.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_CN_QUAD = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12, max_subdivisions=4000)


def gamma(x: float) -> float:
    """Gamma function via the Lanczos series (reflection below 0.5)."""
    if x <= 0 and x == math.floor(x):
        raise InvalidParam(f"gamma pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def harmonic(m: int) -> float:
    """Harmonic number H_m = 1 + 1/2 + ... + 1/m (H_0 = 0)."""
    if m < 0:
        raise InvalidParam("harmonic number needs m >= 0")
    return math.fsum(1.0 / i for i in range(1, m + 1))


def sharp_coefficient(n: float) -> float:
    """Optimal energy coefficient ((n-1)/n)**(n-1); tends to 1 as n -> 1+."""
    if n <= 1:
        raise InvalidParam(f"need n > 1, got {n}")
    return ((n - 1.0) / n) ** (n - 1.0)


def _is_integer(n: float) -> bool:
    return abs(n - round(n)) < 4.0 * math.ulp(n)


@lru_cache(maxsize=4096)
def c_n(n: float) -> float:
    """Additive constant of the sharp inequality.

    Equals the harmonic number H_{m-1} at integer m; for non-integer n the
    fractional part contributes int_0^1 (1 - (1-t)**(n-[n]))/t dt on top of
    the partial sum over integer offsets, keeping the constant continuous
    in n.
    """
    if n <= 1:
        raise InvalidParam(f"need n > 1, got {n}")
    if _is_integer(n):
        return harmonic(round(n) - 1)
    m = math.floor(n)
    frac = n - m
    integral = integrate(
        lambda t: (1.0 - (1.0 - t) ** frac) / t, 0.0, 1.0, _CN_QUAD
    ).value
    # empty when 1 < n < 2
    tail_sum = math.fsum(1.0 / (n - i) for i in range(1, m))
    return integral + tail_sum


def decay_exponent(n: float, beta0: float) -> float:
    """Exponent kappa = (n-1)*beta0**(-n/(n-1)) - n of the majorant e^{kappa r}.

    Negative exactly when beta0 exceeds the threshold ((n-1)/n)**((n-1)/n);
    at or below it the majorant integral diverges and BelowThreshold is
    raised.
    """
    if n <= 1:
        raise InvalidParam(f"need n > 1, got {n}")
    if beta0 <= 0:
        raise InvalidParam("beta0 must be positive")
    threshold = ((n - 1.0) / n) ** ((n - 1.0) / n)
    if beta0 <= threshold:
        raise BelowThreshold(
            f"beta0={beta0} at or below threshold {threshold:.12g} for n={n}"
        )
    return (n - 1.0) * beta0 ** (-n / (n - 1.0)) - n


def rough_constants(n: float, beta0: float) -> tuple[float, float]:
    """Constants (c, c1) of the rough inequality with coefficient beta0**n.

    c = int_0^inf exp{[(n-1)*beta0**(-n/(n-1)) - n] r} dr, c1 = ln c.
    Both blow up as beta0 decreases to the threshold.
    """
    kappa = decay_exponent(n, beta0)
    c = -1.0 / kappa
    return c, math.log(c)


def moser_bound(n: float, a: float, beta: float) -> float:
    """Bound 1/(n - beta*a**(1/(n-1))) for the exponential-growth functional.

    Valid for beta < n*a**(1/(1-n)); at or above that the comparison
    integral diverges and AboveThreshold is raised.
    """
    if n <= 1:
        raise InvalidParam(f"need n > 1, got {n}")
    if a <= 0:
        raise InvalidParam("energy budget a must be positive")
    denom = n - beta * a ** (1.0 / (n - 1.0))
    if denom <= 0:
        raise AboveThreshold(
            f"beta={beta} at or above threshold {n * a ** (1.0 / (1.0 - n)):.12g}"
        )
    return 1.0 / denom


@dataclass(frozen=True)
class BlissParams:
    """Exponent pair (k, l) with derived alpha = l/k - 1 and sharp ratio c_b."""

    k: float
    l: float
    alpha: float
    c_b: float


def bliss_constant(k: float, l: float) -> BlissParams:
    """Sharp constant C_b = 1/(l-alpha-1) * [alpha*G(l/a)/(G(1/a)G((l-1)/a))]**alpha.

    Requires l > k > 1 strictly; the gamma evaluations stay in the moderate
    range where the Lanczos contract (rel. error <= 1e-12) holds.
    """
    if not (l > k > 1):
        raise InvalidParam(f"need l > k > 1, got k={k}, l={l}")
    alpha = l / k - 1.0
    bracket = alpha * gamma(l / alpha) / (gamma(1.0 / alpha) * gamma((l - 1.0) / alpha))
    c_b = bracket**alpha / (l - alpha - 1.0)
    return BlissParams(k=float(k), l=float(l), alpha=alpha, c_b=c_b)


def sphere_volume(m: int) -> float:
    """Surface measure of the unit m-sphere in R^{m+1}: 2*pi^{(m+1)/2}/Gamma((m+1)/2)."""
    if not isinstance(m, (int,)) or isinstance(m, bool):
        raise InvalidParam("dimension m must be an integer")
    if m < 1:
        raise InvalidParam("dimension m must be >= 1")
    return 2.0 * math.pi ** ((m + 1) / 2.0) / gamma((m + 1) / 2.0)
