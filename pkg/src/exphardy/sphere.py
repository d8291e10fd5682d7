"""Geometric layer: unit-disk reductions, stereographic chart, Onofri deficit.

Radial functions on the unit ball correspond to half-line functions through
r = -ln s, which turns gradient and exponential-volume integrals on the ball
into the weighted half-line functionals of `radial` (times the sphere
measure of the boundary).  Axisymmetric functions on S^2 are handled as
functions of t = x3 with Gauss-Legendre quadrature in t.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .constants import harmonic, sharp_coefficient, sphere_volume
from .errors import (
    Inadmissible,
    InvalidParam,
    NonConvergent,
    NonFinite,
    PoleSingularity,
    SupportViolation,
)
from .quadrature import QuadratureSpec, integrate
from .radial import RadialFunction, energy, weighted_mass

__all__ = [
    "DiskSpec",
    "AxiFunction",
    "disk_reduce",
    "disk_energy_infimum",
    "ball_deficit",
    "stereo_forward",
    "stereo_inverse",
    "StereographicChart",
    "phi",
    "phi_laplacian_residual",
    "phi_dirichlet",
    "phi_dirichlet_quadrature",
    "mobius_factor",
    "onofri_deficit",
    "transfer_identity_check",
    "random_band_limited",
    "sphere_integral",
]

# Gauss-Legendre rule on [-1, 1]; 200 nodes integrate polynomials up to
# degree 399 exactly, far beyond the band limit of any test input here.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(200)

_QUAD = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12, max_subdivisions=4000)


# --- disk reductions --------------------------------------------------------


@dataclass(frozen=True)
class DiskSpec:
    """Disk problem data: radius, boundary value, prescribed exponential mass."""

    radius: float
    boundary: float
    mass: float

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise InvalidParam("disk radius must be positive")
        if not (math.isfinite(self.boundary) and math.isfinite(self.mass)):
            raise InvalidParam("boundary value and mass must be finite")

    def admissibility_gap(self) -> float:
        """mass - pi r^2 e^{2b}; admissible for the planar (n=2) problem when >= 0."""
        return self.mass - math.pi * self.radius**2 * math.exp(2.0 * self.boundary)


def disk_reduce(u: RadialFunction, n: int) -> tuple[float, float]:
    """Gradient energy and exponential mass over the unit ball in R^n.

    The input is the half-line profile of the ball function under s = e^{-r}
    (so u(0) = 0 encodes the zero boundary value at |y| = 1, and the
    constant extension covers a neighbourhood of the origin).  Returns
    (int |grad|^n, int e^{n u}), each equal to the surface measure of
    S^{n-1} times the corresponding half-line functional.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise InvalidParam("ball dimension n must be an integer >= 2")
    omega = sphere_volume(n - 1)
    mass, tail = weighted_mass(u, n)
    return omega * energy(u, n), omega * (mass + tail)


def disk_energy_infimum(spec: DiskSpec) -> float:
    """Minimum planar Dirichlet energy on the disk at prescribed mass.

    Closed form 4*pi*(ln A + 1/A - 1) with A = mass*e^{-2b}/(pi r^2);
    depends on the data only through A.  A = 1 is the admissibility
    boundary, where the infimum degenerates to 0; below it the constraint
    set is empty.
    """
    ratio = spec.mass * math.exp(-2.0 * spec.boundary) / (math.pi * spec.radius**2)
    if ratio < 1.0:
        raise Inadmissible(
            f"mass {spec.mass} below the admissible minimum "
            f"{math.pi * spec.radius**2 * math.exp(2.0 * spec.boundary):.6g}"
        )
    return 4.0 * math.pi * (math.log(ratio) + 1.0 / ratio - 1.0)


def ball_deficit(u: RadialFunction, n: int) -> float:
    """Strict local inequality on the unit ball: rhs - lhs > 0.

    lhs = ln(n * int e^{nu} / omega_{n-1}),
    rhs = ((n-1)/n)**(n-1) / omega_{n-1} * int |grad u|^n + H_{n-1}.
    """
    en, mass = disk_reduce(u, n)
    if not u.is_nonnegative():
        raise InvalidParam("ball profile must be nonnegative")
    omega = sphere_volume(n - 1)
    lhs = math.log(n * mass / omega)
    rhs = sharp_coefficient(float(n)) * en / omega + harmonic(n - 1)
    return rhs - lhs


# --- stereographic chart ----------------------------------------------------


def stereo_forward(x) -> np.ndarray:
    """Project x in S^2 (minus the north pole) to the plane."""
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise InvalidParam("x must be a 3-vector")
    if abs(float(x @ x) - 1.0) > 1e-9:
        raise InvalidParam("x must lie on the unit sphere")
    denom = 1.0 - x[2]
    if denom < 1e-12:
        raise PoleSingularity("stereographic projection undefined at the north pole")
    return np.array([x[0] / denom, x[1] / denom])


def stereo_inverse(y) -> np.ndarray:
    """Inverse chart: y in R^2 to the sphere."""
    y = np.asarray(y, dtype=float)
    if y.shape != (2,):
        raise InvalidParam("y must be a 2-vector")
    rho2 = float(y @ y)
    return np.array([
        2.0 * y[0] / (1.0 + rho2),
        2.0 * y[1] / (1.0 + rho2),
        (rho2 - 1.0) / (rho2 + 1.0),
    ])


def phi(y) -> float:
    """Log-conformal factor ln(2/(1+|y|^2)) of the round metric in the chart."""
    y = np.asarray(y, dtype=float)
    return math.log(2.0 / (1.0 + float(y @ y)))


class StereographicChart:
    """The chart S^2 minus the north pole -> R^2 with its conformal factor.

    Groups the three maps; round-trips hold to 1e-12 away from the pole.
    """

    forward = staticmethod(stereo_forward)
    inverse = staticmethod(stereo_inverse)
    phi = staticmethod(phi)


def _phi_radial(rho: float) -> float:
    return math.log(2.0 / (1.0 + rho * rho))


def phi_laplacian_residual(rho: float, h: float = 1e-2) -> float:
    """|Delta phi + e^{2 phi}| at radius rho, via 5-point stencils (O(h^4)).

    The log-conformal factor solves -Delta phi = e^{2 phi} in the plane;
    this measures how well the discrete Laplacian reproduces that.
    """
    if rho <= 0:
        raise InvalidParam("rho must be positive")
    h = min(h, 0.25 * rho)
    f = _phi_radial
    d1 = (-f(rho + 2 * h) + 8 * f(rho + h) - 8 * f(rho - h) + f(rho - 2 * h)) / (12 * h)
    d2 = (
        -f(rho + 2 * h) + 16 * f(rho + h) - 30 * f(rho)
        + 16 * f(rho - h) - f(rho - 2 * h)
    ) / (12 * h * h)
    lap = d2 + d1 / rho
    return abs(lap + math.exp(2.0 * f(rho)))


def phi_dirichlet(r: float) -> float:
    """int_{B_R} |grad phi|^2 = 4*pi*(ln(1+R^2) + 1/(1+R^2) - 1)."""
    if r <= 0:
        raise InvalidParam("radius must be positive")
    r2 = r * r
    return 4.0 * math.pi * (math.log1p(r2) + 1.0 / (1.0 + r2) - 1.0)


def phi_dirichlet_quadrature(r: float, spec: QuadratureSpec = _QUAD) -> float:
    """Same integral by radial quadrature of |grad phi|^2 = 4 rho^2/(1+rho^2)^2."""
    if r <= 0:
        raise InvalidParam("radius must be positive")
    return 2.0 * math.pi * integrate(
        lambda rho: 4.0 * rho**3 / (1.0 + rho * rho) ** 2, 0.0, r, spec
    ).value


# --- axisymmetric functions on S^2 ------------------------------------------


class AxiFunction:
    """Axisymmetric function on S^2 as a function of t = x3 in [-1, 1].

    Wraps a vectorized callable plus (optionally) its derivative; without an
    analytic derivative, central differences with h = 1e-5 are used, shrunk
    near the endpoints so evaluations stay inside [-1, 1].
    """

    _FD_STEP = 1e-5

    def __init__(self, func: Callable, deriv: Callable | None = None):
        self._func = func
        self._deriv = deriv
        probe_v = np.asarray(func(_GL_NODES), dtype=float)
        if probe_v.shape != _GL_NODES.shape or not np.all(np.isfinite(probe_v)):
            raise NonFinite("function values must be finite on [-1, 1]")
        probe_d = np.asarray(self.derivative(_GL_NODES), dtype=float)
        if not np.all(np.isfinite(probe_d)):
            raise NonFinite("derivative must be finite on (-1, 1)")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self._func(t), dtype=float)
        return float(out) if out.ndim == 0 else out

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self._deriv is not None:
            out = np.asarray(self._deriv(t), dtype=float)
        else:
            h = np.minimum(self._FD_STEP, 0.5 * np.minimum(1.0 - t, 1.0 + t))
            h = np.maximum(h, 1e-12)
            out = (self._func(t + h) - self._func(t - h)) / (2.0 * h)
            out = np.asarray(out, dtype=float)
        return float(out) if out.ndim == 0 else out

    @classmethod
    def from_polynomial(cls, coeffs) -> "AxiFunction":
        """Polynomial in t with exact derivative; coeffs in increasing degree."""
        poly = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
        return cls(poly, poly.deriv())

    def shifted(self, c: float) -> "AxiFunction":
        return AxiFunction(lambda t: self._func(t) + c, self._deriv or self.derivative)

    def to_csv(self, path_or_buf) -> None:
        """CSV rows t,u sampled on the quadrature node set."""
        close = False
        if isinstance(path_or_buf, (str, bytes)):
            handle = open(path_or_buf, "w", newline="")
            close = True
        else:
            handle = path_or_buf
        try:
            writer = csv.writer(handle)
            writer.writerow(["t", "u"])
            for t, v in zip(_GL_NODES, self(_GL_NODES)):
                writer.writerow([format(t, ".17g"), format(v, ".17g")])
        finally:
            if close:
                handle.close()


def sphere_integral(g: AxiFunction | Callable) -> float:
    """int_{S^2} g dsigma = 2*pi*int_{-1}^1 g(t) dt by Gauss-Legendre."""
    vals = np.asarray(g(_GL_NODES), dtype=float)
    return 2.0 * math.pi * float(_GL_WEIGHTS @ vals)


def mobius_factor(lam: float) -> AxiFunction:
    """Log-conformal factor of the dilation-by-lam Moebius map of S^2.

    u_lam(t) = ln(2 lam / ((1 - t) + lam^2 (1 + t))); the conformal volume
    int e^{2u} stays 4*pi and the Onofri deficit vanishes on this family.
    """
    if lam <= 0:
        raise InvalidParam("lam must be positive")
    lam2 = lam * lam

    def func(t):
        return np.log(2.0 * lam / ((1.0 - t) + lam2 * (1.0 + t)))

    def deriv(t):
        return (1.0 - lam2) / ((1.0 - t) + lam2 * (1.0 + t))

    return AxiFunction(func, deriv)


def onofri_deficit(u: AxiFunction) -> float:
    """(1/4pi) int (|grad u|^2 + 2u) - ln((1/4pi) int e^{2u}) on the sphere.

    For axisymmetric u, |grad u|^2 = (1 - t^2) (du/dt)^2; all three
    integrals use the Gauss-Legendre node set.
    """
    t = _GL_NODES
    w = _GL_WEIGHTS
    uv = np.asarray(u(t), dtype=float)
    du = np.asarray(u.derivative(t), dtype=float)
    dirichlet = float(w @ ((1.0 - t * t) * du * du))  # times 2*pi below
    linear = float(w @ uv)
    with np.errstate(over="raise"):
        try:
            exp_int = float(w @ np.exp(2.0 * uv))
        except FloatingPointError as exc:
            raise NonConvergent("int e^{2u} overflows binary64") from exc
    # 2*pi from the azimuthal direction, 4*pi normalization
    return 0.5 * dirichlet + linear - math.log(0.5 * exp_int)


def random_band_limited(seed: int, max_degree: int = 6, coeff_bound: float = 2.0) -> AxiFunction:
    """Seeded random polynomial in t: degree <= max_degree, coeffs in [-b, b]."""
    if max_degree < 0 or coeff_bound < 0:
        raise InvalidParam("max_degree and coeff_bound must be nonnegative")
    rng = np.random.default_rng(seed)
    degree = int(rng.integers(1, max_degree + 1))
    coeffs = rng.uniform(-coeff_bound, coeff_bound, size=degree + 1)
    return AxiFunction.from_polynomial(coeffs)


def transfer_identity_check(u: AxiFunction, r_chart: float) -> float:
    """Mismatch of the chart-transfer identity for the Dirichlet functional.

    For u vanishing on the polar cap that maps outside B_R, the plane energy
    of w(y) = u(x(y)) + phi(y) over B_R must equal the sphere Dirichlet
    energy of u plus 2 int u plus the phi energy over B_R.  Both sides are
    computed by independent quadratures; returns |lhs - rhs|.
    """
    if r_chart <= 0:
        raise InvalidParam("chart radius must be positive")
    t_cap = (r_chart**2 - 1.0) / (r_chart**2 + 1.0)
    probe = np.linspace(t_cap, 1.0 - 1e-9, 64)
    if np.max(np.abs(np.asarray(u(probe), dtype=float))) > 1e-10:
        raise SupportViolation(
            f"u must vanish on the cap t >= {t_cap:.6g} (|y| > {r_chart:g})"
        )

    def plane_integrand(rho: float) -> float:
        t = (rho * rho - 1.0) / (rho * rho + 1.0)
        dt_drho = 4.0 * rho / (1.0 + rho * rho) ** 2
        du = float(u.derivative(t)) * dt_drho
        dphi = -2.0 * rho / (1.0 + rho * rho)
        return (du + dphi) ** 2 * rho

    lhs = 2.0 * math.pi * integrate(plane_integrand, 0.0, r_chart, _QUAD).value

    t = _GL_NODES
    w = _GL_WEIGHTS
    du = np.asarray(u.derivative(t), dtype=float)
    uv = np.asarray(u(t), dtype=float)
    sphere_side = 2.0 * math.pi * float(w @ ((1.0 - t * t) * du * du + 2.0 * uv))
    rhs = sphere_side + phi_dirichlet(r_chart)
    return abs(lhs - rhs)
