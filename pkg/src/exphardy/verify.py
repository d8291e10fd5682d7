"""Umbrella property checks, runnable from the CLI (`verify --all`) or service.

Each check is a compact version of the module invariants — small enough to
finish in seconds, strict enough to catch a broken formula.  The full-size
versions live in the pytest acceptance suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import radial, sphere
from .constants import (
    bliss_constant,
    c_n,
    harmonic,
    moser_bound,
    rough_constants,
    sharp_coefficient,
)
from .extremals import (
    ExtremalParams,
    bliss_extremal,
    closed_energy,
    extremal_curvature,
    extremal_deficit,
    extremal_eval,
    extremal_slope,
    graded_grid,
    sample_extremal,
)
from .quadrature import QuadratureSpec, cumulative, integrate, integrate_halfline
from .radial import Grid, Statement, deficit, deficit_n1, random_admissible
from .varsolve import SolveOptions, el_residual, minimize, shoot

__all__ = ["CheckResult", "run_checks", "available_checks"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _check_quadrature() -> CheckResult:
    worst = 0.0
    res = integrate(lambda t: 1.0 - t, 0.0, 1.0)
    worst = max(worst, abs(res.value - 0.5))
    res = integrate(lambda t: (1.0 - math.sqrt(1.0 - t)) / t, 0.0, 1.0)
    worst = max(worst, abs(res.value - (2.0 - 2.0 * math.log(2.0))))
    res = integrate_halfline(lambda r: r * math.exp(-r))
    worst = max(worst, abs(res.value - 1.0))
    ys = cumulative(lambda x: 1.0 / (1.0 + x) ** 2, [1.0])
    worst = max(worst, abs(ys[0] - 0.5))
    return CheckResult("quadrature", worst < 1e-9, f"max error {worst:.2e}")


def _check_constants() -> CheckResult:
    # each entry: |error| / its tolerance; pass iff all ratios below 1
    ratios = []
    for m in range(2, 7):
        ratios.append(abs(c_n(float(m)) - harmonic(m - 1)) / 1e-12)
    ratios.append(abs(c_n(2.5) - (2.0 - 2.0 * math.log(2.0) + 2.0 / 3.0)) / 1e-8)
    ratios.append(abs(sharp_coefficient(2.0) - 0.5) / 1e-15)
    ratios.append(abs(sharp_coefficient(3.0) - 4.0 / 9.0) / 1e-15)
    for m in (2.0, 3.0):
        ratios.append(abs(c_n(m + 1e-6) - c_n(m)) / 1e-4)
        ratios.append(abs(c_n(m - 1e-6) - c_n(m)) / 1e-4)
    ratios.append(abs(bliss_constant(2.0, 4.0).c_b - 1.5) / 1e-11)
    ratios.append(abs(bliss_constant(3.0, 6.0).c_b - 1.25) / 1e-11)
    ratios.append(abs(moser_bound(2.0, 1.0, 1.0) - 1.0) / 1e-14)
    worst = max(ratios)
    return CheckResult("constants", worst < 1.0, f"worst error/tolerance {worst:.2g}")


def _check_radial(num_samples: int = 150) -> CheckResult:
    failures = []
    for seed in range(num_samples):
        u = random_admissible(seed, 8, 10.0, 3.0)
        for n in (1.5, 2.0, 2.5, 3.0, 4.0):
            rep_c = deficit(u, n, Statement.CONSISTENT)
            if rep_c.deficit <= 0:
                failures.append(f"seed {seed} n {n}: consistent deficit {rep_c.deficit}")
            rep_p = deficit(u, n, Statement.AS_PRINTED)
            if abs(rep_p.deficit - rep_c.deficit - math.log(n)) > 1e-12:
                failures.append(f"seed {seed} n {n}: gap != ln n")
        if deficit_n1(u).deficit < -1e-9:
            failures.append(f"seed {seed}: n=1 deficit negative")
    detail = failures[0] if failures else f"{num_samples} samples x 5 exponents clean"
    return CheckResult("radial", not failures, detail)


def _check_extremals() -> CheckResult:
    worst_mass = worst_energy = worst_tau = 0.0
    spec = QuadratureSpec(1e-11, 1e-11, 4000)
    for n in (2.0, 2.5):
        for lam in (0.1, 1.0, 10.0):
            p = ExtremalParams(n, lam)
            u = sample_extremal(p, graded_grid(p, 2000))
            mass, tail = radial.weighted_mass(u, n)
            worst_mass = max(worst_mass, abs(mass + tail - p.a))
            direct = integrate_halfline(
                lambda r: abs(extremal_slope(p, r)) ** n, spec
            ).value
            worst_energy = max(worst_energy, abs(direct - closed_energy(p)))
            rr = np.linspace(0.0, 20.0, 2001)
            resid = np.abs(
                extremal_slope(p, rr) ** (n - 2.0) * extremal_curvature(p, rr)
                + p.tau * np.exp(n * (extremal_eval(p, rr) - rr))
            )
            worst_tau = max(worst_tau, float(np.max(resid)))
    sharp = max(
        abs(extremal_deficit(ExtremalParams.from_mass(2.0, a)) - 1.0 / (2.0 * a))
        for a in (1.0, 10.0, 100.0, 1e4)
    )
    passed = (
        worst_mass < 4e-6 and worst_energy < 1e-8 and worst_tau < 1e-9 and sharp < 1e-9
    )
    return CheckResult(
        "extremals",
        passed,
        f"mass {worst_mass:.1e}, energy {worst_energy:.1e}, "
        f"stationarity {worst_tau:.1e}, sharpness {sharp:.1e}",
    )


def _check_moser(num_samples: int = 60) -> CheckResult:
    failures = []
    for seed in range(num_samples):
        u = random_admissible(seed, 6, 8.0, 1.5)
        n = 2.0
        a = max(radial.energy(u, n), 1e-6)
        beta = 0.5 * n * a ** (1.0 / (1.0 - n))
        bound = moser_bound(n, a, beta)
        val = radial.moser_functional(u, n, beta)
        if val > bound + 1e-8:
            failures.append(f"seed {seed}: moser {val} > bound {bound}")
        measured = radial.weighted_mass_above(u, n, 2.0)
        if measured > radial.tail_bound(u, n, 1.0, 2.0) + 1e-10:
            failures.append(f"seed {seed}: tail exceeds bound")
    c_seq = [rough_constants(2.0, math.sqrt(0.5) * (1.0 + 10.0**-k))[0] for k in range(1, 7)]
    if not all(b > a for a, b in zip(c_seq, c_seq[1:])):
        failures.append("rough constant not increasing toward threshold")
    if c_seq[-1] < 1e4:
        failures.append("rough constant fails to blow up")
    detail = failures[0] if failures else f"{num_samples} samples clean; c blows up"
    return CheckResult("moser", not failures, detail)


def _check_bliss(num_samples: int = 20) -> CheckResult:
    import warnings

    failures = []
    for k, l in ((2.0, 4.0), (3.0, 6.0)):
        params = bliss_constant(k, l)
        ratio = radial.bliss_ratio(bliss_extremal(1.0, 1.0, 1.0), k, l, 4000.0)
        if abs(ratio - params.c_b) > 1e-6 * params.c_b:
            failures.append(f"extremal ratio {ratio} != C_b {params.c_b} for ({k},{l})")
        rng = np.random.default_rng(7)
        for _ in range(num_samples):
            c0, d0 = rng.uniform(0.3, 3.0, size=2)
            p0 = rng.uniform(1.2, 3.0)
            f = lambda x: c0 / (1.0 + d0 * x) ** p0
            with warnings.catch_warnings():
                # truncation only lowers the ratio; the bound check is safe
                warnings.simplefilter("ignore", UserWarning)
                ratio = radial.bliss_ratio(f, k, l, 2000.0)
            if ratio > params.c_b * (1.0 + 1e-6):
                failures.append(f"sample ratio {ratio} above C_b for ({k},{l})")
    detail = failures[0] if failures else "extremal equality and sample bounds hold"
    return CheckResult("bliss", not failures, detail)


def _check_varsolve() -> CheckResult:
    n, a = 2.0, 1.0
    opts = SolveOptions(grid=Grid.uniform(12.0, 1200))
    rep = minimize(n, a, opts)
    p = ExtremalParams.from_mass(n, a)
    xi = closed_energy(p)
    sup = float(np.max(np.abs(rep.u_star.values - extremal_eval(p, opts.grid.nodes))))
    ok = rep.converged and abs(rep.xi_hat - xi) < 0.01 * xi and sup < 5e-3
    return CheckResult(
        "varsolve",
        ok,
        f"xi rel err {(rep.xi_hat - xi) / xi:+.1e}, sup {sup:.1e}, "
        f"converged={rep.converged}",
    )


def _check_shoot() -> CheckResult:
    worst = 0.0
    for n, lam, tol in ((2.0, 0.5, 1e-6), (2.0, 1.0, 1e-6), (3.0, 1.0, 1e-6), (2.5, 1.0, 1e-5)):
        grid = Grid.uniform(20.0, 2001)
        v = shoot(n, lam, grid)
        err = float(np.max(np.abs(v.values - extremal_eval(ExtremalParams(n, lam), grid.nodes))))
        worst = max(worst, err / tol)
    p = ExtremalParams(2.0, 1.0)
    u = sample_extremal(p, Grid.uniform(20.0, 100001))
    resid = el_residual(u, 2.0, p.tau)
    ok = worst < 1.0 and resid < 1e-6
    return CheckResult("shoot", ok, f"worst err/tol {worst:.2f}, el residual {resid:.1e}")


def _check_sphere(num_samples: int = 100) -> CheckResult:
    failures = []
    for seed in range(num_samples):
        u = sphere.random_band_limited(seed)
        if sphere.onofri_deficit(u) < -1e-9:
            failures.append(f"seed {seed}: negative Onofri deficit")
    for lam in (0.25, 0.5, 2.0, 4.0):
        if sphere.onofri_deficit(sphere.mobius_factor(lam)) > 1e-6:
            failures.append(f"lam {lam}: Moebius deficit above 1e-6")
    ut = sphere.AxiFunction.from_polynomial([0.0, 1.0])
    if abs(sphere.onofri_deficit(ut) - (2.0 / 3.0 - math.log(math.sinh(2.0) / 2.0))) > 1e-9:
        failures.append("u = t deficit off its closed form")
    rng = np.random.default_rng(11)
    for _ in range(20):
        r0 = rng.uniform(0.2, 3.0)
        b0 = rng.uniform(-1.0, 1.0)
        a0 = math.pi * r0**2 * math.exp(2.0 * b0) * rng.uniform(1.01, 20.0)
        spec = sphere.DiskSpec(radius=r0, boundary=b0, mass=a0)
        alpha = a0 * math.exp(-2.0 * b0) / (2.0 * math.pi * r0**2)
        halfline_form = 2.0 * math.pi * 2.0 * (
            math.log(2.0 * alpha) + 1.0 / (2.0 * alpha) - 1.0
        )
        if abs(sphere.disk_energy_infimum(spec) - halfline_form) > 1e-10:
            failures.append("disk infimum closed form mismatch")
    for rr in (0.5, 1.0, 10.0, 100.0):
        if abs(sphere.phi_dirichlet(rr) - sphere.phi_dirichlet_quadrature(rr)) > 1e-8:
            failures.append(f"phi dirichlet mismatch at R={rr}")
    for rho in (0.1, 1.0, 10.0):
        if sphere.phi_laplacian_residual(rho) > 1e-6:
            failures.append(f"conformal factor equation residual at rho={rho}")
    zero = sphere.AxiFunction.from_polynomial([0.0])
    if sphere.transfer_identity_check(zero, 10.0) > 1e-6:
        failures.append("transfer identity fails for u = 0")
    detail = failures[0] if failures else f"{num_samples} random + Moebius + chart checks clean"
    return CheckResult("sphere", not failures, detail)


_CHECKS: dict[str, Callable[[], CheckResult]] = {
    "quadrature": _check_quadrature,
    "constants": _check_constants,
    "radial": _check_radial,
    "extremals": _check_extremals,
    "moser": _check_moser,
    "bliss": _check_bliss,
    "varsolve": _check_varsolve,
    "shoot": _check_shoot,
    "sphere": _check_sphere,
}


def available_checks() -> list[str]:
    return list(_CHECKS)


def run_checks(names: list[str] | None = None) -> list[CheckResult]:
    if names is None:
        names = available_checks()
    unknown = [n for n in names if n not in _CHECKS]
    if unknown:
        from .errors import InvalidParam

        raise InvalidParam(f"unknown checks: {', '.join(unknown)}")
    return [_CHECKS[name]() for name in names]
