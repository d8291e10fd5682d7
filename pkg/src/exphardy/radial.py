"""Radial test functions on [0, inf) and the functionals evaluated on them.

A function is stored as node values on a finite grid, interpolated linearly
between nodes and extended by its last value beyond the grid, so that the
exponentially weighted mass has an exact analytic tail.  The derivative is
the exact piecewise-constant slope of the interpolant: energies are computed
without smoothing.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .constants import c_n, decay_exponent, sharp_coefficient
from .errors import (
    DegenerateInput,
    InvalidParam,
    NegativeValues,
    NonFinite,
)
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate

__all__ = [
    "Grid",
    "RadialFunction",
    "Statement",
    "DeficitReport",
    "energy",
    "total_variation",
    "weighted_mass",
    "weighted_mass_above",
    "deficit",
    "deficit_n1",
    "moser_functional",
    "tail_bound",
    "bliss_ratio",
    "random_admissible",
    "sample",
    "write_profile_csv",
    "read_profile_csv",
]


class Grid:
    """Strictly increasing nodes r_0 < ... < r_N with r_0 = 0 exactly."""

    __slots__ = ("nodes",)

    def __init__(self, nodes: Sequence[float] | np.ndarray):
        arr = np.ascontiguousarray(nodes, dtype=float)
        if arr.ndim != 1 or arr.size < 3:
            raise InvalidParam("grid needs at least 3 nodes (N >= 2)")
        if not np.all(np.isfinite(arr)):
            raise InvalidParam("grid nodes must be finite")
        if arr[0] != 0.0:
            raise InvalidParam("grid must start at r = 0 exactly")
        if np.any(np.diff(arr) <= 0):
            raise InvalidParam("grid nodes must be strictly increasing")
        arr.setflags(write=False)
        self.nodes = arr

    @classmethod
    def uniform(cls, r_max: float, num_nodes: int) -> "Grid":
        if r_max <= 0 or num_nodes < 3:
            raise InvalidParam("need r_max > 0 and num_nodes >= 3")
        return cls(np.linspace(0.0, float(r_max), int(num_nodes)))

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    def __len__(self) -> int:
        return int(self.nodes.size)

    def __repr__(self) -> str:
        return f"Grid({len(self)} nodes on [0, {self.r_max:g}])"


class RadialFunction:
    """Piecewise-linear u on a Grid with u(0) = 0, constant beyond the grid."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values: Sequence[float] | np.ndarray):
        vals = np.ascontiguousarray(values, dtype=float)
        if vals.shape != grid.nodes.shape:
            raise InvalidParam("values must match the grid node count")
        if not np.all(np.isfinite(vals)):
            raise NonFinite("function values must be finite")
        if vals[0] != 0.0:
            raise InvalidParam("u(0) must be 0 exactly")
        vals.setflags(write=False)
        self.grid = grid
        self.values = vals

    def __call__(self, r):
        return np.interp(r, self.grid.nodes, self.values)

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.grid.nodes)

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0.0))

    def __repr__(self) -> str:
        return f"RadialFunction({len(self.grid)} nodes, u_max={self.values.max():.4g})"


def sample(func: Callable[[np.ndarray], np.ndarray], grid: Grid) -> RadialFunction:
    """Sample a callable on a grid; func(0) must vanish to within 1e-12."""
    vals = np.asarray(func(grid.nodes), dtype=float)
    if abs(vals[0]) > 1e-12:
        raise InvalidParam(f"func(0) = {vals[0]!r}, expected 0")
    vals = vals.copy()
    vals[0] = 0.0
    return RadialFunction(grid, vals)


class Statement(str, Enum):
    """Which normalization of the inequality a deficit report refers to.

    CONSISTENT puts ln(n * mass) on the left; this is the form under which
    the additive constant is sharp.  AS_PRINTED puts ln(mass) there and
    consequently holds with extra slack of exactly ln n.  N1 is the
    total-variation endpoint case.
    """

    AS_PRINTED = "as_printed"
    CONSISTENT = "consistent"
    N1 = "n1"


@dataclass(frozen=True)
class DeficitReport:
    n: float
    lhs: float
    rhs: float
    deficit: float
    energy: float
    mass: float
    tail_estimate: float
    quad_error: float
    statement: Statement

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "deficit": self.deficit,
            "energy": self.energy,
            "mass": self.mass,
            "tail_estimate": self.tail_estimate,
            "quad_error": self.quad_error,
            "statement": self.statement.value,
        }


def energy(u: RadialFunction, n: float) -> float:
    """Exact n-energy sum |du/dr|**n * dr of the interpolant."""
    if n < 1:
        raise InvalidParam(f"need n >= 1, got {n}")
    h = np.diff(u.grid.nodes)
    return float(np.sum(np.abs(u.slopes) ** n * h))


def total_variation(u: RadialFunction) -> float:
    return float(np.sum(np.abs(np.diff(u.values))))


# --- exponentially weighted mass -------------------------------------------
#
# On a cell [r_i, r_{i+1}] the integrand exp(n*u - n*r) is exp of a linear
# function, so with A_i = n*(u_i - r_i) the cell integral is
# h_i * (e^{A_{i+1}} - e^{A_i}) / (A_{i+1} - A_i), the exponential mean.
# These closed forms make the mass exact for the interpolant (no quadrature
# error beyond roundoff) and cheap to differentiate, which the constrained
# solver relies on.  The adaptive quadrature module provides the independent
# cross-check in the tests.


def _expmean(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(e^b - e^a)/(b - a), continuously extended by e^a at b == a."""
    z = b - a
    safe = np.where(z == 0.0, 1.0, z)
    return np.exp(a) * np.where(z == 0.0, 1.0, np.expm1(safe) / safe)


def _psi(z: np.ndarray) -> np.ndarray:
    """(e^z - 1 - z)/z**2, series near 0; derivative kernel of _expmean."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-5
    safe = np.where(small, 1.0, z)
    direct = (np.expm1(safe) - safe) / (safe * safe)
    series = 0.5 + z / 6.0 + z * z / 24.0
    return np.where(small, series, direct)


def _mass_exponents(u: RadialFunction, n: float) -> np.ndarray:
    a = n * (u.values - u.grid.nodes)
    if np.max(a) > 700.0:
        raise NonFinite("exp(n*u - n*r) overflows binary64")
    return a


def weighted_mass(u: RadialFunction, n: float) -> tuple[float, float]:
    """Mass int_0^{r_N} e^{n u - n r} dr and the analytic tail beyond r_N.

    The tail uses the constant extension u = u_N for r > r_N, giving
    e^{n(u_N - r_N)}/n exactly.
    """
    if n < 1:
        raise InvalidParam(f"need n >= 1, got {n}")
    a = _mass_exponents(u, n)
    h = np.diff(u.grid.nodes)
    mass = float(np.sum(h * _expmean(a[:-1], a[1:])))
    tail = math.exp(a[-1]) / n
    return mass, tail


def weighted_mass_above(u: RadialFunction, n: float, r_from: float) -> float:
    """Measured weighted mass int_{r_from}^inf e^{n u - n r} dr.

    Exact for the interpolant-plus-constant-extension, including the split
    cell containing r_from.  Companion to `tail_bound`.
    """
    if n < 1:
        raise InvalidParam(f"need n >= 1, got {n}")
    if r_from < 0:
        raise InvalidParam("r_from must be >= 0")
    nodes = u.grid.nodes
    a = _mass_exponents(u, n)
    tail = math.exp(a[-1]) / n
    if r_from >= nodes[-1]:
        # inside the constant extension
        return math.exp(n * (float(u.values[-1]) - r_from)) / n
    idx = int(np.searchsorted(nodes, r_from, side="right"))
    # partial cell [r_from, nodes[idx]]
    u_at = float(u(r_from))
    a_at = n * (u_at - r_from)
    h0 = float(nodes[idx]) - r_from
    parts = [h0 * float(_expmean(np.array([a_at]), np.array([a[idx]]))[0])]
    h = np.diff(nodes[idx:])
    if h.size:
        parts.append(float(np.sum(h * _expmean(a[idx:-1], a[idx + 1:]))))
    return math.fsum(parts) + tail


def _require_nonnegative(u: RadialFunction) -> None:
    if not u.is_nonnegative():
        raise NegativeValues("function has negative values; hypotheses need u >= 0")


def deficit(
    u: RadialFunction,
    n: float,
    statement: Statement | str = Statement.CONSISTENT,
) -> DeficitReport:
    """Evaluate the inequality at u: rhs - lhs with all component integrals.

    rhs = ((n-1)/n)**(n-1) * energy + C_n in both variants; the statement
    selects whether the mass enters the logarithm with the factor n
    (CONSISTENT, sharp) or without it (AS_PRINTED, slack ln n).
    """
    statement = Statement(statement)
    if statement is Statement.N1:
        raise InvalidParam("use deficit_n1 for the n = 1 endpoint")
    if n <= 1:
        raise InvalidParam(f"need n > 1, got {n}")
    _require_nonnegative(u)
    mass, tail = weighted_mass(u, n)
    total = mass + tail
    en = energy(u, n)
    rhs = sharp_coefficient(n) * en + c_n(n)
    # ln(n) + ln(mass) rather than ln(n*mass): keeps the algebraic gap
    # between the two statements equal to ln(n) at working precision
    if statement is Statement.CONSISTENT:
        lhs = math.log(n) + math.log(total)
    else:
        lhs = math.log(total)
    quad_error = 4.0 * np.finfo(float).eps * (abs(mass) + abs(tail)) * len(u.grid)
    return DeficitReport(
        n=float(n),
        lhs=lhs,
        rhs=rhs,
        deficit=rhs - lhs,
        energy=en,
        mass=total,
        tail_estimate=tail,
        quad_error=quad_error,
        statement=statement,
    )


def deficit_n1(u: RadialFunction) -> DeficitReport:
    """Endpoint case: lhs = ln int e^{u - r}, rhs = total variation of u."""
    _require_nonnegative(u)
    mass, tail = weighted_mass(u, 1.0)
    total = mass + tail
    rhs = total_variation(u)
    lhs = math.log(total)
    quad_error = 4.0 * np.finfo(float).eps * total * len(u.grid)
    return DeficitReport(
        n=1.0,
        lhs=lhs,
        rhs=rhs,
        deficit=rhs - lhs,
        energy=rhs,
        mass=total,
        tail_estimate=tail,
        quad_error=quad_error,
        statement=Statement.N1,
    )


def moser_functional(
    u: RadialFunction,
    n: float,
    beta: float,
    spec: QuadratureSpec | None = None,
) -> float:
    """int_0^inf exp(beta * u**(n/(n-1)) - n*r) dr for nonnegative u.

    Cellwise adaptive quadrature on the interpolant; the constant-extension
    tail beyond r_N is exp(beta*u_N**(n/(n-1)) - n*r_N)/n analytically.
    """
    if n <= 1:
        raise InvalidParam(f"need n > 1, got {n}")
    _require_nonnegative(u)
    if spec is None:
        spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12, max_subdivisions=400)
    p = n / (n - 1.0)
    nodes = u.grid.nodes
    vals = u.values

    def cell_integrand(r: float) -> float:
        return math.exp(beta * float(np.interp(r, nodes, vals)) ** p - n * r)

    parts = [
        integrate(cell_integrand, nodes[i], nodes[i + 1], spec).value
        for i in range(len(nodes) - 1)
    ]
    tail = math.exp(beta * float(vals[-1]) ** p - n * float(nodes[-1])) / n
    return math.fsum(parts) + tail


def tail_bound(u: RadialFunction, n: float, beta0: float, r_from: float) -> float:
    """Exponential majorant exp(beta0**n * energy) * e^{kappa R}/(-kappa).

    Bounds the weighted mass beyond r_from for any admissible u whenever
    beta0 exceeds its threshold; kappa is the (negative) decay exponent of
    the comparison integrand.
    """
    if r_from < 0:
        raise InvalidParam("r_from must be >= 0")
    kappa = decay_exponent(n, beta0)  # raises BelowThreshold when invalid
    en = energy(u, n)
    exponent = beta0**n * en + kappa * r_from - math.log(-kappa)
    if exponent > 709.0:  # majorant beyond binary64 range; still a valid bound
        return math.inf
    return math.exp(exponent)


class _RunningIntegral:
    """Memoized antiderivative y(x) = int_0^x f, anchored at visited points.

    Each new query integrates only from the nearest previously visited point
    to its left, so an adaptive outer quadrature can evaluate y cheaply in
    any order.
    """

    def __init__(self, f: Callable[[float], float], spec: QuadratureSpec):
        self._f = f
        self._spec = spec
        self._xs = [0.0]
        self._ys = [0.0]

    def __call__(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        pos = bisect_right(self._xs, x)
        x0 = self._xs[pos - 1]
        y0 = self._ys[pos - 1]
        if x == x0:
            return y0
        y = y0 + integrate(self._f, x0, x, self._spec).value
        self._xs.insert(pos, x)
        self._ys.insert(pos, y)
        return y


def bliss_ratio(
    f: Callable[[float], float],
    k: float,
    l: float,
    x_max: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Ratio I/J**(l/k) with y = int_0^x f, I = int y**l/x**(l-alpha), J = int f**k.

    Both integrals are truncated at x_max (truncation can only lower the
    ratio, never push it above the sharp constant).  A warning is issued
    when the estimated tail of f**k beyond x_max is significant relative to
    J.
    """
    if not (l > k > 1):
        raise InvalidParam(f"need l > k > 1, got k={k}, l={l}")
    if x_max <= 0:
        raise InvalidParam("x_max must be positive")
    alpha = l / k - 1.0

    j_val = integrate(lambda x: f(x) ** k, 0.0, x_max, spec).value
    if j_val < 1e-300:
        raise DegenerateInput("int f**k is numerically zero")

    tail_probe = integrate(lambda x: f(x) ** k, x_max, 2.0 * x_max, spec).value
    if tail_probe > 1e-8 * j_val:
        warnings.warn(
            f"truncated tail of f**k is ~{tail_probe / j_val:.2e} of J; "
            "increase x_max for a sharper ratio",
            stacklevel=2,
        )

    # anchored segments are short, so no pre-split needed on the inner rule
    y = _RunningIntegral(f, QuadratureSpec(
        abs_tol=min(spec.abs_tol, 1e-12),
        rel_tol=min(spec.rel_tol, 1e-12),
        max_subdivisions=spec.max_subdivisions,
        initial_intervals=1,
    ))
    i_val = integrate(lambda x: y(x) ** l / x ** (l - alpha), 0.0, x_max, spec).value
    return i_val / j_val ** (l / k)


def random_admissible(
    seed: int,
    n_pieces: int,
    r_max: float,
    amplitude: float,
) -> RadialFunction:
    """Deterministic nonnegative piecewise-linear test function.

    Cell widths are drawn from a jittered uniform spacing (between 0.5x and
    1.5x the mean), which keeps slopes bounded by 3*n_pieces*amplitude/r_max
    so that downstream energies stay well conditioned.  Values are uniform
    on [0, amplitude] with u(0) = 0; the extension rule keeps u constant
    beyond r_max.  Identical seeds give identical functions; at least two
    cells are generated (grids need three nodes).
    """
    if n_pieces < 1:
        raise InvalidParam("n_pieces must be >= 1")
    if r_max <= 0:
        raise InvalidParam("r_max must be positive")
    if amplitude < 0:
        raise InvalidParam("amplitude must be >= 0")
    rng = np.random.default_rng(seed)
    pieces = max(n_pieces, 2)
    gaps = rng.uniform(0.5, 1.5, size=pieces)
    nodes = np.concatenate(([0.0], np.cumsum(gaps))) * (r_max / float(np.sum(gaps)))
    nodes[-1] = r_max
    values = rng.uniform(0.0, amplitude, size=nodes.size) if amplitude > 0 else np.zeros(nodes.size)
    values[0] = 0.0
    return RadialFunction(Grid(nodes), values)


# --- serialization ----------------------------------------------------------


def write_profile_csv(u: RadialFunction, path_or_buf) -> None:
    """CSV with header r,u; 17 significant digits round-trip binary64 exactly."""
    close = False
    if isinstance(path_or_buf, (str, bytes)):
        handle = open(path_or_buf, "w", newline="")
        close = True
    else:
        handle = path_or_buf
    try:
        writer = csv.writer(handle)
        writer.writerow(["r", "u"])
        for r, v in zip(u.grid.nodes, u.values):
            writer.writerow([format(r, ".17g"), format(v, ".17g")])
    finally:
        if close:
            handle.close()


def read_profile_csv(path_or_buf) -> RadialFunction:
    close = False
    if isinstance(path_or_buf, (str, bytes)):
        handle = open(path_or_buf, "r", newline="")
        close = True
    else:
        handle = path_or_buf
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["r", "u"]:
            raise InvalidParam("profile CSV must start with header r,u")
        rows = [(float(row[0]), float(row[1])) for row in reader if row]
    finally:
        if close:
            handle.close()
    if not rows:
        raise InvalidParam("profile CSV has no data rows")
    nodes = np.array([r for r, _ in rows])
    values = np.array([v for _, v in rows])
    return RadialFunction(Grid(nodes), values)


def profile_csv_string(u: RadialFunction) -> str:
    buf = io.StringIO()
    write_profile_csv(u, buf)
    return buf.getvalue()
