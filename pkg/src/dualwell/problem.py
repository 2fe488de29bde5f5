"""Problem specification, radial loads, and hypothesis validation.

The model lives on an annulus R2 < |x| = r < R1 in dimension n with a
double-well stored energy density nu/2 * (|grad u|^2/2 - lam)^2 and a
radially symmetric body load f(r).  Solvability under natural boundary
conditions requires three hypotheses on f, all checked here:

* balance: the radial moment int_{R2}^{R1} f(rho) rho^(n-1) drho vanishes,
* a single interior zero: f(r) = 0 exactly once on (R2, R1), at r = R3,
* smallness: ||f||_{L1} < 4*lam*nu*R2^(n-1)*sqrt(2*lam*pi^n) / (3*sqrt(3)*Gamma(n/2)),

the last being what keeps the induced stress amplitude below the critical
value of the dual cubic everywhere in the annulus.

Validation is report-style: `validate_spec` and `validate_load` return
structured pass/fail reports and leave the abort decision to the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import SpecError
from . import quadrature

#: Absolute tolerance on the radial balance integral.
BALANCE_TOL = 1e-10

#: Sample count for the sign-change scan in validate_load.
SIGN_SCAN_SAMPLES = 4001


@dataclass(frozen=True)
class ProblemSpec:
    """Material and geometry constants of one problem instance.

    Parameters
    ----------
    nu : float
        Stiffness constant, must be > 0.
    lam : float
        Well parameter, must be > 0; the wells of the stored energy sit
        at squared strain 2*lam.
    R1, R2 : float
        Outer and inner radii, R1 > R2 > 0.
    n : int
        Spatial dimension, >= 1.

    Construction does not validate; run `validate_spec` and check the
    report before feeding a spec into the solver pipeline.
    """

    nu: float
    lam: float
    R1: float
    R2: float
    n: int

    @property
    def gamma_half(self) -> float:
        """Gamma(n/2)."""
        return gamma_half_integer(self.n)

    @property
    def sphere_area(self) -> float:
        """Surface area of the unit (n-1)-sphere."""
        return sphere_area(self.n)

    @property
    def volume(self) -> float:
        """Volume of the annulus, sphere_area * (R1^n - R2^n) / n."""
        return self.sphere_area * (self.R1**self.n - self.R2**self.n) / self.n


def gamma_half_integer(m: int) -> float:
    """Gamma(m/2) for positive integer m via the recursion Gamma(x+1) = x*Gamma(x).

    Anchored at Gamma(1/2) = sqrt(pi) and Gamma(1) = 1, so the value is
    exact up to rounding for every half-integer argument.
    """
    if int(m) != m or m <= 0:
        raise SpecError(f"gamma_half_integer needs a positive integer, got {m!r}")
    m = int(m)
    if m == 1:
        return math.sqrt(math.pi)
    if m == 2:
        return 1.0
    return (m / 2.0 - 1.0) * gamma_half_integer(m - 2)


def sphere_area(n: int) -> float:
    """Area of the unit (n-1)-sphere, 2*pi^(n/2) / Gamma(n/2).

    For n = 1 the boundary of an interval is two points; the convention
    here is the two-point counting measure, area 2 (which is also what
    the closed form evaluates to).
    """
    if int(n) != n or n < 1:
        raise SpecError(f"dimension must be an integer >= 1, got {n!r}")
    n = int(n)
    if n == 1:
        return 2.0
    return 2.0 * math.pi ** (n / 2.0) / gamma_half_integer(n)


def l1_load_bound(spec: ProblemSpec) -> float:
    """Right-hand side of the L1 smallness condition on the load."""
    n = spec.n
    return (
        4.0 * spec.lam * spec.nu * spec.R2 ** (n - 1)
        * math.sqrt(2.0 * spec.lam * math.pi**n)
        / (3.0 * math.sqrt(3.0) * gamma_half_integer(n))
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    """Pass/fail verdicts for each hypothesis on a ProblemSpec."""

    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)


def validate_spec(spec: ProblemSpec) -> ValidationReport:
    """Check every hypothesis on the constants; never raises.

    Returns a report listing each check; callers abort on report.passed
    being False.
    """
    checks = [
        CheckResult("nu > 0", spec.nu > 0.0, f"nu = {spec.nu}"),
        CheckResult("lam > 0", spec.lam > 0.0, f"lam = {spec.lam}"),
        CheckResult("R2 > 0", spec.R2 > 0.0, f"R2 = {spec.R2}"),
        CheckResult("R1 > R2", spec.R1 > spec.R2, f"R1 = {spec.R1}, R2 = {spec.R2}"),
        CheckResult(
            "n integer >= 1",
            isinstance(spec.n, (int, np.integer)) and not isinstance(spec.n, bool) and spec.n >= 1,
            f"n = {spec.n!r}",
        ),
    ]
    return ValidationReport(tuple(checks))


@dataclass(frozen=True, eq=False)
class LoadFunction:
    """Radially symmetric load f(r) on [R2, R1].

    Two kinds: the builtin linear family f(r) = amplitude * (r3 - r) with
    r3 chosen so the balance integral vanishes in closed form, and
    tabulated loads interpolated piecewise-linearly between samples.

    Instances are callable on scalars or arrays of radii.
    """

    kind: str
    amplitude: float | None = None
    samples: np.ndarray | None = None
    r3: float | None = None

    def __call__(self, r):
        if self.kind == "linear":
            return self.amplitude * (self.r3 - np.asarray(r, dtype=float))
        if self.kind == "table":
            return np.interp(np.asarray(r, dtype=float), self.samples[:, 0], self.samples[:, 1])
        raise SpecError(f"unknown load kind {self.kind!r}")

    @property
    def breakpoints(self) -> np.ndarray:
        """Radii where the load is only piecewise smooth (quadrature must split there)."""
        if self.kind == "table":
            return self.samples[:, 0]
        return np.empty(0)

    @property
    def is_zero(self) -> bool:
        if self.kind == "linear":
            return self.amplitude == 0.0
        return bool(np.all(self.samples[:, 1] == 0.0))


def balanced_linear_load(spec: ProblemSpec, amplitude: float) -> LoadFunction:
    """The builtin family f(r) = amplitude * (R3 - r) with exact balance.

    R3 = (n/(n+1)) * (R1^(n+1) - R2^(n+1)) / (R1^n - R2^n) makes the
    radial moment of f vanish identically, and lies strictly inside
    (R2, R1) for any admissible geometry.
    """
    if amplitude == 0.0:
        raise SpecError("degenerate load: amplitude must be nonzero")
    n = spec.n
    r3 = (n / (n + 1.0)) * (spec.R1 ** (n + 1) - spec.R2 ** (n + 1)) / (spec.R1**n - spec.R2**n)
    return LoadFunction(kind="linear", amplitude=float(amplitude), r3=float(r3))


def tabulated_load(samples) -> LoadFunction:
    """Piecewise-linear load from (r, f(r)) rows sorted by radius."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise SpecError("tabulated load needs at least two (r, f) rows")
    if not np.all(np.isfinite(arr)):
        raise SpecError("tabulated load contains non-finite entries")
    if np.any(np.diff(arr[:, 0]) <= 0.0):
        raise SpecError("tabulated load radii must be strictly increasing")
    return LoadFunction(kind="table", samples=arr)


@dataclass(frozen=True)
class LoadReport:
    """Certificates for the three load hypotheses.

    balance_residual is the absolute value of the radial moment;
    zero_location is the detected sign change (None when the count is
    not exactly one); l1_norm and l1_bound are the two sides of the
    smallness condition.
    """

    balance_residual: float
    balance_ok: bool
    sign_changes: int
    zero_location: float | None
    single_zero_ok: bool
    l1_norm: float
    l1_bound: float
    l1_ok: bool

    @property
    def passed(self) -> bool:
        return self.balance_ok and self.single_zero_ok and self.l1_ok


def _check_table_against_spec(load: LoadFunction, spec: ProblemSpec) -> None:
    radii = load.samples[:, 0]
    if np.any(np.diff(radii) <= 0.0):
        raise SpecError("malformed load: sample radii must be strictly increasing")
    span = spec.R1 - spec.R2
    tol = 1e-12 * span
    if radii[0] < spec.R2 - tol or radii[-1] > spec.R1 + tol:
        raise SpecError(
            f"malformed load: sample radii [{radii[0]}, {radii[-1]}] "
            f"fall outside [{spec.R2}, {spec.R1}]"
        )
    if radii[0] > spec.R2 + tol or radii[-1] < spec.R1 - tol:
        raise SpecError(
            f"malformed load: samples span [{radii[0]}, {radii[-1]}] "
            f"but must cover [{spec.R2}, {spec.R1}]"
        )


def _interior_zeros(load: Callable, spec: ProblemSpec) -> tuple[int, list[float]]:
    """Count sign changes of f on a fine grid and locate each by bisection.

    Samples that are exactly zero are skipped in the sign sequence, so a
    grid point landing on the zero does not produce a spurious double
    change.
    """
    r = np.linspace(spec.R2, spec.R1, SIGN_SCAN_SAMPLES)
    f = np.asarray(load(r), dtype=float)
    nonzero = f != 0.0
    rs, fs = r[nonzero], f[nonzero]
    signs = np.sign(fs)
    flips = np.nonzero(signs[1:] != signs[:-1])[0]
    zeros = []
    for k in flips:
        zeros.append(float(brentq(lambda x: float(load(x)), rs[k], rs[k + 1], xtol=1e-14)))
    return len(flips), zeros


def validate_load(load: LoadFunction, spec: ProblemSpec) -> LoadReport:
    """Evaluate the three load hypotheses and return their certificates.

    Raises
    ------
    SpecError
        If a tabulated load is malformed (non-monotone radii, or samples
        not covering [R2, R1]).
    """
    if load.kind == "table":
        _check_table_against_spec(load, spec)

    n = spec.n
    base = np.linspace(spec.R2, spec.R1, 257)
    sign_changes, zeros = _interior_zeros(load, spec)

    knots = np.concatenate([base, load.breakpoints, np.asarray(zeros)])
    if load.r3 is not None:
        knots = np.append(knots, load.r3)
    knots = np.unique(np.clip(knots, spec.R2, spec.R1))
    partition = knots[np.concatenate([[True], np.diff(knots) > 0.0])]

    moment = quadrature.integrate(lambda x: load(x) * x ** (n - 1), partition)
    l1 = spec.sphere_area * quadrature.integrate(lambda x: np.abs(load(x)) * x ** (n - 1), partition)
    bound = l1_load_bound(spec)

    return LoadReport(
        balance_residual=abs(moment),
        balance_ok=abs(moment) <= BALANCE_TOL,
        sign_changes=sign_changes,
        zero_location=zeros[0] if len(zeros) == 1 else None,
        single_zero_ok=sign_changes == 1,
        l1_norm=l1,
        l1_bound=bound,
        l1_ok=l1 < bound,
    )


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Strictly increasing node array spanning exactly [R2, R1]."""

    nodes: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.nodes, dtype=float)
        if arr.ndim != 1 or arr.size < 3:
            raise SpecError("grid needs at least 3 nodes")
        if np.any(np.diff(arr) <= 0.0):
            raise SpecError("grid nodes must be strictly increasing")
        object.__setattr__(self, "nodes", arr)

    @classmethod
    def uniform(cls, spec: ProblemSpec, count: int) -> "RadialGrid":
        if count < 3:
            raise SpecError(f"grid needs at least 3 nodes, got {count}")
        return cls(np.linspace(spec.R2, spec.R1, int(count)))

    @property
    def count(self) -> int:
        return int(self.nodes.size)

    def matches(self, spec: ProblemSpec) -> bool:
        return bool(np.isclose(self.nodes[0], spec.R2) and np.isclose(self.nodes[-1], spec.R1))
