"""Radial stress, dual branch fields, and the three displacement profiles.

The radial stress ansatz sigma(x) = F(r) x reduces equilibrium to the
first-order problem F' + n F / r = -f / r with F(R2) = 0, solved in
closed form by F(r) = -r^(-n) G(r), G(r) = int_{R2}^r f(rho) rho^(n-1) drho.
Load balance makes F vanish at the outer radius too, and the L1 smallness
hypothesis keeps the amplitude A(r) = F(r)^2 r^2 strictly below the
critical value of the dual cubic at every interior point, so all three
root branches zeta_i(r) exist across the annulus.

Each branch induces a strain u'(r) = F(r) r / zeta_i(r) and, by cumulative
integration, a displacement profile u_i(r).  Branches 1 and 2 have 0/0
strain limits where the amplitude vanishes (the endpoints); the limits are
the well strains +-sqrt(2*lam), with the sign fixed by the certified
interior sign of F, and the evaluators here switch to series/limit values
below a small amplitude threshold instead of dividing noise by noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import quadrature
from .dual_algebra import TOL_ROOT, branch_roots, critical_amplitude
from .errors import AmplitudeOverflowError, NumericsError, SpecError
from .problem import LoadFunction, ProblemSpec, RadialGrid

#: Fraction of the critical amplitude below which branch-1/2 strain
#: evaluation switches from the direct ratio to series/limit values.
EPS_SWITCH_FRACTION = 1e-10

#: Absolute tolerance on |F(R1)| (the balance certificate on the stress).
OUTER_F_TOL = 1e-10


def load_moment(load: LoadFunction, spec: ProblemSpec, r) -> np.ndarray:
    """G(r) = int_{R2}^r f(rho) rho^(n-1) drho at arbitrary radii.

    The quadrature partition is the union of the query radii and the
    load's breakpoints, so the result is exact (to rounding) for
    piecewise-polynomial loads up to degree 7 - (n-1).
    """
    r = np.asarray(r, dtype=float)
    flat = r.ravel()
    if flat.size == 0:
        return np.zeros(r.shape)
    bp = load.breakpoints
    bp = bp[(bp > spec.R2) & (bp <= max(spec.R1, flat.max()))]
    pts = np.unique(np.concatenate([[spec.R2], flat, bp]))
    if pts.size == 1:
        return np.zeros(r.shape)
    n = spec.n
    cum = quadrature.cumulative(lambda x: load(x) * x ** (n - 1), pts)
    G = cum[np.searchsorted(pts, flat)]
    return G.reshape(r.shape)


@dataclass(frozen=True, eq=False)
class RadialStress:
    """F, G, and the amplitude A = F^2 r^2 on a grid, with certificates.

    sign is the sign of F on the open interval (-1, +1, or 0 for the
    degenerate zero load); outer_residual is |F(R1)|, the numerical
    balance certificate; max_interior_amplitude is the certified maximum
    of A strictly inside, always below critical for instances built by
    compute_F.
    """

    spec: ProblemSpec
    load: LoadFunction
    grid: RadialGrid
    F_values: np.ndarray
    G_values: np.ndarray
    amplitude_values: np.ndarray
    sign: int
    outer_residual: float
    max_interior_amplitude: float


def compute_F(
    load: LoadFunction,
    spec: ProblemSpec,
    grid: RadialGrid,
    *,
    allow_zero_load: bool = False,
) -> RadialStress:
    """Solve for the radial stress profile and certify its invariants.

    Parameters
    ----------
    allow_zero_load : bool
        The identically zero load violates the unique-zero hypothesis but
        is a useful analytic edge case (F == 0, every branch field is
        constant); it must be requested explicitly.

    Raises
    ------
    AmplitudeOverflowError
        If A(r) reaches the critical amplitude at an interior node, which
        means the L1 smallness hypothesis failed numerically.
    NumericsError
        If F changes sign on the interior or |F(R1)| exceeds the balance
        tolerance.
    """
    if not grid.matches(spec):
        raise SpecError("grid does not span [R2, R1] of the spec")
    if load.is_zero and not allow_zero_load:
        raise SpecError("identically zero load requires allow_zero_load=True")

    r = grid.nodes
    G = load_moment(load, spec, r)
    F = -G / r**spec.n
    A = F * F * r * r

    if load.is_zero:
        return RadialStress(spec, load, grid, F, G, A, 0, 0.0, 0.0)

    outer = abs(float(F[-1]))
    if outer > OUTER_F_TOL:
        raise NumericsError(
            f"|F(R1)| = {outer:.3e} exceeds {OUTER_F_TOL:.1e}; load balance failed numerically"
        )

    Fi = F[1:-1]
    if np.any(Fi == 0.0) or (Fi.max() > 0.0 and Fi.min() < 0.0):
        raise NumericsError("F changes sign (or vanishes) strictly inside the annulus")
    sign = 1 if Fi[0] > 0.0 else -1

    crit = critical_amplitude(spec.nu, spec.lam)
    a_max = float(A[1:-1].max())
    if a_max >= crit:
        raise AmplitudeOverflowError(
            f"amplitude {a_max:.6e} reached the critical value {crit:.6e} inside the annulus"
        )
    return RadialStress(spec, load, grid, F, G, A, sign, outer, a_max)


def stress_function(stress: RadialStress) -> Callable[[np.ndarray], np.ndarray]:
    """Evaluator r -> F(r) consistent with the stress's load and spec."""
    load, spec = stress.load, stress.spec

    def F_at(r):
        r = np.asarray(r, dtype=float)
        return -load_moment(load, spec, r) / r**spec.n

    return F_at


@dataclass(frozen=True, eq=False)
class DualBranchField:
    """One root branch zeta_i(r) of the dual cubic along the grid."""

    branch: int
    grid: RadialGrid
    zeta_values: np.ndarray
    stress: RadialStress


def dual_field(stress: RadialStress, branch: int, spec: ProblemSpec) -> DualBranchField:
    """Node-wise branch root of E(zeta) = A(r), with exact endpoint values.

    At the endpoints the amplitude vanishes (up to rounding) and the
    exact degenerate roots are written: 0 for branches 1 and 2, -nu*lam
    for branch 3.  Interior nodes are solved by the closed-form branch
    solver and verified against the residual tolerance; the strict
    interior ordering zeta1 > 0 > zeta2 > -2*nu*lam/3 > zeta3 > -nu*lam
    is certified for nondegenerate stresses.
    """
    if branch not in (1, 2, 3):
        raise SpecError(f"branch must be 1, 2, or 3, got {branch}")
    a = spec.nu * spec.lam
    A = stress.amplitude_values
    z1, z2, z3 = branch_roots(A[1:-1], spec.nu, spec.lam)

    if stress.sign != 0:
        ordered = (
            np.all(z1 > 0.0)
            and np.all(z2 < 0.0)
            and np.all(z2 > -2.0 * a / 3.0)
            and np.all(z3 < -2.0 * a / 3.0)
            and np.all(z3 > -a)
        )
        if not ordered:
            raise NumericsError("interior branch ordering violated by the root solver")

    interior = {1: z1, 2: z2, 3: z3}[branch]
    zeta = np.empty_like(A)
    zeta[1:-1] = interior
    zeta[0] = zeta[-1] = 0.0 if branch in (1, 2) else -a

    resid = np.abs(2.0 * zeta * zeta * (spec.lam + zeta / spec.nu) - A)
    bound = TOL_ROOT * np.maximum(1.0, A)
    if np.any(resid > bound):
        raise NumericsError(
            f"branch-{branch} residual {resid.max():.3e} exceeds tolerance on the grid"
        )
    return DualBranchField(branch, stress.grid, zeta, stress)


def zeta_function(stress: RadialStress, branch: int, spec: ProblemSpec) -> Callable:
    """Evaluator r -> zeta_branch(r) for quadrature-point evaluation."""
    if branch not in (1, 2, 3):
        raise SpecError(f"branch must be 1, 2, or 3, got {branch}")
    F_at = stress_function(stress)

    def zeta_at(r):
        r = np.asarray(r, dtype=float)
        F = F_at(r)
        roots = branch_roots(F * F * r * r, spec.nu, spec.lam)
        return roots[branch - 1].reshape(r.shape)

    return zeta_at


def strain_function(stress: RadialStress, branch: int, spec: ProblemSpec) -> Callable:
    """Evaluator r -> u_i'(r) = F(r) r / zeta_i(r) with endpoint limits.

    Where the amplitude is below EPS_SWITCH_FRACTION * critical, the raw
    sign of F is rounding noise; the certified interior sign takes over
    via sqrt(A), and at exactly zero amplitude the analytic limits
    +-sqrt(2*lam) (branches 1/2) and 0 (branch 3) are returned.  The
    degenerate zero load adopts sign -1, giving the constant well strains
    -sqrt(2*lam) and +sqrt(2*lam) on branches 1 and 2.
    """
    if branch not in (1, 2, 3):
        raise SpecError(f"branch must be 1, 2, or 3, got {branch}")
    nu, lam = spec.nu, spec.lam
    sgn = stress.sign if stress.sign != 0 else -1
    eps = EPS_SWITCH_FRACTION * critical_amplitude(nu, lam)
    F_at = stress_function(stress)
    well = np.sqrt(2.0 * lam)

    def strain_at(r):
        r = np.asarray(r, dtype=float)
        F = F_at(r)
        A = F * F * r * r
        z = branch_roots(A, nu, lam)[branch - 1].reshape(r.shape)
        if branch == 3:
            return np.where(z != 0.0, F * r / z, 0.0)
        limit = (well if branch == 1 else -well) * sgn
        safe = np.where(z == 0.0, 1.0, z)
        direct = F * r / safe
        series = sgn * np.sqrt(A) / safe
        return np.where(A >= eps, direct, np.where(A > 0.0, series, limit))

    return strain_at


@dataclass(frozen=True, eq=False)
class CriticalPoint:
    """A displacement profile u_i(r) with its strain field and constant."""

    branch: int
    grid: RadialGrid
    u_values: np.ndarray
    strain_values: np.ndarray
    constant: float
    stress: RadialStress


def displacement(
    stress: RadialStress, zeta: DualBranchField, C: float, spec: ProblemSpec
) -> CriticalPoint:
    """Cumulative integral of the branch strain, anchored at u(R2) = C.

    The stored endpoint strains are the analytic limits (finite by the
    small-amplitude expansion), so the profile is continuous on the
    closed annulus.
    """
    if zeta.stress is not stress and not np.array_equal(zeta.grid.nodes, stress.grid.nodes):
        raise SpecError("zeta was built on a different grid than the stress")
    strain_at = strain_function(stress, zeta.branch, spec)
    nodes = stress.grid.nodes
    u = float(C) + quadrature.cumulative(strain_at, nodes)
    s = strain_at(nodes)

    sgn = stress.sign if stress.sign != 0 else -1
    well = np.sqrt(2.0 * spec.lam)
    if zeta.branch == 1:
        s[0] = s[-1] = sgn * well
    elif zeta.branch == 2:
        s[0] = s[-1] = -sgn * well
    else:
        s[0] = s[-1] = 0.0

    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(s))):
        raise NumericsError(f"branch-{zeta.branch} displacement produced non-finite values")
    return CriticalPoint(zeta.branch, stress.grid, u, s, float(C), stress)


def strain_consistency(cp: CriticalPoint, stress: RadialStress, spec: ProblemSpec) -> np.ndarray:
    """Per-node constitutive residual nu*(strain^2/2 - lam)*strain - F*r.

    Vanishes identically for exact branch fields; through the numerical
    pipeline it measures quadrature plus root-solver error.
    """
    s = cp.strain_values
    return spec.nu * (0.5 * s * s - spec.lam) * s - stress.F_values * stress.grid.nodes


def all_branches(
    stress: RadialStress,
    spec: ProblemSpec,
    constants: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> list[tuple[DualBranchField, CriticalPoint]]:
    """Dual field and displacement for all three branches."""
    out = []
    for i in (1, 2, 3):
        z = dual_field(stress, i, spec)
        out.append((z, displacement(stress, z, constants[i - 1], spec)))
    return out
