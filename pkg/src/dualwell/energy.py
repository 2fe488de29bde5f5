"""Primal, total complementary, and pure complementary energies; gap certificates.

The primal functional is

    I[u] = area(S^{n-1}) * int_{R2}^{R1} [ nu/2 (u'^2/2 - lam)^2 - f u ] r^(n-1) dr,

the total complementary functional couples a displacement and a dual field,

    Xi(u, zeta) = int [ (u'^2/2) zeta - Psi*(zeta) - f u ],  Psi*(z) = z^2/(2 nu) + lam z,

and along a dual branch field the pure complementary value reduces to

    I_d[zeta] = -1/2 * int [ |sigma|^2/zeta + 2 lam zeta + zeta^2/nu ].

At a critical pair all three coincide (no duality gap); this module
evaluates each independently by the composite Gauss-Legendre rule on the
stress grid and certifies the agreement.  The |sigma|^2/zeta quotient is
replaced by its algebraic identity 2 zeta (lam + zeta/nu) wherever the
amplitude is below the branch-field switch threshold, which removes the
0/0 at the endpoints exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import GapViolationError
from .fields import (
    EPS_SWITCH_FRACTION,
    CriticalPoint,
    DualBranchField,
    RadialStress,
    strain_function,
    stress_function,
    zeta_function,
)
from .dual_algebra import critical_amplitude
from .problem import LoadFunction, ProblemSpec

#: Relative duality-gap tolerance: gap <= TOL_GAP * (1 + |primal|).
TOL_GAP = 1e-7


def well_density(s, nu: float, lam: float):
    """Double-well stored energy density nu/2 * (s^2/2 - lam)^2."""
    s = np.asarray(s, dtype=float)
    return 0.5 * nu * (0.5 * s * s - lam) ** 2


def legendre_dual(z, nu: float, lam: float):
    """Psi*(z) = z^2/(2 nu) + lam z, the conjugate of the well in the dual variable."""
    z = np.asarray(z, dtype=float)
    return z * z / (2.0 * nu) + lam * z


def _panel_u(cp: CriticalPoint, spec: ProblemSpec, points: np.ndarray) -> np.ndarray:
    """u at cell-aligned quadrature points via one sub-cell panel per point."""
    strain_at = strain_function(cp.stress, cp.branch, spec)
    nodes = cp.grid.nodes
    return cp.u_values[:-1, None] + quadrature.between(strain_at, nodes[:-1, None], points)


def primal_energy(cp: CriticalPoint, load: LoadFunction, spec: ProblemSpec) -> float:
    """I[u] for a branch profile, by composite quadrature on its grid."""
    points, weights = quadrature.panel_points(cp.grid.nodes)
    s = strain_function(cp.stress, cp.branch, spec)(points)
    u = _panel_u(cp, spec, points)
    density = well_density(s, spec.nu, spec.lam) - load(points) * u
    return spec.sphere_area * float(np.sum(weights * density * points ** (spec.n - 1)))


def dual_energy(zeta: DualBranchField, stress: RadialStress, spec: ProblemSpec) -> float:
    """I_d along a branch field, with the identity substitution near zero amplitude."""
    nu, lam = spec.nu, spec.lam
    eps = EPS_SWITCH_FRACTION * critical_amplitude(nu, lam)
    z_at = zeta_function(stress, zeta.branch, spec)
    F_at = stress_function(stress)

    points, weights = quadrature.panel_points(stress.grid.nodes)
    z = z_at(points)
    F = F_at(points)
    A = F * F * points * points
    safe = np.where(z == 0.0, 1.0, z)
    quotient = np.where(A >= eps, A / safe, 2.0 * z * (lam + z / nu))
    integrand = -0.5 * (quotient + 2.0 * lam * z + z * z / nu)
    return spec.sphere_area * float(np.sum(weights * integrand * points ** (spec.n - 1)))


def total_complementary(
    cp: CriticalPoint, zeta: DualBranchField, load: LoadFunction, spec: ProblemSpec
) -> float:
    """Xi(u, zeta) for a displacement/dual-field pair on a shared grid."""
    points, weights = quadrature.panel_points(cp.grid.nodes)
    s = strain_function(cp.stress, cp.branch, spec)(points)
    z = zeta_function(zeta.stress, zeta.branch, spec)(points)
    u = _panel_u(cp, spec, points)
    integrand = 0.5 * s * s * z - legendre_dual(z, spec.nu, spec.lam) - load(points) * u
    return spec.sphere_area * float(np.sum(weights * integrand * points ** (spec.n - 1)))


@dataclass(frozen=True)
class EnergyReport:
    """Primal, dual, and coupling values for one branch, plus their gap."""

    branch: int
    primal: float
    dual: float
    total_complementary: float
    gap: float


def duality_gap(
    cp: CriticalPoint, zeta: DualBranchField, load: LoadFunction, spec: ProblemSpec
) -> EnergyReport:
    """Assemble the three energies of a branch and certify the zero gap.

    Raises
    ------
    GapViolationError
        If |I - I_d| or |Xi - I_d| exceeds TOL_GAP * (1 + |I|); this
        signals a pipeline defect, not a property of the problem.
    """
    primal = primal_energy(cp, load, spec)
    dual = dual_energy(zeta, cp.stress, spec)
    xi = total_complementary(cp, zeta, load, spec)
    gap = abs(primal - dual)
    tol = TOL_GAP * (1.0 + abs(primal))
    if gap > tol or abs(xi - dual) > tol:
        raise GapViolationError(
            f"branch {cp.branch}: duality gap {gap:.3e} or coupling mismatch "
            f"{abs(xi - dual):.3e} exceeds {tol:.3e}"
        )
    return EnergyReport(cp.branch, primal, dual, xi, gap)
