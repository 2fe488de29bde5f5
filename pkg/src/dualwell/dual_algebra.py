"""Pointwise solution of the dual cubic E(zeta) = A and its root branches.

E(y) := 2 y^2 (lam + y/nu) on [-nu*lam, inf) is nonnegative with a local
maximum 8*lam^3*nu^2/27 at y = -2*nu*lam/3.  For amplitudes A strictly
between 0 and that critical value the cubic has three real roots

    zeta1 > 0 > zeta2 > -2*nu*lam/3 > zeta3 > -nu*lam,

degenerating to (0, 0, -nu*lam) at A = 0 and to a simple root nu*lam/3
plus the double root -2*nu*lam/3 at the critical amplitude; above it only
one (positive) real root survives.

Roots come from closed forms on the scaled monic cubic t^3 + t^2 = B with
t = zeta/(nu*lam) and B = nu*A / (2*(nu*lam)^3): the trigonometric form in
the three-root regime, whose cosine argument reduces to the perfectly
conditioned 1 - 2*A/critical, and the Cardano form above critical.  Tiny
amplitudes are seeded instead by the series zeta = +-q - q^2/(2*nu*lam),
q = sqrt(A/(2*lam)), because the trigonometric form loses the two small
roots to cancellation there.  Every root is finished with a bracketed,
accept-if-better Newton polish on E(zeta) - A, which holds the relative
residual at ~1e-15 across regimes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericsError, SpecError

#: Relative tolerance on the root residual |E(zeta) - A| / max(1, A).
TOL_ROOT = 1e-12

#: Relative half-width of the critical-double band around the critical amplitude.
TOL_REGIME = 1e-12

#: Negative amplitudes above this are clamped to zero; below it they error.
NEGATIVE_CLAMP = -1e-14

# Below this fraction of the critical amplitude the small-root series seeds
# replace the trigonometric closed form.
_SERIES_SWITCH = 1e-6


def evaluate_E(y, nu: float, lam: float):
    """The dual cubic E(y) = 2 y^2 (lam + y/nu) on its domain y >= -nu*lam.

    Accepts scalars or arrays; raises SpecError when any entry lies below
    -nu*lam (beyond a rounding allowance).
    """
    y = np.asarray(y, dtype=float)
    floor = -nu * lam
    if np.any(y < floor - 1e-12 * max(1.0, abs(floor))):
        raise SpecError(f"E is defined on [{floor}, inf); got minimum {y.min()}")
    out = 2.0 * y * y * (lam + y / nu)
    return float(out) if out.ndim == 0 else out


def _E_raw(y, nu, lam):
    return 2.0 * y * y * (lam + y / nu)


def _E_prime(y, nu, lam):
    return 4.0 * lam * y + 6.0 * y * y / nu


def critical_amplitude(nu: float, lam: float) -> float:
    """Largest amplitude with three real branches, 8*lam^3*nu^2/27."""
    if nu <= 0.0 or lam <= 0.0:
        raise SpecError(f"need nu > 0 and lam > 0, got nu={nu}, lam={lam}")
    return 8.0 * lam**3 * nu**2 / 27.0


def _newton_polish(z, A, nu, lam, lo, hi, iters: int = 3):
    """Bracketed Newton on E(z) - A; a step is kept only if it shrinks |residual|."""
    g = _E_raw(z, nu, lam) - A
    for _ in range(iters):
        gp = _E_prime(z, nu, lam)
        step = np.where(gp != 0.0, g / np.where(gp == 0.0, 1.0, gp), 0.0)
        cand = np.clip(z - step, lo, hi)
        gc = _E_raw(cand, nu, lam) - A
        better = np.abs(gc) <= np.abs(g)
        z = np.where(better, cand, z)
        g = np.where(better, gc, g)
    return z


def branch_roots(A, nu: float, lam: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All three root branches for amplitudes in [0, critical], vectorized.

    Parameters
    ----------
    A : array_like
        Amplitudes; entries may touch the critical value (the double root
        is returned for both lower branches there) but not exceed it.

    Returns
    -------
    zeta1, zeta2, zeta3 : ndarray
        Branch values, ordered zeta1 >= 0 >= zeta2 >= -2*nu*lam/3 >= zeta3
        >= -nu*lam, with equalities only at A = 0 and A = critical.
    """
    A = np.atleast_1d(np.asarray(A, dtype=float))
    crit = critical_amplitude(nu, lam)
    if np.any(A < NEGATIVE_CLAMP):
        raise SpecError(f"negative amplitude {A.min()} below the clamping floor")
    if np.any(A > crit * (1.0 + TOL_REGIME)):
        raise NumericsError(
            f"amplitude {A.max()} exceeds the critical value {crit}; no three-branch solution"
        )
    A = np.clip(A, 0.0, crit)
    a = nu * lam

    # Trigonometric closed form on the scaled cubic t^3 + t^2 = B: the
    # arccos argument collapses to 1 - 2*A/crit.
    theta = np.arccos(np.clip(1.0 - 2.0 * A / crit, -1.0, 1.0))
    t1 = -(2.0 * np.cos((theta + 2.0 * np.pi) / 3.0) + 1.0) / 3.0
    t2 = -(2.0 * np.cos((theta + 4.0 * np.pi) / 3.0) + 1.0) / 3.0
    t3 = -(2.0 * np.cos(theta / 3.0) + 1.0) / 3.0
    z1, z2, z3 = a * t1, a * t2, a * t3

    # The two small roots cancel catastrophically in the trig form as A -> 0;
    # series seeds take over there (exact at A = 0).
    small = A <= _SERIES_SWITCH * crit
    if np.any(small):
        q = np.sqrt(A / (2.0 * lam))
        corr = q * q / (2.0 * a)
        z1 = np.where(small, q - corr, z1)
        z2 = np.where(small, -q - corr, z2)
        z3 = np.where(small, -a + A / (2.0 * a * lam), z3)

    z1 = _newton_polish(z1, A, nu, lam, 0.0, np.inf)
    z2 = _newton_polish(z2, A, nu, lam, -2.0 * a / 3.0, 0.0)
    z3 = _newton_polish(z3, A, nu, lam, -a, -2.0 * a / 3.0)
    return z1, z2, z3


def _single_root(A: float, nu: float, lam: float) -> float:
    """The unique real root for A above the critical amplitude (Cardano form)."""
    a = nu * lam
    B = nu * A / (2.0 * a**3)
    if B > 1e100:
        # Asymptotic seed; Cardano's discriminant would overflow here.
        t = np.cbrt(B) - 1.0 / 3.0
    else:
        R = 1.0 / 27.0 - B / 2.0
        disc = np.sqrt(R * R - (1.0 / 729.0))
        s = np.cbrt(abs(R) + disc)
        t = s + (1.0 / 9.0) / s - 1.0 / 3.0
    z = float(_newton_polish(np.asarray(a * t), np.asarray(A), nu, lam, 0.0, np.inf))
    return z


@dataclass(frozen=True)
class CubicRootSet:
    """Roots of E(zeta) = amplitude, sorted descending, with their regime tag.

    regime is "three-roots" (including the degenerate A = 0 case),
    "critical-double" (amplitude within TOL_REGIME of critical, double
    root reported in both lower slots), or "single-root".
    """

    amplitude: float
    roots: tuple[float, ...]
    regime: str


def solve_dae(A: float, nu: float, lam: float) -> CubicRootSet:
    """Solve the dual cubic at one amplitude.

    Parameters
    ----------
    A : float
        Amplitude |sigma|^2 >= 0.  Values in [-1e-14, 0) are rounding
        debris and are clamped to zero; anything more negative raises.

    Returns
    -------
    CubicRootSet
        Residuals |E(zeta) - A| are verified to TOL_ROOT * max(1, A)
        before returning.
    """
    A = float(A)
    if not np.isfinite(A):
        raise SpecError(f"amplitude must be finite, got {A}")
    if A < NEGATIVE_CLAMP:
        raise SpecError(f"negative amplitude {A} is outside the clamping allowance")
    A = max(A, 0.0)
    crit = critical_amplitude(nu, lam)
    a = nu * lam

    if abs(A - crit) <= TOL_REGIME * crit:
        return CubicRootSet(A, (a / 3.0, -2.0 * a / 3.0, -2.0 * a / 3.0), "critical-double")
    if A > crit:
        root = _single_root(A, nu, lam)
        rootset = CubicRootSet(A, (root,), "single-root")
    else:
        z1, z2, z3 = branch_roots(A, nu, lam)
        rootset = CubicRootSet(A, (float(z1[0]), float(z2[0]), float(z3[0])), "three-roots")

    scale = max(1.0, A)
    for z in rootset.roots:
        if abs(_E_raw(z, nu, lam) - A) > TOL_ROOT * scale:
            raise NumericsError(
                f"root residual {abs(_E_raw(z, nu, lam) - A):.3e} exceeds "
                f"{TOL_ROOT * scale:.3e} at A={A}, nu={nu}, lam={lam}"
            )
    return rootset
