"""Independent verification oracle: direct discrete minimization.

Deliberately shares no numerics with the solver pipeline: the energy is
discretized by the midpoint rule with per-cell difference-quotient
strains (the pipeline uses Gauss-Legendre panels on analytic branch
fields), stationarity is probed by plain gradient descent with a
backtracking line search (no Newton structure anywhere), and the
equilibrium residual is a second-order finite difference of the
conservative flux form

    d/dr [ r^(n-1) nu (u'^2/2 - lam) u' ] + f r^(n-1) = 0.

Agreement between this path and the analytic construction is therefore
evidence, not a tautology.  The discrete energy keeps the translation
invariance of the continuous functional only up to quadrature error, so
descent endpoints are compared after subtracting means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import LoadFunction, ProblemSpec, RadialGrid
from .errors import SpecError

#: Default stopping threshold on the max-norm of the discrete gradient.
GRAD_TOL = 1e-8

#: Armijo sufficient-decrease constant.
_ARMIJO = 1e-4


@dataclass(frozen=True, eq=False)
class DiscreteState:
    """Nodal displacement values on a radial grid."""

    grid: RadialGrid
    u_nodes: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u_nodes, dtype=float)
        if u.shape != self.grid.nodes.shape:
            raise SpecError("u_nodes must match the grid node count")
        if not np.all(np.isfinite(u)):
            raise SpecError("u_nodes contains non-finite values")
        object.__setattr__(self, "u_nodes", u)


def _cells(state: DiscreteState, load: LoadFunction, spec: ProblemSpec):
    r = state.grid.nodes
    dr = np.diff(r)
    rm = 0.5 * (r[1:] + r[:-1])
    g = np.diff(state.u_nodes) / dr
    um = 0.5 * (state.u_nodes[1:] + state.u_nodes[:-1])
    fm = np.asarray(load(rm), dtype=float)
    vol = spec.sphere_area * rm ** (spec.n - 1) * dr
    return dr, rm, g, um, fm, vol


def discrete_energy(state: DiscreteState, load: LoadFunction, spec: ProblemSpec) -> float:
    """Midpoint-rule value of the primal functional on nodal data."""
    _, _, g, um, fm, vol = _cells(state, load, spec)
    well = 0.5 * spec.nu * (0.5 * g * g - spec.lam) ** 2
    return float(np.sum((well - fm * um) * vol))


def energy_gradient(state: DiscreteState, load: LoadFunction, spec: ProblemSpec) -> np.ndarray:
    """Exact gradient of discrete_energy with respect to the nodal values."""
    dr, _, g, _, fm, vol = _cells(state, load, spec)
    flux = spec.nu * (0.5 * g * g - spec.lam) * g
    grad = np.zeros_like(state.u_nodes)
    grad[:-1] += (-flux / dr - 0.5 * fm) * vol
    grad[1:] += (flux / dr - 0.5 * fm) * vol
    return grad


@dataclass(frozen=True, eq=False)
class DescentResult:
    """Endpoint of a gradient-descent run with its convergence record."""

    state: DiscreteState
    converged: bool
    iterations: int
    gradient_norm: float
    initial_energy: float
    final_energy: float


def descend(
    start: DiscreteState,
    load: LoadFunction,
    spec: ProblemSpec,
    *,
    grad_tol: float = GRAD_TOL,
    max_iter: int = 200_000,
) -> DescentResult:
    """Gradient descent with backtracking Armijo line search.

    The search direction is always the negative gradient; the trial step
    length is the spectral (difference-quotient) estimate from the last
    accepted move, safeguarded by monotone Armijo backtracking, so the
    energy never increases between iterates.  Stops when the gradient
    max-norm reaches grad_tol or the iteration cap is hit; the cap is
    reported as non-convergence, not raised.
    """
    state = DiscreteState(start.grid, start.u_nodes.copy())
    energy = discrete_energy(state, load, spec)
    initial = energy
    grad = energy_gradient(state, load, spec)
    gnorm = float(np.max(np.abs(grad)))
    step = 1.0
    iterations = 0

    while gnorm > grad_tol and iterations < max_iter:
        sq = float(np.dot(grad, grad))
        alpha = min(max(step, 1e-12), 1e6)
        accepted = False
        while alpha > 1e-18:
            trial = DiscreteState(state.grid, state.u_nodes - alpha * grad)
            trial_energy = discrete_energy(trial, load, spec)
            if trial_energy <= energy - _ARMIJO * alpha * sq:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        new_grad = energy_gradient(trial, load, spec)
        # Spectral trial step for the next iterate: s.s / s.y with
        # s = -alpha*grad and y = new_grad - grad reduces to
        # alpha * sq / (sq - grad.new_grad).
        curvature = sq - float(np.dot(grad, new_grad))
        step = alpha * sq / curvature if curvature > 0.0 else alpha * 2.0
        state, energy, grad = trial, trial_energy, new_grad
        gnorm = float(np.max(np.abs(grad)))
        iterations += 1

    return DescentResult(
        state=state,
        converged=gnorm <= grad_tol,
        iterations=iterations,
        gradient_norm=gnorm,
        initial_energy=initial,
        final_energy=energy,
    )


def el_residual_direct(state: DiscreteState, load: LoadFunction, spec: ProblemSpec) -> np.ndarray:
    """Finite-difference residual of the conservative equilibrium form.

    Returns one value per interior node: the centered difference of the
    half-cell fluxes r^(n-1) nu (g^2/2 - lam) g plus f r^(n-1); second
    order on smooth profiles.
    """
    r = state.grid.nodes
    dr, rm, g, _, _, _ = _cells(state, load, spec)
    flux = spec.nu * (0.5 * g * g - spec.lam) * g * rm ** (spec.n - 1)
    gap = 0.5 * (r[2:] - r[:-2])
    f_nodes = np.asarray(load(r[1:-1]), dtype=float)
    return (flux[1:] - flux[:-1]) / gap + f_nodes * r[1:-1] ** (spec.n - 1)


def centered(u: np.ndarray) -> np.ndarray:
    """Subtract the mean: the gauge used when comparing descent endpoints."""
    u = np.asarray(u, dtype=float)
    return u - float(np.mean(u))


def random_smooth_state(
    grid: RadialGrid, amplitude: float, rng: np.random.Generator, modes: int = 6
) -> DiscreteState:
    """Low-wavenumber random profile: cosine series with 1/(1+k^2) decay.

    Natural-boundary compatible (zero slope at both ends), used for
    multistart descent probes.
    """
    r = grid.nodes
    x = (r - r[0]) / (r[-1] - r[0])
    u = np.zeros_like(r)
    for k in range(modes + 1):
        u += rng.standard_normal() / (1.0 + k * k) * np.cos(np.pi * k * x)
    peak = float(np.max(np.abs(u)))
    if peak > 0.0:
        u *= amplitude / peak
    return DiscreteState(grid, u)
