"""Shared fixtures: fully solved reference instances reused across test modules."""

from __future__ import annotations

from dataclasses import dataclass

import pytest

from dualwell.energy import EnergyReport, duality_gap
from dualwell.fields import CriticalPoint, DualBranchField, RadialStress, all_branches, compute_F
from dualwell.problem import LoadFunction, ProblemSpec, RadialGrid, balanced_linear_load


@dataclass(frozen=True)
class SolvedInstance:
    """One annulus problem solved through the analytic pipeline."""

    spec: ProblemSpec
    load: LoadFunction
    grid: RadialGrid
    stress: RadialStress
    branches: tuple[tuple[DualBranchField, CriticalPoint], ...]
    energies: tuple[EnergyReport, ...]

    def zeta(self, branch: int) -> DualBranchField:
        return self.branches[branch - 1][0]

    def point(self, branch: int) -> CriticalPoint:
        return self.branches[branch - 1][1]

    def energy(self, branch: int) -> EnergyReport:
        return self.energies[branch - 1]


def solve_instance(spec: ProblemSpec, amplitude: float, nodes: int) -> SolvedInstance:
    load = balanced_linear_load(spec, amplitude)
    grid = RadialGrid.uniform(spec, nodes)
    stress = compute_F(load, spec, grid)
    branches = tuple(all_branches(stress, spec))
    energies = tuple(
        duality_gap(point, zeta, load, spec) for zeta, point in branches
    )
    return SolvedInstance(spec, load, grid, stress, branches, energies)


@pytest.fixture(scope="session")
def ref() -> SolvedInstance:
    """Reference instance: n=2 annulus, unit well parameters, linear load."""
    return solve_instance(ProblemSpec(nu=1.0, lam=1.0, R1=2.0, R2=1.0, n=2), 0.2, 2001)


@pytest.fixture(scope="session")
def ref_n1() -> SolvedInstance:
    return solve_instance(ProblemSpec(nu=1.0, lam=1.0, R1=2.0, R2=1.0, n=1), 0.2, 2001)


@pytest.fixture(scope="session")
def ref_n3() -> SolvedInstance:
    return solve_instance(ProblemSpec(nu=1.0, lam=1.0, R1=2.0, R2=1.0, n=3), 0.2, 2001)


@pytest.fixture(scope="session")
def ref_coarse() -> SolvedInstance:
    """Same physical problem as ``ref`` on the oracle-sized 257-node grid."""
    return solve_instance(ProblemSpec(nu=1.0, lam=1.0, R1=2.0, R2=1.0, n=2), 0.2, 257)
