"""Exception hierarchy shared by the solver modules and the CLI.

The three subclasses partition failures the way the CLI reports them:
bad inputs (spec/config/malformed data), loads that violate the model
hypotheses (balance, single zero, L1 smallness), and numerical failures
inside an otherwise well-posed run.
"""

from __future__ import annotations


class DualWellError(Exception):
    """Base class for all package errors."""


class SpecError(DualWellError, ValueError):
    """Invalid problem specification, grid, config, or malformed input data."""


class LoadHypothesisError(DualWellError, ValueError):
    """A load fails one of the model hypotheses (balance, unique zero, L1 bound)."""


class NumericsError(DualWellError, RuntimeError):
    """Numerical failure: amplitude overflow, eigensolver breakdown, gap violation."""


class AmplitudeOverflowError(NumericsError):
    """The stress amplitude F^2 r^2 reached the critical value 8*lam^3*nu^2/27 inside the annulus."""


class GapViolationError(NumericsError):
    """Primal and dual energies of a critical pair disagree beyond tolerance."""
