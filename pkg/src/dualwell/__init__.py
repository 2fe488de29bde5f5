"""Canonical-duality solver for the radial double-well problem on an annulus.

The pipeline: validate a problem spec and load, build the radial stress
F(r), solve the dual cubic for its three root branches, reconstruct the
three displacement profiles, certify the zero duality gap, classify each
branch by second-variation spectra, and cross-check everything against a
direct-minimization oracle.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    AmplitudeOverflowError,
    DualWellError,
    GapViolationError,
    LoadHypothesisError,
    NumericsError,
    SpecError,
)
from .problem import (
    LoadFunction,
    LoadReport,
    ProblemSpec,
    RadialGrid,
    ValidationReport,
    balanced_linear_load,
    gamma_half_integer,
    l1_load_bound,
    sphere_area,
    tabulated_load,
    validate_load,
    validate_spec,
)
from .dual_algebra import (
    CubicRootSet,
    branch_roots,
    critical_amplitude,
    evaluate_E,
    solve_dae,
)
from .fields import (
    CriticalPoint,
    DualBranchField,
    RadialStress,
    all_branches,
    compute_F,
    displacement,
    dual_field,
    strain_consistency,
    strain_function,
    zeta_function,
)
from .energy import (
    EnergyReport,
    dual_energy,
    duality_gap,
    primal_energy,
    total_complementary,
)
from .stability import (
    Classification,
    DualCurvature,
    ModeSpectrum,
    classify,
    dual_curvature,
    gram_matrix,
    min_eigenvalue,
    mode_form,
    mode_spectrum,
)
from .oracle import (
    DescentResult,
    DiscreteState,
    centered,
    descend,
    discrete_energy,
    el_residual_direct,
    energy_gradient,
    random_smooth_state,
)
