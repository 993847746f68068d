"""Numerical laboratory for a chemotaxis model of demyelination patterns.

The model couples activated macrophages m, a chemoattractant c and the
density of destroyed oligodendrocytes d on a rectangle with no-flux walls:

    dm/dt = lap m + m (1 - m^(a-1)) - chi div(f(m) grad c)
    dc/dt = eps0 lap c + delta d - c + beta m
    dd/dt = g(m) (1 - d)

The package provides closed-form linear stability thresholds around the
homogeneous state (1, beta+delta, 1), a cosine pseudo-spectral IMEX solver,
an independent finite-difference oracle, and diagnostics that turn the
model's a-priori estimates (mass bounds, Lyapunov decay, two-run stability)
into measurable run invariants.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    Infeasible,
    MismatchedRuns,
    NonFinite,
    NonPositiveGap,
    ParseError,
    SclerolabError,
    StepTooLarge,
    ValidationError,
)
from .model import Equilibrium, ModelParams, NonlinearitySpec, equilibria
from .stability import (
    DispersionPoint,
    ModeIndex,
    RectDomain,
    chi_c0,
    chi_c_domain,
    chi_marginal,
    chi_subcrit,
    growth_rates,
    neumann_eigenvalues,
    reduced_matrix,
    unstable_band,
)
from .spectral import (
    CLASS_CONVERGED,
    CLASS_NOT_CONVERGED,
    CLASS_STATIONARY,
    EquilibriumPerturbation,
    Explicit,
    FarField,
    Grid,
    Monitors,
    SimConfig,
    State,
    Trajectory,
    initial_state,
    simulate,
    step,
)
from .fdsolver import FdGrid, fd_chemotaxis, fd_laplacian, fd_simulate
from .diagnostics import (
    GronwallConstants,
    LyapunovParams,
    energy_fraction,
    full_form_matrix,
    gronwall_check,
    k_a,
    lyapunov_phi,
    mass_bound,
    mass_l1,
    mode_amplitude,
    pick_thetas,
    quadratic_form_gaps,
    sup_norm_series,
)
from .runio import (
    SweepSpec,
    canonical_echo,
    config_sha256,
    load_snapshot,
    parse_config,
    run_simulation,
    run_sweep,
    stability_report,
    verify_run,
    write_snapshot,
)
from . import transforms

__all__ = [
    "__version__",
    "SclerolabError",
    "ValidationError",
    "ParseError",
    "Infeasible",
    "NonPositiveGap",
    "MismatchedRuns",
    "NonFinite",
    "StepTooLarge",
    "ModelParams",
    "NonlinearitySpec",
    "Equilibrium",
    "equilibria",
    "RectDomain",
    "ModeIndex",
    "DispersionPoint",
    "neumann_eigenvalues",
    "reduced_matrix",
    "growth_rates",
    "chi_marginal",
    "chi_c0",
    "chi_subcrit",
    "chi_c_domain",
    "unstable_band",
    "Grid",
    "State",
    "Monitors",
    "SimConfig",
    "EquilibriumPerturbation",
    "FarField",
    "Explicit",
    "Trajectory",
    "initial_state",
    "step",
    "simulate",
    "CLASS_CONVERGED",
    "CLASS_STATIONARY",
    "CLASS_NOT_CONVERGED",
    "FdGrid",
    "fd_laplacian",
    "fd_chemotaxis",
    "fd_simulate",
    "LyapunovParams",
    "GronwallConstants",
    "k_a",
    "mass_l1",
    "mass_bound",
    "pick_thetas",
    "lyapunov_phi",
    "quadratic_form_gaps",
    "full_form_matrix",
    "mode_amplitude",
    "energy_fraction",
    "sup_norm_series",
    "gronwall_check",
    "SweepSpec",
    "parse_config",
    "canonical_echo",
    "config_sha256",
    "write_snapshot",
    "load_snapshot",
    "run_simulation",
    "run_sweep",
    "stability_report",
    "verify_run",
    "transforms",
]
