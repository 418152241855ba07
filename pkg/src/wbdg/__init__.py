"""Well-balanced and classical RKDG for the Euler equations with gravity.

Typical use::

    from wbdg import RunConfig, run_single
    snap, report = run_single(RunConfig(case="hydro1d", scheme="WBDG", order=2, N=32))
"""

from .dg import DGOperator, Discretization, SolutionField, cell_averages, project
from .diagnostics import ErrorReport, l1_error, update_oracle
from .equilibria import CASES, EquilibriumSpec, GravityField, get_case
from .euler import AdmissibilityError
from .grid import Mesh, build_mesh, gauss_legendre, legendre_eval
from .limiter import LimiterConfig, PositivityLimiter
from .runner import Problem, RunConfig, Snapshot, run_convergence, run_disc, run_pulse_sweep, run_single
from .timestepping import ButcherTableau, tableau, tableau_for_degree
from .well_balanced import EquilibriumCache, WBOperator, build_cache, project_delta

__all__ = [
    "AdmissibilityError",
    "ButcherTableau",
    "CASES",
    "DGOperator",
    "Discretization",
    "EquilibriumCache",
    "EquilibriumSpec",
    "ErrorReport",
    "GravityField",
    "LimiterConfig",
    "Mesh",
    "PositivityLimiter",
    "Problem",
    "RunConfig",
    "Snapshot",
    "SolutionField",
    "WBOperator",
    "build_cache",
    "build_mesh",
    "cell_averages",
    "gauss_legendre",
    "get_case",
    "l1_error",
    "legendre_eval",
    "project",
    "project_delta",
    "run_convergence",
    "run_disc",
    "run_pulse_sweep",
    "run_single",
    "tableau",
    "tableau_for_degree",
    "update_oracle",
]

__version__ = "0.1.0"
