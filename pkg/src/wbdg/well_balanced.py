"""Well-balanced DG in perturbation form.

The unknown is the deviation ``delta`` from a known steady state, and the
numerical solution is ``w_num = w_eq + delta_h``. Every flux and source
sample in the residual has the matching equilibrium sample subtracted, so
``delta_h == 0`` has an identically zero residual.

Two strategies produce the equilibrium samples:

``stored``
    evaluate once and keep the arrays (more memory, cheaper residual);
``recompute``
    keep only the evaluator and rebuild the samples on every residual call.

Both go through :func:`wbdg.dg.equilibrium_terms`, so their residuals are
bitwise identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dg import (
    DGOperator,
    Discretization,
    EquilibriumTerms,
    SolutionField,
    equilibrium_terms,
)
from .euler import to_conserved

__all__ = [
    "EquilibriumCache",
    "DeltaField",
    "WBOperator",
    "build_cache",
    "project_delta",
    "residual_wb",
    "STRATEGIES",
]

STRATEGIES = ("stored", "recompute")
_ALIASES = {"mem": "stored", "stored": "stored", "rec": "recompute", "recompute": "recompute"}


class EquilibriumCache:
    """Equilibrium samples at every point the residual touches.

    Parameters
    ----------
    disc : Discretization
    equilibrium : EquilibriumSpec or None
        ``None`` builds the all-zero cache, which turns the well-balanced
        residual back into the classical one.
    strategy : {"stored", "recompute"} (aliases "mem", "rec")
    """

    def __init__(self, disc: Discretization, equilibrium, strategy="stored"):
        key = _ALIASES.get(str(strategy).lower())
        if key is None:
            raise ValueError(f"unknown cache strategy {strategy!r}")
        self.disc = disc
        self.equilibrium = equilibrium
        self.strategy = key
        self._stored: Optional[EquilibriumTerms] = None
        if equilibrium is None:
            self._stored = _zero_terms(disc)
        elif key == "stored":
            self._stored = self._evaluate()
        # cell averages of w_eq, needed by the time step control
        self.averages = disc.point_average(self.terms().vol)

    def _evaluate(self) -> EquilibriumTerms:
        eq = self.equilibrium
        return equilibrium_terms(self.disc, eq.conserved, eq.gravity)

    def terms(self) -> EquilibriumTerms:
        if self._stored is not None:
            return self._stored
        return self._evaluate()

    @property
    def is_zero(self):
        return self.equilibrium is None

    def boundary_states(self):
        """Equilibrium exterior states at the two boundary slots per axis."""
        t = self.terms()
        return [
            (np.take(f, 0, axis=1 + a), np.take(f, -1, axis=1 + a))
            for a, f in enumerate(t.face)
        ]

    def stored_values(self) -> int:
        """Number of float64 values held by the stored strategy (0 otherwise)."""
        if self.strategy != "stored" or self._stored is None:
            return 0
        t = self._stored
        arrays = [t.vol, t.src_vol, *t.face, *t.flux_vol, *t.flux_face]
        return int(sum(a.size for a in arrays))

    @property
    def nbytes(self) -> int:
        return 8 * self.stored_values()


def _zero_terms(disc: Discretization) -> EquilibriumTerms:
    e = disc.nvar
    vol_shape = (e,) + disc.vol_coords[0].shape
    face_shapes = [(e,) + fc[0].shape for fc in disc.face_coords]
    return EquilibriumTerms(
        vol=np.zeros(vol_shape),
        face=[np.zeros(s) for s in face_shapes],
        flux_vol=[np.zeros(vol_shape) for _ in range(disc.dim)],
        src_vol=np.zeros((e - 1,) + vol_shape[1:]),
        flux_face=[np.zeros(s) for s in face_shapes],
    )


def build_cache(equilibrium, disc: Discretization, strategy="stored") -> EquilibriumCache:
    return EquilibriumCache(disc, equilibrium, strategy)


@dataclass
class DeltaField(SolutionField):
    """Perturbation coefficients together with their equilibrium cache."""

    cache: Optional[EquilibriumCache] = None

    def copy(self):
        return DeltaField(self.disc, self.coeffs.copy(), self.t, self.cache)

    def w_num_points(self):
        """Conserved ``w_eq + delta_h`` at the volume quadrature points."""
        V = self.disc.to_points(self.coeffs)
        if self.cache is not None:
            V += self.cache.terms().vol
        return V

    def w_num_averages(self):
        avg = self.disc.point_average(self.disc.to_points(self.coeffs))
        if self.cache is not None:
            avg = avg + self.cache.averages
        return avg


def project_delta(initial_condition, equilibrium, disc: Discretization,
                  cache: Optional[EquilibriumCache] = None) -> DeltaField:
    """Project ``w_0 - w_eq`` (conserved variables, pointwise)."""
    u0 = to_conserved(initial_condition(disc.vol_coords), disc.gamma)
    if equilibrium is not None:
        u0 = u0 - equilibrium.conserved(disc.vol_coords)
    return DeltaField(disc, disc.to_modes(u0), 0.0, cache)


class WBOperator:
    """Residual of the perturbation form, ``d delta / dt``.

    ``gravity`` is the field acting on the evolved solution (it may include
    time-dependent parts absent from the equilibrium); the cache carries
    the equilibrium's own source. The boundary exterior state is the
    equilibrium itself unless ``boundary`` says otherwise.
    """

    def __init__(self, disc: Discretization, gravity, cache: EquilibriumCache, boundary=None):
        self.disc = disc
        self.cache = cache
        if boundary is None:
            boundary = "periodic" if cache.is_zero else "equilibrium"
        if boundary == "equilibrium":
            self.base = DGOperator(disc, gravity, "periodic")
            self.base.periodic = False
            self.base.bc = cache.boundary_states()
        else:
            self.base = DGOperator(disc, gravity, boundary)

    @property
    def n_calls(self):
        return self.base.n_calls

    def residual(self, U, t=0.0):
        return self.base.residual(U, t, self.cache.terms())

    def __call__(self, field: SolutionField, t=None):
        return self.residual(field.coeffs, field.t if t is None else t)


def residual_wb(delta: DeltaField, cache: EquilibriumCache, gravity, t=None, boundary=None):
    """Well-balanced residual of ``delta``; convenience wrapper."""
    op = WBOperator(delta.disc, gravity, cache, boundary)
    return op.residual(delta.coeffs, delta.t if t is None else t)
