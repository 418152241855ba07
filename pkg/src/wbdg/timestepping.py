"""Explicit SSP Runge-Kutta time marching with CFL control and stage hooks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "ButcherTableau",
    "StepControl",
    "tableau",
    "tableau_for_degree",
    "order_conditions",
    "cfl_dt",
    "next_dt",
    "advance",
    "integrate",
    "buffer_wrapper",
    "apply_buffer",
    "reset_inner",
]


@dataclass(frozen=True)
class ButcherTableau:
    """Explicit Runge-Kutta tableau.

    ``a`` is strictly lower triangular, ``order`` the nominal order.
    """

    name: str
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    order: int

    @property
    def stages(self) -> int:
        return len(self.b)

    def check(self, tol_sum=1e-10, tol_order=1e-9) -> list[str]:
        """Names of violated invariants (empty list when consistent)."""
        bad = []
        if abs(self.b.sum() - 1.0) > tol_sum:
            bad.append("sum(b) != 1")
        if np.any(np.abs(self.a.sum(axis=1) - self.c) > tol_sum):
            bad.append("row sums != c")
        if np.any(np.triu(self.a) != 0.0):
            bad.append("not explicit")
        for k, resid in order_conditions(self).items():
            if k <= self.order and max(abs(r) for r in resid) > tol_order:
                bad.append(f"order-{k} conditions")
        return bad


def order_conditions(tab: ButcherTableau) -> dict[int, list[float]]:
    """Residuals of the classical order conditions up to order 4."""
    a, b, c = tab.a, tab.b, tab.c
    return {
        1: [b.sum() - 1.0],
        2: [b @ c - 1 / 2],
        3: [b @ c**2 - 1 / 3, b @ a @ c - 1 / 6],
        4: [
            b @ c**3 - 1 / 4,
            b @ (c * (a @ c)) - 1 / 8,
            b @ a @ c**2 - 1 / 12,
            b @ a @ a @ c - 1 / 24,
        ],
    }


def _lower(rows):
    s = len(rows)
    a = np.zeros((s, s))
    for i, r in enumerate(rows):
        a[i, : len(r)] = r
    return a


_SSP45 = ButcherTableau(
    "SSP45",
    _lower([
        [],
        [0.39175222700392],
        [0.21766909633821, 0.36841059262959],
        [0.08269208670950, 0.13995850206999, 0.25189177424738],
        [0.06796628370320, 0.11503469844438, 0.20703489864929, 0.54497475021237],
    ]),
    np.array([0.14681187618661, 0.24848290924556, 0.10425883036650,
              0.27443890091960, 0.22600748319395]),
    np.array([0.0, 0.39175222700392, 0.58607968896779, 0.47454236302687, 0.93501063100924]),
    4,
)

_TABLEAUS = {
    "SSP22": ButcherTableau("SSP22", _lower([[], [1.0]]), np.array([0.5, 0.5]),
                            np.array([0.0, 1.0]), 2),
    "SSP33": ButcherTableau("SSP33", _lower([[], [1.0], [0.25, 0.25]]),
                            np.array([1 / 6, 1 / 6, 2 / 3]), np.array([0.0, 1.0, 0.5]), 3),
    "SSP45": _SSP45,
}

# coefficients exactly as typeset in the source tables; kept for comparison only
_PRINTED = {
    "SSP22": ButcherTableau("SSP22-printed", _lower([[], [0.5]]), np.array([0.5, 0.5]),
                            np.array([0.0, 0.5]), 2),
    "SSP33": ButcherTableau("SSP33-printed", _lower([[], [1.0], [0.25, 0.25]]),
                            np.array([1 / 6, 1 / 6, 1 / 3]), np.array([0.0, 1.0, 0.75]), 3),
    "SSP45": _SSP45,
}


def tableau(name: str, printed: bool = False) -> ButcherTableau:
    """Shipped tableau by name; ``printed=True`` returns the uncorrected variant."""
    table = _PRINTED if printed else _TABLEAUS
    try:
        return table[name.upper()]
    except KeyError:
        raise ValueError(f"unknown tableau {name!r}; choose from {sorted(table)}") from None


def tableau_for_degree(degree: int) -> ButcherTableau:
    """SSP scheme paired with polynomial degree Np (order Np+1, capped at 4)."""
    return tableau({0: "SSP22", 1: "SSP22", 2: "SSP33"}.get(degree, "SSP45"))


@dataclass
class StepControl:
    """Time step settings: CFL constant, end time and output stops."""

    cfl: float = 0.2
    t_final: float = 1.0
    output_times: Sequence[float] = ()
    max_steps: int = 10_000_000
    fixed_dt: Optional[float] = None

    def next_stop(self, t: float) -> float:
        later = [s for s in self.output_times if s > t and s < self.t_final]
        return min(later) if later else self.t_final


def cfl_dt(averages, grad_norm, spacing, degree, cfl=0.2, gamma=1.4, mask=None) -> float:
    """Largest stable step from cell-average states.

    Parameters
    ----------
    averages : array (e, cells...)
        Conserved cell averages.
    grad_norm : array (cells...) or None
        ``|grad Phi|`` per cell; ``None`` or zeros drop the gravity limit.
    spacing : sequence of float
        Cell widths per axis.
    mask : bool array (cells...), optional
        Cells included in the minimum.
    """
    rho = averages[0]
    vel = averages[1:-1] / rho
    p = (gamma - 1.0) * (averages[-1] - 0.5 * np.sum(averages[1:-1] * vel, axis=0))
    if not (rho.min() > 0.0 and p.min() > 0.0):
        raise FloatingPointError("inadmissible cell average in time step control")
    c = np.sqrt(gamma * p / rho)
    rate = sum((np.abs(vel[i]) + c) / h for i, h in enumerate(spacing))
    dt = cfl / (2 * degree + 1) / rate
    if grad_norm is not None:
        with np.errstate(divide="ignore"):
            dt_g = c / (np.sqrt(2.0 * gamma * (gamma - 1.0)) * grad_norm)
        dt = np.minimum(dt, dt_g)
    if mask is not None:
        dt = dt[mask]
    out = float(np.min(dt))
    if not np.isfinite(out) or out <= 0.0:
        raise FloatingPointError(f"invalid time step {out}")
    return out


def next_dt(dt: float, t: float, control: StepControl) -> float:
    """Clamp ``dt`` so the step lands exactly on the next output time or T."""
    stop = control.next_stop(t)
    remaining = stop - t
    # absorb a sliver rather than taking a vanishing last step
    if dt >= remaining or remaining - dt < 1e-12 * max(1.0, abs(stop)):
        return remaining
    return dt


Hook = Callable[[np.ndarray, float], None]


def advance(U, t, dt, rhs: Callable, tab: ButcherTableau, hooks: Sequence[Hook] = (),
            work: Optional[list] = None):
    """One Runge-Kutta step of ``dU/dt = rhs(U, t)``.

    Hooks act in place on every stage value after it is formed and on the
    final update, in the order given.
    """
    s = tab.stages
    k = work if work is not None else [None] * s
    for i in range(s):
        if i == 0:
            Ui = U
        else:
            Ui = U.copy()
            for j in range(i):
                if tab.a[i, j] != 0.0:
                    Ui += (dt * tab.a[i, j]) * k[j]
            for h in hooks:
                h(Ui, t + tab.c[i] * dt)
        k[i] = rhs(Ui, t + tab.c[i] * dt)
    Un = U.copy()
    for i in range(s):
        if tab.b[i] != 0.0:
            Un += (dt * tab.b[i]) * k[i]
    for h in hooks:
        h(Un, t + dt)
    return Un


def integrate(U, t0, rhs, tab, control: StepControl, dt_fn: Callable[[np.ndarray, float], float],
              hooks: Sequence[Hook] = (), on_stop: Optional[Callable] = None):
    """March from ``t0`` to ``control.t_final``.

    ``dt_fn(U, t)`` gives the unclamped step, ``on_stop(U, t)`` is called at
    every output time. Returns ``(U, t, steps)``.
    """
    t = float(t0)
    steps = 0
    work = [None] * tab.stages
    while t < control.t_final:
        if steps >= control.max_steps:
            raise RuntimeError(f"max_steps={control.max_steps} reached at t={t}")
        dt = control.fixed_dt if control.fixed_dt is not None else dt_fn(U, t)
        dt = next_dt(dt, t, control)
        stop = control.next_stop(t)
        U = advance(U, t, dt, rhs, tab, hooks, work)
        t = stop if dt == stop - t else t + dt
        steps += 1
        if on_stop is not None and t == stop:
            on_stop(U, t)
    return U, t, steps


def apply_buffer(residual, weights):
    """Scale a residual by per-cell relaxation ``weights`` (shape = cells)."""
    extra = residual.ndim - 1 - weights.ndim
    return residual * weights.reshape(weights.shape + (1,) * extra)


def buffer_wrapper(rhs: Callable, weights) -> Callable:
    """``rhs`` with its output damped by :func:`apply_buffer`."""

    def wrapped(U, t):
        return apply_buffer(rhs(U, t), weights)

    return wrapped


def reset_inner(U, target, mask):
    """Overwrite the coefficients of cells in ``mask`` with ``target`` (in place).

    ``target`` may be a full coefficient array or a scalar (0 zeroes the
    perturbation in well-balanced runs).
    """
    if np.isscalar(target):
        U[:, mask] = target
    else:
        U[:, mask] = target[:, mask]
    return U
