"""Error norms, convergence tables, the closed-form update oracle and reports."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .dg import Discretization, SolutionField, point_values
from .euler import to_conserved
from .grid import Quadrature, legendre_eval

__all__ = [
    "ErrorReport",
    "CSV_COLUMNS",
    "EXACT",
    "variable_names",
    "l1_error",
    "l1_distance",
    "conserved_at",
    "convergence_table",
    "slope",
    "update_oracle",
    "write_report_csv",
    "read_report_csv",
    "timing_run",
]

CSV_COLUMNS = ["case", "scheme", "order", "N", "variable", "l1", "runtime_s", "wb_cache_bytes", "slope"]
EXACT = "exact"
# errors at or below this are rounding noise for O(1) fields
EXACT_FLOOR = 1e-13


def variable_names(dim: int) -> tuple[str, ...]:
    return ("rho", "vx", "p") if dim == 1 else ("rho", "vx", "vy", "p")


def conserved_at(field: SolutionField, quadrature: Optional[Quadrature] = None):
    """Conserved ``w_num`` at volume points; adds the equilibrium for delta fields."""
    V = point_values(field, quadrature)
    cache = getattr(field, "cache", None)
    if cache is not None and not cache.is_zero:
        d = field.disc
        if quadrature is None or quadrature.size == d.Q and np.array_equal(quadrature.nodes, d.quad.nodes):
            V = V + cache.terms().vol
        else:
            # the modified Gresho pressure dips below zero near the centre
            V = V + cache.equilibrium.conserved(_volume_coords(d, quadrature), check=False)
    return V


def _volume_coords(disc: Discretization, quad: Quadrature):
    m = disc.mesh
    xi = quad.nodes
    if disc.dim == 1:
        return (m.centers(0)[:, None] + 0.5 * m.dx * xi,)
    X = m.centers(0)[:, None, None, None] + 0.5 * m.dx * xi[None, None, :, None]
    Y = m.centers(1)[None, :, None, None] + 0.5 * m.dy * xi[None, None, None, :]
    shape = tuple(m.counts) + (quad.size,) * 2
    return (np.broadcast_to(X, shape), np.broadcast_to(Y, shape))


def _primitive(V, gamma):
    w = np.empty_like(V)
    w[0] = V[0]
    w[1:-1] = V[1:-1] / V[0]
    w[-1] = (gamma - 1.0) * (V[-1] - 0.5 * np.sum(V[1:-1] * w[1:-1], axis=0))
    return w


def _weights(disc: Discretization, quad: Quadrature):
    w = quad.weights
    if disc.dim == 1:
        return w * (disc.mesh.dx / 2.0)
    return np.outer(w, w) * (disc.mesh.dx * disc.mesh.dy / 4.0)


def l1_error(field: SolutionField, reference: Callable, quadrature: Optional[Quadrature] = None,
             variables: str = "primitive") -> dict[str, float]:
    """Quadrature L1 distance between ``field`` and a pointwise reference.

    ``sum_K sum_q |w_h(x_q) - w(x_q)| omega_q |K| / 2^d`` per variable.
    ``reference`` returns primitive states; errors are reported in
    primitive variables unless ``variables="conserved"``.
    """
    d = field.disc
    quad = quadrature or d.quad
    V = conserved_at(field, quadrature)
    coords = d.vol_coords if quadrature is None else _volume_coords(d, quad)
    ref = reference(coords)
    if variables == "conserved":
        num, ref = V, to_conserved(ref, d.gamma, check=False)
        names = ("rho",) + tuple(f"m{a}" for a in "xy"[: d.dim]) + ("E",)
    else:
        num = _primitive(V, d.gamma)
        names = variable_names(d.dim)
    diff = np.abs(num - ref)
    w = _weights(d, quad)
    lead = diff.shape[: 1 + d.dim]
    totals = (diff.reshape(lead + (-1,)) * w.reshape(-1)).reshape(diff.shape[0], -1).sum(axis=1)
    return {n: float(v) for n, v in zip(names, totals)}


def l1_distance(a, b, disc: Discretization, quadrature: Optional[Quadrature] = None) -> float:
    """L1 norm of ``a - b`` for point-value arrays of one variable on ``disc``."""
    w = _weights(disc, quadrature or disc.quad)
    diff = np.abs(np.asarray(a) - np.asarray(b))
    lead = diff.shape[: disc.dim]
    return float((diff.reshape(lead + (-1,)) * w.reshape(-1)).sum())


def slope(e_coarse: float, e_fine: float, ratio: float = 2.0):
    """Observed order between two errors, or :data:`EXACT` at rounding level."""
    if e_coarse <= EXACT_FLOOR and e_fine <= EXACT_FLOOR:
        return EXACT
    if e_coarse <= 0.0 or e_fine <= 0.0:
        return EXACT
    return math.log(e_coarse / e_fine) / math.log(ratio)


@dataclass
class ErrorReport:
    """Outcome of a single run."""

    case: str
    scheme: str
    order: int
    N: int
    errors: dict = field(default_factory=dict)
    runtime_s: float = 0.0
    wb_cache_bytes: int = 0
    slopes: dict = field(default_factory=dict)
    steps: int = 0
    failed: Optional[str] = None

    @property
    def label(self) -> str:
        return f"{self.scheme}{self.order}"

    def rows(self) -> list[dict]:
        out = []
        for var, err in self.errors.items():
            s = self.slopes.get(var, "")
            out.append(dict(
                case=self.case, scheme=self.scheme, order=self.order, N=self.N, variable=var,
                l1=repr(float(err)), runtime_s=f"{self.runtime_s:.6f}",
                wb_cache_bytes=self.wb_cache_bytes,
                slope=s if isinstance(s, str) else f"{s:.4f}",
            ))
        if self.failed and not out:
            out.append(dict(case=self.case, scheme=self.scheme, order=self.order, N=self.N,
                            variable="FAILED", l1="nan", runtime_s=f"{self.runtime_s:.6f}",
                            wb_cache_bytes=self.wb_cache_bytes, slope=""))
        return out


def convergence_table(reports: Sequence[ErrorReport]) -> list[ErrorReport]:
    """Fill ``slopes`` of each report from the next coarser run of the same scheme.

    Reports are grouped by (case, scheme, order) and sorted by N; a pair
    whose errors are both at rounding level gets the :data:`EXACT` marker.
    """
    if len(reports) < 2:
        raise ValueError("need at least two reports for a convergence table")
    groups: dict = {}
    for r in reports:
        groups.setdefault((r.case, r.scheme, r.order), []).append(r)
    for runs in groups.values():
        runs.sort(key=lambda r: r.N)
        for coarse, fine in zip(runs, runs[1:]):
            if coarse.failed or fine.failed:
                continue
            ratio = fine.N / coarse.N
            for var, ef in fine.errors.items():
                ec = coarse.errors.get(var)
                if ec is not None:
                    fine.slopes[var] = slope(ec, ef, ratio)
    return list(reports)


def write_report_csv(reports: Iterable[ErrorReport], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for r in reports:
            for row in r.rows():
                w.writerow(row)


def read_report_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# --- closed-form update oracle ---------------------------------------------

def update_oracle(spec, disc: Discretization, coeffs=None, case: Optional[str] = None):
    """Per-cell update function ``H`` of a 1D equilibrium, written out by hand.

    Implements, cell by cell and mode by mode,

    ``H_i = sum_q f(w_h) psi_i' omega_q
           - [<f> - alpha/2 [[w]]]_{k+1/2} psi_i(1)
           + [<f> - alpha/2 [[w]]]_{k-1/2} psi_i(-1)
           + dx/2 sum_q s(w_h) psi_i omega_q``

    with ``[[w]] = w^+ - w^-`` and ``<f>`` the arithmetic mean of the two
    trace fluxes. For ``case="static"`` (zero velocity) the mass and energy
    rows reduce to the jump terms alone and are evaluated in that reduced
    form. Returns ``(2/dx) H`` so it is directly comparable with the
    assembled residual. ``coeffs`` defaults to the projection of ``spec``.
    """
    if disc.dim != 1:
        raise ValueError("the update oracle is one-dimensional")
    gamma = disc.gamma
    mesh = disc.mesh
    n = mesh.counts[0]
    P = disc.P
    quad = disc.quad
    dx = mesh.dx
    if coeffs is None:
        W = spec.primitive(disc.vol_coords)
        coeffs = to_conserved(W, gamma) @ (disc.B * quad.weights[:, None])
    if case is None:
        case = "static" if np.all(spec.primitive(disc.vol_coords)[1] == 0.0) else "moving"
    if case not in ("static", "moving"):
        raise ValueError("case must be 'static' or 'moving'")

    psi_l = legendre_eval(disc.degree, -1.0)[0]
    psi_r = legendre_eval(disc.degree, 1.0)[0]
    vals, ders = legendre_eval(disc.degree, quad.nodes)

    def state(k, xi_vals):
        return np.array([sum(coeffs[v, k, i] * xi_vals[i] for i in range(P)) for v in range(3)])

    def flux(u):
        rho, m, E = u
        v = m / rho
        p = (gamma - 1.0) * (E - 0.5 * m * v)
        return np.array([m, m * v + p, (E + p) * v]), abs(v) + math.sqrt(gamma * p / rho)

    lo, hi = mesh.bounds[0]
    left_bc = to_conserved(spec.primitive((np.array([lo]),))[:, 0], gamma)
    right_bc = to_conserved(spec.primitive((np.array([hi]),))[:, 0], gamma)

    def face(j):
        # face j between cell j-1 and cell j
        um = state(j - 1, psi_r) if j > 0 else left_bc
        up = state(j, psi_l) if j < n else right_bc
        fm, sm = flux(um)
        fp, sp = flux(up)
        alpha = max(sm, sp)
        return 0.5 * (fm + fp), up - um, alpha

    faces = [face(j) for j in range(n + 1)]
    H = np.zeros((3, n, P))
    for k in range(n):
        xq = mesh.centers(0)[k] + 0.5 * dx * quad.nodes
        g = spec.gravity((xq,), 0.0)[0]
        avg_r, jump_r, a_r = faces[k + 1]
        avg_l, jump_l, a_l = faces[k]
        for i in range(P):
            vol = np.zeros(3)
            src = np.zeros(3)
            for q in range(quad.size):
                u = state(k, vals[q])
                f, _ = flux(u)
                vol += f * ders[q, i] * quad.weights[q]
                src += np.array([0.0, -u[0] * g[q], -u[1] * g[q]]) * vals[q, i] * quad.weights[q]
            h_r = avg_r - 0.5 * a_r * jump_r
            h_l = avg_l - 0.5 * a_l * jump_l
            Hi = vol - h_r * psi_r[i] + h_l * psi_l[i] + 0.5 * dx * src
            if case == "static":
                for v in (0, 2):
                    Hi[v] = 0.5 * a_r * jump_r[v] * psi_r[i] - 0.5 * a_l * jump_l[v] * psi_l[i]
            H[:, k, i] = Hi
    return H * (2.0 / dx)


def timing_run(config):
    """Run one configuration and return its :class:`ErrorReport`.

    ``runtime_s`` covers the time loop only; setup and cache build are
    excluded.
    """
    from .runner import run_single

    _, report = run_single(config)
    return report
