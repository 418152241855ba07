"""Positivity-preserving scaling limiter.

Each cell polynomial is contracted towards its mean,
``u_theta = u_bar + theta (u_h - u_bar)``, with the largest ``theta`` in
``[0, 1]`` that keeps density and pressure above a floor at every volume
quadrature point and face trace point. Only modes ``>= 1`` change, so cell
averages are untouched bit for bit.

In well-balanced runs the limited quantity is ``w_num = w_eq + delta_h``
and only ``delta`` is scaled; the anchor state is then ``w_eq(x) +
delta_bar``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dg import Discretization
from .euler import AdmissibilityError

__all__ = ["LimiterConfig", "PositivityLimiter", "check_points_matrix", "limit_cell"]

_ROUND = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class LimiterConfig:
    eps: float = 1e-10
    enabled: bool = True
    density: bool = True
    pressure: bool = True
    tol: float = 1e-12

    def __post_init__(self):
        if not self.eps > 0.0:
            raise ValueError("limiter floor must be positive")


def check_points_matrix(disc: Discretization) -> np.ndarray:
    """Map flattened cell coefficients to values at all check points.

    Rows are the volume points (C order) followed by the face points
    (1D: left, right; 2D: left, right, bottom, top).
    """
    B, E = disc.B, disc.E
    if disc.dim == 1:
        return np.vstack([B, E])
    return np.vstack([
        np.kron(B, B),
        np.kron(E[0:1], B),
        np.kron(E[1:2], B),
        np.kron(B, E[0:1]),
        np.kron(B, E[1:2]),
    ])


def _background_points(disc: Discretization, terms) -> np.ndarray:
    e = disc.nvar
    if disc.dim == 1:
        f = terms.face[0]
        bg = np.concatenate([terms.vol, f[:, :-1, None], f[:, 1:, None]], axis=-1)
    else:
        nx, ny = disc.mesh.counts
        fx, fy = terms.face
        bg = np.concatenate([
            terms.vol.reshape(e, nx, ny, -1),
            fx[:, :-1], fx[:, 1:], fy[:, :, :-1], fy[:, :, 1:],
        ], axis=-1)
    return bg.reshape(e, disc.mesh.n_cells, -1)


def _pressure(u, gamma):
    return (gamma - 1.0) * (u[-1] - 0.5 * np.sum(u[1:-1] * u[1:-1], axis=0) / u[0])


class PositivityLimiter:
    """Callable hook ``limiter(U, t)`` acting in place on coefficients.

    Parameters
    ----------
    disc : Discretization
    config : LimiterConfig
    background : EquilibriumCache, optional
        Equilibrium of a well-balanced run; ``U`` then holds ``delta``.
    """

    def __init__(self, disc: Discretization, config: LimiterConfig = LimiterConfig(),
                 background=None):
        self.disc = disc
        self.config = config
        self.gamma = disc.gamma
        self.MT = np.ascontiguousarray(check_points_matrix(disc).T)
        self.c0 = disc.basis.left[0] ** disc.dim
        self.bg = None
        if background is not None and not background.is_zero:
            self.bg = _background_points(disc, background.terms())
        self.n_limited = 0

    def theta(self, A, D):
        """Per-cell scaling factor for anchors ``A`` and deviations ``D``.

        Both have shape ``(e, cells, K)``.
        """
        cfg = self.config
        eps = cfg.eps
        g = self.gamma
        n = A.shape[1]
        theta = np.ones(n)
        rA = A[0]
        pA = _pressure(A, g)
        bad = ~((rA >= eps) & (pA >= eps))
        if bad.any():
            c, k = np.argwhere(bad)[0]
            raise AdmissibilityError(
                "limiter anchor state not admissible", cell=int(c), point=int(k),
                rho=float(rA[c, k]), p=float(pA[c, k]),
            )
        if cfg.density:
            target = eps + _ROUND * (np.abs(rA) + np.abs(D[0]))
            neg = D[0] < 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                t_pt = np.where(neg & (rA + D[0] < target), (rA - target) / -np.where(neg, D[0], -1.0), 1.0)
            theta = np.minimum(theta, np.clip(t_pt.min(axis=1), 0.0, 1.0))
        if cfg.pressure:
            scale = np.abs(A[-1]) + np.abs(D[-1])
            target = eps + _ROUND * scale
            hi = np.broadcast_to(theta[:, None], pA.shape).copy()
            p_hi = _pressure(A + hi * D, g)
            fail = p_hi < target
            if fail.any():
                Af = A[:, fail]
                Df = D[:, fail]
                tf = target[fail]
                lo = np.zeros(Af.shape[1])
                up = hi[fail]
                while np.max(up - lo) > cfg.tol:
                    mid = 0.5 * (lo + up)
                    ok = _pressure(Af + mid * Df, g) >= tf
                    lo = np.where(ok, mid, lo)
                    up = np.where(ok, up, mid)
                hi[fail] = lo
            theta = np.minimum(theta, hi.min(axis=1))
        return theta

    def __call__(self, U, t=None):
        if not self.config.enabled:
            return U
        d = self.disc
        e = U.shape[0]
        C = U.reshape(e, d.mesh.n_cells, -1)
        if not np.shares_memory(C, U):
            raise ValueError("limiter needs a contiguous coefficient array")
        vals = C @ self.MT
        mean = C[..., 0] * self.c0
        if self.bg is not None:
            vals = vals + self.bg
        # fast exit for the common case
        rho = vals[0]
        p = _pressure(vals, self.gamma)
        eps = self.config.eps
        cell_bad = ~(((rho >= eps) & (p >= eps)).all(axis=1))
        if not cell_bad.any():
            return U
        idx = np.flatnonzero(cell_bad)
        D = (C[:, idx] @ self.MT) - mean[:, idx, None]
        A = np.broadcast_to(mean[:, idx, None], D.shape)
        if self.bg is not None:
            A = A + self.bg[:, idx]
        th = self.theta(np.ascontiguousarray(A), D)
        C[:, idx, 1:] *= th[None, :, None]
        self.n_limited += int(np.count_nonzero(th < 1.0))
        return U


def limit_cell(coeffs, disc: Discretization, config: LimiterConfig = LimiterConfig()):
    """Limit the coefficients of a single cell (shape ``(e, P[, P])``); returns a copy."""
    lim = PositivityLimiter(disc, config)
    e = coeffs.shape[0]
    C = np.ascontiguousarray(coeffs, dtype=float).reshape(e, 1, -1).copy()
    vals = C @ lim.MT
    mean = C[..., 0] * lim.c0
    D = vals - mean[..., None]
    A = np.broadcast_to(mean[..., None], D.shape).copy()
    th = lim.theta(A, D)
    C[:, :, 1:] *= th[None, :, None]
    return C.reshape(coeffs.shape)
