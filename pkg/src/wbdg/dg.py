"""Modal Runge-Kutta discontinuous Galerkin discretisation of the Euler system.

Coefficient layout: ``(e, Nx, P)`` in 1D and ``(e, Nx, Ny, P, P)`` in 2D,
where ``e`` is the number of conserved variables and ``P = Np + 1``. The
basis is orthonormal on the reference element, so the mass matrix is the
identity and :meth:`DGOperator.residual` returns ``d/dt`` of the
coefficients directly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Union

import numpy as np

from .euler import AdmissibilityError, _flux_speed, pressure, to_conserved
from .grid import Basis, Mesh, Quadrature, gauss_legendre, legendre_eval

__all__ = [
    "Discretization",
    "SolutionField",
    "EquilibriumTerms",
    "DGOperator",
    "project",
    "evaluate",
    "point_values",
    "cell_averages",
    "residual",
]


def _resolve_backend(name):
    if name is None:
        name = os.environ.get("WBDG_BACKEND", "numba")
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba":
        try:
            from . import kernels  # noqa: F401
        except ImportError:  # pragma: no cover - numba missing
            return "numpy"
    return name


class Discretization:
    """Mesh + polynomial degree + quadrature, with all tabulated operators.

    Volume integrals use ``quadrature`` per axis (default ``Np + 1``
    Gauss-Legendre points); 2D faces use the same 1D rule. ``backend``
    selects the compiled kernels (``"numba"``, default) or the plain
    array implementation (``"numpy"``); the environment variable
    ``WBDG_BACKEND`` changes the default.
    """

    def __init__(self, mesh: Mesh, degree: int, gamma: float = 1.4,
                 quadrature: Optional[Quadrature] = None, backend: Optional[str] = None):
        self.backend = _resolve_backend(backend)
        self.mesh = mesh
        self.dim = mesh.dimension
        self.degree = int(degree)
        self.gamma = float(gamma)
        self.basis = Basis(degree)
        self.quad = quadrature or gauss_legendre(degree + 1)
        self.P = degree + 1
        self.Q = self.quad.size
        self.nvar = self.dim + 2

        B, D = legendre_eval(degree, self.quad.nodes)
        w = self.quad.weights
        self.B = B                        # (Q, P)
        self.Bt = np.ascontiguousarray(B.T)
        self.proj = B * w[:, None]        # values at nodes -> modes
        self.projT = np.ascontiguousarray(self.proj.T)
        self.dproj = D * w[:, None]       # weak derivative
        self.dprojT = np.ascontiguousarray(self.dproj.T)
        self.psi_m = self.basis.left
        self.psi_p = self.basis.right
        self.E = np.stack([self.psi_m, self.psi_p])  # (2, P)
        self.Et = np.ascontiguousarray(self.E.T)

        self.shape = (self.nvar,) + tuple(mesh.counts) + (self.P,) * self.dim
        self._build_coords()
        if self.dim == 2:
            self._build_gemm()

    def _build_gemm(self):
        """Operators of the 2D matrix-product residual.

        ``gemm_points`` maps flattened cell coefficients to the volume
        values and the four face traces; ``gemm_assembly`` maps x fluxes,
        y fluxes, sources and face fluxes back to scaled modal residuals.
        """
        B, E, Pj, Dp = self.B, self.E, self.proj, self.dproj
        kron = np.kron
        self.gemm_points = np.ascontiguousarray(np.vstack([
            kron(B, B), kron(E[0:1], B), kron(E[1:2], B), kron(B, E[0:1]), kron(B, E[1:2]),
        ]).T)
        sx = 2.0 / self.mesh.dx
        sy = 2.0 / self.mesh.dy
        self.gemm_assembly = np.ascontiguousarray(np.vstack([
            sx * kron(Dp, Pj),
            sy * kron(Pj, Dp),
            kron(Pj, Pj),
            sx * kron(E[0:1], Pj),
            -sx * kron(E[1:2], Pj),
            sy * kron(Pj, E[0:1]),
            -sy * kron(Pj, E[1:2]),
        ]))

    def _build_coords(self):
        m = self.mesh
        xi = self.quad.nodes
        if self.dim == 1:
            xc = m.centers(0)
            self.vol_coords = (xc[:, None] + 0.5 * m.dx * xi[None, :],)
            self.face_coords = [(m.faces(0),)]
            self.center_coords = (xc,)
            return
        xc, yc = m.centers(0), m.centers(1)
        nx, ny = m.counts
        Q = self.Q
        X = xc[:, None, None, None] + 0.5 * m.dx * xi[None, None, :, None]
        Y = yc[None, :, None, None] + 0.5 * m.dy * xi[None, None, None, :]
        self.vol_coords = (np.broadcast_to(X, (nx, ny, Q, Q)).copy(),
                           np.broadcast_to(Y, (nx, ny, Q, Q)).copy())
        fx = m.faces(0)
        fy = m.faces(1)
        self.face_coords = [
            (np.broadcast_to(fx[:, None, None], (nx + 1, ny, Q)).copy(),
             np.broadcast_to(yc[None, :, None] + 0.5 * m.dy * xi, (nx + 1, ny, Q)).copy()),
            (np.broadcast_to(xc[:, None, None] + 0.5 * m.dx * xi, (nx, ny + 1, Q)).copy(),
             np.broadcast_to(fy[None, :, None], (nx, ny + 1, Q)).copy()),
        ]
        self.center_coords = m.cell_centers()

    # --- transforms between modes and point values -------------------------

    def to_points(self, U):
        """Modal coefficients -> values at the volume quadrature points."""
        if self.dim == 1:
            return U @ self.Bt
        return np.matmul(np.matmul(self.B, U), self.Bt)

    def to_modes(self, V):
        """L2 projection of point values at the volume quadrature points."""
        if self.dim == 1:
            return V @ self.proj
        return np.matmul(np.matmul(self.projT, V), self.proj)

    def average_weights(self):
        """Weights turning volume point values into cell averages."""
        w = self.quad.weights / 2.0
        return w if self.dim == 1 else np.outer(w, w)

    def point_average(self, V):
        """Cell averages from values at the volume quadrature points."""
        if self.dim == 1:
            return V @ (self.quad.weights / 2.0)
        w = self.quad.weights / 2.0
        return (V @ w) @ w

    def check_points(self, V, face_traces):
        """Stack volume and face-trace values per cell: (e, cells..., K)."""
        lead = V.shape[: 1 + self.dim]
        return np.concatenate([V.reshape(lead + (-1,)), face_traces.reshape(lead + (-1,))], axis=-1)

    def traces(self, U):
        """Face traces of each cell.

        1D: ``(e, N, 2)`` at xi = -1, +1.
        2D: ``(e, Nx, Ny, 4, Q)``: left, right, bottom, top faces.
        """
        if self.dim == 1:
            return U @ self.Et
        tx = np.matmul(np.matmul(self.E, U), self.Bt)          # (..., 2, Q)
        ty = np.matmul(np.matmul(self.B, U), self.Et)          # (..., Q, 2)
        return np.concatenate([tx, np.swapaxes(ty, -1, -2)], axis=-2)


@dataclass
class SolutionField:
    """Modal DG solution on a :class:`Discretization`."""

    disc: Discretization
    coeffs: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        if self.coeffs.shape != self.disc.shape:
            raise ValueError(f"coefficient shape {self.coeffs.shape} != {self.disc.shape}")

    def copy(self):
        return type(self)(self.disc, self.coeffs.copy(), self.t)

    def mass(self):
        """Domain integral of each conserved variable."""
        avg = cell_averages(self)
        return avg.reshape(avg.shape[0], -1).sum(axis=1) * self.disc.mesh.cell_volume


class EquilibriumTerms(NamedTuple):
    """Equilibrium samples subtracted by the well-balanced residual."""

    vol: np.ndarray            # conserved w_eq at volume points
    face: list                 # conserved w_eq at face points, per axis
    flux_vol: list             # f_a(w_eq) at volume points, per axis a
    src_vol: np.ndarray        # momentum/energy rows of s(w_eq) at volume points
    flux_face: list            # normal flux f_a(w_eq) at faces of axis a


def _volume_fluxes(V, gamma, dim):
    """Physical fluxes along every axis at volume points (shared pressure)."""
    rho = V[0]
    mom = V[1:-1]
    p = (gamma - 1.0) * (V[-1] - 0.5 * np.sum(mom * mom, axis=0) / rho)
    out = []
    for a in range(dim):
        vn = V[1 + a] / rho
        f = V * vn
        f[1 + a] += p
        f[-1] += p * vn
        out.append(f)
    return out, p


def _source(V, grad):
    """Momentum and energy rows of the gravity source."""
    S = np.empty((V.shape[0] - 1,) + V.shape[1:])
    S[:-1] = -V[0] * grad
    S[-1] = -np.sum(V[1:-1] * grad, axis=0)
    return S


def _llf(FL, FR, axis, gamma):
    fm, pm, sm = _flux_speed(FL, axis, gamma)
    fp, pp, sp = _flux_speed(FR, axis, gamma)
    return 0.5 * (fm + fp) - 0.5 * np.maximum(sm, sp) * (FR - FL), pm, pp


def equilibrium_terms(disc: Discretization, conserved: Callable, gravity) -> EquilibriumTerms:
    """Sample an equilibrium at every point the residual touches.

    Fluxes and sources are evaluated by the same point routines the
    residual of ``disc.backend`` uses, which is what makes a zero
    perturbation cancel exactly.
    """
    vol = np.ascontiguousarray(conserved(disc.vol_coords))
    faces = [np.ascontiguousarray(conserved(fc)) for fc in disc.face_coords]
    grad = np.ascontiguousarray(gravity(disc.vol_coords, 0.0), dtype=float)
    if disc.backend == "numpy":
        flux_vol, _ = _volume_fluxes(vol, disc.gamma, disc.dim)
        src = _source(vol, grad)
        flux_face = [_flux_speed(f, a, disc.gamma)[0] for a, f in enumerate(faces)]
        return EquilibriumTerms(vol, faces, flux_vol, src, flux_face)

    from . import kernels

    e = disc.nvar
    flat = vol.reshape(e, -1)
    n = flat.shape[1]
    src = np.empty((e - 1, n))
    if disc.dim == 1:
        fx = np.empty((e, n))
        kernels.point_terms_1d(flat, grad.reshape(-1), disc.gamma, fx, src)
        flux_vol = [fx.reshape(vol.shape)]
    else:
        fx = np.empty((e, n))
        fy = np.empty((e, n))
        kernels.point_terms_2d(flat, grad[0].reshape(-1), grad[1].reshape(-1), disc.gamma, fx, fy, src)
        flux_vol = [fx.reshape(vol.shape), fy.reshape(vol.shape)]
    flux_face = []
    for a, f in enumerate(faces):
        out = np.empty((e, f[0].size))
        if disc.dim == 1:
            kernels.face_flux_1d(f.reshape(e, -1), disc.gamma, out)
        else:
            kernels.face_flux_2d(f.reshape(e, -1), disc.gamma, a, out)
        flux_face.append(out.reshape(f.shape))
    return EquilibriumTerms(vol, faces, flux_vol, src.reshape((e - 1,) + vol.shape[1:]), flux_face)


Boundary = Union[str, Callable]


class DGOperator:
    """Semi-discrete DG right-hand side ``dU/dt = L(U, t)``.

    Parameters
    ----------
    disc : Discretization
    gravity : GravityField or None
        Gradient of the potential; ``None`` disables the source.
    boundary : ``"periodic"`` or a primitive-state evaluator
        Dirichlet data are imposed as the exterior trace at the boundary
        face quadrature points, evaluated analytically once.
    """

    def __init__(self, disc: Discretization, gravity=None, boundary: Boundary = "periodic"):
        self.disc = disc
        self.gravity = gravity
        self.periodic = isinstance(boundary, str)
        if self.periodic and boundary != "periodic":
            raise ValueError(f"unknown boundary kind {boundary!r}")
        self.bc = None
        if not self.periodic:
            self.bc = []
            for a, fc in enumerate(disc.face_coords):
                # only the two outer face layers are needed
                ends = tuple(np.take(c, [0, -1], axis=a) for c in fc)
                full = to_conserved(boundary(ends), disc.gamma)
                self.bc.append((np.take(full, 0, axis=1 + a), np.take(full, 1, axis=1 + a)))
        self._kargs = None
        self._grad_vol = None
        if gravity is not None and not gravity.time_dependent:
            self._grad_vol = gravity(disc.vol_coords, 0.0)
        self.n_calls = 0

    def grad_at_volume(self, t):
        if self.gravity is None:
            return None
        if self._grad_vol is not None:
            return self._grad_vol
        return self.gravity(self.disc.vol_coords, t)

    # --- face state assembly ------------------------------------------------

    def _faces_1d(self, T, eq_face):
        e, n = T.shape[:2]
        FL = np.empty((e, n + 1))
        FR = np.empty((e, n + 1))
        FL[:, 1:] = T[:, :, 1]
        FR[:, :-1] = T[:, :, 0]
        if eq_face is not None:
            FL[:, 1:] += eq_face[:, 1:]
            FR[:, :-1] += eq_face[:, :-1]
        if self.periodic:
            FL[:, 0] = FL[:, -1]
            FR[:, -1] = FR[:, 0]
        else:
            lo, hi = self.bc[0]
            FL[:, 0] = lo
            FR[:, -1] = hi
        return FL, FR

    def _faces_2d(self, T, eq_face):
        e, nx, ny = T.shape[:3]
        Q = T.shape[-1]
        out = []
        for a in range(2):
            shape = (e, nx + 1, ny, Q) if a == 0 else (e, nx, ny + 1, Q)
            FL = np.empty(shape)
            FR = np.empty(shape)
            if a == 0:
                FL[:, 1:] = T[:, :, :, 1]
                FR[:, :-1] = T[:, :, :, 0]
                if eq_face is not None:
                    FL[:, 1:] += eq_face[0][:, 1:]
                    FR[:, :-1] += eq_face[0][:, :-1]
                if self.periodic:
                    FL[:, 0] = FL[:, -1]
                    FR[:, -1] = FR[:, 0]
                else:
                    FL[:, 0], FR[:, -1] = self.bc[0]
            else:
                FL[:, :, 1:] = T[:, :, :, 3]
                FR[:, :, :-1] = T[:, :, :, 2]
                if eq_face is not None:
                    FL[:, :, 1:] += eq_face[1][:, :, 1:]
                    FR[:, :, :-1] += eq_face[1][:, :, :-1]
                if self.periodic:
                    FL[:, :, 0] = FL[:, :, -1]
                    FR[:, :, -1] = FR[:, :, 0]
                else:
                    FL[:, :, 0], FR[:, :, -1] = self.bc[1]
            out.append((FL, FR))
        return out

    # --- residual -----------------------------------------------------------

    def residual(self, U, t=0.0, eq: Optional[EquilibriumTerms] = None):
        """Time derivative of the modal coefficients.

        With ``eq`` given, ``U`` holds the perturbation coefficients and
        the well-balanced difference form is assembled: every flux and
        source sample has the matching equilibrium sample subtracted.
        """
        self.n_calls += 1
        if self.disc.backend == "numba":
            return self._residual_compiled(U, t, eq)
        # inadmissible states are reported by _check, not by numpy warnings
        with np.errstate(invalid="ignore", divide="ignore"):
            if self.disc.dim == 1:
                return self._residual_1d(U, t, eq)
            return self._residual_2d(U, t, eq)

    def _residual_compiled(self, U, t, eq):
        from . import kernels

        d = self.disc
        U = np.ascontiguousarray(U)
        R = np.empty_like(U)
        status = np.zeros(5, dtype=np.int64)
        grad = self.grad_at_volume(t)
        has_grad = grad is not None
        has_eq = eq is not None
        if d.dim == 1:
            if self._kargs is None:
                z = np.zeros((1, 1))
                bc = self.bc[0] if self.bc is not None else (np.zeros(3), np.zeros(3))
                self._kargs = (z, np.ascontiguousarray(bc[0]), np.ascontiguousarray(bc[1]))
            z, lo, hi = self._kargs
            g = np.ascontiguousarray(grad[0]) if has_grad else z
            if has_eq:
                ev, ef, efv, es, eff = eq.vol, eq.face[0], eq.flux_vol[0], eq.src_vol, eq.flux_face[0]
            else:
                z3 = np.zeros((1, 1, 1))
                ev, ef, efv, es, eff = z3, z, z3, z3, z
            kernels.residual_1d(U, d.B, d.dproj, d.proj, d.psi_m, d.psi_p, d.mesh.dx, d.gamma,
                                g, has_grad, lo, hi, self.periodic, has_eq, ev, ef, efv, es, eff,
                                R, status)
        else:
            nx, ny = d.mesh.counts
            Q = d.Q
            if self._kargs is None:
                z3 = np.zeros((1, 1, 1))
                if self.bc is not None:
                    bcs = tuple(np.ascontiguousarray(b) for pair in self.bc for b in pair)
                else:
                    bcs = (z3,) * 4
                self._kargs = (z3, bcs, np.empty((4, nx, ny, 3 * Q * Q + 4 * Q)))
            z3, bcs, G = self._kargs
            if has_grad:
                gx = np.ascontiguousarray(grad[0]).reshape(nx, ny, -1)
                gy = np.ascontiguousarray(grad[1]).reshape(nx, ny, -1)
            else:
                gx = gy = z3
            if has_eq:
                args = (eq.vol.reshape(4, nx, ny, -1), eq.face[0], eq.face[1],
                        eq.flux_vol[0].reshape(4, nx, ny, -1), eq.flux_vol[1].reshape(4, nx, ny, -1),
                        eq.src_vol.reshape(3, nx, ny, -1), eq.flux_face[0], eq.flux_face[1])
            else:
                z4 = np.zeros((1, 1, 1, 1))
                args = (z4, z4, z4, z4, z4, z4, z4, z4)
            VT = (U.reshape(4 * nx * ny, -1) @ d.gemm_points).reshape(4, nx, ny, -1)
            kernels.pointwise_2d(VT, Q, d.gamma, gx, gy, has_grad, *bcs, self.periodic, has_eq,
                                 *args, G, status)
            if not status[0]:
                R = (G.reshape(4 * nx * ny, -1) @ d.gemm_assembly).reshape(U.shape)
        if status[0]:
            self._raise_status(status)
        return R

    def _raise_status(self, status):
        kind, i, j, k, side = (int(x) for x in status)
        if kind == 1:
            raise AdmissibilityError("inadmissible volume state", cell=(i, j) if self.disc.dim == 2 else i,
                                     point=k if self.disc.dim == 2 else j)
        axis = kind - 2
        face = i if self.disc.dim == 1 else (i, j)
        raise AdmissibilityError("inadmissible face trace", axis=axis, face=face,
                                 point=k, side="low" if side == 0 else "high")

    def _check(self, rho, p, where, loc):
        if not (rho.min() > 0.0 and p.min() > 0.0):
            bad = np.argwhere(~((rho > 0.0) & (p > 0.0)))[0]
            idx = tuple(int(i) for i in bad)
            raise AdmissibilityError(
                f"inadmissible {where}", index=loc(idx), rho=float(rho[idx]), p=float(p[idx])
            )

    def _residual_1d(self, U, t, eq):
        d = self.disc
        gamma = d.gamma
        V = U @ d.Bt
        T = U @ d.Et
        if eq is not None:
            V += eq.vol
        FL, FR = self._faces_1d(T, None if eq is None else eq.face[0])

        h, pl, pr = _llf(FL, FR, 0, gamma)
        self._check(FL[0], pl, "face trace", lambda i: {"face": i[0], "side": "left"})
        self._check(FR[0], pr, "face trace", lambda i: {"face": i[0], "side": "right"})
        (f,), p = _volume_fluxes(V, gamma, 1)
        self._check(V[0], p, "volume state", lambda i: {"cell": i[0], "point": i[1]})

        grad = self.grad_at_volume(t)
        if eq is not None:
            f -= eq.flux_vol[0]
            h -= eq.flux_face[0]
        surf = h[:, 1:, None] * d.psi_p - h[:, :-1, None] * d.psi_m
        R = (f @ d.dproj - surf) * (2.0 / d.mesh.dx)
        if grad is not None:
            S = _source(V, grad)
            if eq is not None:
                S -= eq.src_vol
            R[1:] += S @ d.proj
        return R

    def _residual_2d(self, U, t, eq):
        d = self.disc
        gamma = d.gamma
        BU = np.matmul(d.B, U)
        V = np.matmul(BU, d.Bt)
        tx = np.matmul(np.matmul(d.E, U), d.Bt)        # (..., 2, Q)
        ty = np.matmul(BU, d.Et)                       # (..., Q, 2)
        T = np.concatenate([tx, np.swapaxes(ty, -1, -2)], axis=-2)
        if eq is not None:
            V += eq.vol
        faces = self._faces_2d(T, None if eq is None else eq.face)

        (f1, f2), p = _volume_fluxes(V, gamma, 2)
        self._check(V[0], p, "volume state", lambda i: {"cell": i[:2], "point": i[2:]})
        hs = []
        for a, (FL, FR) in enumerate(faces):
            h, pl, pr = _llf(FL, FR, a, gamma)
            self._check(FL[0], pl, "face trace", lambda i, a=a: {"axis": a, "face": i[:2], "side": "low"})
            self._check(FR[0], pr, "face trace", lambda i, a=a: {"axis": a, "face": i[:2], "side": "high"})
            hs.append(h)
        hx, hy = hs

        grad = self.grad_at_volume(t)
        if eq is not None:
            f1 -= eq.flux_vol[0]
            f2 -= eq.flux_vol[1]
            hx -= eq.flux_face[0]
            hy -= eq.flux_face[1]

        psi_p, psi_m = d.psi_p, d.psi_m
        Hx = hx @ d.proj                               # (e, Nx+1, Ny, P) over j
        Hy = hy @ d.proj                               # (e, Nx, Ny+1, P) over i
        volx = np.matmul(np.matmul(d.dprojT, f1), d.proj)
        voly = np.matmul(np.matmul(d.projT, f2), d.dproj)
        surfx = Hx[:, 1:, :, None, :] * psi_p[:, None] - Hx[:, :-1, :, None, :] * psi_m[:, None]
        surfy = Hy[:, :, 1:, :, None] * psi_p - Hy[:, :, :-1, :, None] * psi_m
        R = (volx - surfx) * (2.0 / d.mesh.dx) + (voly - surfy) * (2.0 / d.mesh.dy)
        if grad is not None:
            S = _source(V, grad)
            if eq is not None:
                S -= eq.src_vol
            R[1:] += np.matmul(np.matmul(d.projT, S), d.proj)
        return R

    # --- field-level helpers ------------------------------------------------

    def __call__(self, field: SolutionField, t=None):
        return self.residual(field.coeffs, field.t if t is None else t)


def project(initial_condition: Callable, disc: Discretization) -> SolutionField:
    """L2 projection of a pointwise primitive-state evaluator."""
    W = initial_condition(disc.vol_coords)
    return SolutionField(disc, disc.to_modes(to_conserved(W, disc.gamma)))


def evaluate(field: SolutionField, cell, reference_point):
    """Conserved state of the DG polynomial at a reference point of ``cell``."""
    d = field.disc
    idx = (cell,) if np.ndim(cell) == 0 else tuple(cell)
    ref = np.atleast_1d(np.asarray(reference_point, dtype=float))
    c = field.coeffs[(slice(None),) + idx]
    phi_x = legendre_eval(d.degree, ref[0])[0]
    if d.dim == 1:
        return c @ phi_x
    phi_y = legendre_eval(d.degree, ref[1])[0]
    return (c @ phi_y) @ phi_x


def point_values(field: SolutionField, quadrature: Optional[Quadrature] = None):
    """Conserved values at the volume points of ``quadrature`` in every cell."""
    d = field.disc
    if quadrature is None or quadrature.size == d.Q and np.array_equal(quadrature.nodes, d.quad.nodes):
        return d.to_points(field.coeffs)
    B = legendre_eval(d.degree, quadrature.nodes)[0]
    if d.dim == 1:
        return field.coeffs @ B.T
    return np.matmul(np.matmul(B, field.coeffs), B.T)


def cell_averages(field: SolutionField):
    """Cell averages of the conserved variables, shape (e, cells...)."""
    d = field.disc
    if d.dim == 1:
        return field.coeffs[..., 0] * d.basis.left[0]
    return field.coeffs[..., 0, 0] * d.basis.left[0] ** 2


def residual(field: SolutionField, gravity, t=None, boundary: Boundary = "periodic"):
    """Classical DG residual of ``field``; convenience wrapper."""
    op = DGOperator(field.disc, gravity, boundary)
    return op.residual(field.coeffs, field.t if t is None else t)


def primitive_at(U_points, gamma):
    """Primitive variables from conserved point values (no admissibility check)."""
    w = np.empty_like(U_points)
    w[0] = U_points[0]
    w[1:-1] = U_points[1:-1] / U_points[0]
    w[-1] = pressure(U_points, gamma)
    return w
