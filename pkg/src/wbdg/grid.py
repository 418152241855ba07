"""Cartesian meshes, the orthonormal Legendre basis and Gauss-Legendre rules.

Reference elements are ``[-1, 1]`` per axis. The 2D approximation space is the
tensor product of the 1D space (all ``psi_i(x) psi_j(y)`` with ``i, j <= Np``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "Mesh",
    "Quadrature",
    "Basis",
    "build_mesh",
    "legendre_eval",
    "gauss_legendre",
    "map_to_physical",
    "map_to_reference",
    "jacobian",
]


@dataclass(frozen=True)
class Mesh:
    """Uniform Cartesian mesh in one or two dimensions.

    Parameters
    ----------
    bounds : tuple of (lo, hi) pairs, one per axis
    counts : number of interior cells per axis
    ghost_width : layers of ghost cells addressable around the interior
    """

    bounds: tuple[tuple[float, float], ...]
    counts: tuple[int, ...]
    ghost_width: int = 1

    @property
    def dimension(self) -> int:
        return len(self.counts)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((hi - lo) / n for (lo, hi), n in zip(self.bounds, self.counts))

    @property
    def dx(self) -> float:
        return self.spacing[0]

    @property
    def dy(self) -> float:
        if self.dimension < 2:
            raise AttributeError("1D mesh has no y spacing")
        return self.spacing[1]

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.counts))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def centers(self, axis: int = 0) -> np.ndarray:
        """Cell-center coordinates along one axis (interior cells only)."""
        lo, _ = self.bounds[axis]
        h = self.spacing[axis]
        return lo + (np.arange(self.counts[axis]) + 0.5) * h

    def faces(self, axis: int = 0) -> np.ndarray:
        """Face coordinates along one axis, ``counts[axis] + 1`` values."""
        lo, _ = self.bounds[axis]
        h = self.spacing[axis]
        return lo + np.arange(self.counts[axis] + 1) * h

    def cell_centers(self) -> tuple[np.ndarray, ...]:
        """Center coordinates broadcast to the interior cell array shape."""
        if self.dimension == 1:
            return (self.centers(0),)
        return tuple(np.meshgrid(self.centers(0), self.centers(1), indexing="ij"))

    def interior_cells(self):
        """Iterate interior cell indices in C order."""
        return np.ndindex(*self.counts)


def build_mesh(dimension, bounds, counts, ghost_width=1) -> Mesh:
    """Construct a uniform mesh.

    ``bounds`` and ``counts`` may be given as a single pair / integer, which is
    then repeated on every axis.
    """
    if dimension not in (1, 2):
        raise ValueError(f"dimension must be 1 or 2, got {dimension}")
    if np.ndim(counts) == 0:
        counts = (counts,) * dimension
    bounds = np.asarray(bounds, dtype=float)
    if bounds.ndim == 1:
        bounds = np.tile(bounds, (dimension, 1))
    counts = tuple(int(n) for n in counts)
    if len(counts) != dimension or bounds.shape != (dimension, 2):
        raise ValueError("bounds/counts do not match the dimension")
    if any(n < 1 for n in counts):
        raise ValueError(f"cell counts must be >= 1, got {counts}")
    if any(not hi > lo for lo, hi in bounds):
        raise ValueError(f"degenerate or inverted bounds {bounds.tolist()}")
    if ghost_width < 1:
        raise ValueError("ghost_width must be >= 1")
    return Mesh(
        bounds=tuple((float(lo), float(hi)) for lo, hi in bounds),
        counts=counts,
        ghost_width=int(ghost_width),
    )


def _check_cell(mesh: Mesh, cell_index) -> tuple[int, ...]:
    idx = (cell_index,) if np.ndim(cell_index) == 0 else tuple(cell_index)
    if len(idx) != mesh.dimension:
        raise IndexError(f"cell index {cell_index} has wrong dimension")
    g = mesh.ghost_width
    for i, n in zip(idx, mesh.counts):
        if not -g <= i < n + g:
            raise IndexError(f"cell index {cell_index} outside mesh incl. ghosts")
    return tuple(int(i) for i in idx)


def map_to_physical(mesh: Mesh, cell_index, reference_point) -> np.ndarray:
    """Affine map from the reference element to cell ``cell_index``.

    Ghost cells (negative indices or indices >= count, up to ``ghost_width``)
    are valid.
    """
    idx = _check_cell(mesh, cell_index)
    ref = np.atleast_1d(np.asarray(reference_point, dtype=float))
    out = np.empty(mesh.dimension)
    for a, (i, (lo, _), h) in enumerate(zip(idx, mesh.bounds, mesh.spacing)):
        out[a] = lo + (i + 0.5) * h + 0.5 * h * ref[a]
    return out


def map_to_reference(mesh: Mesh, cell_index, physical_point) -> np.ndarray:
    idx = _check_cell(mesh, cell_index)
    x = np.atleast_1d(np.asarray(physical_point, dtype=float))
    out = np.empty(mesh.dimension)
    for a, (i, (lo, _), h) in enumerate(zip(idx, mesh.bounds, mesh.spacing)):
        out[a] = (x[a] - (lo + (i + 0.5) * h)) * 2.0 / h
    return out


def jacobian(mesh: Mesh) -> float:
    """Determinant of the reference-to-cell map (dx/2, or dx*dy/4 in 2D)."""
    return float(np.prod([h / 2.0 for h in mesh.spacing]))


def legendre_eval(degree: int, point):
    """Orthonormal Legendre polynomials and derivatives.

    Returns ``(values, derivatives)``, each with shape ``np.shape(point) +
    (degree + 1,)``. Normalised so that ``int_{-1}^{1} psi_i psi_j = delta_ij``.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    x = np.asarray(point, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-14):
        raise ValueError("Legendre basis is evaluated on [-1, 1] only")
    p = np.empty(x.shape + (degree + 1,))
    dp = np.empty_like(p)
    p[..., 0] = 1.0
    dp[..., 0] = 0.0
    if degree >= 1:
        p[..., 1] = x
        dp[..., 1] = 1.0
    for n in range(1, degree):
        p[..., n + 1] = ((2 * n + 1) * x * p[..., n] - n * p[..., n - 1]) / (n + 1)
        dp[..., n + 1] = dp[..., n - 1] + (2 * n + 1) * p[..., n]
    scale = np.sqrt((2 * np.arange(degree + 1) + 1) / 2.0)
    return p * scale, dp * scale


@dataclass(frozen=True)
class Quadrature:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.nodes)

    def integrate(self, fn) -> float:
        """Integrate a vectorised callable over [-1, 1]."""
        return float(np.dot(self.weights, fn(self.nodes)))


@lru_cache(maxsize=None)
def _gauss_legendre(n: int, tol: float = 1e-15, max_iter: int = 100):
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (4 * i - 1) / (4 * n + 2))
    for _ in range(max_iter):
        p0, p1 = np.ones_like(x), x.copy()
        for k in range(1, n):
            p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
        # p1 = P_n, p0 = P_{n-1}
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        step = p1 / dp
        x = x - step
        if np.max(np.abs(step)) < tol:
            break
    else:
        raise RuntimeError(f"Gauss-Legendre Newton iteration did not converge for n={n}")
    # refresh derivative at the converged nodes for the weights
    p0, p1 = np.ones_like(x), x.copy()
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    # symmetrise to remove rounding asymmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


def gauss_legendre(point_count: int) -> Quadrature:
    """Gauss-Legendre rule on [-1, 1], exact for degree ``2 * point_count - 1``."""
    if point_count < 1:
        raise ValueError("point_count must be >= 1")
    if point_count == 1:
        return Quadrature(np.zeros(1), np.full(1, 2.0))
    x, w = _gauss_legendre(int(point_count))
    return Quadrature(x.copy(), w.copy())


class Basis:
    """Tabulated orthonormal Legendre basis of degree ``degree``."""

    def __init__(self, degree: int):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        self.degree = int(degree)
        self.size = self.degree + 1
        left, _ = legendre_eval(degree, -1.0)
        right, _ = legendre_eval(degree, 1.0)
        self.left = left
        self.right = right

    def __call__(self, x):
        return legendre_eval(self.degree, x)[0]

    def derivative(self, x):
        return legendre_eval(self.degree, x)[1]

    def table(self, quadrature: Quadrature):
        """Values and derivatives at the quadrature nodes, shape (Q, P)."""
        return legendre_eval(self.degree, quadrature.nodes)
