"""Analytic steady states, gravity fields and perturbations for the benchmarks.

Every evaluator works on coordinate arrays: ``primitive(coords)`` takes a
tuple ``(x,)`` or ``(x, y)`` of equally shaped arrays and returns the
primitive state with the variable axis first. Gravity gradients follow the
same convention, ``gradient(coords, t) -> (d, ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .euler import gravity_source, physical_flux, to_conserved

__all__ = [
    "GravityField",
    "EquilibriumSpec",
    "PerturbationSpec",
    "hydrostatic_1d",
    "hydrostatic_2d",
    "moving_1d",
    "gresho_modified",
    "disc",
    "gaussian_pressure_pulse",
    "planet_gravity",
    "planet_position",
    "orbital_period",
    "tampering",
    "buffer_relaxation",
    "steady_residual",
    "initial_condition",
    "CASES",
    "get_case",
]

GAMMA = 1.4


@dataclass(frozen=True)
class GravityField:
    """Gradient of the gravitational potential, ``gradient(coords, t)``."""

    gradient: Callable
    time_dependent: bool = False

    def __call__(self, coords, t=0.0):
        return self.gradient(coords, t)


@dataclass(frozen=True)
class EquilibriumSpec:
    name: str
    dimension: int
    gamma: float
    bounds: tuple
    primitive: Callable
    gravity: GravityField
    t_final: float
    center: tuple = (0.0, 0.0)
    tamper: Optional[Callable] = None
    buffer: Optional[Callable] = None
    inner_radius: Optional[float] = None
    params: dict = field(default_factory=dict)

    def conserved(self, coords, check=True):
        return to_conserved(self.primitive(coords), self.gamma, check=check)

    def radius(self, coords):
        x, y = coords
        return np.hypot(x - self.center[0], y - self.center[1])


@dataclass(frozen=True)
class PerturbationSpec:
    """Perturbation added on top of an equilibrium.

    ``kind`` is ``"pressure"`` (``shape(coords)`` returns an additive
    pressure field) or ``"gravity"`` (``field`` is the total gravity field
    to use during the run).
    """

    kind: str
    amplitude: float
    shape: Optional[Callable] = None
    field: Optional[GravityField] = None


# --- 1D hydrostatic ---------------------------------------------------------

def hydrostatic_1d(rho0=1.0, p0=1.0, g=1.0, gamma=GAMMA) -> EquilibriumSpec:
    """Isothermal atmosphere in a linear potential on [0, 1]."""
    k = rho0 * g / p0

    def primitive(coords):
        (x,) = coords
        e = np.exp(-k * x)
        return np.stack([rho0 * e, np.zeros_like(x), p0 * e])

    def gradient(coords, t=0.0):
        return np.full((1,) + np.shape(coords[0]), g)

    return EquilibriumSpec(
        name="hydro1d", dimension=1, gamma=gamma, bounds=((0.0, 1.0),),
        primitive=primitive, gravity=GravityField(gradient), t_final=10.0,
        params=dict(rho0=rho0, p0=p0, g=g),
    )


def hydrostatic_2d(rho0=1.0, p0=1.0, g=1.0, gamma=GAMMA) -> EquilibriumSpec:
    """Isothermal atmosphere in the potential g(x + y) on the unit square."""
    k = rho0 * g / p0

    def primitive(coords):
        x, y = coords
        e = np.exp(-k * (x + y))
        z = np.zeros_like(e)
        return np.stack([rho0 * e, z, z, p0 * e])

    def gradient(coords, t=0.0):
        return np.full((2,) + np.shape(coords[0]), g)

    return EquilibriumSpec(
        name="hydro2d", dimension=2, gamma=gamma, bounds=((0.0, 1.0), (0.0, 1.0)),
        primitive=primitive, gravity=GravityField(gradient), t_final=10.0,
        params=dict(rho0=rho0, p0=p0, g=g),
    )


# --- 1D moving equilibrium --------------------------------------------------

def moving_1d(gamma=GAMMA) -> EquilibriumSpec:
    """Manufactured steady flow rho = e^-x, v = e^x, p = e^(-gamma x)."""

    def primitive(coords):
        (x,) = coords
        return np.stack([np.exp(-x), np.exp(x), np.exp(-gamma * x)])

    def gradient(coords, t=0.0):
        (x,) = coords
        return (np.exp(x) * (-np.exp(x) + gamma * np.exp(-gamma * x)))[None]

    return EquilibriumSpec(
        name="moving1d", dimension=1, gamma=gamma, bounds=((0.0, 1.0),),
        primitive=primitive, gravity=GravityField(gradient), t_final=10.0,
    )


# --- modified Gresho vortex -------------------------------------------------

def gresho_modified(alpha=0.01, center=(0.5, 0.5), bounds=((0.0, 1.0), (0.0, 1.0)),
                    gamma=GAMMA, eps_origin=1e-12) -> EquilibriumSpec:
    """Gresho vortex whose pressure also balances the potential alpha / r."""
    xc, yc = center
    log02 = np.log(0.2)

    def v_theta(r):
        return np.where(r < 0.2, 5.0 * r, np.where(r < 0.4, 2.0 - 5.0 * r, 0.0))

    def p_gresho(r):
        rs = np.maximum(r, eps_origin)
        inner = 5.0 + 12.5 * r * r
        mid = 9.0 - 4.0 * log02 + 12.5 * r * r - 20.0 * r + 4.0 * np.log(rs)
        outer = 3.0 + 4.0 * np.log(2.0)
        return np.where(r < 0.2, inner, np.where(r < 0.4, mid, outer))

    def primitive(coords):
        x, y = coords
        dx, dy = x - xc, y - yc
        r = np.hypot(dx, dy)
        rs = np.where(r > 0.0, r, eps_origin)
        vt = v_theta(r)
        # vt / r is finite (5) inside r < 0.2, so the origin needs no special case
        om = np.where(r > 0.0, vt / rs, 0.0)
        p = p_gresho(r) - alpha / rs
        return np.stack([np.ones_like(r), -om * dy, om * dx, p])

    def gradient(coords, t=0.0):
        x, y = coords
        dx, dy = x - xc, y - yc
        r = np.hypot(dx, dy)
        r3 = np.where(r > 0.0, r, 1.0) ** 3
        fac = np.where(r > 0.0, -alpha / r3, 0.0)
        return np.stack([fac * dx, fac * dy])

    return EquilibriumSpec(
        name="gresho", dimension=2, gamma=gamma, bounds=tuple(map(tuple, bounds)),
        primitive=primitive, gravity=GravityField(gradient), t_final=1.0,
        center=tuple(center), params=dict(alpha=alpha),
    )


# --- protoplanetary disc ----------------------------------------------------

def tampering(r, r0=4.2, q=20):
    """Smooth density truncation 1 / (1 + (r/r0)^q)."""
    return 1.0 / (1.0 + (np.asarray(r) / r0) ** q)


def buffer_relaxation(r, r2_mid=15.0):
    """Update damping factor 1 / (1 + exp(r^2 - r2_mid))."""
    r = np.asarray(r, dtype=float)
    return 1.0 / (1.0 + np.exp(r * r - r2_mid))


def orbital_period(r_c=2.2):
    """One Keplerian revolution at radius ``r_c`` around a unit mass."""
    return 2.0 * np.pi * r_c ** 1.5


def planet_position(t, r_c=2.2):
    """Planet on a circular Keplerian orbit starting at (r_c, 0)."""
    om = np.sqrt(1.0 / r_c) / r_c
    return r_c * np.cos(om * t), r_c * np.sin(om * t)


def _star_gradient(softening):
    def gradient(coords, t=0.0):
        x, y = coords
        inv = (x * x + y * y + softening * softening) ** -1.5
        return np.stack([x * inv, y * inv])

    return gradient


def disc(aspect=0.03, softening=0.01, r0=4.2, q=20, rho0=1.0, taper=True,
         r2_buffer=15.0, inner_radius=0.75, rotations=1.0, r_c=2.2,
         gamma=GAMMA) -> EquilibriumSpec:
    """Rotating disc around a softened unit point mass on [-6, 6]^2.

    The potential is ``-1 / sqrt(r^2 + softening^2)`` and the pressure is
    ``aspect^2 rho v_K^2`` with ``v_K^2 = 1 / sqrt(r^2 + softening^2)``. The
    angular velocity comes from the exact radial force balance, so the
    state stays steady with the tampered density and the softened
    potential. Without softening and tampering it reduces to
    ``v_theta^2 = (1 - aspect^2) / r``.
    """
    a2 = aspect * aspect
    eps2 = softening * softening

    def primitive(coords):
        x, y = coords
        r2 = x * x + y * y
        s2 = r2 + eps2
        if taper:
            s = (r2 / (r0 * r0)) ** (q / 2)
            rho = rho0 / (1.0 + s)
            # rho' / (r rho), written without dividing by r
            dlnrho = -q * (r2 ** (q / 2 - 1) / r0 ** q) / (1.0 + s)
        else:
            rho = np.full_like(r2, rho0)
            dlnrho = 0.0
        inv_s = 1.0 / np.sqrt(s2)
        p = a2 * rho * inv_s
        omega2 = (1.0 - a2) * inv_s ** 3 + a2 * dlnrho * inv_s
        om = np.sqrt(omega2)
        return np.stack([rho, -om * y, om * x, p])

    return EquilibriumSpec(
        name="disc", dimension=2, gamma=gamma, bounds=((-6.0, 6.0), (-6.0, 6.0)),
        primitive=primitive, gravity=GravityField(_star_gradient(softening)),
        t_final=rotations * orbital_period(r_c),
        tamper=(lambda r: tampering(r, r0, q)) if taper else None,
        buffer=lambda r: buffer_relaxation(r, r2_buffer),
        inner_radius=inner_radius,
        params=dict(aspect=aspect, softening=softening, r_c=r_c, r0=r0, q=q),
    )


def planet_gravity(eta, r_c=2.2, softening=0.01, star_softening=0.01) -> GravityField:
    """Total gravity of the softened star plus an orbiting planet of mass ``eta``."""
    star = _star_gradient(star_softening)
    eps2 = softening * softening

    def gradient(coords, t=0.0):
        g = star(coords)
        if eta == 0.0:
            return g
        x, y = coords
        xp, yp = planet_position(t, r_c)
        dx, dy = x - xp, y - yp
        inv = eta * (dx * dx + dy * dy + eps2) ** -1.5
        g[0] += dx * inv
        g[1] += dy * inv
        return g

    return GravityField(gradient, time_dependent=eta != 0.0)


# --- perturbations ----------------------------------------------------------

def gaussian_pressure_pulse(center, eta, width=0.01, scale=1.0) -> PerturbationSpec:
    """Additive pressure pulse ``eta * exp(-scale |x - center|^2 / width)``."""
    if eta < 0:
        raise ValueError("pulse amplitude must be >= 0")
    c = np.atleast_1d(np.asarray(center, dtype=float))

    def shape(coords):
        d2 = sum((xi - ci) ** 2 for xi, ci in zip(coords, c))
        return eta * np.exp(-scale * d2 / width)

    return PerturbationSpec("pressure", float(eta), shape=shape)


def initial_condition(spec: EquilibriumSpec, perturbation: Optional[PerturbationSpec] = None):
    """Pointwise primitive evaluator of the (possibly perturbed) initial data."""
    if perturbation is None or perturbation.kind != "pressure" or perturbation.amplitude == 0.0:
        return spec.primitive

    def primitive(coords):
        w = spec.primitive(coords)
        w[-1] = w[-1] + perturbation.shape(coords)
        return w

    return primitive


# --- verification helper ----------------------------------------------------

def steady_residual(spec: EquilibriumSpec, coords, h=1e-3, t=0.0):
    """Pointwise ``div f(w_eq) - s(w_eq)`` by 4th-order central differences."""
    coords = tuple(np.asarray(c, dtype=float) for c in coords)
    res = -gravity_source(spec.conserved(coords), spec.gravity(coords, t))
    for axis in range(spec.dimension):
        def f_at(shift):
            shifted = tuple(c + shift if a == axis else c for a, c in enumerate(coords))
            return physical_flux(spec.conserved(shifted), axis, spec.gamma)

        res += (-f_at(2 * h) + 8 * f_at(h) - 8 * f_at(-h) + f_at(-2 * h)) / (12 * h)
    return res


CASES = {
    "hydro1d": hydrostatic_1d,
    "hydro2d": hydrostatic_2d,
    "moving1d": moving_1d,
    "gresho": gresho_modified,
    "disc": disc,
}

# pulse centres used with each case
PULSE_CENTERS = {
    "hydro1d": (0.5,),
    "hydro2d": (0.3, 0.3),
    "moving1d": (0.3,),
}


def get_case(name: str, **kwargs) -> EquilibriumSpec:
    try:
        factory = CASES[name]
    except KeyError:
        raise ValueError(f"unknown case {name!r}; choose from {sorted(CASES)}") from None
    return factory(**kwargs)
