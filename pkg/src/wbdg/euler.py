"""Compressible Euler physics with an external gravitational potential.

States are arrays with the variable index first:

* conserved ``(rho, rho*vx, E)`` in 1D and ``(rho, rho*vx, rho*vy, E)`` in 2D,
* primitive ``(rho, vx, p)`` in 1D and ``(rho, vx, vy, p)`` in 2D,

followed by any number of trailing (spatial) axes. The ideal-gas closure
``p = (gamma - 1) * rho * eps`` is used throughout.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "AdmissibilityError",
    "to_conserved",
    "to_primitive",
    "pressure",
    "physical_flux",
    "sound_speed",
    "llf_flux",
    "gravity_source",
    "check_admissible",
]


class AdmissibilityError(ValueError):
    """Non-positive density or pressure was encountered.

    ``context`` carries whatever location information the caller had
    (cell index, face, trace values).
    """

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context

    def __str__(self):
        base = super().__str__()
        if not self.context:
            return base
        extra = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{base} ({extra})"


def _first_bad(mask):
    return tuple(int(i) for i in np.argwhere(mask)[0])


def check_admissible(rho, p, where="state", **context):
    """Raise :class:`AdmissibilityError` if any rho or p is not positive."""
    rho = np.asarray(rho)
    p = np.asarray(p)
    if not (np.all(rho > 0.0) and np.all(p > 0.0)):
        bad = ~((rho > 0.0) & (p > 0.0))
        idx = _first_bad(bad)
        raise AdmissibilityError(
            f"inadmissible {where}",
            index=idx,
            rho=float(rho[idx]),
            p=float(p[idx]),
            **context,
        )


def to_conserved(w, gamma, check=True):
    """Primitive -> conserved. ``check=False`` skips the admissibility test."""
    w = np.asarray(w, dtype=float)
    rho, vel, p = w[0], w[1:-1], w[-1]
    if check:
        check_admissible(rho, p, where="primitive state")
    u = np.empty_like(w)
    u[0] = rho
    u[1:-1] = rho * vel
    u[-1] = p / (gamma - 1.0) + 0.5 * rho * np.sum(vel * vel, axis=0)
    return u


def pressure(u, gamma):
    u = np.asarray(u, dtype=float)
    rho, mom, E = u[0], u[1:-1], u[-1]
    return (gamma - 1.0) * (E - 0.5 * np.sum(mom * mom, axis=0) / rho)


def to_primitive(u, gamma, check=True):
    """Conserved -> primitive."""
    u = np.asarray(u, dtype=float)
    rho = u[0]
    w = np.empty_like(u)
    w[0] = rho
    w[1:-1] = u[1:-1] / rho
    w[-1] = (gamma - 1.0) * (u[-1] - 0.5 * np.sum(u[1:-1] * w[1:-1], axis=0))
    if check:
        check_admissible(rho, w[-1], where="conserved state")
    return w


def sound_speed(w, gamma):
    """c_s = sqrt(gamma p / rho) of a primitive state."""
    w = np.asarray(w, dtype=float)
    rho, p = w[0], w[-1]
    check_admissible(rho, p, where="state for sound speed")
    return np.sqrt(gamma * p / rho)


def physical_flux(u, axis, gamma):
    """Euler flux along ``axis`` (0 = x, 1 = y) of a conserved state."""
    u = np.asarray(u, dtype=float)
    if not 0 <= axis < u.shape[0] - 2:
        raise ValueError(f"axis {axis} invalid for a {u.shape[0] - 2}D state")
    rho = u[0]
    p = pressure(u, gamma)
    check_admissible(rho, p, where="state for flux")
    vn = u[1 + axis] / rho
    f = u * vn
    f[1 + axis] += p
    f[-1] += p * vn
    return f


def _flux_speed(u, axis, gamma):
    """Flux, pressure and |v_n| + c_s; unchecked, for the hot loops."""
    rho = u[0]
    p = (gamma - 1.0) * (u[-1] - 0.5 * np.sum(u[1:-1] * u[1:-1], axis=0) / rho)
    vn = u[1 + axis] / rho
    f = u * vn
    f[1 + axis] += p
    f[-1] += p * vn
    return f, p, np.abs(vn) + np.sqrt(gamma * p / rho)


def llf_flux(u_minus, u_plus, normal_axis, sign, gamma):
    """Local Lax-Friedrichs flux across a face normal to ``normal_axis``.

    ``u_minus`` is the trace on the low-coordinate side of the face and
    ``u_plus`` the trace on the high side. The returned flux is oriented
    along ``sign * e_axis``; flipping ``sign`` gives exactly the negated
    vector, which is what the neighbour on the other side uses.
    """
    u_minus = np.asarray(u_minus, dtype=float)
    u_plus = np.asarray(u_plus, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        fm, pm, sm = _flux_speed(u_minus, normal_axis, gamma)
        fp, pp, sp = _flux_speed(u_plus, normal_axis, gamma)
    check_admissible(u_minus[0], pm, where="face trace (minus side)")
    check_admissible(u_plus[0], pp, where="face trace (plus side)")
    alpha = np.maximum(sm, sp)
    h = 0.5 * (fm + fp) - 0.5 * alpha * (u_plus - u_minus)
    return h if sign > 0 else -h


def gravity_source(u, grad_phi):
    """Gravity source ``(0, -rho dPhi, -rho v . grad Phi)``.

    ``u`` is a conserved state, so the energy source is formed from the
    momentum directly (``rho v = u[1:-1]``).
    """
    u = np.asarray(u, dtype=float)
    g = np.asarray(grad_phi, dtype=float)
    s = np.zeros(np.broadcast_shapes(u.shape, (u.shape[0],) + g.shape[1:]))
    s[1:-1] = -u[0] * g
    s[-1] = -np.sum(u[1:-1] * g, axis=0)
    return s
