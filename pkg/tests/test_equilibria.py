import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wbdg.equilibria import (
    CASES,
    buffer_relaxation,
    disc,
    gaussian_pressure_pulse,
    get_case,
    gresho_modified,
    hydrostatic_1d,
    hydrostatic_2d,
    initial_condition,
    moving_1d,
    orbital_period,
    planet_gravity,
    planet_position,
    steady_residual,
    tampering,
)

G = 1.4


def fd_balance(spec, pts, h=1e-4):
    """Independent steady-residual oracle from hand-written Euler fluxes.

    Fourth-order central differences of the closed-form fluxes minus the
    gravity source, all written out component by component.
    """
    g = spec.gamma

    def flux(coords, axis):
        w = spec.primitive(coords)
        rho, p = w[0], w[-1]
        v = w[1:-1]
        E = p / (g - 1.0) + 0.5 * rho * np.sum(v * v, axis=0)
        vn = v[axis]
        mom = [rho * vi * vn for vi in v]
        mom[axis] = mom[axis] + p
        return np.stack([rho * vn] + mom + [(E + p) * vn])

    coords = tuple(np.asarray(c, float) for c in pts)
    w = spec.primitive(coords)
    grad = spec.gravity(coords, 0.0)
    rho, v = w[0], w[1:-1]
    res = np.zeros_like(w)
    res[1:-1] += rho * grad
    res[-1] += rho * np.sum(v * grad, axis=0)
    for axis in range(spec.dimension):
        def f(s):
            return flux(tuple(c + s if a == axis else c for a, c in enumerate(coords)), axis)

        res += (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)
    return res


# --- hydrostatic ----------------------------------------------------------

def test_hydro1d_values():
    s = hydrostatic_1d()
    w = s.primitive((np.array([0.0, 1.0]),))
    assert w[0, 0] == 1.0 and w[2, 0] == 1.0
    assert w[0, 1] == pytest.approx(0.36787944, abs=1e-8)
    assert s.t_final == 10.0 and s.bounds == ((0.0, 1.0),)


def test_hydro1d_exact_cancellation():
    s = hydrostatic_1d()
    x = np.linspace(0, 1, 11)
    w = s.primitive((x,))
    # dp/dx = -e^-x analytically
    np.testing.assert_allclose(-np.exp(-x) + w[0] * s.gravity((x,))[0], 0.0, atol=1e-15)


def test_hydro2d_values():
    s = hydrostatic_2d()
    w = s.primitive((np.array([0.5, 1.0]), np.array([0.5, 1.0])))
    assert w[0, 0] == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert w[0, 1] == pytest.approx(0.13533528, abs=1e-8)
    np.testing.assert_array_equal(w[1:3], 0.0)


# --- moving ----------------------------------------------------------------

def test_moving_mass_flux_constant():
    x = np.linspace(0, 1, 33)
    w = moving_1d().primitive((x,))
    np.testing.assert_allclose(w[0] * w[1], 1.0, rtol=1e-15)


def test_moving_pressure_at_one():
    assert moving_1d().primitive((np.array([1.0]),))[2, 0] == pytest.approx(0.24659696, abs=1e-8)


def test_moving_momentum_balance_at_03():
    s = moving_1d()
    r = fd_balance(s, (np.array([0.3]),))
    assert abs(r[1, 0]) < 1e-10


# --- Gresho ----------------------------------------------------------------

def _gresho_at_radius(spec, r):
    return spec.primitive((np.array([0.5 + r]), np.array([0.5])))[:, 0]


def test_gresho_branch_continuity():
    s = gresho_modified()
    lo = _gresho_at_radius(s, 0.2 - 1e-13)
    hi = _gresho_at_radius(s, 0.2)
    assert lo[2] == pytest.approx(1.0, abs=1e-11)
    assert hi[2] == pytest.approx(1.0, abs=1e-12)
    assert hi[3] == pytest.approx(lo[3], abs=1e-10)


def test_gresho_pressure_at_half():
    w = _gresho_at_radius(gresho_modified(), 0.5)
    assert w[3] == pytest.approx(3 + 4 * math.log(2) - 0.02, abs=1e-12)
    assert w[3] == pytest.approx(5.75258872, abs=1e-8)


def test_gresho_balance_at_03():
    s = gresho_modified()
    r = fd_balance(s, (np.array([0.8]), np.array([0.5])), h=1e-5)
    assert np.max(np.abs(r)) < 1e-8


def test_gresho_origin_is_finite():
    w = gresho_modified().primitive((np.array([0.5]), np.array([0.5])))
    assert np.all(np.isfinite(w))
    assert w[1, 0] == 0.0 and w[2, 0] == 0.0


# --- disc ------------------------------------------------------------------

def test_disc_keplerian_limit():
    # without softening and taper the rotation law reduces to (1 - a^2) / r
    s = disc(softening=0.0, taper=False)
    w = s.primitive((np.array([1.0]), np.array([0.0])))
    assert w[2, 0] == pytest.approx(0.99954990, abs=1e-8)
    assert w[3, 0] / w[0, 0] == pytest.approx(9e-4, rel=1e-14)


def test_disc_default_close_to_keplerian():
    w = get_case("disc").primitive((np.array([1.0]), np.array([0.0])))
    assert w[2, 0] == pytest.approx(math.sqrt(0.9991), rel=1e-4)
    assert w[3, 0] / w[0, 0] == pytest.approx(9e-4, rel=1e-4)


def test_tampering_half_at_r0():
    assert tampering(4.2) == 0.5


def test_disc_geometry():
    s = get_case("disc")
    assert s.bounds == ((-6.0, 6.0), (-6.0, 6.0))
    assert s.inner_radius == 0.75
    assert buffer_relaxation(np.sqrt(15.0)) == pytest.approx(0.5)


def test_planet_gravity_star_only():
    g = planet_gravity(0.0)((np.array([1.0]), np.array([0.0])), 0.0)
    assert g[0, 0] == pytest.approx(1.0 / (1 + 1e-4) ** 1.5, rel=1e-15)
    assert g[0, 0] == pytest.approx(0.99985, abs=1e-5)
    assert g[1, 0] == 0.0


def test_planet_starts_on_x_axis():
    np.testing.assert_allclose(planet_position(0.0), (2.2, 0.0))


def test_orbital_period():
    assert orbital_period(2.2) == pytest.approx(2 * math.pi * 2.2**1.5, rel=1e-15)
    # quoted as "about 20.504"; the closed form gives 20.5028
    assert orbital_period(2.2) == pytest.approx(20.504, abs=2e-3)


def test_planet_returns_after_one_period():
    np.testing.assert_allclose(planet_position(orbital_period(2.2)), (2.2, 0.0), atol=1e-12)


def test_planet_gravity_points_to_planet():
    x, y = np.array([2.2]), np.array([0.1])
    g_star = planet_gravity(0.0)((x, y), 0.0)
    g = planet_gravity(1e-3)((x, y), 0.0)
    d = g - g_star
    # gradient of -eta / r_p points away from the planet
    assert d[0, 0] == pytest.approx(0.0, abs=1e-15)
    assert d[1, 0] == pytest.approx(1e-3 * 0.1 / (0.01 + 1e-4) ** 1.5, rel=1e-13)


# --- pulses ----------------------------------------------------------------

def test_pulse_peak_and_decay():
    p = gaussian_pressure_pulse((0.5,), 1e-2)
    assert p.shape((np.array([0.5]),))[0] == 1e-2
    p = gaussian_pressure_pulse((0.5,), 1e-8)
    assert p.shape((np.array([0.6]),))[0] == pytest.approx(1e-8 * math.exp(-1.0), rel=1e-12)


def test_zero_amplitude_is_bitwise_equilibrium():
    for name in ("hydro1d", "moving1d", "hydro2d"):
        s = get_case(name)
        coords = tuple(np.random.default_rng(1).random((s.dimension, 50)))
        ic = initial_condition(s, gaussian_pressure_pulse((0.5,) * s.dimension, 0.0))
        np.testing.assert_array_equal(ic(coords), s.primitive(coords))


def test_negative_amplitude_rejected():
    with pytest.raises(ValueError):
        gaussian_pressure_pulse((0.5,), -1.0)


def test_unknown_case():
    with pytest.raises(ValueError):
        get_case("sedov")


# --- balance properties ----------------------------------------------------

def _random_points(spec, rng, n=100):
    if spec.name == "disc":
        # the inner disc is overwritten by the equilibrium during runs
        r = rng.uniform(0.5, 5.5, n)
        th = rng.uniform(0, 2 * np.pi, n)
        return (r * np.cos(th), r * np.sin(th))
    pts = []
    for lo, hi in spec.bounds:
        pts.append(rng.uniform(lo + 0.01, hi - 0.01, n))
    if spec.name == "gresho":
        r = np.hypot(pts[0] - 0.5, pts[1] - 0.5)
        keep = (np.abs(r - 0.2) > 0.01) & (np.abs(r - 0.4) > 0.01) & (r > 0.05)
        pts = [p[keep] for p in pts]
    return tuple(pts)


@pytest.mark.parametrize("name", sorted(CASES))
def test_steady_residual_vanishes(name):
    spec = get_case(name)
    pts = _random_points(spec, np.random.default_rng(7))
    h = 1e-5 if name in ("gresho", "disc") else 1e-3
    r = fd_balance(spec, pts, h=h)
    assert np.max(np.abs(r)) < 1e-8
    # the package helper agrees with the hand-written oracle
    np.testing.assert_allclose(steady_residual(spec, pts, h=h), r, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 6.0))
def test_taper_and_buffer_smooth(r):
    h = 1e-4
    for f in (tampering, buffer_relaxation):
        d2 = (f(r + h) - 2 * f(r) + f(r - h)) / h**2
        assert abs(d2) < 100.0
