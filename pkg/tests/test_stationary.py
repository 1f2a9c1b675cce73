"""Scattering amplitudes against a direct linear solve and physical invariants."""

import numpy as np
import pytest

from halfspace_rabi.model import CESIUM, LaserParams, critical_wavenumber
from halfspace_rabi.stationary import (
    channel_wavenumbers,
    dressed_eigenpairs,
    eigenfunction,
    flux_partition,
    scattering_amplitudes,
)

OM_REF = 166.5e6  # rad/s


def _matching_solve(k, params, consts, laser_phase=0.0):
    """Solve the x=0 value/slope matching system directly (test oracle)."""
    kp, km, q = channel_wavenumbers(np.array([k]), params, consts)
    kp, km, q = kp[0], km[0], q[0]
    _, _, bp, bm = dressed_eigenpairs(params, laser_phase)
    a = np.array(
        [
            [1.0, 0.0, -1.0, -1.0],
            [0.0, 1.0, -bp, -bm],
            [-k, 0.0, -kp, -km],
            [0.0, -q, -kp * bp, -km * bm],
        ],
        dtype=complex,
    )
    rhs = np.array([-1.0, 0.0, -k, 0.0], dtype=complex)
    r1, r2, cp, cm = np.linalg.solve(a, rhs)
    return r1, r2, cp, cm


def test_amplitudes_match_direct_linear_solve():
    rng = np.random.default_rng(42)
    for _ in range(40):
        om = OM_REF * rng.uniform(0.3, 3.0)
        de = om * rng.choice([0.0, 0.7, -0.7])
        ga = om * rng.choice([0.0, 0.2])
        p = LaserParams(omega_rabi=om, detuning=de, gamma=ga)
        kc = critical_wavenumber(p, CESIUM)
        k = kc * 10.0 ** rng.uniform(-1.3, 1.3)
        phase = rng.choice([0.0, 1.234])
        sol = scattering_amplitudes(np.array([k]), p, CESIUM, laser_phase=phase)
        r1, r2, cp, cm = _matching_solve(k, p, CESIUM, laser_phase=phase)
        scale = max(abs(r1), abs(r2), abs(cp), abs(cm), 1.0)
        assert abs(sol.r1[0] - r1) < 1e-11 * scale
        assert abs(sol.r2[0] - r2) < 1e-11 * scale
        assert abs(sol.c_plus[0] - cp) < 1e-11 * scale
        assert abs(sol.c_minus[0] - cm) < 1e-11 * scale


def test_flux_conservation_closed_model():
    rng = np.random.default_rng(3)
    for de_frac in (0.0, 0.6):
        p = LaserParams(omega_rabi=OM_REF, detuning=de_frac * OM_REF)
        kc = critical_wavenumber(p, CESIUM)
        k = kc * 10.0 ** rng.uniform(-3.0, 1.5, size=300)
        sol = scattering_amplitudes(k, p, CESIUM)
        rg, re, tp, tm = flux_partition(sol, p)
        np.testing.assert_allclose(rg + re + tp + tm, 1.0, rtol=0.0, atol=1e-10)


def test_dressed_pair_invariants():
    rng = np.random.default_rng(11)
    for _ in range(25):
        p = LaserParams(
            omega_rabi=rng.uniform(0.5, 3.0),
            detuning=rng.uniform(-2.0, 2.0),
            gamma=rng.choice([0.0, 0.8]),
        )
        phase = rng.uniform(0.0, 2.0)
        lp, lm, bp, bm = dressed_eigenpairs(p, laser_phase=phase)
        om = p.omega_rabi
        assert abs(bp * bm + np.exp(2j * phase)) < 1e-12
        assert abs(lp * lm + 0.25 * om * om) < 1e-12 * om * om
        assert abs(lp + lm + p.complex_detuning) < 1e-12 * abs(p.complex_detuning + om)


def test_field_and_slope_continuous_at_edge():
    for ga_frac in (0.0, 0.3):
        p = LaserParams(omega_rabi=OM_REF, detuning=0.4 * OM_REF, gamma=ga_frac * OM_REF)
        kc = critical_wavenumber(p, CESIUM)
        for kfrac in (0.3, 1.7, 8.0):
            k = kfrac * kc
            sol = scattering_amplitudes(np.array([k]), p, CESIUM, laser_phase=0.6)
            r1, r2 = sol.r1[0], sol.r2[0]
            cp, cm = sol.c_plus[0], sol.c_minus[0]
            bp, bm = sol.b_plus, sol.b_minus
            kp, km, q = sol.k_plus[0], sol.k_minus[0], sol.q[0]
            # values
            assert abs((1.0 + r1) - (cp + cm)) < 1e-12
            assert abs(r2 - (cp * bp + cm * bm)) < 1e-12
            # slopes
            assert abs(1j * k * (1.0 - r1) - 1j * (kp * cp + km * cm)) < 1e-12 * k
            assert abs(-1j * q * r2 - 1j * (kp * bp * cp + km * bm * cm)) < 1e-12 * k


def _fd_residual(k, params, side, x0, n=9):
    """Max relative Schrodinger residual via 5-point second differences."""
    hbar, m = CESIUM.hbar, CESIUM.mass
    kmax = max(
        abs(k),
        float(np.abs(channel_wavenumbers(np.array([k]), params, CESIUM)[0][0])),
        float(np.abs(channel_wavenumbers(np.array([k]), params, CESIUM)[2][0])),
    )
    h = 2.0 * np.pi / (400.0 * kmax)
    energy = hbar * hbar * k * k / (2.0 * m)
    worst = 0.0
    for i in range(n):
        xc = x0 + side * (i + 2) * 37.0 * h
        x = xc + h * np.arange(-2.0, 3.0)
        phi = eigenfunction(k, x, params, CESIUM)
        d2 = (-phi[:, 4] + 16 * phi[:, 3] - 30 * phi[:, 2] + 16 * phi[:, 1] - phi[:, 0]) / (
            12.0 * h * h
        )
        theta = 1.0 if side > 0 else 0.0
        v12 = 0.5 * hbar * params.omega_rabi * theta
        d = params.complex_detuning
        h1 = -(hbar**2) / (2 * m) * d2[0] + v12 * phi[1, 2]
        h2 = -(hbar**2) / (2 * m) * d2[1] + v12 * phi[0, 2] - hbar * d * phi[1, 2]
        scale = energy * max(np.abs(phi[0, 2]), np.abs(phi[1, 2]), 1e-3)
        worst = max(
            worst,
            abs(h1 - energy * phi[0, 2]) / scale,
            abs(h2 - energy * phi[1, 2]) / scale,
        )
    return worst


def test_eigenfunction_solves_coupled_schrodinger():
    cases = [
        (LaserParams(OM_REF, 0.0, 0.0), 0.6),
        (LaserParams(OM_REF, 0.0, 0.0), 2.3),
        (LaserParams(OM_REF, 0.5 * OM_REF, 0.0), 1.4),
        (LaserParams(OM_REF, 0.2 * OM_REF, 0.25 * OM_REF), 3.0),
    ]
    for p, kfrac in cases:
        k = kfrac * critical_wavenumber(p, CESIUM)
        for side, x0 in ((-1, 0.0), (1, 0.0)):
            assert _fd_residual(k, p, side, x0) < 2e-5


def test_branch_selection_and_gamma_continuity():
    p = LaserParams(omega_rabi=OM_REF)
    kc = critical_wavenumber(p, CESIUM)
    kp, km, q = channel_wavenumbers(np.array([0.4 * kc, 2.0 * kc]), p, CESIUM)
    # below threshold the slow channel is exactly evanescent
    assert km[0].real == 0.0 and km[0].imag > 0.0
    assert km[1].imag == 0.0 and km[1].real > 0.0
    assert kp.imag.max() == 0.0 and q.imag.max() == 0.0

    pg = LaserParams(omega_rabi=OM_REF, gamma=1e-5 * OM_REF)
    k = np.array([0.4 * kc, 2.0 * kc, 9.0 * kc])
    s0 = scattering_amplitudes(k, p, CESIUM)
    sg = scattering_amplitudes(k, pg, CESIUM)
    assert np.all(sg.k_plus.imag >= 0.0)
    assert np.all(sg.k_minus.imag >= 0.0)
    assert np.all(sg.q.imag >= 0.0)
    for a, b in ((s0.r1, sg.r1), (s0.r2, sg.r2), (s0.c_plus, sg.c_plus), (s0.c_minus, sg.c_minus)):
        np.testing.assert_allclose(a, b, atol=1e-3)


def test_reflection_and_transmission_limits():
    p = LaserParams(omega_rabi=OM_REF)
    kc = critical_wavenumber(p, CESIUM)

    lo = scattering_amplitudes(np.array([1e-5 * kc]), p, CESIUM)
    assert abs(lo.r1[0] + 1.0) < 1e-3  # total reflection, hard-wall phase
    assert np.all(np.abs(lo.r1) <= 1.0 + 1e-12)

    hi = scattering_amplitudes(np.array([100.0 * kc]), p, CESIUM)
    assert abs(hi.r1[0]) < 1e-3
    assert abs(hi.c_plus[0] - 0.5) < 1e-2  # resonant splitting into both channels
    assert abs(hi.c_minus[0] - 0.5) < 1e-2

    # saturation amplitude behind the edge: |c+ b+|^2 -> (k/k_c)^2 for k << k_c
    k = np.array([1e-3 * kc])
    s = scattering_amplitudes(k, p, CESIUM)
    sat = np.abs(s.c_plus[0] * s.b_plus) ** 2
    assert sat * kc * kc / (k[0] * k[0]) == pytest.approx(1.0, rel=1e-2)


def test_laser_phase_transformations():
    p = LaserParams(omega_rabi=OM_REF, detuning=0.3 * OM_REF)
    kc = critical_wavenumber(p, CESIUM)
    k = np.array([1.3 * kc])
    phi = 0.77
    s0 = scattering_amplitudes(k, p, CESIUM, laser_phase=0.0)
    sp = scattering_amplitudes(k, p, CESIUM, laser_phase=phi)
    assert abs(sp.r2[0] - s0.r2[0] * np.exp(1j * phi)) < 1e-13
    assert abs(sp.r1[0] - s0.r1[0]) < 1e-13
    assert abs(sp.c_plus[0] - s0.c_plus[0]) < 1e-13
    assert abs(sp.b_plus - s0.b_plus * np.exp(1j * phi)) < 1e-13

    x = np.linspace(-2e-6, 2e-6, 101)
    f0 = eigenfunction(float(k[0]), x, p, CESIUM, laser_phase=0.0)
    fp = eigenfunction(float(k[0]), x, p, CESIUM, laser_phase=phi)
    np.testing.assert_allclose(fp[0], f0[0], atol=1e-13)
    np.testing.assert_allclose(fp[1], f0[1] * np.exp(1j * phi), atol=1e-13)


def test_excited_density_saturates_below_threshold():
    p = LaserParams(omega_rabi=OM_REF)
    kc = critical_wavenumber(p, CESIUM)
    k = 0.5 * kc
    s = scattering_amplitudes(np.array([k]), p, CESIUM)
    x = np.array([20.0 / kc, 27.0 / kc, 41.0 / kc])
    phi = eigenfunction(k, x, p, CESIUM)
    dens = np.abs(phi[1]) ** 2
    expected = np.abs(s.c_plus[0] * s.b_plus) ** 2 / (2.0 * np.pi)
    np.testing.assert_allclose(dens, expected, rtol=1e-6)

    # vector-k shape contract
    batch = eigenfunction(np.array([0.5 * kc, 2.0 * kc]), x, p, CESIUM)
    assert batch.shape == (2, 2, 3)
    np.testing.assert_allclose(batch[0, 1], phi[1], atol=0.0)
