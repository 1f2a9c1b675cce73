"""Exact scattering states of the half-space coupling step.

For energy hbar^2 k^2/2m incident from the left in the ground state,
the wavefunction is a plane wave plus a reflected ground wave and a
reflected excited wave for x < 0, and a superposition of the two
dressed-channel waves for x > 0:

    x <= 0:  ( e^{ikx} + r1 e^{-ikx} ,  r2 e^{-iqx} ) / sqrt(2 pi)
    x >= 0:  ( c+ (1, b+) e^{ik+ x} + c- (1, b-) e^{ik- x} ) / sqrt(2 pi)

with q^2 = k^2 + (2m/hbar)(delta + i gamma/2) and
k±^2 = k^2 - 2 m lambda±/hbar, where lambda± are the dressed-level
shifts of the coupled internal Hamiltonian.  All root branches take
Im >= 0 so that closed channels decay away from the edge.  Amplitudes
follow from matching value and slope of both components at x = 0; the
closed forms below are pinned against a direct linear solve of the
matching system in the tests.

The slow channel closes below k_c = sqrt(m (Omega' - delta)/hbar).
That threshold separates spatially oscillating from saturated excited
density behind the edge, and it is the single scale that controls
every suppression effect in this package.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import CESIUM, LaserParams, PhysicalConstants

__all__ = [
    "ScatteringSolution",
    "channel_wavenumbers",
    "dressed_eigenpairs",
    "eigenfunction",
    "flux_partition",
    "scattering_amplitudes",
]


def dressed_eigenpairs(params: LaserParams, laser_phase: float = 0.0):
    """Level shifts and internal amplitudes of the dressed channels.

    Returns (lam_plus, lam_minus, b_plus, b_minus): eigenvalues of the
    coupling matrix [[0, Omega/2 e^{-i phi}], [Omega/2 e^{i phi}, -d]]
    (angular frequencies, d = delta + i gamma/2) and the excited/ground
    amplitude ratio of each eigenvector (1, b).  lam_plus is the lower
    shift; its channel is open at every k.  b+ b- = -e^{2i phi}, so the
    two internal vectors stay orthogonal for gamma = 0.
    """
    d = params.complex_detuning
    om = params.omega_rabi
    s = np.sqrt(d * d + om * om)
    lam_p = -0.5 * (d + s)
    lam_m = -0.5 * (d - s)
    phase = np.exp(1j * laser_phase)
    if om > 0:
        b_p = 2.0 * lam_p * phase / om
        b_m = 2.0 * lam_m * phase / om
    else:  # decoupled limit, eigenvectors are the bare states
        b_p, b_m = 0.0 + 0.0j, np.inf + 0.0j
    return lam_p, lam_m, b_p, b_m


def _upper_half_sqrt(z2):
    """sqrt with Im >= 0, exact real/imaginary parts for real input."""
    z2 = np.asarray(z2)
    if np.isrealobj(z2):
        pos = z2 >= 0.0
        mag = np.sqrt(np.abs(z2))
        return np.where(pos, mag, 0.0) + 1j * np.where(pos, 0.0, mag)
    w = np.sqrt(z2)
    return np.where(w.imag < 0.0, -w, w)


def channel_wavenumbers(k, params: LaserParams, consts: PhysicalConstants = CESIUM):
    """Wavenumbers (k_plus, k_minus, q) of the outgoing channels at incident k.

    Each is the Im >= 0 root of k^2 shifted by the corresponding
    channel energy, so closed channels are evanescent.
    """
    k = np.asarray(k, dtype=float)
    two_m = 2.0 * consts.mass / consts.hbar
    lam_p, lam_m, _, _ = dressed_eigenpairs(params)
    if params.gamma == 0.0:
        kp2 = k * k - two_m * lam_p.real
        km2 = k * k - two_m * lam_m.real
        q2 = k * k + two_m * params.detuning
    else:
        kp2 = k * k - two_m * lam_p
        km2 = k * k - two_m * lam_m
        q2 = k * k + two_m * params.complex_detuning
    return _upper_half_sqrt(kp2), _upper_half_sqrt(km2), _upper_half_sqrt(q2)


@dataclass(frozen=True)
class ScatteringSolution:
    """Amplitudes and channel data of the scattering state, vectorized over k."""

    k: np.ndarray
    k_plus: np.ndarray
    k_minus: np.ndarray
    q: np.ndarray
    lam_plus: complex
    lam_minus: complex
    b_plus: complex
    b_minus: complex
    r1: np.ndarray  # reflected ground amplitude
    r2: np.ndarray  # reflected excited amplitude
    c_plus: np.ndarray  # open dressed-channel amplitude
    c_minus: np.ndarray  # slow dressed-channel amplitude
    denom: np.ndarray


def scattering_amplitudes(
    k,
    params: LaserParams,
    consts: PhysicalConstants = CESIUM,
    laser_phase: float = 0.0,
) -> ScatteringSolution:
    """Closed-form matching amplitudes at the field edge for incident k > 0."""
    k = np.asarray(k, dtype=float)
    kp, km, q = channel_wavenumbers(k, params, consts)
    lam_p, lam_m, b_p, b_m = dressed_eigenpairs(params, laser_phase)

    denom = (k + km) * (q + kp) * lam_p - (k + kp) * (q + km) * lam_m
    scale = np.abs((k + km) * (q + kp) * lam_p) + np.abs((k + kp) * (q + km) * lam_m)
    if np.any(np.abs(denom) < 1.0e-12 * scale):
        warnings.warn("matching denominator nearly singular", RuntimeWarning, stacklevel=2)

    c_p = -2.0 * k * (q + km) * lam_m / denom
    c_m = 2.0 * k * (q + kp) * lam_p / denom
    r1 = (lam_p * (q + kp) * (k - km) - lam_m * (q + km) * (k - kp)) / denom
    r2 = k * (km - kp) * params.omega_rabi * np.exp(1j * laser_phase) / denom

    return ScatteringSolution(
        k=k,
        k_plus=kp,
        k_minus=km,
        q=q,
        lam_plus=lam_p,
        lam_minus=lam_m,
        b_plus=b_p,
        b_minus=b_m,
        r1=r1,
        r2=r2,
        c_plus=c_p,
        c_minus=c_m,
        denom=denom,
    )


def flux_partition(sol: ScatteringSolution, params: LaserParams):
    """Outgoing probability-flux fractions for the closed (gamma = 0) model.

    Returns (refl_ground, refl_excited, trans_plus, trans_minus), each
    normalized to the incident flux; closed channels contribute zero.
    The dressed channels carry no interference flux because their
    internal vectors satisfy 1 + b+ b- = 0.
    """
    if params.gamma != 0.0:
        raise ValueError("flux partition is defined for gamma = 0 only")
    k = sol.k
    rg = np.abs(sol.r1) ** 2
    re = (sol.q.real / k) * np.abs(sol.r2) ** 2
    wp = 1.0 + np.abs(sol.b_plus) ** 2
    wm = 1.0 + np.abs(sol.b_minus) ** 2
    tp = (sol.k_plus.real / k) * wp * np.abs(sol.c_plus) ** 2
    tm = (sol.k_minus.real / k) * wm * np.abs(sol.c_minus) ** 2
    return rg, re, tp, tm


def eigenfunction(
    k,
    x,
    params: LaserParams,
    consts: PhysicalConstants = CESIUM,
    laser_phase: float = 0.0,
    sol: ScatteringSolution | None = None,
):
    """Scattering eigenfunction on a position grid.

    Scalar k gives shape (2, len(x)); a k vector gives (nk, 2, len(x)).
    Components are (ground, excited) with 1/sqrt(2 pi) delta-in-k
    normalization.  Evaluation is piecewise across x = 0; both value
    and slope are continuous there by construction of the amplitudes.
    """
    k_arr = np.atleast_1d(np.asarray(k, dtype=float))
    x = np.asarray(x, dtype=float)
    if sol is None:
        sol = scattering_amplitudes(k_arr, params, consts, laser_phase)

    kc = k_arr[:, None]
    neg = x <= 0.0
    pos = ~neg

    out = np.zeros((k_arr.size, 2, x.size), dtype=complex)
    norm = 1.0 / np.sqrt(2.0 * np.pi)

    if neg.any():
        out[:, 0, neg] = norm * (
            np.exp(1j * kc * x[neg]) + sol.r1[:, None] * np.exp(-1j * kc * x[neg])
        )
        out[:, 1, neg] = norm * sol.r2[:, None] * np.exp(-1j * sol.q[:, None] * x[neg])
    if pos.any():
        ep = np.exp(1j * sol.k_plus[:, None] * x[pos])
        em = np.exp(1j * sol.k_minus[:, None] * x[pos])
        out[:, 0, pos] = norm * (sol.c_plus[:, None] * ep + sol.c_minus[:, None] * em)
        out[:, 1, pos] = norm * (
            sol.c_plus[:, None] * sol.b_plus * ep + sol.c_minus[:, None] * sol.b_minus * em
        )
    if np.ndim(k) == 0:
        return out[0]
    return out
