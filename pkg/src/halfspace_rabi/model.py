"""Parameters, derived scales, and the atom-at-rest solutions.

The internal dynamics of a resting atom inside the field is the anchor
for everything else: the exact two-channel propagator here doubles as
the potential half-step of the grid propagator, and the optical Bloch
equations provide the ensemble-level oracle for the jump Monte Carlo.

Conventions: the ground amplitude is component 1, the excited amplitude
component 2, both in the frame rotating at the laser frequency.  The
detuning enters the Hamiltonian as -hbar*delta on the excited diagonal;
spontaneous decay at rate gamma appears in the conditional (no-jump)
evolution as -i*hbar*gamma/2 on the same entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

__all__ = [
    "CESIUM",
    "BlochSolution",
    "DerivedScales",
    "LaserParams",
    "PhysicalConstants",
    "atrest_propagator",
    "bloch_at_rest",
    "conditional_p2_at_rest",
    "critical_velocity",
    "critical_wavenumber",
    "derived_scales",
    "omega_prime",
    "rabi_at_rest",
    "steady_state_p2",
    "transition_velocity",
    "transition_wavenumber",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants and the atom/laser species scales."""

    hbar: float = 1.054571817e-34  # J s
    mass: float = 2.2069e-25  # kg, cesium-133
    k_laser: float = 2.0 * np.pi / 852.0e-9  # 1/m, Cs D2 line

    def __post_init__(self) -> None:
        if self.hbar <= 0 or self.mass <= 0 or self.k_laser <= 0:
            raise ValueError("constants must be positive")

    @property
    def recoil_velocity(self) -> float:
        """Speed change from one photon momentum, hbar*k_L/m."""
        return self.hbar * self.k_laser / self.mass


CESIUM = PhysicalConstants()


@dataclass(frozen=True)
class LaserParams:
    """Coupling parameters of the half-space field.

    omega_rabi : float
        Rabi frequency Omega in rad/s.  Nonnegative.
    detuning : float
        Laser-atom detuning delta in rad/s.  Positive means the laser
        is above the atomic resonance in the convention used here.
    gamma : float
        Spontaneous emission rate in 1/s.  Zero gives the closed
        (Hermitian) model.
    """

    omega_rabi: float
    detuning: float = 0.0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if self.omega_rabi < 0:
            raise ValueError("omega_rabi must be nonnegative")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")

    @property
    def complex_detuning(self) -> complex:
        """delta + i*gamma/2, the no-jump replacement for the detuning."""
        return self.detuning + 0.5j * self.gamma


def omega_prime(params: LaserParams) -> float:
    """Generalized Rabi frequency sqrt(Omega^2 + delta^2)."""
    return float(np.hypot(params.omega_rabi, params.detuning))


def critical_wavenumber(params: LaserParams, consts: PhysicalConstants = CESIUM) -> float:
    """Wavenumber at which the slow dressed channel opens.

    Below k_c = sqrt(m*(Omega' - delta)/hbar) one of the two
    transmitted waves is evanescent and the excited population behind
    the field edge saturates instead of oscillating in space.
    """
    gap = omega_prime(params) - params.detuning  # rad/s, >= 0 always
    return float(np.sqrt(consts.mass * gap / consts.hbar))


def critical_velocity(params: LaserParams, consts: PhysicalConstants = CESIUM) -> float:
    """hbar*k_c/m, the velocity form of the channel-opening threshold."""
    return consts.hbar * critical_wavenumber(params, consts) / consts.mass


def transition_wavenumber(
    delta_x: float,
    params: LaserParams,
    consts: PhysicalConstants = CESIUM,
    entrance_factor: float = 5.0,
) -> float:
    """Wavenumber separating washed-out from restored time oscillations.

    A packet of width delta_x takes about entrance_factor*delta_x/v to
    cross the field edge; oscillations in time survive once that is
    short against the Rabi period, i.e. above
    k_R = entrance_factor*delta_x*m*Omega'/(2*pi*hbar).
    """
    if delta_x <= 0:
        raise ValueError("delta_x must be positive")
    return float(
        entrance_factor * delta_x * consts.mass * omega_prime(params) / (2.0 * np.pi * consts.hbar)
    )


def transition_velocity(
    delta_x: float,
    params: LaserParams,
    consts: PhysicalConstants = CESIUM,
    entrance_factor: float = 5.0,
) -> float:
    """Velocity form of :func:`transition_wavenumber`."""
    return consts.hbar * transition_wavenumber(delta_x, params, consts, entrance_factor) / consts.mass


@dataclass(frozen=True)
class DerivedScales:
    """Bundle of the characteristic scales of a parameter set."""

    omega_prime: float  # rad/s
    rabi_period: float  # s
    k_critical: float  # 1/m
    v_critical: float  # m/s
    v_recoil: float  # m/s


def derived_scales(params: LaserParams, consts: PhysicalConstants = CESIUM) -> DerivedScales:
    ops = omega_prime(params)
    kc = critical_wavenumber(params, consts)
    return DerivedScales(
        omega_prime=ops,
        rabi_period=2.0 * np.pi / ops if ops > 0 else np.inf,
        k_critical=kc,
        v_critical=consts.hbar * kc / consts.mass,
        v_recoil=consts.recoil_velocity,
    )


def _sinc_c(z: np.ndarray) -> np.ndarray:
    """sin(z)/z for complex z, series-guarded near z = 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1.0e-4
    safe = np.where(small, 1.0, z)
    series = 1.0 - z * z / 6.0 + (z * z) * (z * z) / 120.0
    return np.where(small, series, np.sin(safe) / safe)


def atrest_propagator(
    t,
    params: LaserParams,
    conditional: bool = False,
    laser_phase: float = 0.0,
):
    """Exact internal-state propagator of a resting atom in the field.

    Returns the 2x2 matrix U(t) with shape t.shape + (2, 2) such that
    psi(t) = U(t) @ psi(0).  With ``conditional=True`` the decay term
    -i*gamma/2 is kept on the excited diagonal and U is nonunitary (the
    no-jump evolution); otherwise gamma is ignored.  ``laser_phase`` is
    k_L*y, the running phase of the field along the laser axis, which
    multiplies the coupling as exp(-i*laser_phase) in the upper
    off-diagonal entry.

    The form is exceptional-point safe: the generalized frequency
    s = sqrt((delta + i*gamma/2)^2 + Omega^2) may vanish for strong
    damping, and every s-dependence is expressed through sin(z)/z.
    """
    t = np.asarray(t, dtype=float)
    d = params.complex_detuning if conditional else complex(params.detuning)
    om = params.omega_rabi
    s = np.sqrt(d * d + om * om)  # principal branch; continuous from gamma = 0

    half = 0.5 * t
    phase = np.exp(1j * d * half)
    snc = _sinc_c(s * half)
    cos = np.cos(s * half)

    u = np.empty(t.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = phase * (cos - 1j * d * half * snc)
    u[..., 1, 1] = phase * (cos + 1j * d * half * snc)
    off = -1j * phase * om * half * snc
    u[..., 0, 1] = off * np.exp(-1j * laser_phase)
    u[..., 1, 0] = off * np.exp(1j * laser_phase)
    return u


def rabi_at_rest(t, params: LaserParams):
    """Ground and excited amplitudes of a resting atom starting in the ground state.

    Gamma is ignored; this is the closed-system Rabi solution
    psi1 = e^{i delta t/2}[cos(Omega' t/2) - i(delta/Omega') sin(Omega' t/2)],
    psi2 = -i e^{i delta t/2}(Omega/Omega') sin(Omega' t/2).
    """
    u = atrest_propagator(t, params, conditional=False)
    return u[..., 0, 0], u[..., 1, 0]


def conditional_p2_at_rest(t, params: LaserParams):
    """Unnormalized no-jump excited population e^{-gamma t/2}|Omega/s|^2 |sin(s t/2)|^2."""
    u = atrest_propagator(t, params, conditional=True)
    return np.abs(u[..., 1, 0]) ** 2


@dataclass(frozen=True)
class BlochSolution:
    """Optical Bloch evolution of a resting atom."""

    times: np.ndarray
    p2: np.ndarray  # excited population rho_22
    coh_re: np.ndarray  # Re rho_12
    coh_im: np.ndarray  # Im rho_12


def bloch_at_rest(
    t_grid,
    params: LaserParams,
    rho0=(0.0, 0.0, 0.0),
    rtol: float = 1.0e-10,
    atol: float = 1.0e-12,
) -> BlochSolution:
    """Integrate the optical Bloch equations for a resting atom.

    State vector (x, u, w) = (rho_22, Re rho_12, Im rho_12), ground
    start by default.  This is the unconditional (master equation)
    evolution, the ensemble average that jump trajectories must
    reproduce.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    om, de, ga = params.omega_rabi, params.detuning, params.gamma

    def rhs(_t, y):
        x, u, w = y
        return [
            om * w - ga * x,
            de * w - 0.5 * ga * u,
            -0.5 * om * (2.0 * x - 1.0) - de * u - 0.5 * ga * w,
        ]

    t0, t1 = float(t_grid[0]), float(t_grid[-1])
    sol = solve_ivp(
        rhs,
        (t0, t1),
        np.asarray(rho0, dtype=float),
        t_eval=t_grid,
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise RuntimeError(f"Bloch integration failed: {sol.message}")
    return BlochSolution(times=t_grid, p2=sol.y[0], coh_re=sol.y[1], coh_im=sol.y[2])


def steady_state_p2(params: LaserParams) -> float:
    """Stationary excited population Omega^2 / (2 Omega^2 + 4 delta^2 + gamma^2).

    Requires gamma > 0 (the closed system has no attractor).
    """
    if params.gamma <= 0:
        raise ValueError("steady state requires gamma > 0")
    om, de, ga = params.omega_rabi, params.detuning, params.gamma
    return om * om / (2.0 * om * om + 4.0 * de * de + ga * ga)
