"""Two-level atom meeting a half-space laser field.

Exact scattering states of the step-coupled two-channel Hamiltonian,
wave-packet dynamics by eigenfunction quadrature and by split-operator
grid propagation, open-system trajectories with photon recoil, and the
observables (populations, fringe visibilities, emitted-light profiles)
that show how motion through the field edge suppresses or restores
Rabi oscillations.
"""

from .model import (
    CESIUM,
    BlochSolution,
    DerivedScales,
    LaserParams,
    PhysicalConstants,
    atrest_propagator,
    bloch_at_rest,
    conditional_p2_at_rest,
    critical_velocity,
    critical_wavenumber,
    derived_scales,
    omega_prime,
    rabi_at_rest,
    steady_state_p2,
    transition_velocity,
    transition_wavenumber,
)

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

__version__ = "0.1.0"
