"""Entanglement dynamics of two giant atoms coupled to an SSH-type waveguide.

Pipeline: band structure -> coupling configuration -> bath self-energies ->
Lindblad master equation -> concurrence, with an exact finite-lattice
propagator validating the Markovian reduction.
"""

from .band import SSHParams, band_edges, coupling_fk, dispersion, phase, winding_number
from .coupling import (
    CouplingConfig,
    Geometry,
    enumerate_all,
    mirror,
    mirror_label,
    mirror_pairs,
    parse_config,
    symmetric_labels,
)
from .dynamics import (
    DensityTrajectory,
    EigenSystem,
    RateSet,
    eigen_system,
    evolve,
    evolve_eigenbasis,
    initial_density,
    transition_rates,
    validity_check,
)
from .entanglement import ConcurrenceTrace, concurrence, concurrence_xstate, onset_time
from .selfenergy import (
    KernelKind,
    SelfEnergySet,
    kernel_closed,
    kernel_finite,
    poles,
    rates_and_shifts,
    sigma,
)

__all__ = [
    "SSHParams",
    "band_edges",
    "coupling_fk",
    "dispersion",
    "phase",
    "winding_number",
    "CouplingConfig",
    "Geometry",
    "enumerate_all",
    "mirror",
    "mirror_label",
    "mirror_pairs",
    "parse_config",
    "symmetric_labels",
    "DensityTrajectory",
    "EigenSystem",
    "RateSet",
    "eigen_system",
    "evolve",
    "evolve_eigenbasis",
    "initial_density",
    "transition_rates",
    "validity_check",
    "ConcurrenceTrace",
    "concurrence",
    "concurrence_xstate",
    "onset_time",
    "KernelKind",
    "SelfEnergySet",
    "kernel_closed",
    "kernel_finite",
    "poles",
    "rates_and_shifts",
    "sigma",
]

__version__ = "0.1.0"
