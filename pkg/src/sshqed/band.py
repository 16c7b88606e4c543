"""Band structure and topology of the dimerized (SSH-type) coupled-cavity waveguide."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SSHParams",
    "coupling_fk",
    "dispersion",
    "phase",
    "band_edges",
    "winding_number",
    "GapClosedError",
    "DegenerateBandPointError",
]


class GapClosedError(ValueError):
    """The requested quantity needs an open band gap, but |delta| ~ 0."""


class DegenerateBandPointError(ValueError):
    """The Bloch coupling f(k) vanishes, so its phase is undefined there."""


@dataclass(frozen=True)
class SSHParams:
    """Waveguide parameters: hopping scale ``xi`` and dimerization ``delta``.

    The intracell and intercell hoppings are ``t1 = xi*(1+delta)`` and
    ``t2 = xi*(1-delta)``.  All energies produced by this package are
    naturally reported in units of ``xi``.
    """

    xi: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if not self.xi > 0.0:
            raise ValueError(f"hopping scale xi must be positive, got {self.xi}")
        if not abs(self.delta) < 1.0:
            raise ValueError(f"dimerization must satisfy |delta| < 1, got {self.delta}")

    @property
    def t1(self) -> float:
        return self.xi * (1.0 + self.delta)

    @property
    def t2(self) -> float:
        return self.xi * (1.0 - self.delta)


def coupling_fk(k, params: SSHParams):
    """Momentum-space sublattice coupling f(k) = t1 + t2*exp(-ik)."""
    k = np.asarray(k, dtype=float)
    return params.t1 + params.t2 * np.exp(-1j * k)


def dispersion(k, params: SSHParams):
    """Upper-band energy omega_k = |f(k)| = sqrt(t1^2 + t2^2 + 2*t1*t2*cos k).

    The lower band is the mirror image ``-omega_k``.
    """
    k = np.asarray(k, dtype=float)
    t1, t2 = params.t1, params.t2
    # roundoff can push the radicand infinitesimally negative at a gap closing
    rad = np.clip(t1 * t1 + t2 * t2 + 2.0 * t1 * t2 * np.cos(k), 0.0, None)
    return np.sqrt(rad)


def phase(k, params: SSHParams):
    """Quadrant-resolved phase of f(k), so that f(k) = omega_k * exp(i*phase).

    Uses the two-argument arctangent (through the complex argument), which
    keeps the phase continuous across quadrants; a single-argument arctan of
    Im/Re would fold the second and third quadrants onto the first two.
    """
    f = coupling_fk(k, params)
    if np.min(np.abs(f)) < 1e-12 * params.xi:
        raise DegenerateBandPointError(
            "f(k) vanishes (gap closing at k = pi, delta = 0); phase undefined"
        )
    return np.angle(f)


def band_edges(params: SSHParams) -> tuple[float, float]:
    """(inner, outer) edges of the positive band: 2*|delta|*xi and 2*xi."""
    return 2.0 * abs(params.delta) * params.xi, 2.0 * params.xi


def winding_number(params: SSHParams, samples: int = 100_000) -> int:
    """Winding of the f(k) phase around the Brillouin zone: 0 or 1.

    Computed by dense phase accumulation with unwrapping rather than by sign
    inspection, so the integral itself is checked against an integer.  Since
    f carries exp(-ik), the raw integral is -1 in the nontrivial phase
    (delta < 0); the topological invariant is the unsigned turn count.
    """
    if abs(params.delta) < 1e-9:
        raise GapClosedError("winding number undefined at the gap closing delta = 0")
    k = np.linspace(-np.pi, np.pi, samples + 1)
    accumulated = np.unwrap(np.angle(coupling_fk(k, params)))
    turns = (accumulated[-1] - accumulated[0]) / (2.0 * np.pi)
    nearest = round(turns)
    if abs(turns - nearest) > 1e-6:
        raise ArithmeticError(f"phase accumulation {turns!r} did not converge to an integer")
    return abs(int(nearest))
