"""Two-qubit concurrence and entanglement features of concurrence traces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConcurrenceTrace",
    "concurrence",
    "concurrence_xstate",
    "onset_time",
    "NonPhysicalStateError",
    "XStructureError",
]

# sigma_y (x) sigma_y in the bare basis (|ee>, |eg>, |ge>, |gg>); real.
_SYY = np.array([
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
])


class NonPhysicalStateError(ValueError):
    """The spin-flipped product rho*rho~ has a clearly negative eigenvalue."""


class XStructureError(ValueError):
    """The state lacks the X structure the closed form relies on."""


@dataclass(frozen=True)
class ConcurrenceTrace:
    """Time-ordered concurrence samples; times strictly increasing, C in [0, 1]."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("times and values must be matching 1-d arrays")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        if np.any(v < -1e-12) or np.any(v > 1.0 + 1e-9):
            raise ValueError("concurrence samples must lie in [0, 1]")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


def concurrence(rho) -> float:
    """Wootters concurrence C = max(0, l1 - l2 - l3 - l4) of a two-qubit state.

    The l_i are the descending square roots of the eigenvalues of rho*rho~,
    rho~ = (sy (x) sy) rho* (sy (x) sy).  Evaluated through the Hermitian
    matrix sqrt(rho) rho~ sqrt(rho), which shares those eigenvalues, so no
    non-Hermitian eigensolver is needed; sqrt(rho) clamps roundoff-negative
    populations at zero.
    """
    rho = np.asarray(rho, dtype=complex)
    rho_tilde = _SYY @ rho.conj() @ _SYY
    w, V = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    M = root @ rho_tilde @ root
    ev = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    if ev[0] < -1e-8:
        raise NonPhysicalStateError(
            f"rho*rho~ has eigenvalue {ev[0]:.3g} < -1e-8; input is not a physical state"
        )
    lam = np.sqrt(np.clip(ev, 0.0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_xstate(rho) -> float:
    """Closed-form concurrence 2*max(0, |rho_eg,ge| - sqrt(rho_ee * rho_gg)).

    Valid only for X-structured states whose outer coherences (including
    rho_ee,gg) vanish -- exactly what the master equation produces from the
    |eg>, |ge> and |ee> initial states.  Preconditions are enforced.
    """
    rho = np.asarray(rho, dtype=complex)
    outer = [rho[0, 3], rho[0, 1], rho[0, 2], rho[1, 3], rho[2, 3]]
    if any(abs(x) >= 1e-10 for x in outer):
        raise XStructureError(
            "state has non-vanishing coherences outside the single-excitation block"
        )
    pop_product = max(rho[0, 0].real, 0.0) * max(rho[3, 3].real, 0.0)
    return 2.0 * max(0.0, abs(rho[1, 2]) - np.sqrt(pop_product))


def onset_time(trace: ConcurrenceTrace, threshold: float = 1e-4):
    """First sampled time where C exceeds ``threshold``; None if it never does.

    The default threshold sits well above integrator noise and well below
    the smallest physically relevant plateau (~0.03).
    """
    above = np.nonzero(trace.values > threshold)[0]
    if above.size == 0:
        return None
    return float(trace.times[above[0]])
