"""Collective bath self-energies of the two giant atoms.

Three lattice kernels (A, B, C) carry all the geometry.  Each one exists in
two forms: a brute-force momentum sum over a finite ring of L cells, and a
thermodynamic-limit closed form obtained from the residue theorem.  The
finite-L sums are the correctness oracle for the closed forms; the closed
forms feed the master-equation coefficients.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .band import SSHParams, band_edges, coupling_fk, dispersion
from .coupling import CouplingConfig

__all__ = [
    "KernelKind",
    "SelfEnergySet",
    "kernel_finite",
    "kernel_closed",
    "poles",
    "sigma",
    "rates_and_shifts",
    "SingularSumError",
    "BranchAmbiguityError",
    "OutOfBandError",
    "NearBandEdgeWarning",
]


class SingularSumError(ArithmeticError):
    """A finite-L momentum sum hit a pole of the integrand."""


class BranchAmbiguityError(ArithmeticError):
    """Neither or both candidate poles lie strictly inside the unit circle."""


class OutOfBandError(ValueError):
    """The detuning does not lie inside a propagating band."""


class NearBandEdgeWarning(UserWarning):
    """The detuning is within the weak-coupling margin of a band edge,
    where the Born-Markov reduction is unreliable."""


class KernelKind(Enum):
    A = "A"
    B = "B"
    C = "C"


@dataclass(frozen=True)
class SelfEnergySet:
    """Lamb shifts J_ij and decay rates G_ij at a fixed detuning (energy units)."""

    J11: float
    J22: float
    J12: float
    G11: float
    G22: float
    G12: float

    def scaled(self, xi: float, g: float) -> "SelfEnergySet":
        """Dimensionless set with every entry multiplied by xi/g^2."""
        f = xi / (g * g)
        return SelfEnergySet(
            J11=self.J11 * f, J22=self.J22 * f, J12=self.J12 * f,
            G11=self.G11 * f, G22=self.G22 * f, G12=self.G12 * f,
        )

    def dissipation_matrix(self) -> np.ndarray:
        return np.array([[self.G11, self.G12], [self.G12, self.G22]])


def kernel_finite(kind: KernelKind, n: int, z: complex, params: SSHParams,
                  L: int, g: float = 1.0) -> complex:
    """Discrete momentum sum for kernel ``kind`` at cell distance ``n``.

    Sums (g^2/L) * num_k / (z^2 - omega_k^2) over k = 2*pi*m/L with
    num_k = z*e^{ikn} (A), conj(f(k))*e^{ikn} (B), f(k)*e^{ikn} (C);
    conj(f) and f are omega_k*e^{-i phi} and omega_k*e^{+i phi}.
    """
    if L < 2:
        raise ValueError(f"need at least two lattice momenta, got L={L}")
    z = complex(z)
    k = 2.0 * np.pi * np.arange(L) / L
    w = dispersion(k, params)
    denom = z * z - w * w
    if np.min(np.abs(denom)) < 1e-14 * params.xi**2:
        raise SingularSumError(
            f"momentum sum singular at z={z}: a lattice mode sits on the pole"
        )
    bloch = np.exp(1j * k * n)
    if kind is KernelKind.A:
        num = z * bloch
    elif kind is KernelKind.B:
        num = np.conj(coupling_fk(k, params)) * bloch
    else:
        num = coupling_fk(k, params) * bloch
    return complex(g * g / L * np.sum(num / denom))


def _sqrt_discriminant(z: complex, params: SSHParams) -> complex:
    """Principal square root of z^4 - 4 xi^2 (1+delta^2) z^2 + 16 xi^4 delta^2.

    The same branch must be used in the pole positions and in the residue
    denominators, so every closed-form path goes through this helper.
    """
    xi2 = params.xi * params.xi
    d2 = params.delta * params.delta
    z2 = z * z
    return np.sqrt(z2 * z2 - 4.0 * xi2 * (1.0 + d2) * z2 + 16.0 * xi2 * xi2 * d2)


def poles(z: complex, params: SSHParams) -> tuple[complex, complex]:
    """The two simple poles y_+/- of the kernels in the y = e^{ik} plane.

    They are roots of a palindromic quadratic, so y_+ * y_- = 1; for z just
    off a band exactly one of them lies inside the unit circle.
    """
    z = complex(z)
    s = _sqrt_discriminant(z, params)
    w = z * z - 2.0 * params.xi**2 * (1.0 + params.delta**2)
    denom = 2.0 * params.xi**2 * (1.0 - params.delta**2)
    return (w + s) / denom, (w - s) / denom


def _inside_pole(z: complex, params: SSHParams) -> tuple[complex, float, complex]:
    """Pole inside the unit circle, its residue sign, and the sqrt branch."""
    s = _sqrt_discriminant(complex(z), params)
    y_plus, y_minus = poles(z, params)
    margin = 1e-12
    plus_in = abs(y_plus) < 1.0 - margin
    minus_in = abs(y_minus) < 1.0 - margin
    if plus_in == minus_in:
        raise BranchAmbiguityError(
            f"pole selection ambiguous at z={z}: |y+|={abs(y_plus):.15g}, "
            f"|y-|={abs(y_minus):.15g}; move z off the band (finite Im z)"
        )
    return (y_plus, 1.0, s) if plus_in else (y_minus, -1.0, s)


def kernel_closed(kind: KernelKind, n: int, z: complex, params: SSHParams,
                  g: float = 1.0) -> complex:
    """Thermodynamic-limit kernel by residues; evaluate at z = Delta + i*eps.

    Negative distances are handled by the absolute-value exponents, which
    encode the k -> -k substitution (and make B at -n equal C at +n).
    """
    y, sign, s = _inside_pole(z, params)
    n = int(n)
    if kind is KernelKind.A:
        coeff = complex(z) * y ** abs(n)
    else:
        d = params.delta
        shift = 1 if kind is KernelKind.B else -1
        coeff = params.xi * ((1.0 + d) * y ** abs(n) + (1.0 - d) * y ** abs(n + shift))
    return complex(-g * g * sign * coeff / s)


def sigma(config: CouplingConfig, z: complex, params: SSHParams,
          L: int | None = None) -> np.ndarray:
    """2x2 self-energy matrix [[S11, S12], [S21, S22]] at complex energy z.

    Closed-form kernels by default; pass ``L`` to use the finite-ring sums
    instead (the oracle path).  S21 is assembled from the reversed point
    ordering, i.e. with negated distances -- for a reciprocal bath it must
    reproduce S12, which the tests assert.
    """
    if L is None:
        def K(kind, n):
            return kernel_closed(kind, n, z, params, g=config.g)
    else:
        def K(kind, n):
            return kernel_finite(kind, n, z, params, L, g=config.g)

    a, b, p = config.alpha, config.beta, config.positions

    def pair(i, j):
        n = p[j] - p[i]
        return ((a[i] * a[j] + b[i] * b[j]) * K(KernelKind.A, n)
                + a[i] * b[j] * K(KernelKind.B, n)
                + a[j] * b[i] * K(KernelKind.C, n))

    a0 = K(KernelKind.A, 0)
    s11 = 2.0 * (a0 + pair(0, 1))
    s22 = 2.0 * (a0 + pair(2, 3))
    s12 = pair(0, 2) + pair(0, 3) + pair(1, 2) + pair(1, 3)
    s21 = pair(2, 0) + pair(3, 0) + pair(2, 1) + pair(3, 1)
    return np.array([[s11, s12], [s21, s22]])


def rates_and_shifts(config: CouplingConfig, Delta: float, params: SSHParams,
                     eps: float | None = None) -> SelfEnergySet:
    """Lamb shifts and decay rates from the self-energies at Delta + i*eps.

    Requires the detuning strictly inside a band; warns when it is within
    the weak-coupling margin (5g) of an edge.  J and Gamma come from the
    reciprocity-symmetrized off-diagonal (S12 + S21)/2; any relative
    asymmetry beyond 1e-6 is reported as a diagnostic warning.
    """
    xi = params.xi
    if eps is None:
        eps = 1e-8 * xi
    inner, outer = band_edges(params)
    ad = abs(Delta)
    if not inner < ad < outer:
        raise OutOfBandError(
            f"detuning {Delta} lies outside the band ({inner:.6g}, {outer:.6g}); "
            "the decay rates are not defined there"
        )
    margin = 5.0 * config.g
    if not (inner + margin < ad < outer - margin):
        warnings.warn(
            f"detuning {Delta} is within 5g of a band edge; the Markovian "
            "reduction does not hold near the band edges",
            NearBandEdgeWarning,
            stacklevel=2,
        )

    S = sigma(config, complex(Delta, eps), params)
    s12 = 0.5 * (S[0, 1] + S[1, 0])
    asym = abs(S[0, 1] - S[1, 0]) / max(abs(s12), 1e-300)
    if asym > 1e-6:
        warnings.warn(
            f"self-energy reciprocity violated by {asym:.3g} (relative); "
            "kernel evaluation suspect",
            RuntimeWarning,
            stacklevel=2,
        )

    se = SelfEnergySet(
        J11=S[0, 0].real, J22=S[1, 1].real, J12=s12.real,
        G11=-2.0 * S[0, 0].imag, G22=-2.0 * S[1, 1].imag, G12=-2.0 * s12.imag,
    )
    _check_dissipation(se, xi, config.g)
    return se


def _check_dissipation(se: SelfEnergySet, xi: float, g: float) -> None:
    """In-band decay matrix must be positive semidefinite (1e-8 scaled slack)."""
    scaled = se.scaled(xi, g)
    if min(scaled.G11, scaled.G22) < -1e-8:
        raise ArithmeticError(
            f"negative individual decay rate: G11={scaled.G11:.3g}, G22={scaled.G22:.3g} (xi/g^2 units)"
        )
    lo = np.linalg.eigvalsh(scaled.dissipation_matrix())[0]
    if lo < -1e-8:
        raise ArithmeticError(
            f"dissipation matrix not positive semidefinite: min eigenvalue {lo:.3g} (xi/g^2 units)"
        )
