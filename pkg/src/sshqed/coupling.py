"""The sixteen separate-coupling configurations of two two-point giant atoms.

Each atom touches the waveguide at two cells; every coupling point sits on
sublattice A or B.  A configuration is written as a four-letter word
O1 O2 O3 O4 (points ordered left to right, atom 1 owns the first two).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

__all__ = [
    "Geometry",
    "CouplingConfig",
    "parse_config",
    "mirror",
    "mirror_label",
    "enumerate_all",
    "is_symmetric",
    "symmetric_labels",
    "mirror_pairs",
]

_LABEL_RE = re.compile(r"^[AB]{4}$")
_COMPLEMENT = {"A": "B", "B": "A"}


@dataclass(frozen=True)
class Geometry:
    """Equidistant coupling-point layout: cells n1, n1+d, n1+2d, n1+3d."""

    d: int = 1
    n1: int = 0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"coupling-point spacing d must be a positive integer, got {self.d}")

    def positions(self) -> tuple[int, int, int, int]:
        return (self.n1, self.n1 + self.d, self.n1 + 2 * self.d, self.n1 + 3 * self.d)


@dataclass(frozen=True)
class CouplingConfig:
    """Sublattice letters, coupling cells and strength of the two giant atoms.

    Atom 1 couples at ``positions[0:2]``, atom 2 at ``positions[2:4]``;
    positions must be strictly increasing (separate coupling -- nested and
    braided orderings are rejected).  Only position differences enter any
    downstream formula.
    """

    letters: str
    positions: tuple[int, int, int, int]
    g: float

    def __post_init__(self):
        if not _LABEL_RE.match(self.letters):
            raise ValueError(f"coupling label must match [AB]{{4}}, got {self.letters!r}")
        if len(self.positions) != 4 or any(int(p) != p for p in self.positions):
            raise ValueError(f"need four integer cell indices, got {self.positions!r}")
        if not all(a < b for a, b in zip(self.positions, self.positions[1:])):
            raise ValueError(
                f"coupling cells must be strictly increasing (separate coupling), got {self.positions!r}"
            )
        if not self.g > 0.0:
            raise ValueError(f"coupling strength g must be positive, got {self.g}")

    @property
    def alpha(self) -> tuple[int, int, int, int]:
        """1 where the point sits on sublattice A."""
        return tuple(1 if c == "A" else 0 for c in self.letters)

    @property
    def beta(self) -> tuple[int, int, int, int]:
        """1 where the point sits on sublattice B (complement of alpha)."""
        return tuple(1 if c == "B" else 0 for c in self.letters)


def parse_config(label: str, geometry: Geometry | None = None, g: float = 1.0) -> CouplingConfig:
    """Build a configuration from a four-letter label and an equidistant layout."""
    if geometry is None:
        geometry = Geometry()
    if not isinstance(label, str) or not _LABEL_RE.match(label):
        raise ValueError(f"coupling label must match [AB]{{4}}, got {label!r}")
    return CouplingConfig(letters=label, positions=geometry.positions(), g=g)


def mirror_label(label: str) -> str:
    """Spatial reflection of a label: reverse the word, complement each letter."""
    return "".join(_COMPLEMENT[c] for c in reversed(label))


def mirror(config: CouplingConfig) -> CouplingConfig:
    """Reflected configuration; an involution that preserves the geometry.

    Positions are reflected about the midpoint and rebased so the leftmost
    cell is unchanged; for equidistant layouts they are left untouched.
    """
    p = config.positions
    reflected = tuple(p[0] + p[3] - q for q in reversed(p))
    return CouplingConfig(letters=mirror_label(config.letters), positions=reflected, g=config.g)


def enumerate_all() -> list[str]:
    """All sixteen labels in lexicographic order AAAA..BBBB."""
    return ["".join(word) for word in itertools.product("AB", repeat=4)]


def is_symmetric(label: str) -> bool:
    """True when the two atoms see equivalent environments.

    That happens when atom 2 repeats atom 1's letter pattern (related by a
    lattice translation) or when the label is a fixed point of the mirror.
    """
    return label[:2] == label[2:] or mirror_label(label) == label


def symmetric_labels() -> list[str]:
    """The six configurations with equal frequency shifts and decay rates."""
    return [label for label in enumerate_all() if is_symmetric(label)]


def mirror_pairs() -> list[tuple[str, str]]:
    """The five mirror pairs formed by the ten non-symmetric labels."""
    pairs = []
    for label in enumerate_all():
        partner = mirror_label(label)
        if not is_symmetric(label) and label < partner:
            pairs.append((label, partner))
    return pairs
