"""Positions as points of the 64-dimensional configuration space.

Coordinate ``i`` holds the code of the piece on square ``i`` (a1=0 ... h8=63):
0 empty, 1 pawn that just double-stepped (capturable en passant), 2 any other
pawn, 3 knight, 4 bishop, 5 rook, 6 queen, 7 king still holding a castling
right, 8 king without one. Black pieces carry the negated code. Side to move
is not part of the vector and travels alongside it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _pykernel as _pk
from .kernel import Color, GameState, InvalidStateError, castling_text, check_board


class EmbeddingError(ValueError):
    """Decode failure. ``kind`` is one of InvalidCode, KingCount, PawnRank,
    IllegalCheck, InvalidEnPassant, InvalidCastling."""

    def __init__(self, kind: str, message: str, square: Optional[int] = None):
        super().__init__(message)
        self.kind = kind
        self.square = square


def _parse_coords(coords: Iterable[int], bound: int) -> tuple:
    out = tuple(int(c) for c in coords)
    if len(out) != 64:
        raise ValueError(f"expected 64 coordinates, got {len(out)}")
    for i, c in enumerate(out):
        if not -bound <= c <= bound:
            raise EmbeddingError("InvalidCode", f"coordinate {i} = {c} outside -{bound}..{bound}", i)
    return out


@dataclass(frozen=True)
class DeltaVector:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", _parse_coords(self.coords, 16))

    def nonzero(self) -> dict:
        return {i: c for i, c in enumerate(self.coords) if c}

    def to_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)

    def to_text(self) -> str:
        return ",".join(map(str, self.coords))


@dataclass(frozen=True)
class ConfigVector:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", _parse_coords(self.coords, 8))

    def __sub__(self, other: "ConfigVector") -> DeltaVector:
        return DeltaVector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __add__(self, delta: DeltaVector) -> "ConfigVector":
        return ConfigVector(tuple(a + b for a, b in zip(self.coords, delta.coords)))

    def __getitem__(self, i: int) -> int:
        return self.coords[i]

    def __len__(self) -> int:
        return 64

    def to_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)

    def to_text(self) -> str:
        """Canonical form: 64 comma-separated integers in square order."""
        return ",".join(map(str, self.coords))

    @classmethod
    def from_text(cls, text: str) -> "ConfigVector":
        return cls(tuple(int(t) for t in text.split(",")))


def encode(state: GameState) -> ConfigVector:
    return ConfigVector(state.codes)


def _derived_castling(codes: Sequence[int]) -> int:
    mask = 0
    for sign, home, kbit, qbit in ((1, 4, _pk.CASTLE_WK, _pk.CASTLE_WQ),
                                   (-1, 60, _pk.CASTLE_BK, _pk.CASTLE_BQ)):
        if codes[home] == 7 * sign:
            if codes[home + 3] == 5 * sign:
                mask |= kbit
            if codes[home - 4] == 5 * sign:
                mask |= qbit
    return mask


def decode(vector, side_to_move: Color, ply_index: Optional[int] = None) -> GameState:
    """Inverse of :func:`encode`.

    Castling rights for a code-7 king are every right whose rook still stands
    on its corner; a code-7 king with no such rook is rejected.
    """
    coords = vector.coords if isinstance(vector, ConfigVector) else _parse_coords(vector, 8)
    mask = _derived_castling(coords)
    if ply_index is None:
        ply_index = 0 if side_to_move is Color.WHITE else 1
    try:
        check_board(coords, side_to_move is Color.WHITE, mask)
    except InvalidStateError as exc:
        raise EmbeddingError(exc.reason, str(exc), exc.square) from None
    return GameState(coords, side_to_move, ply_index, castling_text(mask))


class Metric(enum.Enum):
    HAMMING = "hamming"
    L1 = "l1"
    L2 = "l2"


def distance(a, b, metric="hamming") -> float:
    metric = Metric(metric.value if isinstance(metric, Metric) else str(metric).lower())
    ac = a.coords if hasattr(a, "coords") else a
    bc = b.coords if hasattr(b, "coords") else b
    if metric is Metric.HAMMING:
        return float(sum(1 for x, y in zip(ac, bc) if x != y))
    if metric is Metric.L1:
        return float(sum(abs(x - y) for x, y in zip(ac, bc)))
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(ac, bc)))
