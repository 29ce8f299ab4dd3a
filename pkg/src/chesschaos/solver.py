"""Exact strategies for small material sets by retrograde analysis.

Tables are dense over a mixed-radix index: side to move, then one digit per
piece in canonical order (white king, black king, then the extra piece).
King and piece digits are squares (radix 64); a pawn digit has radix 72, with
64..71 meaning "on its fourth rank, just double-stepped, file d-64".
"""

from __future__ import annotations

import enum
import os
import re
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from . import _backend as B
from . import _pykernel as _pk
from .embedding import DeltaVector, encode
from .kernel import Color, GameState, InvalidStateError, Move, apply_move, legal_moves

MAGIC = b"CSTB"
VERSION = 1
NO_VALUE = 0xFFFF
FLAG_INVALID = 0x04
FLAG_TERMINAL = 0x08
MAX_MEN = 3

_PIECE_ORDER = "QRBNP"
_PIECE_CODE = {"Q": 6, "R": 5, "B": 4, "N": 3, "P": 2}
_MATERIAL_RE = re.compile(r"^K([QRBNP]*)vK([QRBNP]*)$")

_ENTRY_DTYPE = np.dtype([("flags", "u1"), ("dtm", "<u2"), ("move", "<u2")])


class Wdl(enum.IntEnum):
    DRAW = 0
    WHITE_WIN = 1
    BLACK_WIN = 2

    @property
    def label(self) -> str:
        return {0: "Draw", 1: "WhiteWin", 2: "BlackWin"}[self]


class UnsupportedMaterialError(ValueError):
    pass


class MaterialMismatchError(ValueError):
    pass


class NoMoveError(ValueError):
    """The state is terminal; a strategy has nothing to play."""


class CoverageError(LookupError):
    pass


class TablebaseFormatError(ValueError):
    pass


class UnrecognizedFormat(TablebaseFormatError):
    pass


class TruncatedFile(TablebaseFormatError):
    def __init__(self, expected: int, actual: int):
        super().__init__(f"tablebase file truncated: expected {expected} bytes, got {actual}")
        self.expected = expected
        self.actual = actual


# ------------------------------------------------------------------ materials

def material_codes(material_id: str) -> tuple:
    """``"KQvK"`` -> ``(8, -8, 6)``; raises for sets outside the solvable range."""
    m = _MATERIAL_RE.match(material_id)
    if not m:
        raise UnsupportedMaterialError(f"not a material id: {material_id!r}")
    white, black = m.groups()
    for side in (white, black):
        if list(side) != sorted(side, key=_PIECE_ORDER.index) or len(set(side)) != len(side):
            raise UnsupportedMaterialError(f"unsupported material set {material_id!r}")
    if 2 + len(white) + len(black) > MAX_MEN:
        raise UnsupportedMaterialError(f"unsupported material set {material_id!r} (at most {MAX_MEN} men)")
    return (8, -8) + tuple(_PIECE_CODE[p] for p in white) + tuple(-_PIECE_CODE[p] for p in black)


def supported_materials() -> list:
    ids = ["KvK"]
    for p in _PIECE_ORDER:
        ids += [f"K{p}vK", f"KvK{p}"]
    return ids


def material_of_codes(codes) -> str:
    white, black = [], []
    for c in codes:
        a = abs(c)
        if c == 0 or a >= 7:
            continue
        letter = "PPNBRQ"[a - 1]
        (white if c > 0 else black).append(letter)
    key = _PIECE_ORDER.index
    return "K" + "".join(sorted(white, key=key)) + "vK" + "".join(sorted(black, key=key))


def material_of(state: GameState) -> str:
    return material_of_codes(state.codes)


def _material_from_signature(sig: int) -> str:
    white = "".join(_PIECE_ORDER[i] for i in range(5) if sig >> i & 1)
    black = "".join(_PIECE_ORDER[i] for i in range(5) if sig >> (5 + i) & 1)
    return f"K{white}vK{black}"


# -------------------------------------------------------------------- entries

@dataclass(frozen=True)
class StrategyEntry:
    wdl: Wdl
    dtm_plies: Optional[int]
    best_move: Optional[Move]
    terminal: bool = False


class StrategyTable:
    """Dense WDL / DTM / best-move arrays for one material set."""

    def __init__(self, material_id: str, flags: np.ndarray, dtm: np.ndarray, moves: np.ndarray):
        self.material_id = material_id
        self.codes = material_codes(material_id)
        self.flags = np.asarray(flags, dtype=np.uint8)
        self.dtm = np.asarray(dtm, dtype=np.uint16)
        self.moves = np.asarray(moves, dtype=np.uint16)
        n = B.slot_count(self.codes)
        if not (len(self.flags) == len(self.dtm) == len(self.moves) == n):
            raise TablebaseFormatError(f"{material_id} needs {n} entries")

    def __len__(self) -> int:
        return len(self.flags)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StrategyTable):
            return NotImplemented
        return (self.material_id == other.material_id
                and np.array_equal(self.flags, other.flags)
                and np.array_equal(self.dtm, other.dtm)
                and np.array_equal(self.moves, other.moves))

    def __repr__(self) -> str:
        return f"StrategyTable({self.material_id!r}, {int(self.valid.sum())} states)"

    @property
    def index_scheme(self) -> list:
        """Digits from least significant: ``(label, radix)``; side to move last."""
        scheme = [(("w" if c > 0 else "b") + "PPNBRQKK"[abs(c) - 1],
                   _pk.PAWN_RADIX if abs(c) <= 2 else 64) for c in self.codes]
        scheme.append(("side", 2))
        return scheme

    @property
    def half(self) -> int:
        return len(self.flags) // 2

    @property
    def valid(self) -> np.ndarray:
        return (self.flags & FLAG_INVALID) == 0

    @property
    def terminal(self) -> np.ndarray:
        return (self.flags & FLAG_TERMINAL) != 0

    @property
    def playable(self) -> np.ndarray:
        """Legal states with at least one move: everything but mates and stalemates.

        Bare-king states carry the terminal flag (nothing can be won) yet still
        have king moves, so they count as playable.
        """
        if len(self.codes) == 2:
            return self.valid
        return self.valid & ~self.terminal

    @property
    def wdl(self) -> np.ndarray:
        return self.flags & 3

    def white_to_move(self, idx) -> np.ndarray:
        return np.asarray(idx) < self.half

    def mover_wins(self) -> np.ndarray:
        """Mask of valid states won by the side to move."""
        idx = np.arange(len(self.flags))
        w = self.wdl
        white = idx < self.half
        return self.valid & (((w == 1) & white) | ((w == 2) & ~white))

    def entry(self, idx: int) -> StrategyEntry:
        f = int(self.flags[idx])
        if f & FLAG_INVALID:
            raise CoverageError(f"slot {idx} of {self.material_id} is not a legal state")
        d = int(self.dtm[idx])
        m = int(self.moves[idx])
        return StrategyEntry(Wdl(f & 3), None if d == NO_VALUE else d,
                             None if m == NO_VALUE else Move.from_packed(m), bool(f & FLAG_TERMINAL))

    def state(self, idx: int) -> GameState:
        dec = B.slot_board(self.codes, int(idx))
        if dec is None or self.flags[idx] & FLAG_INVALID:
            raise CoverageError(f"slot {idx} of {self.material_id} is not a legal state")
        codes, white = dec
        return GameState(tuple(codes), Color.WHITE if white else Color.BLACK, 0 if white else 1)

    def index(self, state: GameState) -> int:
        if material_of(state) != self.material_id:
            raise MaterialMismatchError(
                f"state material {material_of(state)} does not match table {self.material_id}")
        if state.castling != "-":
            raise CoverageError("castling rights are outside solved material sets")
        return int(B.index_of(state.codes, state.white))


# ---------------------------------------------------------------------- build

Resolver = Callable[[str], StrategyTable]


def build_tablebase(material_id: str, resolver: Optional[Resolver] = None) -> StrategyTable:
    """Solve a material set; captures and promotions consult ``resolver``."""
    codes = material_codes(material_id)
    if resolver is None:
        resolver = TableSet().get
    kind, ptr, moves, child, sig = B.expand(codes)
    n = len(kind)
    own_sig = _own_signature(codes)
    internal = sig == own_sig
    edge_child = np.where(internal, child, -1)
    ext_res = np.zeros(len(child), dtype=np.int8)
    ext_dtm = np.zeros(len(child), dtype=np.int32)
    for s in np.unique(sig[~internal]):
        sub = resolver(_material_from_signature(int(s)))
        sel = np.nonzero(sig == s)[0]
        cidx = child[sel]
        w = sub.wdl[cidx]
        child_white = cidx < sub.half
        res = np.full(len(sel), _pk.LOSS, dtype=np.int8)
        res[((w == 1) & child_white) | ((w == 2) & ~child_white)] = _pk.WIN
        res[w == 0] = _pk.DRAW
        ext_res[sel] = res
        ext_dtm[sel] = np.where(w == 0, 0, sub.dtm[cidx]).astype(np.int32)

    parents = np.repeat(np.arange(n, dtype=np.int64), np.diff(ptr))
    kids = edge_child[internal]
    order = np.argsort(kids, kind="stable")
    pred_list = parents[internal][order]
    pred_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(kids, minlength=n), out=pred_ptr[1:])

    res, dtm = B.retrograde(kind, ptr, edge_child, ext_res, ext_dtm, pred_ptr, pred_list)
    best = B.select_moves(kind, res, dtm, ptr, edge_child, moves, ext_res, ext_dtm)

    white = np.arange(n) < n // 2
    wdl = np.zeros(n, dtype=np.uint8)
    wdl[(res == _pk.WIN) & white] = 1
    wdl[(res == _pk.LOSS) & ~white] = 1
    wdl[(res == _pk.WIN) & ~white] = 2
    wdl[(res == _pk.LOSS) & white] = 2
    flags = wdl.copy()
    flags[kind == _pk.INVALID] = FLAG_INVALID
    flags[(kind == _pk.CHECKMATE) | (kind == _pk.STALEMATE) | (kind == _pk.INSUFFICIENT)] |= FLAG_TERMINAL
    out_dtm = np.where((res == _pk.WIN) | (res == _pk.LOSS), dtm, NO_VALUE).astype(np.uint16)
    return StrategyTable(material_id, flags, out_dtm, best)


def _own_signature(codes) -> int:
    board = [0] * 64
    for i, c in enumerate(codes):
        board[i] = c
    return B.signature(board)


class TableSet:
    """Tables keyed by material id, loaded from ``directory`` or built on demand."""

    def __init__(self, tables=(), directory: Optional[Union[str, os.PathLike]] = None,
                 build_missing: bool = True, persist: bool = False):
        self._tables = {}
        self.directory = Path(directory) if directory else None
        self.build_missing = build_missing
        self.persist = persist
        for t in tables:
            self.add(t)

    def add(self, table: StrategyTable) -> None:
        self._tables[table.material_id] = table

    def __contains__(self, material_id: str) -> bool:
        return material_id in self._tables

    def get(self, material_id: str) -> StrategyTable:
        table = self._tables.get(material_id)
        if table is not None:
            return table
        material_codes(material_id)
        path = self.directory / f"{material_id}.cstb" if self.directory else None
        if path is not None and path.exists():
            table = load_table(path)
        elif self.build_missing:
            table = build_tablebase(material_id, resolver=self.get)
            if path is not None and self.persist:
                path.parent.mkdir(parents=True, exist_ok=True)
                save_table(table, path)
        else:
            raise CoverageError(f"no table for {material_id}")
        self._tables[material_id] = table
        return table

    def for_state(self, state: GameState) -> StrategyTable:
        return self.get(material_of(state))

    def covers(self, state: GameState) -> bool:
        try:
            material_codes(material_of(state))
        except UnsupportedMaterialError:
            return False
        return state.castling == "-" and (self.build_missing or material_of(state) in self._tables
                                          or (self.directory is not None and
                                              (self.directory / f"{material_of(state)}.cstb").exists()))


Tables = Union[StrategyTable, TableSet]


def as_table_set(tables: Tables) -> TableSet:
    if isinstance(tables, TableSet):
        return tables
    return TableSet([tables])


def _table_for(tables: Tables, state: GameState) -> StrategyTable:
    if isinstance(tables, StrategyTable):
        return tables
    try:
        return tables.for_state(state)
    except UnsupportedMaterialError as exc:
        raise CoverageError(str(exc)) from None


# ---------------------------------------------------------------------- query

def probe(table: Tables, state: GameState) -> StrategyEntry:
    t = _table_for(table, state)
    return t.entry(t.index(state))


def strategy_move(table: Tables, state: GameState) -> Move:
    """The move the exact strategy plays from ``state``.

    Winner plays the fastest mate, loser the longest resistance, a drawn side
    the first draw-keeping move; ties go to the smallest (from, to, promotion).
    """
    entry = probe(table, state)
    if entry.best_move is not None:
        return entry.best_move
    moves = legal_moves(state)
    if not moves:
        raise NoMoveError(f"terminal state has no successor: {state}")
    # bare kings: every move keeps the draw
    return moves[0]


def pure_strategy_f(table: Tables, state: GameState) -> GameState:
    return apply_move(state, strategy_move(table, state))


def control_g(table: Tables, state: GameState) -> DeltaVector:
    return encode(pure_strategy_f(table, state)) - encode(state)


# ------------------------------------------------------------------------- io

def save_table(table: StrategyTable, destination) -> None:
    name = table.material_id.encode("utf-8")
    entries = np.empty(len(table), dtype=_ENTRY_DTYPE)
    entries["flags"] = table.flags
    entries["dtm"] = table.dtm
    entries["move"] = table.moves
    with open(destination, "wb") as fh:
        fh.write(MAGIC + bytes([VERSION]))
        fh.write(struct.pack("<H", len(name)) + name)
        fh.write(struct.pack("<I", len(table)))
        fh.write(entries.tobytes())


def load_table(source) -> StrategyTable:
    data = Path(source).read_bytes()
    if len(data) < 5 or data[:4] != MAGIC:
        raise UnrecognizedFormat(f"{source}: not a tablebase file (bad magic)")
    if data[4] != VERSION:
        raise UnrecognizedFormat(f"{source}: unsupported version {data[4]}")
    if len(data) < 7:
        raise TruncatedFile(7, len(data))
    (name_len,) = struct.unpack_from("<H", data, 5)
    header = 7 + name_len + 4
    if len(data) < header:
        raise TruncatedFile(header, len(data))
    material_id = data[7:7 + name_len].decode("utf-8", errors="replace")
    (count,) = struct.unpack_from("<I", data, 7 + name_len)
    expected = header + count * _ENTRY_DTYPE.itemsize
    if len(data) != expected:
        raise TruncatedFile(expected, len(data))
    try:
        codes = material_codes(material_id)
    except UnsupportedMaterialError as exc:
        raise TablebaseFormatError(f"{source}: {exc}") from None
    if count != B.slot_count(codes):
        raise TablebaseFormatError(f"{source}: {material_id} needs {B.slot_count(codes)} entries, file has {count}")
    entries = np.frombuffer(data, dtype=_ENTRY_DTYPE, count=count, offset=header)
    return StrategyTable(material_id, entries["flags"].copy(), entries["dtm"].copy(), entries["move"].copy())
