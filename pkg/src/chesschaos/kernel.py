"""Chess rules for the state, move and status types used everywhere else.

A :class:`GameState` keeps its board as 64 signed piece codes, the same codes
the configuration vector uses, so the en-passant and castling information the
rules need travels with the board itself.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from . import _backend as B
from . import _pykernel as _pk

FILES = "abcdefgh"


class Color(enum.Enum):
    WHITE = 1
    BLACK = -1

    @property
    def other(self) -> "Color":
        return Color.BLACK if self is Color.WHITE else Color.WHITE

    @property
    def letter(self) -> str:
        return "w" if self is Color.WHITE else "b"


class Kind(enum.IntEnum):
    PAWN_EP = 1
    PAWN = 2
    KNIGHT = 3
    BISHOP = 4
    ROOK = 5
    QUEEN = 6
    KING_CASTLE = 7
    KING_NO_CASTLE = 8

    @property
    def is_pawn(self) -> bool:
        return self <= Kind.PAWN

    @property
    def is_king(self) -> bool:
        return self >= Kind.KING_CASTLE

    @property
    def letter(self) -> str:
        return "ppnbrqkk"[self - 1]


_LETTER_KIND = {"p": Kind.PAWN, "n": Kind.KNIGHT, "b": Kind.BISHOP, "r": Kind.ROOK,
                "q": Kind.QUEEN, "k": Kind.KING_NO_CASTLE}


@dataclass(frozen=True)
class Piece:
    color: Color
    kind: Kind

    @property
    def code(self) -> int:
        return int(self.kind) * self.color.value

    @classmethod
    def from_code(cls, code: int) -> "Piece":
        return cls(Color.WHITE if code > 0 else Color.BLACK, Kind(abs(code)))

    @property
    def symbol(self) -> str:
        s = self.kind.letter
        return s.upper() if self.color is Color.WHITE else s


def square(name: str) -> int:
    """``"e4"`` -> 28."""
    if len(name) != 2 or name[0] not in FILES or name[1] not in "12345678":
        raise ValueError(f"bad square name {name!r}")
    return (int(name[1]) - 1) * 8 + FILES.index(name[0])


def square_name(index: int) -> str:
    if not 0 <= index < 64:
        raise ValueError(f"square index out of range: {index}")
    return FILES[index & 7] + str((index >> 3) + 1)


class InvalidStateError(ValueError):
    """A position violating a state invariant. ``reason`` names the rule."""

    def __init__(self, reason: str, message: str, square: Optional[int] = None):
        super().__init__(message)
        self.reason = reason
        self.square = square


class IllegalMoveError(ValueError):
    def __init__(self, rule: str, message: str):
        super().__init__(message)
        self.rule = rule


class FenError(ValueError):
    pass


_REASONS = {
    _pk.ERR_CODE: ("InvalidCode", "piece code outside -8..8"),
    _pk.ERR_KINGS: ("KingCount", "each side needs exactly one king"),
    _pk.ERR_PAWN_RANK: ("PawnRank", "pawn on the first or last rank"),
    _pk.ERR_CHECK: ("IllegalCheck", "the side not to move is in check"),
    _pk.ERR_EP: ("InvalidEnPassant", "en-passant flag inconsistent with the last move"),
    _pk.ERR_CASTLING: ("InvalidCastling", "castling rights inconsistent with king/rook placement"),
}

_CASTLE_BITS = {"K": _pk.CASTLE_WK, "Q": _pk.CASTLE_WQ, "k": _pk.CASTLE_BK, "q": _pk.CASTLE_BQ}


def castling_mask(rights: str) -> int:
    if rights == "-":
        return 0
    mask = 0
    for ch in rights:
        if ch not in _CASTLE_BITS or mask & _CASTLE_BITS[ch]:
            raise ValueError(f"bad castling field {rights!r}")
        mask |= _CASTLE_BITS[ch]
    return mask


def castling_text(mask: int) -> str:
    return "".join(ch for ch in "KQkq" if mask & _CASTLE_BITS[ch]) or "-"


def check_board(codes, white: bool, castling: int) -> None:
    """Raise :class:`InvalidStateError` if the position is not a valid state."""
    err = B.validate(codes, white, castling)
    if err:
        reason, text = _REASONS[err]
        sq = None
        if err == _pk.ERR_CODE:
            sq = next(i for i, c in enumerate(codes) if not -8 <= c <= 8)
            text = f"{text} at {square_name(sq)}"
        raise InvalidStateError(reason, text, sq)


@dataclass(frozen=True)
class GameState:
    """A position: 64 piece codes, side to move, ply index and castling rights."""

    codes: tuple
    side_to_move: Color = Color.WHITE
    ply_index: int = 0
    castling: str = "-"

    def __post_init__(self):
        codes = tuple(int(c) for c in self.codes)
        if len(codes) != 64:
            raise InvalidStateError("InvalidCode", "a board has 64 squares")
        object.__setattr__(self, "codes", codes)
        if self.ply_index < 0:
            raise ValueError("ply_index must be nonnegative")
        check_board(codes, self.white, castling_mask(self.castling))

    @classmethod
    def from_pieces(cls, pieces: dict, side_to_move: Color = Color.WHITE,
                    ply_index: Optional[int] = None, castling: str = "-") -> "GameState":
        """Build from ``{"e1": "K", "e8": "k", ...}`` (FEN letters; ``P*`` for an ep pawn)."""
        codes = [0] * 64
        for name, sym in pieces.items():
            kind = _LETTER_KIND[sym[0].lower()]
            if sym.endswith("*"):
                kind = Kind.PAWN_EP
            sign = 1 if sym[0].isupper() else -1
            codes[square(name)] = int(kind) * sign
        mask = castling_mask(castling)
        for sq, c in enumerate(codes):
            if c == 8 and mask & 3:
                codes[sq] = 7
            elif c == -8 and mask & 12:
                codes[sq] = -7
        if ply_index is None:
            ply_index = 0 if side_to_move is Color.WHITE else 1
        return cls(tuple(codes), side_to_move, ply_index, castling)

    @property
    def white(self) -> bool:
        return self.side_to_move is Color.WHITE

    @property
    def castling_mask(self) -> int:
        return castling_mask(self.castling)

    @property
    def board(self) -> dict:
        """Occupied squares only: ``{square index: Piece}``."""
        return {sq: Piece.from_code(c) for sq, c in enumerate(self.codes) if c}

    def piece_at(self, sq: int) -> Optional[Piece]:
        c = self.codes[sq]
        return Piece.from_code(c) if c else None

    def __str__(self) -> str:
        return to_fen(self)


@dataclass(frozen=True)
class Move:
    from_sq: int
    to_sq: int
    promotion: Optional[Kind] = None

    def __post_init__(self):
        if not (0 <= self.from_sq < 64 and 0 <= self.to_sq < 64):
            raise ValueError("move squares must be in 0..63")
        if self.from_sq == self.to_sq:
            raise IllegalMoveError("SameSquare", "from and to squares coincide")
        if self.promotion is not None:
            object.__setattr__(self, "promotion", Kind(self.promotion))
            if self.promotion not in (Kind.KNIGHT, Kind.BISHOP, Kind.ROOK, Kind.QUEEN):
                raise IllegalMoveError("BadPromotion", f"cannot promote to {self.promotion.name}")

    @property
    def packed(self) -> int:
        return self.from_sq | self.to_sq << 6 | (int(self.promotion or 0) << 12)

    @classmethod
    def from_packed(cls, value: int) -> "Move":
        promo = value >> 12
        return cls(value & 63, (value >> 6) & 63, Kind(promo) if promo else None)

    @property
    def key(self) -> tuple:
        return (self.from_sq, self.to_sq, int(self.promotion or 0))

    def __lt__(self, other: "Move") -> bool:
        return self.key < other.key

    @property
    def uci(self) -> str:
        s = square_name(self.from_sq) + square_name(self.to_sq)
        return s + self.promotion.letter if self.promotion else s

    @classmethod
    def from_uci(cls, text: str) -> "Move":
        promo = _LETTER_KIND[text[4]] if len(text) == 5 else None
        return cls(square(text[:2]), square(text[2:4]), promo)

    def __str__(self) -> str:
        return self.uci


class StatusTag(enum.Enum):
    ONGOING = "ongoing"
    CHECKMATE = "checkmate"
    STALEMATE = "stalemate"
    INSUFFICIENT_MATERIAL = "insufficient_material"


@dataclass(frozen=True)
class Status:
    tag: StatusTag
    loser: Optional[Color] = field(default=None)

    @property
    def is_terminal(self) -> bool:
        """No legal move is available."""
        return self.tag in (StatusTag.CHECKMATE, StatusTag.STALEMATE)


def legal_moves(state: GameState) -> list:
    """Legal moves in ascending (from, to, promotion) order."""
    return [Move.from_packed(m) for m in B.legal_moves(state.codes, state.white, state.castling_mask)]


def _diagnose(state: GameState, move: Move) -> IllegalMoveError:
    c = state.codes[move.from_sq] * state.side_to_move.value
    if c == 0 and state.codes[move.from_sq] == 0:
        return IllegalMoveError("EmptySquare", f"no piece on {square_name(move.from_sq)}")
    if c < 0:
        return IllegalMoveError("WrongColor", f"piece on {square_name(move.from_sq)} belongs to the side not to move")
    last = 7 if state.white else 0
    if c <= 2 and move.to_sq >> 3 == last and move.promotion is None:
        return IllegalMoveError("MissingPromotion", "pawn reaching the last rank must promote")
    if move.promotion is not None and (c > 2 or move.to_sq >> 3 != last):
        return IllegalMoveError("BadPromotion", "promotion only for pawn moves to the last rank")
    pseudo = _pk._pseudo_moves(list(state.codes), state.white, state.castling_mask)
    if move.packed in pseudo:
        return IllegalMoveError("KingInCheck", "move leaves the mover's king in check")
    return IllegalMoveError("PieceMovement", f"{Kind(c).name.lower()} cannot move {move.uci}")


def apply_move(state: GameState, move: Move) -> GameState:
    packed = move.packed
    if packed not in B.legal_moves(state.codes, state.white, state.castling_mask):
        raise _diagnose(state, move)
    codes, mask = B.make_move(state.codes, state.white, state.castling_mask, packed)
    return GameState(tuple(codes), state.side_to_move.other, state.ply_index + 1, castling_text(mask))


def status(state: GameState) -> Status:
    k = B.classify(state.codes, state.white, state.castling_mask)
    if k == _pk.CHECKMATE:
        return Status(StatusTag.CHECKMATE, state.side_to_move)
    if k == _pk.STALEMATE:
        return Status(StatusTag.STALEMATE)
    if k == _pk.INSUFFICIENT:
        return Status(StatusTag.INSUFFICIENT_MATERIAL)
    return Status(StatusTag.ONGOING)


def in_check(state: GameState) -> bool:
    return bool(B.in_check(state.codes, state.white))


def perft(state: GameState, depth: int) -> int:
    return B.perft(state.codes, state.white, state.castling_mask, depth)


# ------------------------------------------------------------------------ FEN

def parse_fen(text: str) -> GameState:
    """Parse placement, side, castling and en-passant fields; clocks only set the ply index."""
    fields = text.split()
    if len(fields) < 2:
        raise FenError(f"FEN needs at least placement and side to move: {text!r}")
    rows = fields[0].split("/")
    if len(rows) != 8:
        raise FenError("FEN placement needs 8 ranks")
    codes = [0] * 64
    for i, row in enumerate(rows):
        r, f = 7 - i, 0
        for ch in row:
            if ch.isdigit():
                f += int(ch)
            elif ch.lower() in _LETTER_KIND:
                if f > 7:
                    raise FenError(f"rank {r + 1} overflows")
                v = int(_LETTER_KIND[ch.lower()])
                codes[r * 8 + f] = v if ch.isupper() else -v
                f += 1
            else:
                raise FenError(f"bad FEN piece letter {ch!r}")
        if f != 8:
            raise FenError(f"rank {r + 1} does not have 8 files")
    if fields[1] not in ("w", "b"):
        raise FenError(f"bad side to move {fields[1]!r}")
    side = Color.WHITE if fields[1] == "w" else Color.BLACK
    rights = fields[2] if len(fields) > 2 else "-"
    try:
        mask = castling_mask(rights)
    except ValueError as exc:
        raise FenError(str(exc)) from None
    for sq, c in enumerate(codes):
        if c == 8 and mask & 3:
            codes[sq] = 7
        elif c == -8 and mask & 12:
            codes[sq] = -7
    ep = fields[3] if len(fields) > 3 else "-"
    if ep != "-":
        try:
            target = square(ep)
        except ValueError:
            raise FenError(f"bad en-passant square {ep!r}") from None
        # the flagged pawn stands just in front of the target square
        pawn_sq = target - 8 if side is Color.WHITE else target + 8
        expect = -2 if side is Color.WHITE else 2
        if not 0 <= pawn_sq < 64 or codes[pawn_sq] != expect:
            raise FenError(f"en-passant square {ep} has no pawn that just double-stepped")
        codes[pawn_sq] = expect // 2
    ply = 0 if side is Color.WHITE else 1
    if len(fields) > 5:
        try:
            ply = 2 * (int(fields[5]) - 1) + ply
        except ValueError:
            raise FenError(f"bad fullmove number {fields[5]!r}") from None
        ply = max(ply, 0)
    try:
        return GameState(tuple(codes), side, ply, rights)
    except InvalidStateError as exc:
        raise FenError(f"invalid position: {exc}") from exc


def to_fen(state: GameState) -> str:
    rows = []
    for r in range(7, -1, -1):
        row, empty = "", 0
        for f in range(8):
            c = state.codes[r * 8 + f]
            if c == 0:
                empty += 1
                continue
            if empty:
                row += str(empty)
                empty = 0
            row += Piece.from_code(c).symbol
        rows.append(row + (str(empty) if empty else ""))
    ep = "-"
    for sq, c in enumerate(state.codes):
        if c == 1:
            ep = square_name(sq - 8)
        elif c == -1:
            ep = square_name(sq + 8)
    return f"{'/'.join(rows)} {state.side_to_move.letter} {state.castling} {ep} 0 {state.ply_index // 2 + 1}"
