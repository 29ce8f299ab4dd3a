"""Random valid positions for property tests."""

from __future__ import annotations

import random

from chesschaos.kernel import Color, GameState, InvalidStateError

PIECES = (2, 3, 4, 5, 6)


def _try_state(rng: random.Random, extra: int):
    codes = [0] * 64
    free = list(range(64))
    rng.shuffle(free)
    wk, bk = free.pop(), free.pop()
    codes[wk], codes[bk] = 8, -8
    rights = ""
    if rng.random() < 0.15:
        # a castling-capable white king on e1 with a rook on one or both corners
        for sq in (4, 7, 0):
            if codes[sq] and sq != wk:
                return None
        codes[wk] = 0
        codes[4] = 7
        for corner, letter in ((7, "K"), (0, "Q")):
            if rng.random() < 0.7:
                codes[corner] = 5
                rights += letter
        if not rights:
            return None
        free = [s for s in free if codes[s] == 0]
    for _ in range(extra):
        sq = free.pop()
        kind = rng.choice(PIECES)
        if kind == 2 and sq // 8 in (0, 7):
            continue
        codes[sq] = kind if rng.random() < 0.5 else -kind
    if rights:
        # the vector records castling per king, not per wing: keep every right
        # whose rook stands on its corner so the state is representable
        rights = ("K" if codes[7] == 5 else "") + ("Q" if codes[0] == 5 else "")
    side = Color.WHITE if rng.random() < 0.5 else Color.BLACK
    if rng.random() < 0.3:
        # flag a pawn that just double-stepped (the opponent of the mover moved it)
        sign, rank = (-1, 4) if side is Color.WHITE else (1, 3)
        cands = [s for s in range(64) if codes[s] == 2 * sign and s // 8 == rank]
        if cands:
            codes[rng.choice(cands)] = sign
    try:
        return GameState(tuple(codes), side, 0 if side is Color.WHITE else 1, rights or "-")
    except InvalidStateError:
        return None


def random_states(count: int, seed: int = 0, max_extra: int = 8) -> list:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        s = _try_state(rng, rng.randint(0, max_extra))
        if s is not None:
            out.append(s)
    return out
