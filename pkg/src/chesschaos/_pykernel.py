"""Pure-Python hot kernels.

Boards are sequences of 64 signed piece codes (see :mod:`chesschaos.embedding`).
Moves are packed as ``from | to << 6 | promo << 12`` where ``promo`` is the
piece code of the promoted piece (0 when not a promotion).

This module mirrors ``_ckernel.pyx`` function for function; the two must stay
in lockstep.
"""

from __future__ import annotations

import numpy as np

# validation error codes
OK = 0
ERR_CODE = 1
ERR_KINGS = 2
ERR_PAWN_RANK = 3
ERR_CHECK = 4
ERR_EP = 5
ERR_CASTLING = 6

# state kinds produced by expand()
INVALID = -1
ONGOING = 0
CHECKMATE = 1
STALEMATE = 2
INSUFFICIENT = 3

# retrograde results, side-to-move perspective
UNKNOWN = 0
WIN = 1
LOSS = 2
DRAW = 3

CASTLE_WK, CASTLE_WQ, CASTLE_BK, CASTLE_BQ = 1, 2, 4, 8

PAWN_RADIX = 72


def _build_steps(steps):
    table = []
    for sq in range(64):
        f, r = sq & 7, sq >> 3
        out = []
        for df, dr in steps:
            nf, nr = f + df, r + dr
            if 0 <= nf < 8 and 0 <= nr < 8:
                out.append(nr * 8 + nf)
        table.append(tuple(out))
    return tuple(table)


def _build_rays(dirs):
    rays = []
    for df, dr in dirs:
        per_sq = []
        for sq in range(64):
            f, r = sq & 7, sq >> 3
            out = []
            f, r = f + df, r + dr
            while 0 <= f < 8 and 0 <= r < 8:
                out.append(r * 8 + f)
                f, r = f + df, r + dr
            per_sq.append(tuple(out))
        rays.append(tuple(per_sq))
    return tuple(rays)


KNIGHT = _build_steps(((1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)))
KING = _build_steps(((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)))
# PAWN_ATTACKS[0]: squares a white pawn attacks; [1]: black
PAWN_ATTACKS = (_build_steps(((-1, 1), (1, 1))), _build_steps(((-1, -1), (1, -1))))
ROOK_RAYS = _build_rays(((1, 0), (-1, 0), (0, 1), (0, -1)))
BISHOP_RAYS = _build_rays(((1, 1), (1, -1), (-1, 1), (-1, -1)))


def move_key(move: int) -> int:
    """Sort key realising the (from, to, promotion) order."""
    return ((move & 63) << 9) | (((move >> 6) & 63) << 3) | (move >> 12)


def attacked(b, sq: int, by_white: bool) -> bool:
    s = 1 if by_white else -1
    # a pawn of colour s attacks sq iff a pawn of the other colour on sq would attack it back
    for p in PAWN_ATTACKS[1 if by_white else 0][sq]:
        c = b[p] * s
        if c == 1 or c == 2:
            return True
    for p in KNIGHT[sq]:
        if b[p] * s == 3:
            return True
    for p in KING[sq]:
        c = b[p] * s
        if c == 7 or c == 8:
            return True
    for ray in ROOK_RAYS:
        for p in ray[sq]:
            c = b[p]
            if c:
                c *= s
                if c == 5 or c == 6:
                    return True
                break
    for ray in BISHOP_RAYS:
        for p in ray[sq]:
            c = b[p]
            if c:
                c *= s
                if c == 4 or c == 6:
                    return True
                break
    return False


def king_square(b, white: bool) -> int:
    s = 1 if white else -1
    for sq in range(64):
        c = b[sq] * s
        if c == 7 or c == 8:
            return sq
    return -1


def in_check(b, white: bool) -> bool:
    k = king_square(b, white)
    return k >= 0 and attacked(b, k, not white)


def _pseudo_moves(b, white: bool, castling: int) -> list:
    s = 1 if white else -1
    moves = []
    push = moves.append
    fwd = 8 * s
    start_rank = 1 if white else 6
    last_rank = 7 if white else 0
    ep_rank = 4 if white else 3
    for sq in range(64):
        c = b[sq] * s
        if c <= 0:
            continue
        if c <= 2:
            r = sq >> 3
            t = sq + fwd
            if b[t] == 0:
                if t >> 3 == last_rank:
                    for promo in (3, 4, 5, 6):
                        push(sq | t << 6 | promo << 12)
                else:
                    push(sq | t << 6)
                    if r == start_rank and b[t + fwd] == 0:
                        push(sq | (t + fwd) << 6)
            for t in PAWN_ATTACKS[0 if white else 1][sq]:
                if b[t] * s < 0:
                    if t >> 3 == last_rank:
                        for promo in (3, 4, 5, 6):
                            push(sq | t << 6 | promo << 12)
                    else:
                        push(sq | t << 6)
                elif b[t] == 0 and r == ep_rank and b[t - fwd] == -s:
                    push(sq | t << 6)
        elif c == 3:
            for t in KNIGHT[sq]:
                if b[t] * s <= 0:
                    push(sq | t << 6)
        elif c >= 7:
            for t in KING[sq]:
                if b[t] * s <= 0:
                    push(sq | t << 6)
            if c == 7 and castling:
                home = 4 if white else 60
                if sq == home:
                    kbit = CASTLE_WK if white else CASTLE_BK
                    qbit = CASTLE_WQ if white else CASTLE_BQ
                    if (castling & kbit and b[home + 1] == 0 and b[home + 2] == 0
                            and b[home + 3] == 5 * s
                            and not attacked(b, home, not white)
                            and not attacked(b, home + 1, not white)
                            and not attacked(b, home + 2, not white)):
                        push(home | (home + 2) << 6)
                    if (castling & qbit and b[home - 1] == 0 and b[home - 2] == 0
                            and b[home - 3] == 0 and b[home - 4] == 5 * s
                            and not attacked(b, home, not white)
                            and not attacked(b, home - 1, not white)
                            and not attacked(b, home - 2, not white)):
                        push(home | (home - 2) << 6)
        else:
            if c != 4:
                for ray in ROOK_RAYS:
                    for t in ray[sq]:
                        o = b[t] * s
                        if o > 0:
                            break
                        push(sq | t << 6)
                        if o < 0:
                            break
            if c != 5:
                for ray in BISHOP_RAYS:
                    for t in ray[sq]:
                        o = b[t] * s
                        if o > 0:
                            break
                        push(sq | t << 6)
                        if o < 0:
                            break
    return moves


_CASTLE_CLEAR = {0: CASTLE_WQ, 7: CASTLE_WK, 4: CASTLE_WK | CASTLE_WQ,
                 56: CASTLE_BQ, 63: CASTLE_BK, 60: CASTLE_BK | CASTLE_BQ}


def make_move(b, white: bool, castling: int, move: int):
    """Apply a (pseudo-)legal move; returns ``(board_list, castling)``."""
    s = 1 if white else -1
    nb = list(b)
    frm = move & 63
    to = (move >> 6) & 63
    promo = move >> 12
    piece = nb[frm]
    c = piece * s
    # opponent's en-passant flag lapses once we move
    lo = 32 if white else 24
    for sq in range(lo, lo + 8):
        if nb[sq] == -s:
            nb[sq] = -2 * s
    nb[frm] = 0
    if c <= 2:
        if abs(to - frm) == 16:
            nb[to] = s
        else:
            if nb[to] == 0 and (to - frm) % 8 != 0:
                nb[to - 8 * s] = 0
            nb[to] = promo * s if promo else 2 * s
    elif c >= 7:
        nb[to] = 8 * s
        if to - frm == 2:
            nb[frm + 3] = 0
            nb[frm + 1] = 5 * s
        elif frm - to == 2:
            nb[frm - 4] = 0
            nb[frm - 1] = 5 * s
    else:
        nb[to] = piece
    if castling:
        castling &= ~(_CASTLE_CLEAR.get(frm, 0) | _CASTLE_CLEAR.get(to, 0))
        if c >= 7:
            castling &= ~((CASTLE_WK | CASTLE_WQ) if white else (CASTLE_BK | CASTLE_BQ))
        _sync_king_codes(nb, castling)
    return nb, castling


def _sync_king_codes(nb, castling):
    for sq in range(64):
        c = nb[sq]
        if c == 7 or c == 8:
            nb[sq] = 7 if castling & (CASTLE_WK | CASTLE_WQ) else 8
        elif c == -7 or c == -8:
            nb[sq] = -7 if castling & (CASTLE_BK | CASTLE_BQ) else -8


def legal_moves(b, white: bool, castling: int = 0) -> list:
    out = []
    for m in _pseudo_moves(b, white, castling):
        nb, _ = make_move(b, white, castling, m)
        if not in_check(nb, white):
            out.append(m)
    out.sort(key=move_key)
    return out


def has_legal_move(b, white: bool, castling: int = 0) -> bool:
    for m in _pseudo_moves(b, white, castling):
        nb, _ = make_move(b, white, castling, m)
        if not in_check(nb, white):
            return True
    return False


def perft(b, white: bool, castling: int, depth: int) -> int:
    if depth == 0:
        return 1
    moves = legal_moves(b, white, castling)
    if depth == 1:
        return len(moves)
    total = 0
    for m in moves:
        nb, nc = make_move(b, white, castling, m)
        total += perft(nb, not white, nc, depth - 1)
    return total


def validate(b, white: bool, castling: int) -> int:
    """Return 0 for a valid position, else the first violated rule's code."""
    wk = bk = 0
    ep = 0
    for sq in range(64):
        c = b[sq]
        if c < -8 or c > 8:
            return ERR_CODE
        a = -c if c < 0 else c
        if a >= 7:
            if c > 0:
                wk += 1
            else:
                bk += 1
        elif a == 1 or a == 2:
            r = sq >> 3
            if r == 0 or r == 7:
                return ERR_PAWN_RANK
            if a == 1:
                ep += 1
    if wk != 1 or bk != 1:
        return ERR_KINGS
    if ep:
        if ep > 1:
            return ERR_EP
        # only the side that just moved may own a flagged pawn, on its 4th rank,
        # with the square it passed and its origin both empty
        s = -1 if white else 1
        lo = 24 if s > 0 else 32
        found = False
        for sq in range(lo, lo + 8):
            if b[sq] == s:
                if b[sq - 8 * s] == 0 and b[sq - 16 * s] == 0:
                    found = True
        if not found:
            return ERR_EP
    for color, home, kbit, qbit in ((1, 4, CASTLE_WK, CASTLE_WQ), (-1, 60, CASTLE_BK, CASTLE_BQ)):
        rights = castling & (kbit | qbit)
        k = king_square(b, color > 0)
        if (b[k] * color == 7) != bool(rights):
            return ERR_CASTLING
        if rights:
            if k != home:
                return ERR_CASTLING
            if rights & kbit and b[home + 3] != 5 * color:
                return ERR_CASTLING
            if rights & qbit and b[home - 4] != 5 * color:
                return ERR_CASTLING
    if in_check(b, not white):
        return ERR_CHECK
    return OK


def classify(b, white: bool, castling: int) -> int:
    """ONGOING / CHECKMATE / STALEMATE / INSUFFICIENT for a valid position."""
    if has_legal_move(b, white, castling):
        for c in b:
            if c and c != 8 and c != -8 and c != 7 and c != -7:
                return ONGOING
        return INSUFFICIENT
    return CHECKMATE if in_check(b, white) else STALEMATE


# ---------------------------------------------------------------- tablebases

# signature bit for each non-king piece code (pawns share one bit per colour)
_SIG_BIT = {6: 0, 5: 1, 4: 2, 3: 3, 2: 4, 1: 4}


def signature(b) -> int:
    """Material signature; raises ValueError on duplicated piece kinds."""
    sig = 0
    for c in b:
        if c == 0 or c in (7, 8, -7, -8):
            continue
        bit = _SIG_BIT[c] if c > 0 else 5 + _SIG_BIT[-c]
        if sig >> bit & 1:
            raise ValueError("duplicated piece kind is outside the indexable sets")
        sig |= 1 << bit
    return sig


def index_of(b, white: bool) -> int:
    """Index of a board inside its own material's mixed-radix scheme."""
    wk = bk = -1
    extras = {}
    for sq in range(64):
        c = b[sq]
        if c == 0:
            continue
        if c == 8 or c == 7:
            wk = sq
        elif c == -8 or c == -7:
            bk = sq
        else:
            if c in (1, -1):
                digit = 64 + (sq & 7)
            else:
                digit = sq
            key = _SIG_BIT[c] if c > 0 else 5 + _SIG_BIT[-c]
            extras[key] = (digit, PAWN_RADIX if abs(c) <= 2 else 64)
    idx = 0
    mul = 1
    idx += wk * mul
    mul *= 64
    idx += bk * mul
    mul *= 64
    for key in sorted(extras):
        digit, radix = extras[key]
        idx += digit * mul
        mul *= radix
    if not white:
        idx += mul
    return idx


def slot_board(material, idx: int):
    """Decode slot ``idx`` of ``material`` (canonical piece codes) into a board.

    Returns ``(board, white)`` or ``None`` when two pieces share a square.
    """
    total = 1
    for c in material:
        total *= PAWN_RADIX if abs(c) <= 2 and abs(c) > 0 else 64
    white = idx < total
    rem = idx % total
    b = [0] * 64
    for c in material:
        if abs(c) <= 2:
            d = rem % PAWN_RADIX
            rem //= PAWN_RADIX
            if d < 64:
                sq, code = d, c
            else:
                f = d - 64
                sq = (24 + f) if c > 0 else (32 + f)
                code = 1 if c > 0 else -1
        else:
            sq = rem % 64
            rem //= 64
            code = c
        if b[sq]:
            return None
        b[sq] = code
    return b, white


def slot_count(material) -> int:
    total = 2
    for c in material:
        total *= PAWN_RADIX if abs(c) <= 2 else 64
    return total


def expand(material, start: int = 0, stop: int = -1):
    """Expand slots ``[start, stop)`` of a material into the move graph.

    Returns ``(kind, edge_ptr, edge_move, edge_child, edge_sig)`` as numpy
    arrays; child indices live in the scheme of the child's material, named by
    ``edge_sig``.
    """
    n_total = slot_count(material)
    if stop < 0:
        stop = n_total
    n = stop - start
    kind = np.full(n, INVALID, dtype=np.int8)
    ptr = np.zeros(n + 1, dtype=np.int64)
    moves = []
    childs = []
    sigs = []
    for i in range(n):
        dec = slot_board(material, start + i)
        if dec is not None:
            b, white = dec
            if validate(b, white, 0) == OK:
                legal = legal_moves(b, white, 0)
                if not legal:
                    kind[i] = CHECKMATE if in_check(b, white) else STALEMATE
                elif all(c in (0, 8, -8) for c in b):
                    kind[i] = INSUFFICIENT
                else:
                    kind[i] = ONGOING
                    for m in legal:
                        nb, _ = make_move(b, white, 0, m)
                        moves.append(m)
                        childs.append(index_of(nb, not white))
                        sigs.append(signature(nb))
        ptr[i + 1] = len(moves)
    return (kind, ptr, np.array(moves, dtype=np.uint16),
            np.array(childs, dtype=np.int64), np.array(sigs, dtype=np.int16))


def retrograde(kind, edge_ptr, edge_child, ext_res, ext_dtm, pred_ptr, pred_list):
    """Layered backward induction with move counters.

    ``edge_child`` is -1 for edges leaving the material; those carry the
    child's result (child side-to-move perspective) in ``ext_res``/``ext_dtm``.
    Returns ``(res, dtm)`` from the side-to-move perspective.
    """
    n = len(kind)
    res = [UNKNOWN] * n
    dtm = [0] * n
    counter = [0] * n
    maxloss = [0] * n
    buckets = [[]]

    def push(level, s, r):
        while len(buckets) <= level:
            buckets.append([])
        buckets[level].append((s, r))

    kind_l = kind.tolist()
    ptr = edge_ptr.tolist()
    child = edge_child.tolist()
    eres = ext_res.tolist()
    edtm = ext_dtm.tolist()
    pptr = pred_ptr.tolist()
    plist = pred_list.tolist()
    for s in range(n):
        k = kind_l[s]
        if k == CHECKMATE:
            push(0, s, LOSS)
        elif k == STALEMATE or k == INSUFFICIENT:
            res[s] = DRAW
        elif k == ONGOING:
            best_win = -1
            cnt = 0
            ml = 0
            for e in range(ptr[s], ptr[s + 1]):
                if child[e] < 0:
                    r = eres[e]
                    if r == LOSS:
                        if best_win < 0 or edtm[e] + 1 < best_win:
                            best_win = edtm[e] + 1
                    elif r == WIN:
                        if edtm[e] + 1 > ml:
                            ml = edtm[e] + 1
                        continue
                cnt += 1
            counter[s] = cnt
            maxloss[s] = ml
            if best_win >= 0:
                push(best_win, s, WIN)
            elif cnt == 0:
                push(ml, s, LOSS)
    level = 0
    while level < len(buckets):
        for s, r in buckets[level]:
            if res[s] != UNKNOWN:
                continue
            res[s] = r
            dtm[s] = level
            for j in range(pptr[s], pptr[s + 1]):
                p = plist[j]
                if res[p] != UNKNOWN:
                    continue
                if r == LOSS:
                    push(level + 1, p, WIN)
                else:
                    counter[p] -= 1
                    if level + 1 > maxloss[p]:
                        maxloss[p] = level + 1
                    if counter[p] == 0:
                        push(maxloss[p], p, LOSS)
        buckets[level] = None
        level += 1
    for s in range(n):
        if res[s] == UNKNOWN and kind_l[s] != INVALID:
            res[s] = DRAW
    return np.array(res, dtype=np.int8), np.array(dtm, dtype=np.int32)


def select_moves(kind, res, dtm, edge_ptr, edge_child, edge_move, ext_res, ext_dtm):
    """First move (in kernel order) realising each state's optimal value."""
    n = len(kind)
    best = np.full(n, 0xFFFF, dtype=np.uint16)
    kind_l = kind.tolist()
    res_l = res.tolist()
    dtm_l = dtm.tolist()
    ptr = edge_ptr.tolist()
    child = edge_child.tolist()
    mv = edge_move.tolist()
    eres = ext_res.tolist()
    edtm = ext_dtm.tolist()
    for s in range(n):
        if kind_l[s] != ONGOING:
            continue
        r = res_l[s]
        want = dtm_l[s] - 1
        for e in range(ptr[s], ptr[s + 1]):
            c = child[e]
            if c >= 0:
                cr, cd = res_l[c], dtm_l[c]
            else:
                cr, cd = eres[e], edtm[e]
            if r == WIN:
                ok = cr == LOSS and cd == want
            elif r == LOSS:
                ok = cd == want
            else:
                ok = cr == DRAW
            if ok:
                best[s] = mv[e]
                break
    return best
