"""Reference implementations used only by the tests.

Nothing here imports the package: the board is a dict keyed by (file, rank),
moves are plain tuples, and the endgame solver searches forward instead of
backward. Agreement with the package is therefore evidence, not tautology.
"""

from __future__ import annotations

import numpy as np

FILES = "abcdefgh"
KNIGHT_STEPS = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
KING_STEPS = [(df, dr) for df in (-1, 0, 1) for dr in (-1, 0, 1) if df or dr]
ROOK_DIRS = [(1, 0), (-1, 0), (0, 1), (0, -1)]
BISHOP_DIRS = [(1, 1), (1, -1), (-1, 1), (-1, -1)]


def on_board(f, r):
    return 0 <= f < 8 and 0 <= r < 8


def sq_name(sq):
    return FILES[sq[0]] + str(sq[1] + 1)


class Position:
    def __init__(self, fen):
        parts = fen.split()
        self.board = {}
        for r, row in enumerate(reversed(parts[0].split("/"))):
            f = 0
            for ch in row:
                if ch.isdigit():
                    f += int(ch)
                else:
                    self.board[(f, r)] = ch
                    f += 1
        self.white = parts[1] == "w"
        self.castling = "" if len(parts) < 3 or parts[2] == "-" else parts[2]
        ep = parts[3] if len(parts) > 3 else "-"
        self.ep = None if ep == "-" else (FILES.index(ep[0]), int(ep[1]) - 1)

    def copy(self):
        p = Position.__new__(Position)
        p.board, p.white, p.castling, p.ep = dict(self.board), self.white, self.castling, self.ep
        return p


def attacked(board, sq, by_white):
    f, r = sq
    own = (lambda p: p.isupper()) if by_white else (lambda p: p.islower())
    for df, dr in KNIGHT_STEPS:
        p = board.get((f + df, r + dr))
        if p and own(p) and p.upper() == "N":
            return True
    for df, dr in KING_STEPS:
        p = board.get((f + df, r + dr))
        if p and own(p) and p.upper() == "K":
            return True
    pr = r - 1 if by_white else r + 1
    for df in (-1, 1):
        p = board.get((f + df, pr))
        if p and own(p) and p.upper() == "P":
            return True
    for dirs, kinds in ((ROOK_DIRS, "RQ"), (BISHOP_DIRS, "BQ")):
        for df, dr in dirs:
            nf, nr = f + df, r + dr
            while on_board(nf, nr):
                p = board.get((nf, nr))
                if p:
                    if own(p) and p.upper() in kinds:
                        return True
                    break
                nf, nr = nf + df, nr + dr
    return False


def king_sq(board, white):
    k = "K" if white else "k"
    return next(s for s, p in board.items() if p == k)


def pseudo_moves(pos):
    out = []
    board, white = pos.board, pos.white
    mine = str.isupper if white else str.islower
    for (f, r), p in list(board.items()):
        if not mine(p):
            continue
        kind = p.upper()
        if kind == "P":
            d = 1 if white else -1
            start, last = (1, 7) if white else (6, 0)
            targets = []
            if (f, r + d) not in board:
                targets.append((f, r + d))
                if r == start and (f, r + 2 * d) not in board:
                    targets.append((f, r + 2 * d))
            for df in (-1, 1):
                t = (f + df, r + d)
                if not on_board(*t):
                    continue
                q = board.get(t)
                if (q and not mine(q)) or t == pos.ep:
                    targets.append(t)
            for t in targets:
                if t[1] == last:
                    out.extend(((f, r), t, pr) for pr in "QRBN")
                else:
                    out.append(((f, r), t, None))
        elif kind in "NK":
            for df, dr in KNIGHT_STEPS if kind == "N" else KING_STEPS:
                t = (f + df, r + dr)
                if on_board(*t) and not (t in board and mine(board[t])):
                    out.append(((f, r), t, None))
        else:
            dirs = {"R": ROOK_DIRS, "B": BISHOP_DIRS, "Q": ROOK_DIRS + BISHOP_DIRS}[kind]
            for df, dr in dirs:
                nf, nr = f + df, r + dr
                while on_board(nf, nr):
                    q = board.get((nf, nr))
                    if q is None:
                        out.append(((f, r), (nf, nr), None))
                    else:
                        if not mine(q):
                            out.append(((f, r), (nf, nr), None))
                        break
                    nf, nr = nf + df, nr + dr
    # castling
    rank = 0 if white else 7
    k_home = (4, rank)
    if board.get(k_home) == ("K" if white else "k") and not attacked(board, k_home, not white):
        rights = pos.castling
        rook = "R" if white else "r"
        if ("K" if white else "k") in rights and board.get((7, rank)) == rook \
                and all((x, rank) not in board for x in (5, 6)) \
                and not any(attacked(board, (x, rank), not white) for x in (5, 6)):
            out.append((k_home, (6, rank), None))
        if ("Q" if white else "q") in rights and board.get((0, rank)) == rook \
                and all((x, rank) not in board for x in (1, 2, 3)) \
                and not any(attacked(board, (x, rank), not white) for x in (2, 3)):
            out.append((k_home, (2, rank), None))
    return out


def play(pos, move):
    frm, to, promo = move
    q = pos.copy()
    b = q.board
    p = b.pop(frm)
    white = pos.white
    if p.upper() == "P" and to == pos.ep and to not in b:
        b.pop((to[0], frm[1]))
    if p.upper() == "K" and abs(to[0] - frm[0]) == 2:
        rank = frm[1]
        if to[0] == 6:
            b[(5, rank)] = b.pop((7, rank))
        else:
            b[(3, rank)] = b.pop((0, rank))
    b[to] = (promo if white else promo.lower()) if promo else p
    q.ep = (frm[0], (frm[1] + to[1]) // 2) if p.upper() == "P" and abs(to[1] - frm[1]) == 2 else None
    lost = set()
    if p == "K":
        lost |= {"K", "Q"}
    if p == "k":
        lost |= {"k", "q"}
    for corner, right in (((7, 0), "K"), ((0, 0), "Q"), ((7, 7), "k"), ((0, 7), "q")):
        if frm == corner or to == corner:
            lost.add(right)
    q.castling = "".join(c for c in q.castling if c not in lost)
    q.white = not white
    return q


def legal(pos):
    out = []
    for m in pseudo_moves(pos):
        nxt = play(pos, m)
        if not attacked(nxt.board, king_sq(nxt.board, pos.white), not pos.white):
            out.append(m)
    return out


def perft(pos, depth):
    moves = legal(pos)
    if depth == 1:
        return len(moves)
    return sum(perft(play(pos, m), depth - 1) for m in moves)


def perft_fen(fen, depth):
    return perft(Position(fen), depth)


# ------------------------------------------------- forward endgame solver
#
# King + one white piece (queen or rook) against a bare king. A position is
# (wk, piece, bk, white_to_move) with squares as 0..63 (file + 8 * rank).
# Once Black captures the piece only bare kings remain, a dead draw, so all
# such successors collapse into one DRAWN sink.

DRAWN = "drawn"


def _neighbours(s):
    f, r = s % 8, s // 8
    return [(f + df) + 8 * (r + dr) for df, dr in KING_STEPS if on_board(f + df, r + dr)]


NEIGHBOURS = [_neighbours(s) for s in range(64)]
NEAR = [set(n) for n in NEIGHBOURS]


def _rays(s, dirs):
    f, r = s % 8, s // 8
    out = []
    for df, dr in dirs:
        ray, nf, nr = [], f + df, r + dr
        while on_board(nf, nr):
            ray.append(nf + 8 * nr)
            nf, nr = nf + df, nr + dr
        if ray:
            out.append(ray)
    return out


class KXK:
    """Depth-limited minimax values for KQvK / KRvK, deepened one ply at a time.

    ``W_n(p)`` means White mates within n plies from p. The position set is
    found by expanding forward from the queried starts. ``W_0`` marks Black
    checkmated and each deeper layer is one minimax backup of the previous
    layer over that closed set. The mate distance of ``p`` is the first
    ``n`` with ``W_n(p)``; with no such ``n`` up to ``horizon`` the position
    is drawn, so ``horizon`` must exceed the longest win of the material.
    """

    def __init__(self, kind, horizon=64):
        self.kind = kind
        self.horizon = horizon
        self.rays = [_rays(s, ROOK_DIRS + (BISHOP_DIRS if kind == "Q" else [])) for s in range(64)]

    def _line(self, x, wk):
        # squares the piece reaches; the black king does not shield itself
        out = set()
        for ray in self.rays[x]:
            for t in ray:
                out.add(t)
                if t == wk:
                    break
        return out

    def children(self, pos):
        wk, x, bk, white = pos
        if white:
            out = [(t, x, bk, False) for t in NEIGHBOURS[wk] if t != x and t not in NEAR[bk]]
            for ray in self.rays[x]:
                for t in ray:
                    if t == wk or t == bk:
                        break
                    out.append((wk, t, bk, False))
            return out
        hit = self._line(x, wk)
        out = []
        for t in NEIGHBOURS[bk]:
            if t in NEAR[wk] or (t in hit and t != x):
                continue
            out.append(DRAWN if t == x else (wk, x, t, True))
        return out

    def black_in_check(self, pos):
        wk, x, bk, _ = pos
        return bk in self._line(x, wk)

    def solve_many(self, starts):
        index = {DRAWN: 0}
        nodes, kids = [DRAWN], [[]]
        for p in starts:
            if p not in index:
                index[p] = len(nodes)
                nodes.append(p)
        i = 1
        while i < len(nodes):
            row = []
            for q in self.children(nodes[i]):
                j = index.get(q)
                if j is None:
                    j = index[q] = len(nodes)
                    nodes.append(q)
                row.append(j)
            kids.append(row)
            i += 1
        n = len(nodes)
        white = np.array([p != DRAWN and p[3] for p in nodes])
        deg = np.array([len(k) for k in kids])
        ptr = np.concatenate([[0], np.cumsum(deg)])[:-1]
        flat = np.fromiter((j for k in kids for j in k), dtype=np.int64, count=int(deg.sum()))
        mated = np.array([p != DRAWN and not p[3] and not kids[i] and self.black_in_check(p)
                          for i, p in enumerate(nodes)])
        has = deg > 0
        dist = np.full(n, -1)
        won = mated.copy()
        dist[won] = 0
        for depth in range(1, self.horizon + 1):
            val = won[flat].astype(np.int8)
            some = np.zeros(n, dtype=bool)
            every = np.zeros(n, dtype=bool)
            some[has] = np.maximum.reduceat(val, ptr[has]) > 0
            every[has] = np.minimum.reduceat(val, ptr[has]) > 0
            nxt = mated | np.where(white, some, has & every)
            fresh = nxt & ~won
            if not fresh.any():
                break
            dist[fresh] = depth
            won = nxt
        out = []
        for p in starts:
            d = int(dist[index[p]])
            out.append(("WhiteWin", d) if d >= 0 else ("Draw", None))
        return out

    def solve(self, pos):
        return self.solve_many([pos])[0]


def kxk_position(codes, white):
    """(wk, x, bk, white) from a 64-code board with a white king, one white
    queen or rook and a black king."""
    wk = next(i for i, c in enumerate(codes) if c in (7, 8))
    bk = next(i for i, c in enumerate(codes) if c in (-7, -8))
    x = next(i for i, c in enumerate(codes) if c in (5, 6))
    return wk, x, bk, bool(white)


def naive_fen_moves(fen):
    """Legal moves in UCI text, for spot checks."""
    return sorted(sq_name(f) + sq_name(t) + (p.lower() if p else "") for f, t, p in legal(Position(fen)))
