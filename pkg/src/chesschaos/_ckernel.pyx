# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; keep in lockstep with ``_pykernel.py``."""

from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy, memset

import numpy as np

cdef enum:
    MAXMOVES = 320

cdef int OK = 0, ERR_CODE = 1, ERR_KINGS = 2, ERR_PAWN_RANK = 3
cdef int ERR_CHECK = 4, ERR_EP = 5, ERR_CASTLING = 6
cdef int INVALID = -1, ONGOING = 0, CHECKMATE = 1, STALEMATE = 2, INSUFFICIENT = 3
cdef int UNKNOWN = 0, WIN = 1, LOSS = 2, DRAW = 3
cdef int CASTLE_WK = 1, CASTLE_WQ = 2, CASTLE_BK = 4, CASTLE_BQ = 8
cdef int PAWN_RADIX = 72

cdef int KN[64][8]
cdef int KN_N[64]
cdef int KG[64][8]
cdef int KG_N[64]
cdef int PA[2][64][2]
cdef int PA_N[2][64]
cdef int RAY[8][64][7]
cdef int RAY_N[8][64]


cdef void _fill_steps(int (*table)[8], int* counts, int[:, :] steps):
    cdef int sq, f, r, i, nf, nr, k
    for sq in range(64):
        f = sq & 7
        r = sq >> 3
        k = 0
        for i in range(steps.shape[0]):
            nf = f + steps[i, 0]
            nr = r + steps[i, 1]
            if 0 <= nf < 8 and 0 <= nr < 8:
                table[sq][k] = nr * 8 + nf
                k += 1
        counts[sq] = k


cdef void _init_tables():
    cdef int sq, f, r, d, k, df, dr, color, i
    _fill_steps(KN, KN_N, np.array([[1, 2], [2, 1], [2, -1], [1, -2], [-1, -2], [-2, -1], [-2, 1], [-1, 2]], dtype=np.intc))
    _fill_steps(KG, KG_N, np.array([[1, 0], [1, 1], [0, 1], [-1, 1], [-1, 0], [-1, -1], [0, -1], [1, -1]], dtype=np.intc))
    dirs = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))
    for d in range(8):
        df, dr = dirs[d]
        for sq in range(64):
            f = (sq & 7) + df
            r = (sq >> 3) + dr
            k = 0
            while 0 <= f < 8 and 0 <= r < 8:
                RAY[d][sq][k] = r * 8 + f
                k += 1
                f += df
                r += dr
            RAY_N[d][sq] = k
    for color in range(2):
        dr = 1 if color == 0 else -1
        for sq in range(64):
            f = sq & 7
            r = (sq >> 3) + dr
            k = 0
            if 0 <= r < 8:
                for i in (-1, 1):
                    if 0 <= f + i < 8:
                        PA[color][sq][k] = r * 8 + f + i
                        k += 1
            PA_N[color][sq] = k


_init_tables()


cdef inline int move_key_c(int m) nogil:
    return ((m & 63) << 9) | (((m >> 6) & 63) << 3) | (m >> 12)


def move_key(int move):
    return move_key_c(move)


cdef bint c_attacked(const signed char* b, int sq, bint by_white) nogil:
    cdef int s = 1 if by_white else -1
    cdef int i, p, c, d
    cdef int pc = 1 if by_white else 0
    for i in range(PA_N[pc][sq]):
        c = b[PA[pc][sq][i]] * s
        if c == 1 or c == 2:
            return True
    for i in range(KN_N[sq]):
        if b[KN[sq][i]] * s == 3:
            return True
    for i in range(KG_N[sq]):
        c = b[KG[sq][i]] * s
        if c == 7 or c == 8:
            return True
    for d in range(8):
        for i in range(RAY_N[d][sq]):
            c = b[RAY[d][sq][i]]
            if c != 0:
                c *= s
                if d < 4:
                    if c == 5 or c == 6:
                        return True
                else:
                    if c == 4 or c == 6:
                        return True
                break
    return False


cdef int c_king_square(const signed char* b, bint white) nogil:
    cdef int s = 1 if white else -1
    cdef int sq, c
    for sq in range(64):
        c = b[sq] * s
        if c == 7 or c == 8:
            return sq
    return -1


cdef bint c_in_check(const signed char* b, bint white) nogil:
    cdef int k = c_king_square(b, white)
    return k >= 0 and c_attacked(b, k, not white)


cdef int c_pseudo(const signed char* b, bint white, int castling, int* out) nogil:
    cdef int s = 1 if white else -1
    cdef int n = 0
    cdef int fwd = 8 * s
    cdef int start_rank = 1 if white else 6
    cdef int last_rank = 7 if white else 0
    cdef int ep_rank = 4 if white else 3
    cdef int pc = 0 if white else 1
    cdef int sq, c, r, t, promo, i, d, o, home, kbit, qbit
    cdef bint opp = not white
    for sq in range(64):
        c = b[sq] * s
        if c <= 0:
            continue
        if c <= 2:
            r = sq >> 3
            t = sq + fwd
            if b[t] == 0:
                if (t >> 3) == last_rank:
                    for promo in range(3, 7):
                        out[n] = sq | (t << 6) | (promo << 12)
                        n += 1
                else:
                    out[n] = sq | (t << 6)
                    n += 1
                    if r == start_rank and b[t + fwd] == 0:
                        out[n] = sq | ((t + fwd) << 6)
                        n += 1
            for i in range(PA_N[pc][sq]):
                t = PA[pc][sq][i]
                if b[t] * s < 0:
                    if (t >> 3) == last_rank:
                        for promo in range(3, 7):
                            out[n] = sq | (t << 6) | (promo << 12)
                            n += 1
                    else:
                        out[n] = sq | (t << 6)
                        n += 1
                elif b[t] == 0 and r == ep_rank and b[t - fwd] == -s:
                    out[n] = sq | (t << 6)
                    n += 1
        elif c == 3:
            for i in range(KN_N[sq]):
                t = KN[sq][i]
                if b[t] * s <= 0:
                    out[n] = sq | (t << 6)
                    n += 1
        elif c >= 7:
            for i in range(KG_N[sq]):
                t = KG[sq][i]
                if b[t] * s <= 0:
                    out[n] = sq | (t << 6)
                    n += 1
            if c == 7 and castling:
                home = 4 if white else 60
                if sq == home:
                    kbit = CASTLE_WK if white else CASTLE_BK
                    qbit = CASTLE_WQ if white else CASTLE_BQ
                    if (castling & kbit and b[home + 1] == 0 and b[home + 2] == 0
                            and b[home + 3] == 5 * s
                            and not c_attacked(b, home, opp)
                            and not c_attacked(b, home + 1, opp)
                            and not c_attacked(b, home + 2, opp)):
                        out[n] = home | ((home + 2) << 6)
                        n += 1
                    if (castling & qbit and b[home - 1] == 0 and b[home - 2] == 0
                            and b[home - 3] == 0 and b[home - 4] == 5 * s
                            and not c_attacked(b, home, opp)
                            and not c_attacked(b, home - 1, opp)
                            and not c_attacked(b, home - 2, opp)):
                        out[n] = home | ((home - 2) << 6)
                        n += 1
        else:
            for d in range(8):
                if d < 4 and c == 4:
                    continue
                if d >= 4 and c == 5:
                    continue
                for i in range(RAY_N[d][sq]):
                    t = RAY[d][sq][i]
                    o = b[t] * s
                    if o > 0:
                        break
                    out[n] = sq | (t << 6)
                    n += 1
                    if o < 0:
                        break
    return n


cdef inline int _castle_clear(int sq) nogil:
    if sq == 0:
        return CASTLE_WQ
    if sq == 7:
        return CASTLE_WK
    if sq == 4:
        return CASTLE_WK | CASTLE_WQ
    if sq == 56:
        return CASTLE_BQ
    if sq == 63:
        return CASTLE_BK
    if sq == 60:
        return CASTLE_BK | CASTLE_BQ
    return 0


cdef int c_make(const signed char* b, bint white, int castling, int move, signed char* nb) nogil:
    cdef int s = 1 if white else -1
    cdef int frm = move & 63
    cdef int to = (move >> 6) & 63
    cdef int promo = move >> 12
    cdef int piece, c, sq, lo, diff
    memcpy(nb, b, 64)
    piece = nb[frm]
    c = piece * s
    lo = 32 if white else 24
    for sq in range(lo, lo + 8):
        if nb[sq] == -s:
            nb[sq] = -2 * s
    nb[frm] = 0
    if c <= 2:
        diff = to - frm
        if diff == 16 or diff == -16:
            nb[to] = s
        else:
            if nb[to] == 0 and diff != 8 and diff != -8:
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
        castling &= ~(_castle_clear(frm) | _castle_clear(to))
        if c >= 7:
            castling &= ~((CASTLE_WK | CASTLE_WQ) if white else (CASTLE_BK | CASTLE_BQ))
        for sq in range(64):
            c = nb[sq]
            if c == 7 or c == 8:
                nb[sq] = 7 if castling & (CASTLE_WK | CASTLE_WQ) else 8
            elif c == -7 or c == -8:
                nb[sq] = -7 if castling & (CASTLE_BK | CASTLE_BQ) else -8
    return castling


cdef int c_legal(const signed char* b, bint white, int castling, int* out) nogil:
    cdef int pseudo[MAXMOVES]
    cdef signed char nb[64]
    cdef int np_ = c_pseudo(b, white, castling, pseudo)
    cdef int n = 0, i, j, m, k
    for i in range(np_):
        c_make(b, white, castling, pseudo[i], nb)
        if not c_in_check(nb, white):
            m = pseudo[i]
            k = move_key_c(m)
            j = n
            while j > 0 and move_key_c(out[j - 1]) > k:
                out[j] = out[j - 1]
                j -= 1
            out[j] = m
            n += 1
    return n


cdef void _load(object board, signed char* b) except *:
    cdef int i
    if len(board) != 64:
        raise ValueError("board must have 64 squares")
    for i in range(64):
        b[i] = <signed char> board[i]


def attacked(board, int sq, bint by_white):
    cdef signed char b[64]
    _load(board, b)
    return c_attacked(b, sq, by_white)


def king_square(board, bint white):
    cdef signed char b[64]
    _load(board, b)
    return c_king_square(b, white)


def in_check(board, bint white):
    cdef signed char b[64]
    _load(board, b)
    return c_in_check(b, white)


def legal_moves(board, bint white, int castling=0):
    cdef signed char b[64]
    cdef int out[MAXMOVES]
    _load(board, b)
    cdef int n = c_legal(b, white, castling, out)
    return [out[i] for i in range(n)]


def has_legal_move(board, bint white, int castling=0):
    cdef signed char b[64]
    cdef int out[MAXMOVES]
    _load(board, b)
    return c_legal(b, white, castling, out) > 0


def make_move(board, bint white, int castling, int move):
    cdef signed char b[64]
    cdef signed char nb[64]
    _load(board, b)
    cdef int nc = c_make(b, white, castling, move, nb)
    return [nb[i] for i in range(64)], nc


cdef long long c_perft(const signed char* b, bint white, int castling, int depth) nogil:
    cdef int out[MAXMOVES]
    cdef signed char nb[64]
    cdef int n = c_legal(b, white, castling, out)
    cdef int i, nc
    cdef long long total = 0
    if depth == 1:
        return n
    for i in range(n):
        nc = c_make(b, white, castling, out[i], nb)
        total += c_perft(nb, not white, nc, depth - 1)
    return total


def perft(board, bint white, int castling, int depth):
    cdef signed char b[64]
    _load(board, b)
    if depth == 0:
        return 1
    return c_perft(b, white, castling, depth)


cdef int c_validate(const signed char* b, bint white, int castling) nogil:
    cdef int wk = 0, bk = 0, ep = 0
    cdef int sq, c, a, r, s, lo, k, color, home, kbit, qbit, rights
    cdef bint found
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
        s = -1 if white else 1
        lo = 24 if s > 0 else 32
        found = False
        for sq in range(lo, lo + 8):
            if b[sq] == s and b[sq - 8 * s] == 0 and b[sq - 16 * s] == 0:
                found = True
        if not found:
            return ERR_EP
    for color in range(2):
        s = 1 if color == 0 else -1
        home = 4 if color == 0 else 60
        kbit = CASTLE_WK if color == 0 else CASTLE_BK
        qbit = CASTLE_WQ if color == 0 else CASTLE_BQ
        rights = castling & (kbit | qbit)
        k = c_king_square(b, color == 0)
        if (b[k] * s == 7) != (rights != 0):
            return ERR_CASTLING
        if rights:
            if k != home:
                return ERR_CASTLING
            if rights & kbit and b[home + 3] != 5 * s:
                return ERR_CASTLING
            if rights & qbit and b[home - 4] != 5 * s:
                return ERR_CASTLING
    if c_in_check(b, not white):
        return ERR_CHECK
    return OK


def validate(board, bint white, int castling):
    cdef signed char b[64]
    cdef int i, v
    if len(board) != 64:
        raise ValueError("board must have 64 squares")
    for i in range(64):
        v = board[i]
        if v < -8 or v > 8:
            return ERR_CODE
        b[i] = <signed char> v
    return c_validate(b, white, castling)


cdef bint _bare_kings(const signed char* b) nogil:
    cdef int sq, c
    for sq in range(64):
        c = b[sq]
        if c != 0 and c != 7 and c != 8 and c != -7 and c != -8:
            return False
    return True


def classify(board, bint white, int castling):
    cdef signed char b[64]
    cdef int out[MAXMOVES]
    _load(board, b)
    if c_legal(b, white, castling, out) > 0:
        return INSUFFICIENT if _bare_kings(b) else ONGOING
    return CHECKMATE if c_in_check(b, white) else STALEMATE


# ---------------------------------------------------------------- tablebases

cdef inline int _sig_bit(int c) nogil:
    # Q R B N P -> 0..4, black offset by 5
    cdef int a = -c if c < 0 else c
    cdef int bit
    if a == 6:
        bit = 0
    elif a == 5:
        bit = 1
    elif a == 4:
        bit = 2
    elif a == 3:
        bit = 3
    else:
        bit = 4
    return bit if c > 0 else bit + 5


cdef int c_signature(const signed char* b) nogil:
    """-1 on duplicated piece kind."""
    cdef int sig = 0, sq, c, bit
    for sq in range(64):
        c = b[sq]
        if c == 0 or c == 7 or c == 8 or c == -7 or c == -8:
            continue
        bit = _sig_bit(c)
        if (sig >> bit) & 1:
            return -1
        sig |= 1 << bit
    return sig


def signature(board):
    cdef signed char b[64]
    _load(board, b)
    cdef int sig = c_signature(b)
    if sig < 0:
        raise ValueError("duplicated piece kind is outside the indexable sets")
    return sig


cdef long long c_index_of(const signed char* b, bint white) nogil:
    cdef int digit[10]
    cdef int radix[10]
    cdef int present = 0
    cdef int wk = -1, bk = -1, sq, c, bit, a
    cdef long long idx, mul
    for sq in range(64):
        c = b[sq]
        if c == 0:
            continue
        if c == 8 or c == 7:
            wk = sq
        elif c == -8 or c == -7:
            bk = sq
        else:
            bit = _sig_bit(c)
            a = -c if c < 0 else c
            if a == 1:
                digit[bit] = 64 + (sq & 7)
            else:
                digit[bit] = sq
            radix[bit] = PAWN_RADIX if a <= 2 else 64
            present |= 1 << bit
    idx = wk
    mul = 64
    idx += bk * mul
    mul *= 64
    for bit in range(10):
        if (present >> bit) & 1:
            idx += digit[bit] * mul
            mul *= radix[bit]
    if not white:
        idx += mul
    return idx


def index_of(board, bint white):
    cdef signed char b[64]
    _load(board, b)
    return c_index_of(b, white)


cdef bint c_slot_board(const int* mat, int nmat, long long total, long long idx,
                       signed char* b, bint* white) nogil:
    cdef long long rem
    cdef int i, c, d, sq, code, f
    white[0] = idx < total
    rem = idx % total
    memset(b, 0, 64)
    for i in range(nmat):
        c = mat[i]
        if (c <= 2 and c >= -2):
            d = <int> (rem % PAWN_RADIX)
            rem //= PAWN_RADIX
            if d < 64:
                sq = d
                code = c
            else:
                f = d - 64
                sq = (24 + f) if c > 0 else (32 + f)
                code = 1 if c > 0 else -1
        else:
            sq = <int> (rem % 64)
            rem //= 64
            code = c
        if b[sq] != 0:
            return False
        b[sq] = <signed char> code
    return True


def slot_count(material):
    cdef long long total = 2
    for c in material:
        total *= PAWN_RADIX if abs(c) <= 2 else 64
    return total


def slot_board(material, long long idx):
    cdef int mat[16]
    cdef int nmat = len(material), i
    cdef signed char b[64]
    cdef bint white
    cdef long long total = slot_count(material) // 2
    for i in range(nmat):
        mat[i] = material[i]
    if not c_slot_board(mat, nmat, total, idx, b, &white):
        return None
    return [b[i] for i in range(64)], bool(white)


cdef void* _addr(arr):
    cdef size_t p = arr.ctypes.data
    return <void*> p


def expand(material, long long start=0, long long stop=-1):
    cdef int mat[16]
    cdef int nmat = len(material), i, k, nmoves
    cdef long long n_total = slot_count(material)
    cdef long long total = n_total // 2
    cdef long long s, n, e = 0, cap
    cdef signed char b[64]
    cdef signed char nb[64]
    cdef int out[MAXMOVES]
    cdef bint white
    cdef int sig
    for i in range(nmat):
        mat[i] = material[i]
    if stop < 0:
        stop = n_total
    n = stop - start
    kind_a = np.full(n, INVALID, dtype=np.int8)
    ptr_a = np.zeros(n + 1, dtype=np.int64)
    cdef signed char[:] kind = kind_a
    cdef long long[:] ptr = ptr_a
    cap = 1024 + n * 8
    cdef unsigned short* mv = <unsigned short*> malloc(cap * sizeof(unsigned short))
    cdef long long* ch = <long long*> malloc(cap * sizeof(long long))
    cdef short* sg = <short*> malloc(cap * sizeof(short))
    if mv == NULL or ch == NULL or sg == NULL:
        raise MemoryError()
    try:
        for s in range(n):
            if c_slot_board(mat, nmat, total, start + s, b, &white) and c_validate(b, white, 0) == OK:
                nmoves = c_legal(b, white, 0, out)
                if nmoves == 0:
                    kind[s] = CHECKMATE if c_in_check(b, white) else STALEMATE
                elif _bare_kings(b):
                    kind[s] = INSUFFICIENT
                else:
                    kind[s] = ONGOING
                    if e + nmoves > cap:
                        cap = cap * 2 + nmoves
                        mv = <unsigned short*> realloc(mv, cap * sizeof(unsigned short))
                        ch = <long long*> realloc(ch, cap * sizeof(long long))
                        sg = <short*> realloc(sg, cap * sizeof(short))
                        if mv == NULL or ch == NULL or sg == NULL:
                            raise MemoryError()
                    for k in range(nmoves):
                        c_make(b, white, 0, out[k], nb)
                        sig = c_signature(nb)
                        if sig < 0:
                            raise ValueError("duplicated piece kind is outside the indexable sets")
                        mv[e] = <unsigned short> out[k]
                        ch[e] = c_index_of(nb, not white)
                        sg[e] = <short> sig
                        e += 1
            ptr[s + 1] = e
        moves_a = np.empty(e, dtype=np.uint16)
        child_a = np.empty(e, dtype=np.int64)
        sig_a = np.empty(e, dtype=np.int16)
        if e:
            memcpy(_addr(moves_a), mv, e * sizeof(unsigned short))
            memcpy(_addr(child_a), ch, e * sizeof(long long))
            memcpy(_addr(sig_a), sg, e * sizeof(short))
    finally:
        free(mv)
        free(ch)
        free(sg)
    return kind_a, ptr_a, moves_a, child_a, sig_a


cdef inline void _push(list buckets, int level, long long s, int r) except *:
    while len(buckets) <= level:
        buckets.append([])
    (<list> buckets[level]).append((s << 2) | r)


def retrograde(kind_a, edge_ptr_a, edge_child_a, ext_res_a, ext_dtm_a, pred_ptr_a, pred_list_a):
    cdef const signed char[:] kind = kind_a
    cdef const long long[:] ptr = edge_ptr_a
    cdef const long long[:] child = edge_child_a
    cdef const signed char[:] eres = ext_res_a
    cdef const int[:] edtm = ext_dtm_a
    cdef const long long[:] pptr = pred_ptr_a
    cdef const long long[:] plist = pred_list_a
    cdef long long n = kind.shape[0]
    res_a = np.zeros(n, dtype=np.int8)
    dtm_a = np.zeros(n, dtype=np.int32)
    counter_a = np.zeros(n, dtype=np.int32)
    maxloss_a = np.zeros(n, dtype=np.int32)
    cdef signed char[:] res = res_a
    cdef int[:] dtm = dtm_a
    cdef int[:] counter = counter_a
    cdef int[:] maxloss = maxloss_a
    cdef long long s, e, j, p, item
    cdef int k, r, best_win, cnt, ml, level
    cdef list buckets = [[]]
    cdef list bucket
    for s in range(n):
        k = kind[s]
        if k == CHECKMATE:
            _push(buckets, 0, s, LOSS)
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
                _push(buckets, best_win, s, WIN)
            elif cnt == 0:
                _push(buckets, ml, s, LOSS)
    level = 0
    while level < len(buckets):
        bucket = buckets[level]
        for item in bucket:
            s = item >> 2
            r = item & 3
            if res[s] != UNKNOWN:
                continue
            res[s] = r
            dtm[s] = level
            for j in range(pptr[s], pptr[s + 1]):
                p = plist[j]
                if res[p] != UNKNOWN:
                    continue
                if r == LOSS:
                    _push(buckets, level + 1, p, WIN)
                else:
                    counter[p] -= 1
                    if level + 1 > maxloss[p]:
                        maxloss[p] = level + 1
                    if counter[p] == 0:
                        _push(buckets, maxloss[p], p, LOSS)
        buckets[level] = None
        level += 1
    for s in range(n):
        if res[s] == UNKNOWN and kind[s] != INVALID:
            res[s] = DRAW
    return res_a, dtm_a


def select_moves(kind_a, res_a, dtm_a, edge_ptr_a, edge_child_a, edge_move_a, ext_res_a, ext_dtm_a):
    cdef const signed char[:] kind = kind_a
    cdef const signed char[:] res = res_a
    cdef const int[:] dtm = dtm_a
    cdef const long long[:] ptr = edge_ptr_a
    cdef const long long[:] child = edge_child_a
    cdef const unsigned short[:] mv = edge_move_a
    cdef const signed char[:] eres = ext_res_a
    cdef const int[:] edtm = ext_dtm_a
    cdef long long n = kind.shape[0]
    best_a = np.full(n, 0xFFFF, dtype=np.uint16)
    cdef unsigned short[:] best = best_a
    cdef long long s, e, c
    cdef int r, want, cr, cd
    cdef bint ok
    for s in range(n):
        if kind[s] != ONGOING:
            continue
        r = res[s]
        want = dtm[s] - 1
        for e in range(ptr[s], ptr[s + 1]):
            c = child[e]
            if c >= 0:
                cr = res[c]
                cd = dtm[c]
            else:
                cr = eres[e]
                cd = edtm[e]
            if r == WIN:
                ok = cr == LOSS and cd == want
            elif r == LOSS:
                ok = cd == want
            else:
                ok = cr == DRAW
            if ok:
                best[s] = mv[e]
                break
    return best_a
