import pytest

from chesschaos.kernel import (
    Color, FenError, GameState, IllegalMoveError, InvalidStateError, Kind, Move, StatusTag,
    apply_move, legal_moves, parse_fen, perft, square, status, to_fen,
)
from oracles import naive_fen_moves
from support import random_states

START = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"
KIWIPETE = "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1"


def pieces(spec, side=Color.WHITE):
    return GameState.from_pieces(spec, side)


def test_corner_king_has_three_moves():
    s = pieces({"a1": "K", "h8": "k"})
    assert [m.uci for m in legal_moves(s)] == ["a1b1", "a1a2", "a1b2"]


def test_queen_mate_in_one_position_move_count():
    s = pieces({"b6": "K", "h7": "Q", "a8": "k"})
    moves = legal_moves(s)
    assert len(moves) == 27
    king = [m for m in moves if m.from_sq == square("b6")]
    assert len(king) == 6
    assert all(m.to_sq not in (square("a7"), square("b7")) for m in king)


def test_stalemate_has_no_moves():
    s = pieces({"c7": "K", "b6": "Q", "a8": "k"}, Color.BLACK)
    assert legal_moves(s) == []
    assert status(s).tag is StatusTag.STALEMATE


def test_apply_relocates_and_advances_ply():
    s = pieces({"b6": "K", "h7": "Q", "a8": "k"})
    t = apply_move(s, Move(square("h7"), square("a7")))
    assert t.codes[square("a7")] == 6 and t.codes[square("h7")] == 0
    assert t.side_to_move is Color.BLACK and t.ply_index == 1
    assert status(t).tag is StatusTag.CHECKMATE and status(t).loser is Color.BLACK


def test_same_square_move_rejected():
    with pytest.raises(IllegalMoveError):
        Move(12, 12)


def test_double_step_flags_pawn():
    s = pieces({"e1": "K", "e2": "P", "e8": "k"})
    t = apply_move(s, Move(square("e2"), square("e4")))
    assert t.codes[square("e4")] == int(Kind.PAWN_EP) == 1
    # the flag lapses after the next move
    u = apply_move(t, Move(square("e8"), square("d8")))
    assert u.codes[square("e4")] == 2


def test_en_passant_capture():
    s = parse_fen("4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 2")
    t = apply_move(s, Move.from_uci("e5d6"))
    assert t.codes[square("d5")] == 0 and t.codes[square("d6")] == 2


def test_bare_kings_insufficient():
    for side in Color:
        assert status(pieces({"a1": "K", "h8": "k"}, side)).tag is StatusTag.INSUFFICIENT_MATERIAL


@pytest.mark.parametrize("fen,rule", [
    ("4k3/8/8/8/8/8/8/4K3 w - - 0 1", "EmptySquare"),
])
def test_illegal_move_diagnosis(fen, rule):
    with pytest.raises(IllegalMoveError) as exc:
        apply_move(parse_fen(fen), Move.from_uci("d2d4"))
    assert exc.value.rule == rule


def test_illegal_move_reasons():
    s = parse_fen("4k3/P7/8/8/8/8/7r/4K3 w - - 0 1")
    cases = {"e8d8": "WrongColor", "a7a8": "MissingPromotion", "e1e2": "KingInCheck",
             "e1e3": "PieceMovement"}
    for uci, rule in cases.items():
        with pytest.raises(IllegalMoveError) as exc:
            apply_move(s, Move.from_uci(uci))
        assert exc.value.rule == rule, uci


@pytest.mark.parametrize("codes_patch,reason", [
    ({0: 9}, "InvalidCode"),
    ({0: 8, 9: 8}, "KingCount"),
    ({0: 2}, "PawnRank"),
])
def test_state_invariants(codes_patch, reason):
    codes = [0] * 64
    codes[4], codes[60] = 8, -8
    for sq, c in codes_patch.items():
        codes[sq] = c
    with pytest.raises(InvalidStateError) as exc:
        GameState(tuple(codes), Color.WHITE)
    assert exc.value.reason == reason


def test_side_not_to_move_in_check_rejected():
    with pytest.raises(InvalidStateError) as exc:
        pieces({"a1": "K", "a8": "k", "a5": "R"}, Color.WHITE)
    assert exc.value.reason == "IllegalCheck"


def test_fen_round_trip_and_errors():
    for fen in (START, KIWIPETE, "4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 2"):
        assert to_fen(parse_fen(fen)) == fen
    for bad in ("", "8/8 w", "4k3/8/8/8/8/8/8/4K3 x - - 0 1", "4k3/8/8/8/8/8/8/4K3 w - e3 0 1"):
        with pytest.raises(FenError):
            parse_fen(bad)


def test_known_perft_counts():
    assert [perft(parse_fen(START), d) for d in (1, 2, 3, 4)] == [20, 400, 8902, 197281]
    assert [perft(parse_fen(KIWIPETE), d) for d in (1, 2, 3)] == [48, 2039, 97862]


def test_moves_sorted_and_stable():
    for s in random_states(200, seed=3):
        moves = legal_moves(s)
        keys = [m.key for m in moves]
        assert keys == sorted(keys) and len(set(keys)) == len(keys)
        assert legal_moves(s) == moves


def test_moves_match_naive_generator_on_random_states():
    for s in random_states(150, seed=4):
        assert [m.uci for m in sorted(legal_moves(s), key=lambda m: m.uci)] == naive_fen_moves(to_fen(s))


def test_successors_stay_valid_and_terminal_iff_no_moves():
    for s in random_states(300, seed=5):
        moves = legal_moves(s)
        assert status(s).is_terminal == (not moves)
        for m in moves:
            apply_move(s, m)  # GameState validates on construction
