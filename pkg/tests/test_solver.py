import numpy as np
import pytest

from chesschaos import solver
from chesschaos.kernel import Color, GameState, Move, StatusTag, apply_move, legal_moves, parse_fen, square, status
from chesschaos.solver import (
    CoverageError, MaterialMismatchError, NoMoveError, StrategyTable, TruncatedFile,
    UnrecognizedFormat, UnsupportedMaterialError, Wdl, build_tablebase, control_g, load_table,
    material_codes, probe, pure_strategy_f, save_table, strategy_move,
)
from conftest import MATE_IN_ONE, MATED, STALEMATE


def test_material_ids():
    assert material_codes("KQvK") == (8, -8, 6)
    assert material_codes("KvKP") == (8, -8, -2)
    assert "KRvK" in solver.supported_materials()
    with pytest.raises(UnsupportedMaterialError):
        material_codes("KQQvK")
    with pytest.raises(UnsupportedMaterialError):
        material_codes("KXvK")


def test_kvk_all_draw(kvk):
    valid = kvk.valid
    assert valid.sum() == 7224  # 2 * (64 * 63 - 420 adjacent placements)
    assert (kvk.wdl[valid] == 0).all()
    s = GameState.from_pieces({"a1": "K", "h8": "k"})
    e = probe(kvk, s)
    assert e.wdl is Wdl.DRAW and e.dtm_plies is None and e.best_move is None


def test_mate_in_one_entry(kqk):
    e = probe(kqk, parse_fen(MATE_IN_ONE))
    assert e.wdl is Wdl.WHITE_WIN and e.dtm_plies == 1
    assert e.best_move == Move(square("h7"), square("a7"))


def test_mate_in_one_tie_break_is_smallest_mating_move(kqk):
    s = parse_fen(MATE_IN_ONE)
    mates = [m for m in legal_moves(s) if status(apply_move(s, m)).tag is StatusTag.CHECKMATE]
    assert len(mates) > 1
    assert probe(kqk, s).best_move == min(mates)


def test_stalemate_and_mate_entries(kqk):
    e = probe(kqk, parse_fen(STALEMATE))
    assert e.wdl is Wdl.DRAW and e.terminal and e.dtm_plies is None
    m = probe(kqk, parse_fen(MATED))
    assert m.wdl is Wdl.WHITE_WIN and m.dtm_plies == 0 and m.terminal and m.best_move is None


def test_probe_material_mismatch(kqk):
    with pytest.raises(MaterialMismatchError):
        probe(kqk, GameState.from_pieces({"b6": "K", "h7": "R", "a8": "k"}))


def test_f_and_g_examples(kqk, tables):
    s = parse_fen(MATE_IN_ONE)
    t = pure_strategy_f(kqk, s)
    assert status(t).tag is StatusTag.CHECKMATE
    g = control_g(kqk, s)
    assert g.nonzero() == {48: 6, 55: -6}
    with pytest.raises(NoMoveError):
        pure_strategy_f(kqk, parse_fen(MATED))
    with pytest.raises(NoMoveError):
        control_g(kqk, parse_fen(MATED))
    # bare kings: the smallest move keeps the draw
    k = GameState.from_pieces({"a1": "K", "h8": "k"})
    assert strategy_move(tables, k) == legal_moves(k)[0]


def test_dtm_recurrence_on_sample(kqk, tables):
    rng = np.random.default_rng(7)
    idx = rng.choice(np.nonzero(kqk.valid & ~kqk.terminal)[0], 1500, replace=False)
    for i in idx:
        s = kqk.state(int(i))
        e = kqk.entry(int(i))
        if e.wdl is Wdl.DRAW:
            nxt = probe(tables, pure_strategy_f(tables, s))
            assert nxt.wdl is Wdl.DRAW
            continue
        mover_wins = (e.wdl is Wdl.WHITE_WIN) == s.white
        children = [probe(tables, apply_move(s, m)) for m in legal_moves(s)]
        if mover_wins:
            assert probe(tables, pure_strategy_f(tables, s)).dtm_plies == e.dtm_plies - 1
            assert min(c.dtm_plies for c in children if c.wdl is e.wdl) == e.dtm_plies - 1
        else:
            assert all(c.wdl is e.wdl for c in children)
            longest = max(c.dtm_plies for c in children)
            assert e.dtm_plies == 1 + longest
            assert probe(tables, pure_strategy_f(tables, s)).dtm_plies == longest


def test_every_state_classified(kqk, krk):
    for t in (kqk, krk):
        valid = t.valid
        decided = valid & (t.wdl != 0)
        assert (t.dtm[decided] != solver.NO_VALUE).all()
        assert (t.dtm[valid & (t.wdl == 0)] == solver.NO_VALUE).all()
        live = valid & ~t.terminal
        assert (t.moves[live] != solver.NO_VALUE).all()


def test_known_longest_wins(kqk, krk):
    # mate in 10 moves for KQvK and 16 for KRvK, White to move
    assert int(kqk.dtm[:kqk.half][kqk.valid[:kqk.half] & (kqk.wdl[:kqk.half] == 1)].max()) == 19
    assert int(krk.dtm[:krk.half][krk.valid[:krk.half] & (krk.wdl[:krk.half] == 1)].max()) == 31


def test_color_mirror_symmetry(kqk, tables):
    kkq = tables.get("KvKQ")
    rng = np.random.default_rng(3)
    for i in rng.choice(np.nonzero(kqk.valid)[0], 300, replace=False):
        s = kqk.state(int(i))
        mirrored = [0] * 64
        for sq, c in enumerate(s.codes):
            mirrored[sq ^ 56] = -c
        m = GameState(tuple(mirrored), s.side_to_move.other)
        a, b = kqk.entry(int(i)), probe(kkq, m)
        assert b.dtm_plies == a.dtm_plies
        assert b.wdl == {Wdl.DRAW: Wdl.DRAW, Wdl.WHITE_WIN: Wdl.BLACK_WIN}[a.wdl]


def test_pawn_endgame_known_results(tables):
    kpk = tables.get("KPvK")
    # pawn on the 7th supported by its king promotes
    assert probe(kpk, parse_fen("8/1P6/1K6/8/8/8/8/6k1 w - - 0 1")).wdl is Wdl.WHITE_WIN
    # rook pawn with the defending king in the corner is a draw
    assert probe(kpk, parse_fen("k7/8/1K6/P7/8/8/8/8 w - - 0 1")).wdl is Wdl.DRAW
    # black to move captures the undefended pawn
    assert probe(kpk, parse_fen("8/8/8/8/8/8/1kP5/7K b - - 0 1")).wdl is Wdl.DRAW


def test_en_passant_slots(tables):
    kvkp = tables.get("KvKP")
    s = parse_fen("8/8/8/8/4p3/8/8/K6k b - - 0 1")
    t = parse_fen("8/8/8/8/4p3/8/8/K6k w - - 0 2")
    assert probe(kvkp, s).wdl is Wdl.BLACK_WIN
    assert kvkp.index(s) != kvkp.index(t)


def test_builds_are_deterministic(tmp_path, krk, tables):
    again = build_tablebase("KRvK", resolver=tables.get)
    assert again == krk
    save_table(krk, tmp_path / "a.cstb")
    save_table(again, tmp_path / "b.cstb")
    assert (tmp_path / "a.cstb").read_bytes() == (tmp_path / "b.cstb").read_bytes()


def test_save_load_round_trip(tmp_path, kvk):
    path = tmp_path / "kvk.cstb"
    save_table(kvk, path)
    data = path.read_bytes()
    assert data[:4] == b"CSTB" and data[4] == 1
    assert len(data) == 4 + 1 + 2 + 3 + 4 + 5 * len(kvk)
    assert load_table(path) == kvk


def test_load_errors(tmp_path, kvk):
    path = tmp_path / "kvk.cstb"
    save_table(kvk, path)
    data = path.read_bytes()
    (tmp_path / "short.cstb").write_bytes(data[:-7])
    with pytest.raises(TruncatedFile) as exc:
        load_table(tmp_path / "short.cstb")
    assert exc.value.expected == len(data) and exc.value.actual == len(data) - 7
    assert str(len(data)) in str(exc.value)
    (tmp_path / "magic.cstb").write_bytes(b"XXXX" + data[4:])
    with pytest.raises(UnrecognizedFormat):
        load_table(tmp_path / "magic.cstb")


def test_table_state_index_round_trip(kqk):
    rng = np.random.default_rng(1)
    for i in rng.choice(np.nonzero(kqk.valid)[0], 500, replace=False):
        assert kqk.index(kqk.state(int(i))) == i


def test_castling_outside_coverage(kvk):
    s = parse_fen("4k3/8/8/8/8/8/8/4K2R w K - 0 1")
    with pytest.raises((CoverageError, MaterialMismatchError)):
        probe(kvk, s)


def test_table_constructor_checks_length():
    with pytest.raises(solver.TablebaseFormatError):
        StrategyTable("KvK", np.zeros(3), np.zeros(3), np.zeros(3))
