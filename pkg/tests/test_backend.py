"""The compiled kernel and the pure-Python fallback must agree exactly."""

import os
import subprocess
import sys

import numpy as np
import pytest

from chesschaos import _backend, _pykernel, solver
from chesschaos.solver import build_tablebase, material_codes
from support import random_states

ck = pytest.importorskip("chesschaos._ckernel")


def test_backend_selected():
    assert _backend.NAME in ("cython", "python")
    env = dict(os.environ, CHESSCHAOS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from chesschaos import _backend; print(_backend.NAME)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_move_generation_agrees():
    for s in random_states(400, seed=41):
        args = (s.codes, s.white, s.castling_mask)
        assert list(ck.legal_moves(*args)) == list(_pykernel.legal_moves(*args))
        assert ck.classify(*args) == _pykernel.classify(*args)
        assert ck.validate(*args) == _pykernel.validate(*args)
        for m in _pykernel.legal_moves(*args):
            a = ck.make_move(*args, m)
            b = _pykernel.make_move(*args, m)
            assert list(a[0]) == list(b[0]) and a[1] == b[1]


def test_perft_agrees():
    for s in random_states(20, seed=42):
        args = (s.codes, s.white, s.castling_mask)
        assert ck.perft(*args, 3) == _pykernel.perft(*args, 3)


@pytest.mark.parametrize("material", ["KQvK", "KvKP", "KPvK"])
def test_index_and_expand_agree(material):
    codes = material_codes(material)
    n = _pykernel.slot_count(codes)
    rng = np.random.default_rng(0)
    for idx in rng.integers(0, n, 300):
        a, b = ck.slot_board(codes, int(idx)), _pykernel.slot_board(codes, int(idx))
        assert (a is None) == (b is None)
        if a is not None:
            assert list(a[0]) == list(b[0]) and a[1] == b[1]
            assert ck.index_of(a[0], a[1]) == idx
    start = int(rng.integers(0, n - 1500))
    for x, y in zip(ck.expand(codes, start, start + 1500), _pykernel.expand(codes, start, start + 1500)):
        assert np.array_equal(x, y)


def test_pure_build_matches_compiled(monkeypatch, kvk):
    for name in ("expand", "retrograde", "select_moves", "slot_count", "signature"):
        monkeypatch.setattr(solver.B, name, getattr(_pykernel, name))
    assert build_tablebase("KvK") == kvk
