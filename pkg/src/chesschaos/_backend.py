"""Select the compiled kernel when available, else the pure-Python one.

Set ``CHESSCHAOS_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernel

if os.environ.get("CHESSCHAOS_PURE_PYTHON"):
    impl = _pykernel
    NAME = "python"
else:
    try:
        from . import _ckernel as impl
        NAME = "cython"
    except ImportError:  # extension not built
        impl = _pykernel
        NAME = "python"

legal_moves = impl.legal_moves
has_legal_move = impl.has_legal_move
make_move = impl.make_move
in_check = impl.in_check
attacked = impl.attacked
perft = impl.perft
validate = impl.validate
classify = impl.classify
signature = impl.signature
index_of = impl.index_of
slot_board = impl.slot_board
slot_count = impl.slot_count
expand = impl.expand
retrograde = impl.retrograde
select_moves = impl.select_moves
move_key = _pykernel.move_key
