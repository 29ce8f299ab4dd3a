"""Compiled vs pure-Python kernel timings.

    python benchmarks/bench_kernels.py [--repeat N]

Both kernels are imported directly, so the environment switch that picks the
runtime backend does not matter here.
"""

import argparse
import sys
import timeit

from chesschaos import _pykernel
from chesschaos.kernel import parse_fen
from chesschaos.solver import material_codes

try:
    from chesschaos import _ckernel
except ImportError:
    _ckernel = None

START = parse_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1")
KIWIPETE = parse_fen("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1")
KQK = material_codes("KQvK")

CASES = [
    ("perft(start, 3)", lambda k: k.perft(START.codes, True, START.castling_mask, 3)),
    ("perft(kiwipete, 2)", lambda k: k.perft(KIWIPETE.codes, True, KIWIPETE.castling_mask, 2)),
    ("expand(KQvK, 20k slots)", lambda k: k.expand(KQK, 100_000, 120_000)),
]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _ckernel is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    print(f"{'case':<26}{'python s':>11}{'cython s':>11}{'speedup':>10}")
    for name, fn in CASES:
        assert fn(_pykernel) is not None
        py = min(timeit.repeat(lambda: fn(_pykernel), number=1, repeat=args.repeat))
        cy = min(timeit.repeat(lambda: fn(_ckernel), number=1, repeat=args.repeat))
        print(f"{name:<26}{py:>11.4f}{cy:>11.4f}{py / cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
