"""Play under the exact strategy as a discrete autonomous system.

``x_{n+1} = x_n + g(x_n)`` with unit time step: trajectories, minimal
perturbations of a start state, distance series between the two resulting
paths, and an affine-fit probe of how far ``g`` is from linear.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .embedding import ConfigVector, DeltaVector, EmbeddingError, Metric, decode, distance, encode
from .kernel import Color, GameState, Move, StatusTag, apply_move, status
from .solver import (
    CoverageError, StrategyTable, TableSet, Tables, UnsupportedMaterialError,
    as_table_set, material_codes, material_of, probe, strategy_move,
)

DEFAULT_WINDOW = 8


class End(enum.Enum):
    CHECKMATE = "Checkmate"
    STALEMATE = "Stalemate"
    INSUFFICIENT_MATERIAL = "InsufficientMaterial"
    CYCLE = "CycleDetected"
    PLY_CAP = "PlyCapReached"


@dataclass(frozen=True)
class Step:
    vector: ConfigVector
    side: Color
    move: Move
    delta: DeltaVector


@dataclass
class Trajectory:
    start: GameState
    steps: list
    terminal: End
    cap: int
    final: GameState

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def vectors(self) -> list:
        """``x_0 ... x_len``: one more point than there are steps."""
        return [s.vector for s in self.steps] + [encode(self.final)]

    @property
    def moves(self) -> list:
        return [s.move for s in self.steps]


def run_trajectory(tables: Tables, start: GameState, cap: int) -> Trajectory:
    """Iterate the exact strategy from ``start`` for at most ``cap`` plies.

    Stops at mate or stalemate, on re-entering a (vector, side) pair, at the
    cap, or when a capture leaves bare kings. A start that already has bare
    kings keeps moving until it cycles.
    """
    if cap < 0:
        raise ValueError("ply cap must be nonnegative")
    tables = as_table_set(tables)
    state = start
    x = encode(state)
    seen = {(x.coords, state.side_to_move)}
    steps = []
    end = End.PLY_CAP
    bare_start = status(start).tag is StatusTag.INSUFFICIENT_MATERIAL
    while True:
        st = status(state)
        if st.tag is StatusTag.CHECKMATE:
            end = End.CHECKMATE
            break
        if st.tag is StatusTag.STALEMATE:
            end = End.STALEMATE
            break
        if st.tag is StatusTag.INSUFFICIENT_MATERIAL and not bare_start:
            end = End.INSUFFICIENT_MATERIAL
            break
        if len(steps) >= cap:
            end = End.PLY_CAP
            break
        move = strategy_move(tables, state)
        nxt = apply_move(state, move)
        nx = encode(nxt)
        steps.append(Step(x, state.side_to_move, move, nx - x))
        state, x = nxt, nx
        key = (x.coords, state.side_to_move)
        if key in seen:
            end = End.CYCLE
            break
        seen.add(key)
    return Trajectory(start, steps, end, cap, state)


# ---------------------------------------------------------------- perturbation

class PerturbMode(enum.Enum):
    RETYPE = "retype"
    RELOCATE = "relocate"
    FLAG_TOGGLE = "flagtoggle"


@dataclass(frozen=True)
class PerturbationSpec:
    mode: PerturbMode
    # keep only states whose material can be solved exactly
    solvable_only: bool = True

    def __post_init__(self):
        if not isinstance(self.mode, PerturbMode):
            object.__setattr__(self, "mode", PerturbMode(str(self.mode).lower()))

    @property
    def hamming(self) -> int:
        return 2 if self.mode is PerturbMode.RELOCATE else 1


def _candidates(coords: tuple, mode: PerturbMode):
    for sq, c in enumerate(coords):
        if c == 0:
            continue
        a, s = abs(c), (1 if c > 0 else -1)
        if mode is PerturbMode.RETYPE:
            if a >= 7:
                continue
            for k in range(1, 7):
                if k == a or {k, a} == {1, 2}:
                    continue
                new = list(coords)
                new[sq] = k * s
                yield new
        elif mode is PerturbMode.FLAG_TOGGLE:
            flip = {1: 2, 2: 1, 7: 8, 8: 7}.get(a)
            if flip is not None:
                new = list(coords)
                new[sq] = flip * s
                yield new
        else:
            for t in range(64):
                if coords[t] == 0:
                    new = list(coords)
                    new[t], new[sq] = c, 0
                    yield new


def perturb(state: GameState, spec) -> list:
    """All valid states one minimal edit away from ``state`` (same side to move).

    Sorted by encoding and deduplicated.
    """
    if not isinstance(spec, PerturbationSpec):
        spec = PerturbationSpec(PerturbMode(str(spec).lower()))
    out = {}
    for coords in _candidates(state.codes, spec.mode):
        try:
            s = decode(coords, state.side_to_move, state.ply_index)
        except EmbeddingError:
            continue
        if spec.solvable_only:
            try:
                material_codes(material_of(s))
            except UnsupportedMaterialError:
                continue
            if s.castling != "-":
                continue
        out[tuple(coords)] = s
    return [out[k] for k in sorted(out)]


# ------------------------------------------------------------------ divergence

@dataclass
class DivergenceReport:
    d0: float
    series: list
    first_separation_ply: Optional[int]
    outcome_flip: bool
    move_path_flip: bool
    move_divergence_ply: Optional[int]
    effective_exponent: Optional[float]
    metric: str
    terminal_a: str = ""
    terminal_b: str = ""
    wdl_a: str = ""
    wdl_b: str = ""

    def to_dict(self) -> dict:
        return {
            "d0": self.d0, "series": list(self.series),
            "first_separation_ply": self.first_separation_ply,
            "outcome_flip": self.outcome_flip, "move_path_flip": self.move_path_flip,
            "move_divergence_ply": self.move_divergence_ply,
            "effective_exponent": self.effective_exponent, "metric": self.metric,
            "terminal_a": self.terminal_a, "terminal_b": self.terminal_b,
            "wdl_a": self.wdl_a, "wdl_b": self.wdl_b,
        }


def divergence(tables: Tables, a: GameState, b: GameState, cap: int, metric="hamming") -> DivergenceReport:
    if a.side_to_move is not b.side_to_move:
        raise ValueError("perturbed pair must share the side to move")
    if a.codes == b.codes:
        raise ValueError("states are identical; initial distance would be 0")
    metric = Metric(metric.value if isinstance(metric, Metric) else str(metric).lower())
    tables = as_table_set(tables)
    ta = run_trajectory(tables, a, cap)
    tb = run_trajectory(tables, b, cap)
    xa, xb = ta.vectors, tb.vectors
    n = min(len(xa), len(xb))
    series = [distance(xa[i], xb[i], metric) for i in range(n)]
    d0 = series[0]
    first_sep = next((i for i in range(1, n) if series[i] > d0), None)
    move_ply = next((i for i, (ma, mb) in enumerate(zip(ta.moves, tb.moves)) if ma != mb), None)
    wa, wb = probe(tables, a).wdl, probe(tables, b).wdl
    try:
        lam = exponent_estimate(series)
    except ValueError:
        lam = None
    return DivergenceReport(d0, series, first_sep, wa != wb, move_ply is not None, move_ply, lam,
                            metric.value, ta.terminal.value, tb.terminal.value, wa.label, wb.label)


def exponent_estimate(report, window: Optional[Sequence[int]] = None) -> float:
    """Mean of ``ln(d_n / d_0) / n`` over plies in ``window``.

    ``window`` is an inclusive ``(first, last)`` ply range; by default plies
    1 .. min(8, last available). Plies where ``d_n`` is 0 are skipped.
    """
    series = report.series if isinstance(report, DivergenceReport) else list(report)
    if not series or series[0] <= 0:
        raise ValueError("need a series starting at d0 > 0")
    d0 = series[0]
    if window is None:
        lo, hi = 1, min(DEFAULT_WINDOW, len(series) - 1)
    else:
        lo, hi = max(1, window[0]), min(window[1], len(series) - 1)
    terms = [math.log(series[n] / d0) / n for n in range(lo, hi + 1) if series[n] > 0]
    if not terms:
        raise ValueError("no usable plies in the exponent window")
    return sum(terms) / len(terms)


@dataclass
class CampaignReport:
    material_id: str
    mode: str
    metric: str
    seed: int
    cap: int
    samples: int
    pairs: int
    fraction_outcome_flip: float
    fraction_move_path_flip: float
    exponent_mean: Optional[float]
    exponent_max: Optional[float]
    exponent_count: int
    separation_histogram: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "material_id": self.material_id, "mode": self.mode, "metric": self.metric,
            "seed": self.seed, "cap": self.cap, "samples": self.samples, "pairs": self.pairs,
            "fractions": {"outcome_flip": self.fraction_outcome_flip,
                          "move_path_flip": self.fraction_move_path_flip},
            "exponent": {"mean": self.exponent_mean, "max": self.exponent_max,
                         "count": self.exponent_count},
            "separation_histogram": dict(self.separation_histogram),
        }


def sample_states(table: StrategyTable, count: int, seed: int, mask: Optional[np.ndarray] = None) -> list:
    """Uniform draw (without replacement) of legal states that have a move."""
    pool = table.playable
    if mask is not None:
        pool &= mask
    idx = np.nonzero(pool)[0]
    if len(idx) == 0:
        return []
    rng = np.random.default_rng(seed)
    pick = rng.choice(idx, size=min(count, len(idx)), replace=False)
    return [table.state(int(i)) for i in pick]


def divergence_campaign(table: StrategyTable, samples: int, spec, cap: int, metric="hamming",
                        seed: int = 0, tables: Optional[TableSet] = None) -> CampaignReport:
    """Divergence statistics over every minimal perturbation of sampled states."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not isinstance(spec, PerturbationSpec):
        spec = PerturbationSpec(PerturbMode(str(spec).lower()))
    if tables is None:
        tables = TableSet([table])
    metric = Metric(metric.value if isinstance(metric, Metric) else str(metric).lower())
    reports = []
    for state in sample_states(table, samples, seed):
        for other in perturb(state, spec):
            reports.append(divergence(tables, state, other, cap, metric))
    if not reports:
        raise ValueError("no legal perturbations found for any sampled state")
    n = len(reports)
    lams = [r.effective_exponent for r in reports if r.effective_exponent is not None]
    hist = Counter("none" if r.first_separation_ply is None else str(r.first_separation_ply) for r in reports)
    hist = dict(sorted(hist.items(), key=lambda kv: (kv[0] == "none", int(kv[0]) if kv[0] != "none" else 0)))
    return CampaignReport(
        table.material_id, spec.mode.value, metric.value, seed, cap, samples, n,
        sum(r.outcome_flip for r in reports) / n,
        sum(r.move_path_flip for r in reports) / n,
        math.fsum(lams) / len(lams) if lams else None,
        max(lams) if lams else None,
        len(lams), hist,
    )


# --------------------------------------------------------------- nonlinearity

@dataclass
class AffineFit:
    relative_residual: float
    rows: int
    rank: int
    weights: np.ndarray
    intercept: np.ndarray


def affine_residual(xs, gs) -> AffineFit:
    """Least-squares affine map ``g ~ A x + b`` over distinct (x, g) rows.

    The residual is relative, ``sqrt(sum |r|^2 / sum |g|^2)``.
    """
    X = np.asarray(xs, dtype=np.float64)
    G = np.asarray(gs, dtype=np.float64)
    if X.ndim != 2 or G.ndim != 2 or len(X) != len(G):
        raise ValueError("xs and gs must be row-aligned 2-d arrays")
    rows = np.unique(np.hstack([X, G]), axis=0)
    d = X.shape[1]
    if len(rows) < d + 1:
        raise ValueError(f"underdetermined: {len(rows)} distinct samples, need at least {d + 1}")
    X, G = rows[:, :d], rows[:, d:]
    A = np.hstack([X, np.ones((len(X), 1))])
    coef, _, rank, _ = np.linalg.lstsq(A, G, rcond=None)
    r = G - A @ coef
    denom = float(np.sum(G * G))
    rel = math.sqrt(float(np.sum(r * r)) / denom) if denom > 0 else 0.0
    return AffineFit(rel, len(rows), int(rank), coef[:d].T, coef[d])


@dataclass
class NonlinearityReport:
    material_id: str
    seed: int
    trajectories: int
    raw_pairs: int
    samples: int
    rank: int
    relative_residual: float

    def to_dict(self) -> dict:
        return {"material_id": self.material_id, "seed": self.seed, "trajectories": self.trajectories,
                "raw_pairs": self.raw_pairs, "sample_count": self.samples, "rank": self.rank,
                "residual": self.relative_residual}


def collect_pairs(tables: Tables, table: StrategyTable, samples: int, seed: int, cap: int = 64):
    xs, gs = [], []
    for start in sample_states(table, samples, seed):
        for step in run_trajectory(tables, start, cap).steps:
            xs.append(step.vector.coords)
            gs.append(step.delta.coords)
    return xs, gs


def nonlinearity_test(table: StrategyTable, samples: int, seed: int = 0, cap: int = 64,
                      tables: Optional[TableSet] = None) -> NonlinearityReport:
    if tables is None:
        tables = TableSet([table])
    xs, gs = collect_pairs(tables, table, samples, seed, cap)
    if not xs:
        raise ValueError("sampled trajectories produced no steps")
    fit = affine_residual(xs, gs)
    return NonlinearityReport(table.material_id, seed, samples, len(xs), fit.rows, fit.rank,
                              fit.relative_residual)
