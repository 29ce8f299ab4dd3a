"""Static evaluators, a depth-limited searcher, and their audit against exact tables.

Every linear evaluator scores a state as ``w . features[:len(w)] + offset``
over one shared feature vector (White-positive):

* 5 signed material counts (pawn, knight, bishop, rook, queen);
* 6 x 64 piece-square indicators (pawn, knight, bishop, rook, queen, king),
  +1 for a white piece on its square, -1 for a black piece on the
  rank-mirrored square.

So ``MaterialOnly`` uses the first 5 weights, ``MaterialPlusPieceSquare`` all
389, and a fitted evaluator whatever prefix its budget allows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _backend as B
from .kernel import GameState, Move, to_fen
from .solver import (
    CoverageError, StrategyTable, TableSet, Tables, UnsupportedMaterialError, Wdl,
    as_table_set, material_codes, material_of_codes,
)

MATERIAL_FEATURES = 5
N_FEATURES = MATERIAL_FEATURES + 6 * 64
DEFAULT_MATERIAL = (1.0, 3.0, 3.0, 5.0, 9.0)
MATE = 1_000_000.0
_INF = float("inf")
# piece code -> feature kind (pawn, knight, bishop, rook, queen, king)
_KIND = {1: 0, 2: 0, 3: 1, 4: 2, 5: 3, 6: 4, 7: 5, 8: 5}


class Family(enum.Enum):
    MATERIAL_ONLY = "MaterialOnly"
    MATERIAL_PLUS_PIECE_SQUARE = "MaterialPlusPieceSquare"
    FITTED_LINEAR = "FittedLinear"
    TABLEBASE_ORACLE = "TablebaseOracle"


_FAMILY_SIZE = {Family.MATERIAL_ONLY: MATERIAL_FEATURES,
                Family.MATERIAL_PLUS_PIECE_SQUARE: N_FEATURES,
                Family.FITTED_LINEAR: N_FEATURES}


@dataclass(frozen=True)
class EvaluatorSpec:
    family: Family
    parameters: tuple = ()
    parameter_budget: int = 0
    offset: float = 0.0
    tables: Optional[TableSet] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "parameters", tuple(float(w) for w in self.parameters))
        if len(self.parameters) > self.parameter_budget:
            raise ValueError(f"{len(self.parameters)} parameters exceed budget {self.parameter_budget}")
        if self.family is Family.TABLEBASE_ORACLE:
            if self.parameters:
                raise ValueError("the tablebase oracle has no parameters")
            if self.tables is None:
                raise ValueError("the tablebase oracle needs tables")
        elif len(self.parameters) > _FAMILY_SIZE[self.family]:
            raise ValueError(f"{self.family.value} takes at most {_FAMILY_SIZE[self.family]} parameters")

    def to_dict(self) -> dict:
        return {"family": self.family.value, "parameter_budget": self.parameter_budget,
                "offset": self.offset, "weights": list(self.parameters)}

    @classmethod
    def from_dict(cls, data: dict, tables: Optional[TableSet] = None) -> "EvaluatorSpec":
        return cls(Family(data["family"]), tuple(data.get("weights", ())),
                   int(data["parameter_budget"]), float(data.get("offset", 0.0)), tables)


def material_only(weights: Sequence[float] = DEFAULT_MATERIAL) -> EvaluatorSpec:
    return EvaluatorSpec(Family.MATERIAL_ONLY, tuple(weights), MATERIAL_FEATURES)


def material_plus_piece_square(pst: Optional[np.ndarray] = None,
                               material: Sequence[float] = DEFAULT_MATERIAL) -> EvaluatorSpec:
    """``pst`` has shape (6, 64) in White's orientation; zeros by default."""
    table = np.zeros((6, 64)) if pst is None else np.asarray(pst, dtype=float).reshape(6, 64)
    return EvaluatorSpec(Family.MATERIAL_PLUS_PIECE_SQUARE, tuple(material) + tuple(table.ravel()), N_FEATURES)


def tablebase_oracle(tables: Tables) -> EvaluatorSpec:
    return EvaluatorSpec(Family.TABLEBASE_ORACLE, (), 0, 0.0, as_table_set(tables))


def features(codes) -> np.ndarray:
    f = np.zeros(N_FEATURES)
    for sq, c in enumerate(codes):
        if c == 0:
            continue
        k = _KIND[abs(c)]
        if c > 0:
            if k < 5:
                f[k] += 1
            f[MATERIAL_FEATURES + k * 64 + sq] += 1
        else:
            if k < 5:
                f[k] -= 1
            f[MATERIAL_FEATURES + k * 64 + (sq ^ 56)] -= 1
    return f


def _linear_score(params: tuple, codes) -> float:
    s = 0.0
    n = len(params)
    for sq, c in enumerate(codes):
        if c == 0:
            continue
        k = _KIND[abs(c)]
        sign = 1.0 if c > 0 else -1.0
        if k < 5 and k < n:
            s += sign * params[k]
        j = MATERIAL_FEATURES + k * 64 + (sq if c > 0 else sq ^ 56)
        if j < n:
            s += sign * params[j]
    return s


def _oracle_score(tables: TableSet, codes, white: bool) -> float:
    material = material_of_codes(codes)
    try:
        table = tables.get(material)
    except UnsupportedMaterialError:
        raise CoverageError(f"{material} is outside tablebase coverage") from None
    w = int(table.flags[B.index_of(codes, white)]) & 3
    return (0.0, 1.0, -1.0)[w]


def _static(spec: EvaluatorSpec, codes, white: bool) -> float:
    if spec.family is Family.TABLEBASE_ORACLE:
        return _oracle_score(spec.tables, codes, white) + spec.offset
    return _linear_score(spec.parameters, codes) + spec.offset


def evaluate_static(spec: EvaluatorSpec, state: GameState) -> float:
    """Score of ``state`` alone, positive when White stands better."""
    if spec.family is Family.TABLEBASE_ORACLE and state.castling != "-":
        raise CoverageError("castling rights are outside tablebase coverage")
    return _static(spec, state.codes, state.white)


# --------------------------------------------------------------------- search

@dataclass(frozen=True)
class SearchResult:
    move: Move
    score: float  # White-positive
    nodes: int


def _bare_kings(codes) -> bool:
    return all(c == 0 or abs(c) >= 7 for c in codes)


class _Searcher:
    def __init__(self, spec: EvaluatorSpec):
        self.spec = spec
        self.nodes = 0

    def negamax(self, codes, white, castling, depth, alpha, beta, ply):
        self.nodes += 1
        moves = B.legal_moves(codes, white, castling)
        if not moves:
            return -(MATE - ply) if B.in_check(codes, white) else 0.0
        if _bare_kings(codes):
            return 0.0
        if depth == 0:
            s = _static(self.spec, codes, white)
            return s if white else -s
        best = -_INF
        for m in moves:
            nb, nc = B.make_move(codes, white, castling, m)
            v = -self.negamax(nb, not white, nc, depth - 1, -beta, -alpha, ply + 1)
            if v > best:
                best = v
                if v > alpha:
                    alpha = v
                    if alpha >= beta:
                        break
        return best


def search(state: GameState, depth: int, spec: EvaluatorSpec) -> SearchResult:
    """Alpha-beta negamax to a fixed depth, no quiescence.

    Mates score ``MATE - ply`` so nearer mates win ties; the first move in
    kernel order among equal scores is kept.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    moves = B.legal_moves(state.codes, state.white, state.castling_mask)
    if not moves or _bare_kings(state.codes):
        raise ValueError(f"search needs a non-terminal state: {to_fen(state)}")
    s = _Searcher(spec)
    alpha, best_move, best = -_INF, None, -_INF
    for m in moves:
        nb, nc = B.make_move(state.codes, state.white, state.castling_mask, m)
        v = -s.negamax(nb, not state.white, nc, depth - 1, -_INF, -alpha, 1)
        if v > best:
            best, best_move = v, m
            alpha = max(alpha, v)
    score = best if state.white else -best
    return SearchResult(Move.from_packed(best_move), score, s.nodes + 1)


# ---------------------------------------------------------------- table views

def _table_boards(table: StrategyTable, idx: np.ndarray):
    """Per-piece (square, code) arrays for slots ``idx`` (vectorised slot decode)."""
    half = table.half
    rem = idx % half
    pieces = []
    for c in table.codes:
        radix = 72 if abs(c) <= 2 else 64
        d = rem % radix
        rem = rem // radix
        if radix == 72:
            ep = d >= 64
            sq = np.where(ep, (d - 64) + (24 if c > 0 else 32), d)
            code = np.where(ep, 1 if c > 0 else -1, c)
        else:
            sq, code = d, np.full(len(d), c)
        pieces.append((sq.astype(np.int64), code.astype(np.int64)))
    return pieces


def _feature_chunk(table: StrategyTable, idx: np.ndarray, k: int) -> np.ndarray:
    X = np.zeros((len(idx), N_FEATURES))
    rows = np.arange(len(idx))
    for sq, code in _table_boards(table, idx):
        a = np.abs(code)
        kind = np.select([a <= 2, a == 3, a == 4, a == 5, a == 6], [0, 1, 2, 3, 4], 5)
        sign = np.sign(code).astype(float)
        mat = kind < 5
        np.add.at(X, (rows[mat], kind[mat]), sign[mat])
        col = MATERIAL_FEATURES + kind * 64 + np.where(code > 0, sq, sq ^ 56)
        np.add.at(X, (rows, col), sign)
    return X[:, :k]


def _table_scores(spec: EvaluatorSpec, table: StrategyTable, idx: np.ndarray, chunk: int = 65536) -> np.ndarray:
    if spec.family is Family.TABLEBASE_ORACLE:
        truth = spec.tables.get(table.material_id).wdl[idx]
        return np.select([truth == 1, truth == 2], [1.0, -1.0], 0.0) + spec.offset
    w = np.asarray(spec.parameters)
    out = np.empty(len(idx))
    for lo in range(0, len(idx), chunk):
        part = idx[lo:lo + chunk]
        out[lo:lo + chunk] = _feature_chunk(table, part, len(w)) @ w + spec.offset
    return out


def _classify(scores: np.ndarray, threshold: float) -> np.ndarray:
    return np.where(scores > threshold, 1, np.where(scores < -threshold, 2, 0)).astype(np.uint8)


# ---------------------------------------------------------------------- audit

@dataclass
class EvalAuditReport:
    material_id: str
    family: str
    threshold: float
    states_examined: int
    wdl_misclassified: int
    misclassification_rate: float
    counterexamples: list

    def to_dict(self) -> dict:
        return {"material_id": self.material_id, "family": self.family, "threshold": self.threshold,
                "states_examined": self.states_examined, "wdl_misclassified": self.wdl_misclassified,
                "misclassification_rate": self.misclassification_rate,
                "counterexamples": [dict(c) for c in self.counterexamples]}


def audit_evaluator(table: StrategyTable, spec: EvaluatorSpec, threshold: float = 0.5,
                    max_counterexamples: int = 20, include_terminal: bool = False) -> EvalAuditReport:
    """Compare the evaluator's WDL call with the table on every legal state that has a move.

    ``include_terminal`` widens the audit to mates and stalemates as well.
    """
    pool = table.valid if include_terminal else table.playable
    idx = np.nonzero(pool)[0]
    predicted = _classify(_table_scores(spec, table, idx), threshold)
    truth = table.wdl[idx]
    wrong = np.nonzero(predicted != truth)[0]
    examples = []
    for j in wrong[:max_counterexamples]:
        examples.append({"fen": to_fen(table.state(int(idx[j]))),
                         "predicted": Wdl(int(predicted[j])).label,
                         "truth": Wdl(int(truth[j])).label})
    n = len(idx)
    return EvalAuditReport(table.material_id, spec.family.value, threshold, n, len(wrong),
                           len(wrong) / n if n else 0.0, examples)


# ------------------------------------------------------------------------ fit

@dataclass
class FitReport:
    material_id: str
    basis: str
    parameter_budget: int
    parameters: int
    states: int
    misclassification_rate: float
    mse: float
    seed: int

    def to_dict(self) -> dict:
        return {"material_id": self.material_id, "basis": self.basis,
                "parameter_budget": self.parameter_budget, "parameters": self.parameters,
                "states": self.states, "misclassification_rate": self.misclassification_rate,
                "mse": self.mse, "seed": self.seed}


def _solve(xtx: np.ndarray, xty: np.ndarray) -> np.ndarray:
    # minimum-norm solution; features that never fire get weight 0
    w, *_ = np.linalg.lstsq(xtx, xty, rcond=None)
    return w


def fit_states(states: Sequence[GameState], targets: Sequence[float], parameter_budget: int,
               threshold: float = 0.5) -> tuple:
    """Fit on an explicit labelled sample instead of a table. Returns ``(spec, rate)``,
    with the rate measured against the sign classes of ``targets``."""
    if parameter_budget < MATERIAL_FEATURES:
        raise ValueError(f"budget {parameter_budget} is below the {MATERIAL_FEATURES} material features")
    k = min(parameter_budget, N_FEATURES)
    X = np.array([features(s.codes)[:k] for s in states])
    y = np.asarray(targets, dtype=float)
    spec = EvaluatorSpec(Family.FITTED_LINEAR, tuple(_solve(X.T @ X, X.T @ y)), parameter_budget)
    predicted = _classify(X @ np.asarray(spec.parameters), threshold)
    truth = _classify(y, threshold)
    return spec, float(np.mean(predicted != truth)) if len(y) else 0.0


def fit_evaluator(table: StrategyTable, family, parameter_budget: int, seed: int = 0,
                  max_states: Optional[int] = None, threshold: float = 0.5, chunk: int = 65536):
    """Least-squares linear evaluator over the family's feature prefix.

    Targets are +1 / 0 / -1 from the table's WDL on every legal state (or a
    seeded subsample of ``max_states``). Returns ``(spec, report)``.
    """
    family = Family(family)
    if family not in (Family.MATERIAL_ONLY, Family.MATERIAL_PLUS_PIECE_SQUARE):
        raise ValueError(f"cannot fit family {family.value}")
    if parameter_budget < MATERIAL_FEATURES:
        raise ValueError(f"budget {parameter_budget} is below the {MATERIAL_FEATURES} material features")
    k = min(parameter_budget, _FAMILY_SIZE[family])
    idx = np.nonzero(table.valid)[0]
    if max_states is not None and max_states < len(idx):
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(idx, size=max_states, replace=False))
    wdl = table.wdl[idx]
    y = np.select([wdl == 1, wdl == 2], [1.0, -1.0], 0.0)
    xtx = np.zeros((k, k))
    xty = np.zeros(k)
    for lo in range(0, len(idx), chunk):
        X = _feature_chunk(table, idx[lo:lo + chunk], k)
        xtx += X.T @ X
        xty += X.T @ y[lo:lo + chunk]
    spec = EvaluatorSpec(Family.FITTED_LINEAR, tuple(_solve(xtx, xty)), parameter_budget)
    scores = _table_scores(spec, table, idx, chunk)
    rate = float(np.mean(_classify(scores, threshold) != wdl)) if len(idx) else 0.0
    mse = float(np.mean((scores - y) ** 2)) if len(idx) else 0.0
    return spec, FitReport(table.material_id, family.value, parameter_budget, k, len(idx), rate, mse, seed)


# -------------------------------------------------------------------- horizon

@dataclass
class HorizonReport:
    material_id: str
    family: str
    seed: int
    rows: list  # dicts: depth, blunders, samples, blunder_rate
    details: list = field(default_factory=list)  # dicts: depth, fen, dtm_plies, blunder

    def to_dict(self) -> dict:
        return {"material_id": self.material_id, "family": self.family, "seed": self.seed,
                "rows": [dict(r) for r in self.rows]}


def horizon_experiment(table: StrategyTable, spec: EvaluatorSpec, depths: Sequence[int], samples: int,
                       seed: int = 0, tables: Optional[TableSet] = None,
                       max_dtm: Optional[int] = None) -> HorizonReport:
    """Blunder rate of depth-limited search from states the mover wins.

    A blunder is a chosen move after which the mover no longer wins.
    ``max_dtm`` restricts sampling to wins no longer than that many plies.
    """
    from .dynamics import sample_states

    depths = list(depths)
    if not depths:
        raise ValueError("depths must be nonempty")
    tables = tables if tables is not None else TableSet([table])
    mask = table.mover_wins()
    if max_dtm is not None:
        mask &= table.dtm <= max_dtm
    states = sample_states(table, samples, seed, mask)
    if not states:
        raise ValueError(f"{table.material_id} has no non-terminal winning states to sample")
    rows, details = [], []
    for depth in depths:
        blunders = 0
        for state in states:
            entry = table.entry(table.index(state))
            result = search(state, depth, spec)
            nb, _ = B.make_move(state.codes, state.white, state.castling_mask, result.move.packed)
            child = tables.get(material_of_codes(nb))
            child_wdl = int(child.flags[B.index_of(nb, not state.white)]) & 3
            blunder = child_wdl != int(entry.wdl)
            blunders += blunder
            details.append({"depth": depth, "fen": to_fen(state), "dtm_plies": entry.dtm_plies,
                            "move": result.move.uci, "blunder": bool(blunder)})
        rows.append({"depth": depth, "blunders": blunders, "samples": len(states),
                     "blunder_rate": blunders / len(states)})
    return HorizonReport(table.material_id, spec.family.value, seed, rows, details)
