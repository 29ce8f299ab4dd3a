"""Report envelopes and their JSON / CSV renderings.

Each subcommand has a fixed payload schema (the exact set of top-level keys)
and, where a tabular view makes sense, a CSV layout. Rendering is byte-stable:
JSON keys are sorted and CSV rows keep payload order.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from dataclasses import dataclass, field
from typing import Optional

from . import __version__


class SchemaMismatch(ValueError):
    pass


SCHEMAS = {
    "tb build": {"material_id", "path", "entries", "valid_states", "white_wins", "black_wins",
                 "draws", "max_dtm_plies", "sha256"},
    "tb probe": {"fen", "material_id", "wdl", "dtm_plies", "best_move", "terminal"},
    "traj run": {"fen", "material_id", "cap", "terminal", "length", "final_fen", "steps"},
    "dyn diverge": {"fen_a", "fen_b", "mode", "cap", "d0", "series", "first_separation_ply",
                    "outcome_flip", "move_path_flip", "move_divergence_ply", "effective_exponent",
                    "metric", "terminal_a", "terminal_b", "wdl_a", "wdl_b"},
    "dyn campaign": {"material_id", "mode", "metric", "seed", "cap", "samples", "pairs",
                     "fractions", "exponent", "separation_histogram"},
    "dyn nonlinearity": {"material_id", "seed", "trajectories", "raw_pairs", "sample_count",
                         "rank", "residual"},
    "eval audit": {"material_id", "family", "threshold", "states_examined", "wdl_misclassified",
                   "misclassification_rate", "counterexamples"},
    "eval fit": {"material_id", "basis", "parameter_budget", "parameters", "states",
                 "misclassification_rate", "mse", "seed", "evaluator"},
    "eval horizon": {"material_id", "family", "seed", "rows"},
}

# command -> (payload key holding the rows, CSV columns)
_CSV = {
    "dyn diverge": ("series", ("n", "d_n")),
    "traj run": ("steps", ("n", "side", "move", "vector")),
    "eval horizon": ("rows", ("depth", "blunders", "samples", "blunder_rate")),
    "eval audit": ("counterexamples", ("fen", "predicted", "truth")),
    "dyn campaign": ("separation_histogram", ("first_separation_ply", "pairs")),
}

FORMATS = ("json", "csv")


def default_timestamp() -> str:
    """UTC time from ``SOURCE_DATE_EPOCH``, or the Unix epoch when unset.

    A fixed default keeps reports byte-identical across reruns; pass an
    explicit timestamp to record wall-clock time instead.
    """
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(epoch))


def now_timestamp() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


@dataclass
class ReportEnvelope:
    command: str
    argv: list
    seed: Optional[int]
    payload: dict
    tool_version: str = __version__
    timestamp: str = field(default_factory=default_timestamp)

    def check(self) -> None:
        schema = SCHEMAS.get(self.command)
        if schema is None:
            raise SchemaMismatch(f"no schema for command {self.command!r}")
        keys = set(self.payload)
        if keys != schema:
            missing, extra = sorted(schema - keys), sorted(keys - schema)
            raise SchemaMismatch(f"{self.command}: missing {missing}, unexpected {extra}")

    def to_dict(self) -> dict:
        return {"tool_version": self.tool_version, "command": self.command, "argv": list(self.argv),
                "seed": self.seed, "timestamp": self.timestamp, "payload": self.payload}

    @classmethod
    def from_dict(cls, data: dict) -> "ReportEnvelope":
        return cls(data["command"], data["argv"], data["seed"], data["payload"],
                   data["tool_version"], data["timestamp"])


def _csv_rows(env: ReportEnvelope):
    key, columns = _CSV[env.command]
    data = env.payload[key]
    if env.command == "dyn diverge":
        return columns, [(n, d) for n, d in enumerate(data)]
    if env.command == "dyn campaign":
        return columns, list(data.items())
    return columns, [tuple(row[c] for c in columns) for row in data]


def render_report(envelope: ReportEnvelope, fmt: str = "json") -> str:
    envelope.check()
    if fmt == "json":
        return json.dumps(envelope.to_dict(), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        if envelope.command not in _CSV:
            raise SchemaMismatch(f"{envelope.command} has no CSV form; use json")
        columns, rows = _csv_rows(envelope)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
        return buf.getvalue()
    raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")


def parse_report(text: str) -> ReportEnvelope:
    return ReportEnvelope.from_dict(json.loads(text))
