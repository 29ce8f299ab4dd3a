"""``chesschaos`` command line.

Exit codes: 0 success, 1 other failure, 2 usage error or unknown subcommand,
3 bad FEN, 4 missing or corrupt tablebase, 5 unsupported material.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import dynamics, evaluator
from .embedding import Metric
from .kernel import FenError, InvalidStateError, parse_fen, to_fen
from .reports import ReportEnvelope, now_timestamp, render_report
from .solver import (
    CoverageError, MaterialMismatchError, TableSet, TablebaseFormatError,
    UnsupportedMaterialError, build_tablebase, load_table, material_of, probe, save_table,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_FEN, EXIT_TABLE, EXIT_MATERIAL = 0, 1, 2, 3, 4, 5
ENV_TB_DIR = "CHESSCHAOS_TB_DIR"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class CliConfig:
    tablebase_dir: Optional[str] = None
    default_metric: str = "hamming"
    default_seed: int = 0
    ply_cap: int = 200
    report_format: Optional[str] = None

    def __post_init__(self):
        self.default_seed = int(self.default_seed)
        self.ply_cap = int(self.ply_cap)
        if self.ply_cap < 1:
            raise ValueError("ply_cap must be >= 1")
        Metric(self.default_metric)
        if self.report_format not in (None, "json", "csv"):
            raise ValueError(f"report_format must be json or csv, not {self.report_format!r}")

    @classmethod
    def from_file(cls, path) -> "CliConfig":
        """Read plain ``key = value`` lines (``#`` comments allowed)."""
        parser = configparser.ConfigParser()
        parser.read_string("[chesschaos]\n" + Path(path).read_text())
        known = set(cls.__dataclass_fields__)
        values = dict(parser["chesschaos"])
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values)


# ------------------------------------------------------------------- helpers

def _state(fen: str):
    try:
        return parse_fen(fen)
    except (FenError, InvalidStateError) as exc:
        raise CliError(EXIT_FEN, f"bad FEN {fen!r}: {exc}") from None


def _tables(args) -> TableSet:
    return TableSet(directory=args.tb_dir)


def _main_table(args, tables: TableSet, state=None):
    """Table named by --tb, else --material, else the material of ``state``."""
    if getattr(args, "tb", None):
        table = load_table(args.tb)
        tables.add(table)
        return table
    material = getattr(args, "material", None) or (material_of(state) if state is not None else None)
    if material is None:
        raise CliError(EXIT_USAGE, "give --tb FILE or --material ID")
    return tables.get(material)


def _spec(args, tables: TableSet) -> evaluator.EvaluatorSpec:
    if args.weights:
        data = json.loads(Path(args.weights).read_text())
        return evaluator.EvaluatorSpec.from_dict(data.get("evaluator", data), tables)
    family = evaluator.Family(args.family)
    if family is evaluator.Family.MATERIAL_ONLY:
        return evaluator.material_only()
    if family is evaluator.Family.MATERIAL_PLUS_PIECE_SQUARE:
        return evaluator.material_plus_piece_square()
    if family is evaluator.Family.TABLEBASE_ORACLE:
        return evaluator.tablebase_oracle(tables)
    raise CliError(EXIT_USAGE, "FittedLinear needs --weights FILE (see `eval fit --weights-out`)")


def _depths(text: str) -> list:
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


# ---------------------------------------------------------------- subcommands

def cmd_tb_build(args, cfg):
    tables = _tables(args)
    table = build_tablebase(args.material, resolver=tables.get)
    out = Path(args.out or Path(args.tb_dir or ".") / f"{args.material}.cstb")
    out.parent.mkdir(parents=True, exist_ok=True)
    save_table(table, out)
    valid = table.valid
    wdl = table.wdl[valid]
    dtm = table.dtm[valid & (table.dtm != 0xFFFF)]
    return {
        "material_id": table.material_id, "path": str(out), "entries": len(table),
        "valid_states": int(valid.sum()), "white_wins": int((wdl == 1).sum()),
        "black_wins": int((wdl == 2).sum()), "draws": int((wdl == 0).sum()),
        "max_dtm_plies": int(dtm.max()) if len(dtm) else None,
        "sha256": hashlib.sha256(out.read_bytes()).hexdigest(),
    }


def cmd_tb_probe(args, cfg):
    state = _state(args.fen)
    tables = _tables(args)
    table = _main_table(args, tables, state)
    entry = probe(table, state)
    return {"fen": to_fen(state), "material_id": table.material_id, "wdl": entry.wdl.label,
            "dtm_plies": entry.dtm_plies,
            "best_move": entry.best_move.uci if entry.best_move else None,
            "terminal": entry.terminal}


def cmd_traj_run(args, cfg):
    state = _state(args.fen)
    tables = _tables(args)
    if args.tb:
        _main_table(args, tables)
    cap = args.cap or cfg.ply_cap
    traj = dynamics.run_trajectory(tables, state, cap)
    steps = [{"n": n, "side": step.side.letter, "move": step.move.uci, "vector": step.vector.to_text()}
             for n, step in enumerate(traj.steps)]
    return {"fen": to_fen(state), "material_id": material_of(state), "cap": cap,
            "terminal": traj.terminal.value, "length": len(traj.steps),
            "final_fen": to_fen(traj.final), "steps": steps}


def cmd_dyn_diverge(args, cfg):
    a = _state(args.fen)
    tables = _tables(args)
    if args.tb:
        _main_table(args, tables)
    if args.fen_b:
        b = _state(args.fen_b)
    else:
        options = dynamics.perturb(a, dynamics.PerturbationSpec(dynamics.PerturbMode(args.mode)))
        if not options:
            raise CliError(EXIT_FAIL, f"no {args.mode} perturbation of {args.fen!r} is legal")
        if not 0 <= args.index < len(options):
            raise CliError(EXIT_FAIL, f"--index must be in 0..{len(options) - 1}")
        b = options[args.index]
    cap = args.cap or cfg.ply_cap
    report = dynamics.divergence(tables, a, b, cap, args.metric or cfg.default_metric)
    return {"fen_a": to_fen(a), "fen_b": to_fen(b), "mode": None if args.fen_b else args.mode,
            "cap": cap, **report.to_dict()}


def cmd_dyn_campaign(args, cfg):
    tables = _tables(args)
    table = _main_table(args, tables)
    report = dynamics.divergence_campaign(table, args.samples, args.mode, args.cap or cfg.ply_cap,
                                          args.metric or cfg.default_metric, args.seed, tables)
    return report.to_dict()


def cmd_dyn_nonlinearity(args, cfg):
    tables = _tables(args)
    table = _main_table(args, tables)
    report = dynamics.nonlinearity_test(table, args.samples, args.seed, args.cap or cfg.ply_cap, tables)
    return report.to_dict()


def cmd_eval_audit(args, cfg):
    tables = _tables(args)
    table = _main_table(args, tables)
    report = evaluator.audit_evaluator(table, _spec(args, tables), args.threshold)
    return report.to_dict()


def cmd_eval_fit(args, cfg):
    tables = _tables(args)
    table = _main_table(args, tables)
    spec, report = evaluator.fit_evaluator(table, args.family, args.budget, args.seed, args.max_states)
    if args.weights_out:
        Path(args.weights_out).write_text(json.dumps(spec.to_dict(), sort_keys=True) + "\n")
    return {**report.to_dict(), "evaluator": spec.to_dict()}


def cmd_eval_horizon(args, cfg):
    tables = _tables(args)
    table = _main_table(args, tables)
    report = evaluator.horizon_experiment(table, _spec(args, tables), _depths(args.depths),
                                          args.samples, args.seed, tables, args.max_dtm)
    return report.to_dict()


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--tb-dir", help=f"tablebase directory (fallback: ${ENV_TB_DIR})")
    common.add_argument("--format", choices=("json", "csv"), help="report format")
    common.add_argument("--report", help="write the report here instead of stdout")
    common.add_argument("--wall-clock", action="store_true",
                        help="stamp the report with the current time (breaks byte-identical reruns)")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")

    table_src = argparse.ArgumentParser(add_help=False)
    table_src.add_argument("--tb", help="tablebase file")
    table_src.add_argument("--material", help="material id, e.g. KQvK (loaded from --tb-dir or built)")

    parser = argparse.ArgumentParser(prog="chesschaos", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True, metavar="{tb,traj,dyn,eval}")

    def add(group, name, func, parents):
        p = group.add_parser(name, parents=parents)
        p.set_defaults(func=func, command=func.__name__[4:].replace("_", " "))
        return p

    tb = groups.add_parser("tb", help="build and probe tablebases").add_subparsers(dest="sub", required=True)
    p = add(tb, "build", cmd_tb_build, [common])
    p.add_argument("--material", required=True)
    p.add_argument("--out", help="output file (default <tb-dir>/<material>.cstb)")
    p = add(tb, "probe", cmd_tb_probe, [common, table_src])
    p.add_argument("--fen", required=True)

    traj = groups.add_parser("traj", help="strategy trajectories").add_subparsers(dest="sub", required=True)
    p = add(traj, "run", cmd_traj_run, [common, table_src])
    p.add_argument("--fen", required=True)
    p.add_argument("--cap", type=int)

    dyn = groups.add_parser("dyn", help="divergence experiments").add_subparsers(dest="sub", required=True)
    p = add(dyn, "diverge", cmd_dyn_diverge, [common, table_src])
    p.add_argument("--fen", required=True)
    p.add_argument("--fen-b", help="second state (default: a perturbation of --fen)")
    p.add_argument("--mode", default="retype", choices=[m.value for m in dynamics.PerturbMode])
    p.add_argument("--index", type=int, default=0, help="which perturbation, in sorted order")
    p.add_argument("--cap", type=int)
    p.add_argument("--metric", choices=[m.value for m in Metric])
    p = add(dyn, "campaign", cmd_dyn_campaign, [common, table_src, seeded])
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--mode", default="retype", choices=[m.value for m in dynamics.PerturbMode])
    p.add_argument("--cap", type=int)
    p.add_argument("--metric", choices=[m.value for m in Metric])
    p = add(dyn, "nonlinearity", cmd_dyn_nonlinearity, [common, table_src, seeded])
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--cap", type=int)

    ev = groups.add_parser("eval", help="static evaluator experiments").add_subparsers(dest="sub", required=True)
    families = [f.value for f in evaluator.Family]
    p = add(ev, "audit", cmd_eval_audit, [common, table_src])
    p.add_argument("--family", default="MaterialOnly", choices=families)
    p.add_argument("--weights", help="evaluator JSON written by `eval fit`")
    p.add_argument("--threshold", type=float, default=0.5)
    p = add(ev, "fit", cmd_eval_fit, [common, table_src, seeded])
    p.add_argument("--family", default="MaterialPlusPieceSquare", choices=families[:2])
    p.add_argument("--budget", type=int, default=evaluator.N_FEATURES)
    p.add_argument("--max-states", type=int)
    p.add_argument("--weights-out")
    p = add(ev, "horizon", cmd_eval_horizon, [common, table_src, seeded])
    p.add_argument("--family", default="MaterialOnly", choices=families)
    p.add_argument("--weights")
    p.add_argument("--depths", default="1-3", help="e.g. 1-5 or 1,3,5")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--max-dtm", type=int)
    return parser


def _error(code: int, exc: BaseException) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        cfg = CliConfig.from_file(args.config) if args.config else CliConfig()
        args.tb_dir = args.tb_dir or cfg.tablebase_dir or os.environ.get(ENV_TB_DIR)
        if hasattr(args, "seed") and args.seed is None:
            args.seed = cfg.default_seed
        payload = args.func(args, cfg)
        seed = getattr(args, "seed", cfg.default_seed)
        fmt = args.format or cfg.report_format or ("csv" if args.command == "dyn diverge" else "json")
        env = ReportEnvelope(args.command, argv, seed, payload)
        if args.wall_clock:
            env.timestamp = now_timestamp()
        text = render_report(env, fmt)
        if args.report:
            Path(args.report).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except CliError as exc:
        return _error(exc.code, exc)
    except (FenError, InvalidStateError) as exc:
        return _error(EXIT_FEN, exc)
    except (FileNotFoundError, TablebaseFormatError) as exc:
        return _error(EXIT_TABLE, exc)
    except (UnsupportedMaterialError, MaterialMismatchError, CoverageError) as exc:
        return _error(EXIT_MATERIAL, exc)
    except (ValueError, OSError) as exc:
        return _error(EXIT_FAIL, exc)


if __name__ == "__main__":
    sys.exit(main())
