"""Command-line entry point: ``seqrac <command> [options]``.

Every command writes one CSV or JSON document, to ``--out`` or stdout.
Exit codes: 0 success, 2 infeasible input, 3 I/O failure, 4 parse failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import classical, optimizer, randomness, scenario, serialize, witnesses
from .errors import DomainError, InfeasibleStatistics, StrategyFormatError

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_IO = 3
EXIT_PARSE = 4

COMMANDS = ("tradeoff", "sweep", "certify", "chain", "randomness", "selftest", "frontier", "strategy")


class ParseFailure(Exception):
    """Bad command-line value (mapped to exit code 4)."""


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.points < 2:
            raise ParseFailure("grid needs at least 2 points")

    @classmethod
    def parse(cls, text: str) -> "Grid":
        parts = text.split(":")
        if len(parts) != 3:
            raise ParseFailure(f"grid {text!r} is not start:stop:points")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError:
            raise ParseFailure(f"grid {text!r} is not start:stop:points") from None

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class RunConfig:
    command: str
    grid: Grid | None = None
    seeds: tuple[int, ...] = (0,)
    budget: int = 0
    out: Path | None = None
    format: str = "csv"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParseFailure(f"unknown command {self.command!r}")
        if self.budget < 0:
            raise ParseFailure("budget must be non-negative")
        if self.format not in ("csv", "json"):
            raise ParseFailure(f"unknown format {self.format!r}")

    @property
    def seed(self) -> int:
        return self.seeds[0]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float) and np.isnan(value):
        return "nan"
    return "%.12g" % float(value)


def render_csv(header, rows, comments=()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return None if np.isnan(value) else float(value)
    return value


def render_json(doc) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def render_table(cfg: RunConfig, header, rows, summary=None) -> str:
    if cfg.format == "json":
        doc = {"columns": list(header), "rows": [list(r) for r in rows]}
        if summary:
            doc["summary"] = summary
        return render_json(doc)
    comments = [f"{k}={_fmt(v) if not isinstance(v, str) else v}" for k, v in (summary or {}).items()]
    return render_csv(header, rows, comments)


def _check_unit(values, what: str, tol: float = 1e-9):
    arr = np.asarray(values, dtype=float)
    if np.any(arr < -tol) or np.any(arr > 1 + tol):
        raise AssertionError(f"{what} left [0, 1]")


# ---------------------------------------------------------------- commands


def cmd_tradeoff(cfg: RunConfig) -> str:
    grid = cfg.grid or Grid(0.5, float(scenario.AB_MAX), 101)
    frontier = classical.classical_frontier()
    header = ["a_ab", "bound", "classical_ac"]
    if cfg.budget > 0:
        header += ["optimized_ac", "gap", "evaluations", "seed"]
    rows = []
    for a in grid.values():
        bound = witnesses.tradeoff_bound(a)
        row = [a, bound, frontier.best_ac(a)]
        if cfg.budget > 0:
            res = optimizer.maximize_ac(a, cfg.budget, mode="param", seed=cfg.seed)
            row += [res.best_ac, res.gap, res.evaluations, cfg.seed]
        _check_unit([v for v in row[1:3] if not np.isnan(v)], "success rate")
        rows.append(row)
    return render_table(cfg, header, rows)


def cmd_sweep(cfg: RunConfig) -> str:
    grid = cfg.grid or Grid(0.0, 1.0, 101)
    header = ["eta", "a_ab", "a_ac", "bound", "slack", "classical_bound", "double_violation"]
    rows = []
    for eta in grid.values():
        table = scenario.joint_table(scenario.ideal_strategy(float(eta)))
        table.check()
        a_ab, a_ac = witnesses.witness_ab(table), witnesses.witness_ac(table)
        bound = witnesses.tradeoff_bound(a_ab)
        flag = bool(witnesses.double_violation(a_ab, a_ac))
        rows.append([eta, a_ab, a_ac, bound, bound - a_ac, witnesses.CLASSICAL_MAX, flag])
    return render_table(cfg, header, rows)


def cmd_certify(cfg: RunConfig) -> str:
    a_ab, a_ac = cfg.extra["a_ab"], cfg.extra["a_ac"]
    cert = witnesses.certify(a_ab, a_ac)
    doc = {"a_ab": a_ab, "a_ac": a_ac, **cert.to_dict(), "width": cert.width}
    if cfg.format == "csv":
        header = list(doc)
        return render_csv(header, [[doc[k] for k in header]])
    return render_json(doc)


def cmd_chain(cfg: RunConfig) -> str:
    k = cfg.extra["k"]
    rates, lengths = scenario.sequential_chain(k, return_lengths=True)
    closed = scenario.chain_closed_form(k)
    _check_unit(rates, "chain success rate")
    rows = [[i + 1, rates[i], closed[i], rates[i] - closed[i], lengths[i]] for i in range(k)]
    return render_table(cfg, ["decoder", "simulated", "closed_form", "difference", "bloch_length"], rows)


def cmd_randomness(cfg: RunConfig) -> str:
    grid = cfg.grid or Grid(0.0, 1.0, 101)
    if cfg.extra.get("curve_points", 121) < 2:
        raise ParseFailure("--curve-points needs at least 2")
    starts = cfg.budget if cfg.budget > 0 else 4
    entropy = randomness.T3Entropy(points=cfg.extra.get("curve_points", 121), starts=starts, seed=cfg.seed)
    rows = randomness.rate_rows(grid.values(), hmin_t3=entropy)
    for row in rows:
        r = dict(zip(randomness.RATE_COLUMNS, row))
        _check_unit([r["w_ab"], r["w_ac"]], "determinant witness")
        if not (r["t2_ab"] <= randomness.T2_MAX + 1e-9 and r["t3_ab"] <= randomness.T3_MAX + 1e-9):
            raise AssertionError("QRAC witness above its quantum maximum")
    cross = randomness.crossover_scan(
        1001,
        hmin_t3=entropy,
        verify=lambda t: randomness.hmin_t3_numeric(t, budget=max(starts, 8), seed=cfg.seed) if t > 6 else 0.0,
    )
    summary = {
        "bob_threshold": cross.bob_threshold,
        "charlie_threshold": cross.charlie_threshold,
        "threshold_uncertainty": cross.spacing,
    }
    return render_table(cfg, randomness.RATE_COLUMNS, rows, summary)


def cmd_selftest(cfg: RunConfig) -> str:
    from .selftest import canonicalize

    strategy = serialize.load(cfg.extra["strategy"])
    report = canonicalize(strategy, cfg.extra.get("tol", 1e-6)).to_dict()
    a_ab, a_ac = witnesses.witness_pair(strategy)
    report.update(a_ab=a_ab, a_ac=a_ac)
    return render_json(report)


def cmd_frontier(cfg: RunConfig) -> str:
    grid = cfg.grid or Grid(0.5, float(scenario.AB_MAX), 11)
    budget = cfg.budget or 100_000
    header = ["target_ab", "bound", "best_ac", "gap", "evaluations", "seed"]
    rows = []
    for target in grid.values():
        best = None
        for seed in sorted(cfg.seeds):
            res = optimizer.maximize_ac(target, budget, mode=cfg.extra.get("mode", "param"), seed=seed)
            # ties go to the lowest seed
            if best is None or res.best_ac > best.best_ac:
                best = res
        rows.append([target, best.bound, best.best_ac, best.gap, best.evaluations, best.seed])
    return render_table(cfg, header, rows)


def cmd_strategy(cfg: RunConfig) -> str:
    from . import qubit

    s = scenario.ideal_strategy(cfg.extra.get("eta", 1.0))
    if cfg.extra.get("rotate"):
        s = s.rotate(qubit.random_unitary(np.random.default_rng(cfg.seed)))
    return serialize.dumps(s)


HANDLERS = {
    "tradeoff": cmd_tradeoff,
    "sweep": cmd_sweep,
    "certify": cmd_certify,
    "chain": cmd_chain,
    "randomness": cmd_randomness,
    "selftest": cmd_selftest,
    "frontier": cmd_frontier,
    "strategy": cmd_strategy,
}


# ---------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseFailure(message)


def _seeds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(","))
    except ValueError:
        raise ParseFailure(f"seeds {text!r} are not comma-separated integers") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--grid", type=str, default=None, help="start:stop:points")
    common.add_argument("--seed", type=str, default="0", help="N or N,N,...")
    common.add_argument("--budget", type=int, default=0)
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--format", choices=("csv", "json"), default=None)

    parser = _Parser(prog="seqrac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("tradeoff", parents=[common], help="quantum bound vs classical frontier over A_AB")
    sub.add_parser("sweep", parents=[common], help="witness pair of the unsharp family over eta")
    p = sub.add_parser("certify", parents=[common], help="certified sharpness interval")
    p.add_argument("a_ab", type=float)
    p.add_argument("a_ac", type=float)
    p = sub.add_parser("chain", parents=[common], help="k sharp decoders in sequence")
    p.add_argument("k", type=int)
    p = sub.add_parser("randomness", parents=[common], help="witnesses and min-entropy over eta")
    p.add_argument("--curve-points", type=int, default=121, help="grid size of the numerical T3 curve")
    p = sub.add_parser("selftest", parents=[common], help="compare a strategy file to the ideal")
    p.add_argument("strategy", type=Path)
    p.add_argument("--tol", type=float, default=1e-6)
    p = sub.add_parser("frontier", parents=[common], help="optimizer-verified frontier")
    p.add_argument("--mode", choices=("param", "general"), default="param")
    p = sub.add_parser("strategy", parents=[common], help="write the ideal strategy as JSON")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--rotate", action="store_true", help="apply a seeded random unitary")
    return parser


_DEFAULT_FORMAT = {"certify": "json", "selftest": "json", "strategy": "json"}


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    extra = {
        k: v
        for k, v in vars(args).items()
        if k not in ("command", "grid", "seed", "budget", "out", "format")
    }
    return RunConfig(
        command=args.command,
        grid=Grid.parse(args.grid) if args.grid else None,
        seeds=_seeds(args.seed),
        budget=args.budget,
        out=args.out,
        format=args.format or _DEFAULT_FORMAT.get(args.command, "csv"),
        extra=extra,
    )


def run(cfg: RunConfig) -> str:
    return HANDLERS[cfg.command](cfg)


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ParseFailure as exc:
        print(f"seqrac: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        text = run(cfg)
    except ParseFailure as exc:
        print(f"seqrac: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StrategyFormatError as exc:
        print(f"seqrac: cannot parse strategy: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"seqrac: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, InfeasibleStatistics) as exc:
        print(f"seqrac: infeasible input: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    try:
        if cfg.out is None:
            sys.stdout.write(text)
        else:
            with open(cfg.out, "w", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"seqrac: cannot write {cfg.out}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
