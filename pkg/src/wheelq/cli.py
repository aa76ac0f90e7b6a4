"""``wheelq`` command line: simulate, analyze, verify.

Exit status is the machine contract: 0 ok, 1 property violated, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import coterie, sim
from .errors import WheelError
from .store import dump_snapshot, load_snapshot

log = logging.getLogger("wheelq")

EXIT_OK, EXIT_VIOLATION, EXIT_BAD_INPUT = 0, 1, 2


class _BadInput(Exception):
    pass


def _setup_logging(verbosity: int) -> None:
    level = os.environ.get("WHEELQ_LOG")
    if level is None:
        level = ("WARNING", "INFO", "DEBUG")[min(verbosity, 2)]
    if not isinstance(logging.getLevelName(level.upper()), int):
        level = "WARNING"
    logging.basicConfig(level=level.upper(), format="%(levelname)s %(name)s: %(message)s")


def _sidecar(out: Path, suffix: str) -> Path:
    return out.with_name(out.name + suffix)


def _load_scenario(args) -> sim.Scenario:
    if args.scenario is not None:
        path = Path(args.scenario)
        if not path.is_file():
            raise _BadInput(f"scenario file not found: {path}")
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise _BadInput(f"cannot read scenario {path}: {e}") from e
        if not isinstance(doc, dict):
            raise _BadInput("scenario must be a JSON object")
        if args.n is not None:
            doc["n"] = args.n
        if args.seed is not None:
            doc["seed"] = args.seed
        if args.load_threshold is not None:
            doc["load_threshold"] = args.load_threshold
        if args.fallback_reads:
            doc["fallback_reads"] = True
        return sim.Scenario.from_dict(doc)
    if args.n is None or args.steps is None:
        raise _BadInput("simulate needs --scenario PATH or both --n and --steps")
    sc = sim.random_scenario(
        args.n, args.seed or 0, args.steps, args.p_crash, args.p_recover, args.read_fraction,
        load_threshold=args.load_threshold or sim.DEFAULT_LOAD_THRESHOLD,
    )
    sc.fallback_reads = args.fallback_reads
    return sc


def cmd_simulate(args) -> int:
    sc = _load_scenario(args)
    simulation = sim.Simulation(sc)
    trace = simulation.run()
    metrics = simulation.metrics
    out = Path(args.out)
    with out.open("w") as fp:
        sim.dump_trace(sc, trace, fp)
    _sidecar(out, ".metrics.json").write_text(json.dumps(metrics.to_dict(), indent=2) + "\n")
    with _sidecar(out, ".snapshot.jsonl").open("w") as fp:
        dump_snapshot(simulation.store, fp)

    bad = sim.first_violation(trace)
    print(f"n={sc.n} seed={sc.seed} events={len(trace)} "
          f"reads {metrics.reads_ok} ok/{metrics.reads_failed} failed, "
          f"writes {metrics.writes_ok} ok/{metrics.writes_failed} failed, "
          f"elections {metrics.elections}")
    print(f"trace written to {out}")
    if bad is not None:
        print(f"one-copy violation at seq {bad.event.seq}: {bad.to_dict()}", file=sys.stderr)
        return EXIT_VIOLATION
    print("one-copy check: PASS")
    return EXIT_OK


def cmd_analyze(args) -> int:
    if args.n is None:
        raise _BadInput("analyze needs --n")
    if args.max_vote is not None and args.max_vote < 1:
        raise _BadInput("--max-vote must be >= 1")
    report = coterie.analyze(args.n, args.max_vote)
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)

    failures = [name for name in ("minimality_ok", "rw_intersection_ok", "ww_intersection_ok",
                                  "adjacent_cover_ok", "sizes_ok") if not getattr(report, name)]
    if report.vote_equivalent is not None:
        failures.append(f"vote_equivalent={report.vote_equivalent}")
    print(f"n={report.n}: {len(report.write_quorums)} write quorums, "
          f"vote search bound {report.search_bound}"
          + ("" if report.vote_search_done else " (skipped: search space too large)"),
          file=sys.stderr)
    for f in failures:
        print(f"  FAIL {f}", file=sys.stderr)
    return EXIT_VIOLATION if failures else EXIT_OK


def cmd_verify(args) -> int:
    path = Path(args.trace)
    try:
        with path.open() as fp:
            _, trace = sim.load_trace(fp)
    except OSError as e:
        raise _BadInput(f"cannot read trace {path}: {e}") from e
    bad = sim.first_violation(trace)
    if bad is not None:
        print(f"one-copy violation at seq {bad.event.seq}", file=sys.stderr)
        return EXIT_VIOLATION
    if args.snapshot:
        try:
            with open(args.snapshot) as fp:
                _, copies = load_snapshot(fp)
        except (OSError, ValueError, StopIteration) as e:
            raise _BadInput(f"cannot read snapshot {args.snapshot}: {e}") from e
        if not sim.check_snapshot(copies, trace):
            print("snapshot disagrees with the trace's last committed write", file=sys.stderr)
            return EXIT_VIOLATION
    print(f"{len(trace)} records: one-copy check PASS")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wheelq", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("simulate", help="run a seeded fail-stop scenario")
    s.add_argument("--scenario", metavar="PATH")
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--steps", type=int)
    s.add_argument("--p-crash", type=float, default=0.0)
    s.add_argument("--p-recover", type=float, default=0.0)
    s.add_argument("--read-fraction", type=float, default=0.8)
    s.add_argument("--load-threshold", type=int, metavar="K")
    s.add_argument("--fallback-reads", action="store_true",
                   help="read from two adjacent cycle nodes instead of electing when the HUB refuses")
    s.add_argument("--out", metavar="PATH", default="wheelq-trace.jsonl")
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("analyze", help="enumerate and check the wheel coterie")
    a.add_argument("--n", type=int)
    a.add_argument("--max-vote", type=int, metavar="B")
    a.add_argument("--out", metavar="PATH")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="re-check a stored trace")
    v.add_argument("trace", metavar="TRACE")
    v.add_argument("--snapshot", metavar="PATH")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_BAD_INPUT
    _setup_logging(args.verbose)
    try:
        return args.func(args)
    except (_BadInput, WheelError) as e:
        print(f"wheelq: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
