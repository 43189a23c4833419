"""Command-line front end.

Exit codes: 0 success, 1 domain error (bad network, failed validation,
I/O trouble), 2 usage error. Machine-readable results go to stdout,
diagnostics to stderr. Given the same arguments and seed, `generate`,
`simulate`, and `compare` print byte-identical output.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .model import (
    InquestError,
    NetworkValidationError,
    load_network,
)
from .propagation import DepthVector, transform_tree, virtual_tree_to_dict
from .simulate import (
    ComparisonReport,
    cases_from_csv,
    cases_to_csv,
    compare_report,
    generate_cases,
    run_trials,
)
from .strategies import StrategySpec

PROG = "inquest"


class UsageError(InquestError):
    """Bad flag combination caught after argparse."""


def render_report(report: ComparisonReport, fmt: str = "table") -> str:
    """Render a comparison report as an aligned table or as JSON."""
    if not report.strategies:
        raise InquestError("empty report")
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt != "table":
        raise UsageError(f"unknown format {fmt!r}")

    headers = ["strategy", "trials", "mean_q", "median_q", "mean_cost", "+", "-", "?", "accuracy"]
    rows = []
    for s in report.strategies:
        acc = "n/a" if s.root.accuracy is None else f"{s.root.accuracy:.4f}"
        rows.append(
            [
                s.name,
                str(s.trials),
                f"{s.mean_queries:.3f}",
                f"{s.median_queries:.1f}",
                f"{s.mean_cost:.3f}",
                str(s.root.positive),
                str(s.root.negative),
                str(s.root.undecided),
                acc,
            ]
        )
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
    lines = [
        f"network: {report.network}    seed: {'-' if report.seed is None else report.seed}",
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip(),
    ]
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _read_network(path: str):
    return load_network(Path(path).read_bytes())


def _read_strategy(path: str) -> StrategySpec:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InquestError(f"strategy file {path}: invalid JSON: {exc}") from exc
    strategy = StrategySpec.from_dict(data)
    if strategy.name is None:
        strategy = dataclasses.replace(strategy, name=Path(path).stem)
    return strategy


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    try:
        _read_network(args.network)
    except NetworkValidationError as exc:
        print("invalid")
        for v in exc.violations:
            print(f"  - {v}")
        return 1
    print("valid")
    return 0


def cmd_transform(args) -> int:
    spec = _read_network(args.network)
    jumps = _parse_depth_vector(args.depth_vector)
    vt = transform_tree(spec, DepthVector(jumps))
    _emit(json.dumps(virtual_tree_to_dict(vt), indent=2) + "\n", args.out)
    return 0


def cmd_generate(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    spec = _read_network(args.network)
    cases = generate_cases(spec, args.n, args.seed)
    _emit(cases_to_csv(spec, cases), args.out)
    return 0


def _load_cases(args, spec):
    if args.dataset:
        return cases_from_csv(spec, Path(args.dataset).read_text())
    if args.n is None:
        raise UsageError("either --dataset or --n is required")
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    return generate_cases(spec, args.n, args.seed)


def cmd_simulate(args) -> int:
    spec = _read_network(args.network)
    strategy = _read_strategy(args.strategy)
    cases = _load_cases(args, spec)
    results = run_trials(spec, strategy, cases)
    report = compare_report(spec, {strategy.display_name: results}, seed=args.seed)
    _emit(render_report(report, args.format), args.out)
    return 0


def cmd_compare(args) -> int:
    spec = _read_network(args.network)
    strategies = [_read_strategy(p) for p in args.strategy]
    names = [s.display_name for s in strategies]
    if len(set(names)) != len(names):
        raise UsageError(f"duplicate strategy names: {names}")
    cases = _load_cases(args, spec)
    results = {s.display_name: run_trials(spec, s, cases) for s in strategies}
    report = compare_report(spec, results, seed=args.seed)
    _emit(render_report(report, args.format), args.out)
    return 0


def cmd_run(args) -> int:
    # imported lazily so simulation-only use works without the service extras
    from .service import SessionService

    service = SessionService(Path(args.store) if args.store else None)
    spec = _read_network(args.network)
    service.register_network_spec(spec)
    strategy = _read_strategy(args.strategy)
    view = service.create_session(spec.name, strategy.to_dict())
    sid = view["session_id"]

    def show(v):
        for node_id, p in v["posteriors"].items():
            marker = v["evidence"].get(node_id)
            tag = "?" if marker is None else str(marker)
            print(f"  {node_id:>8}  P={p:.6f}  [{tag}]", file=sys.stderr)

    print(f"session {sid} on {spec.name} ({strategy.display_name})", file=sys.stderr)
    show(view)
    skipped: set[str] = set()
    while view["status"] == "active":
        suggestion = view["suggestion"]
        if skipped:
            suggestion = service.suggest(sid, exclude=skipped)
            if suggestion is None:
                print("nothing left outside the skipped leaves", file=sys.stderr)
                skipped.clear()
                continue
        try:
            raw = input(f"Observe {suggestion}? [1/0/s=<soft>/skip/quit] ").strip().lower()
        except (EOFError, KeyboardInterrupt):
            raw = "quit"
        if raw == "quit":
            break
        if raw == "skip":
            skipped.add(suggestion)
            continue
        if raw == "1" or raw == "0":
            value = int(raw)
        elif raw.startswith("s="):
            try:
                value = float(raw[2:])
            except ValueError:
                print(f"cannot read soft value {raw[2:]!r}", file=sys.stderr)
                continue
        else:
            print("answer 1, 0, s=<value in (0,1)>, skip, or quit", file=sys.stderr)
            continue
        override = suggestion != view["suggestion"]
        try:
            view = service.observe(sid, suggestion, value, override=override)
        except InquestError as exc:
            print(f"rejected: {exc}", file=sys.stderr)
            continue
        skipped.clear()
        show(view)

    record = service.close_session(sid)
    print(json.dumps(record, indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import SessionService, create_app

    service = SessionService(Path(args.store) if args.store else None)
    app = create_app(service)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _parse_depth_vector(text: str) -> tuple[int, ...]:
    try:
        jumps = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"--depth-vector wants comma-separated integers, got {text!r}") from None
    if not jumps:
        raise UsageError("--depth-vector is empty")
    return jumps


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Evidential reasoning on tree-structured inference networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network file against every invariant")
    p.add_argument("--network", required=True, help="path to a network JSON file")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("transform", help="condense a network to the given depth vector")
    p.add_argument("--network", required=True)
    p.add_argument("--depth-vector", required=True, help="comma-separated jumps, e.g. 1,2")
    p.add_argument("--out", help="write the condensed network here instead of stdout")
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("run", help="interactive terminal diagnosis session")
    p.add_argument("--network", required=True)
    p.add_argument("--strategy", required=True, help="path to a strategy JSON file")
    p.add_argument("--store", help="session store directory (event logs)")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("generate", help="sample a dataset of ground-truth cases")
    p.add_argument("--network", required=True)
    p.add_argument("--n", type=int, required=True, help="number of cases (>= 1)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("simulate", help="run offline trials for one strategy")
    p.add_argument("--network", required=True)
    p.add_argument("--strategy", required=True)
    p.add_argument("--n", type=int, help="cases to sample when no --dataset is given")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dataset", help="existing dataset CSV to replay")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("compare", help="run several strategies over one dataset")
    p.add_argument("--network", required=True)
    p.add_argument("--strategy", action="append", required=True, help="repeatable")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dataset")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("serve", help="serve the session API over HTTP")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--store", help="directory for network files and session logs")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own usage message
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"{PROG}: usage error: {exc}", file=sys.stderr)
        return 2
    except InquestError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
