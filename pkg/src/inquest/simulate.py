"""Case sampling, offline diagnosis trials, and strategy comparison.

Every case gets its own RNG substream derived from (seed, case id), so
datasets and trial results are bit-reproducible no matter how or in
what order the cases are produced.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import Hard, InquestError, NetworkSpec
from .strategies import Decision, SessionState, StrategySpec, run_to_termination


@dataclass(frozen=True)
class Case:
    """A complete sampled truth assignment, intermediates included."""

    case_id: int
    truth: Mapping[str, int]


@dataclass(frozen=True)
class TrialResult:
    case_id: int
    strategy: str
    queries: tuple[str, ...]
    query_count: int
    total_cost: float
    decisions: Mapping[str, Decision]
    correct: Mapping[str, bool | None]  # None where the decision stayed "?"


def case_rng(seed: int, case_id: int) -> np.random.Generator:
    """Independent substream for one case, stable across runs and platforms."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(case_id,)))


def sample_case(spec: NetworkSpec, rng: np.random.Generator, case_id: int = 0) -> Case:
    """Forward-sample the network: root from its prior, children top-down."""
    truth: dict[str, int] = {}
    truth[spec.root] = 1 if rng.random() < spec.root_prior else 0
    stack = [spec.root]
    while stack:
        node = stack.pop()
        for child in spec.children_map[node]:
            cpt = spec.incoming[child].cpt
            p = cpt.p_given_true if truth[node] == 1 else cpt.p_given_false
            truth[child] = 1 if rng.random() < p else 0
            stack.append(child)
    return Case(case_id=case_id, truth={n.id: truth[n.id] for n in spec.nodes})


def generate_cases(spec: NetworkSpec, n: int, seed: int) -> list[Case]:
    if n < 1:
        raise InquestError(f"case count must be at least 1, got {n}")
    return [sample_case(spec, case_rng(seed, i), i) for i in range(n)]


def cases_to_csv(spec: NetworkSpec, cases: Iterable[Case]) -> str:
    """Dataset text: header `case_id,<node ids in document order>`, rows of 0/1."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    ids = [n.id for n in spec.nodes]
    writer.writerow(["case_id", *ids])
    for case in cases:
        writer.writerow([case.case_id, *(case.truth[i] for i in ids)])
    return out.getvalue()


def cases_from_csv(spec: NetworkSpec, text: str) -> list[Case]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InquestError("dataset is empty") from None
    ids = [n.id for n in spec.nodes]
    if header[:1] != ["case_id"] or set(header[1:]) != set(ids):
        raise InquestError(
            f"dataset columns {header[1:]} do not match network {spec.name!r} nodes"
        )
    cases = []
    for row in reader:
        if not row:
            continue
        values = dict(zip(header[1:], row[1:]))
        truth = {}
        for node_id in ids:
            v = values[node_id]
            if v not in ("0", "1"):
                raise InquestError(f"dataset value for {node_id} must be 0 or 1, got {v!r}")
            truth[node_id] = int(v)
        cases.append(Case(case_id=int(row[0]), truth=truth))
    if not cases:
        raise InquestError("dataset has no rows")
    return cases


def _trial(spec: NetworkSpec, strategy: StrategySpec, case: Case) -> TrialResult:
    final: SessionState = run_to_termination(
        spec, strategy, lambda leaf: Hard(case.truth[leaf])
    )
    decisions = dict(final.decisions)
    correct: dict[str, bool | None] = {}
    for node_id, decision in decisions.items():
        if decision is Decision.UNDECIDED:
            correct[node_id] = None
        else:
            correct[node_id] = (decision is Decision.POSITIVE) == (case.truth[node_id] == 1)
    return TrialResult(
        case_id=case.case_id,
        strategy=strategy.display_name,
        queries=tuple(r.node for r in final.query_log),
        query_count=final.query_count,
        total_cost=final.total_cost,
        decisions=decisions,
        correct=correct,
    )


def run_trials(spec: NetworkSpec, strategy: StrategySpec, cases: Sequence[Case]) -> list[TrialResult]:
    """Replay every case offline, answering queries from its sampled truth."""
    for case in cases:
        if set(case.truth) != set(spec.node_map):
            raise InquestError(
                f"case {case.case_id} was generated for a different node set"
            )
    return [_trial(spec, strategy, case) for case in cases]


# -- aggregation --------------------------------------------------------------


@dataclass(frozen=True)
class TargetStats:
    positive: int
    negative: int
    undecided: int
    accuracy: float | None  # among decided trials; None when none decided

    def to_dict(self) -> dict:
        return {
            "+": self.positive,
            "-": self.negative,
            "?": self.undecided,
            "accuracy": self.accuracy,
        }


@dataclass(frozen=True)
class StrategyStats:
    name: str
    trials: int
    mean_queries: float
    median_queries: float
    mean_cost: float
    root: TargetStats
    targets: Mapping[str, TargetStats]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "mean_queries": self.mean_queries,
            "median_queries": self.median_queries,
            "mean_cost": self.mean_cost,
            "decisions": {
                "+": self.root.positive,
                "-": self.root.negative,
                "?": self.root.undecided,
            },
            "accuracy": self.root.accuracy,
            "targets": {k: v.to_dict() for k, v in sorted(self.targets.items())},
        }


@dataclass(frozen=True)
class ComparisonReport:
    network: str
    seed: int | None
    strategies: tuple[StrategyStats, ...]

    def to_dict(self) -> dict:
        return {
            "network": self.network,
            "seed": self.seed,
            "strategies": [s.to_dict() for s in self.strategies],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ComparisonReport":
        rows = []
        for s in data["strategies"]:
            targets = {
                k: TargetStats(v["+"], v["-"], v["?"], v["accuracy"])
                for k, v in s["targets"].items()
            }
            d = s["decisions"]
            rows.append(
                StrategyStats(
                    name=s["name"],
                    trials=s["trials"],
                    mean_queries=s["mean_queries"],
                    median_queries=s["median_queries"],
                    mean_cost=s["mean_cost"],
                    root=TargetStats(d["+"], d["-"], d["?"], s["accuracy"]),
                    targets=targets,
                )
            )
        return cls(network=data["network"], seed=data["seed"], strategies=tuple(rows))


def _target_stats(results: Sequence[TrialResult], node_id: str) -> TargetStats:
    pos = neg = und = hits = decided = 0
    for r in results:
        decision = r.decisions.get(node_id)
        if decision is Decision.POSITIVE:
            pos += 1
        elif decision is Decision.NEGATIVE:
            neg += 1
        else:
            und += 1
        outcome = r.correct.get(node_id)
        if outcome is not None:
            decided += 1
            hits += int(outcome)
    accuracy = hits / decided if decided else None
    return TargetStats(positive=pos, negative=neg, undecided=und, accuracy=accuracy)


def compare_report(
    spec: NetworkSpec,
    results_by_strategy: Mapping[str, Sequence[TrialResult]],
    seed: int | None = None,
) -> ComparisonReport:
    """Aggregate per-strategy trial results into one comparable report.

    Rows are ordered by ascending mean query count (name breaks ties) so
    renderings are deterministic.
    """
    if not results_by_strategy:
        raise InquestError("nothing to compare: no strategies given")
    for name, results in results_by_strategy.items():
        if not results:
            raise InquestError(f"strategy {name!r} has an empty result set")
    case_sets = {
        name: sorted(r.case_id for r in results)
        for name, results in results_by_strategy.items()
    }
    reference = next(iter(case_sets.values()))
    for name, ids in case_sets.items():
        if ids != reference:
            raise InquestError(f"strategy {name!r} was run on a different dataset")
    rows = []
    for name, results in results_by_strategy.items():
        counts = [r.query_count for r in results]
        target_ids = sorted({t for r in results for t in r.decisions})
        rows.append(
            StrategyStats(
                name=name,
                trials=len(results),
                mean_queries=sum(counts) / len(counts),
                median_queries=float(statistics.median(counts)),
                mean_cost=sum(r.total_cost for r in results) / len(results),
                root=_target_stats(results, spec.root),
                targets={t: _target_stats(results, t) for t in target_ids},
            )
        )
    rows.sort(key=lambda s: (s.mean_queries, s.name))
    return ComparisonReport(network=spec.name, seed=seed, strategies=tuple(rows))
