"""Inference-network schema, validation, and the on-disk JSON format.

A network is a rooted tree of binary events. Leaves are observable
indicators; internal nodes are hypotheses whose belief is inferred.
Every edge carries a two-entry conditional table: the probability of
the child being true given each parent state. Beliefs, evidence, and
per-node decision thresholds all refer to the "true" state, so a
single number per node is enough everywhere.

All types here are immutable value objects; they can be shared freely
across threads and used as dict keys or cache keys.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Mapping, Union

DEFAULT_T_HIGH = 0.95
DEFAULT_T_LOW = 0.05
DEFAULT_COST = 1.0


class InquestError(Exception):
    """Base class for every domain error raised by this package."""


class NetworkFormatError(InquestError):
    """The network file could not be parsed (syntax or schema)."""


class NetworkValidationError(InquestError):
    """The network parsed but violates a structural invariant."""

    def __init__(self, violations: list[str]):
        super().__init__("invalid network: " + "; ".join(violations))
        self.violations = list(violations)


class EvidenceError(InquestError):
    """Evidence refers to an unknown node or is placed illegally."""


class ContradictionError(InquestError):
    """The supplied evidence has probability zero under the model."""


class SessionError(InquestError):
    """A session operation was attempted in the wrong lifecycle state."""


class NodeKind(str, Enum):
    ROOT = "root"
    INTERMEDIATE = "intermediate"
    OBSERVABLE = "observable"


@dataclass(frozen=True)
class NodeSpec:
    id: str
    kind: NodeKind
    label: str = ""
    target: bool = False
    cost: float = DEFAULT_COST


@dataclass(frozen=True)
class LinkCpt:
    """P(child = 1 | parent): one entry per parent state."""

    p_given_true: float
    p_given_false: float


@dataclass(frozen=True)
class LinkSpec:
    parent: str
    child: str
    cpt: LinkCpt


@dataclass(frozen=True)
class Thresholds:
    """Decision band: at or above `high` accept, at or below `low` reject."""

    high: float = DEFAULT_T_HIGH
    low: float = DEFAULT_T_LOW


@dataclass(frozen=True)
class Hard:
    """A definite observation: the node is known true (1) or false (0)."""

    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise EvidenceError(f"hard evidence must be 0 or 1, got {self.value!r}")


@dataclass(frozen=True)
class Soft:
    """A noisy observation on a leaf, as a likelihood weight for state 1.

    The weight is strictly between 0 and 1; a boundary value must be
    entered as Hard evidence instead.
    """

    weight: float

    def __post_init__(self):
        if not (0.0 < self.weight < 1.0):
            raise EvidenceError(
                f"soft evidence must lie strictly inside (0, 1), got {self.weight!r}"
            )


EvidenceValue = Union[Hard, Soft]
Evidence = Mapping[str, EvidenceValue]


def evidence_value_from_number(x: float) -> EvidenceValue:
    """Map a JSON number to evidence: 0/1 are hard, anything between is soft."""
    if x == 0:
        return Hard(0)
    if x == 1:
        return Hard(1)
    if 0.0 < x < 1.0:
        return Soft(float(x))
    raise EvidenceError(f"evidence value must lie in [0, 1], got {x!r}")


def evidence_value_to_number(v: EvidenceValue) -> float:
    if isinstance(v, Hard):
        return v.value
    return v.weight


@dataclass(frozen=True)
class NetworkSpec:
    """Immutable tree definition.

    `nodes` keeps document order (the order of the network file), which
    fixes the column order of dataset files and the canonical link
    order. `thresholds` holds per-node decision bands; nodes without an
    entry fall back to (0.95, 0.05).
    """

    name: str
    nodes: tuple[NodeSpec, ...]
    links: tuple[LinkSpec, ...]
    root_prior: float
    thresholds: tuple[tuple[str, Thresholds], ...] = ()

    # -- derived structure (valid networks only) --------------------------

    @cached_property
    def node_map(self) -> dict[str, NodeSpec]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def incoming(self) -> dict[str, LinkSpec]:
        return {l.child: l for l in self.links}

    @cached_property
    def children_map(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for l in self.links:
            out[l.parent].append(l.child)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def root(self) -> str:
        for n in self.nodes:
            if n.kind is NodeKind.ROOT:
                return n.id
        raise NetworkValidationError(["network has no root node"])

    @cached_property
    def leaves(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if not self.children_map[n.id])

    @cached_property
    def levels(self) -> dict[str, int]:
        """1-based level per node: the root is level 1."""
        lv = {self.root: 1}
        stack = [self.root]
        while stack:
            cur = stack.pop()
            for c in self.children_map[cur]:
                lv[c] = lv[cur] + 1
                stack.append(c)
        return lv

    @cached_property
    def max_depth(self) -> int:
        """Number of links on the longest root-to-leaf path."""
        return max(self.levels.values()) - 1

    @cached_property
    def threshold_map(self) -> dict[str, Thresholds]:
        return dict(self.thresholds)

    def node(self, node_id: str) -> NodeSpec:
        return self.node_map[node_id]

    def children(self, node_id: str) -> tuple[str, ...]:
        return self.children_map[node_id]

    def parent(self, node_id: str) -> str | None:
        link = self.incoming.get(node_id)
        return link.parent if link else None

    def threshold_for(self, node_id: str) -> Thresholds:
        return self.threshold_map.get(node_id, Thresholds())

    def cost(self, node_id: str) -> float:
        return self.node_map[node_id].cost

    def is_leaf(self, node_id: str) -> bool:
        return not self.children_map[node_id]

    def is_ancestor(self, anchor: str, node_id: str) -> bool:
        """True when `anchor` lies strictly above `node_id`."""
        cur = self.parent(node_id)
        while cur is not None:
            if cur == anchor:
                return True
            cur = self.parent(cur)
        return False

    def path(self, anchor: str, node_id: str) -> tuple[str, ...]:
        """Node ids from `anchor` down to `node_id`, inclusive."""
        rev = [node_id]
        cur = node_id
        while cur != anchor:
            parent = self.parent(cur)
            if parent is None:
                raise InquestError(f"{anchor} is not an ancestor of {node_id}")
            rev.append(parent)
            cur = parent
        return tuple(reversed(rev))

    def targets(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if n.target)

    def with_thresholds(self, overrides: Mapping[str, Thresholds]) -> "NetworkSpec":
        """Copy of this network with the given threshold entries replacing/added."""
        merged = dict(self.thresholds)
        merged.update(overrides)
        return replace(self, thresholds=tuple(sorted(merged.items())))


# -- validation -------------------------------------------------------------


def validate_network(spec: NetworkSpec) -> list[str]:
    """Return every violated structural invariant, empty when valid.

    Works on arbitrary (possibly malformed) specs and never raises:
    duplicate ids, dangling links, cycles etc. all come back as
    human-readable violation strings naming the offending node or link.
    """
    violations: list[str] = []

    ids: list[str] = []
    for n in spec.nodes:
        if not n.id or not isinstance(n.id, str):
            violations.append(f"node with empty or non-text id: {n.id!r}")
            continue
        ids.append(n.id)
    seen: set[str] = set()
    for i in ids:
        if i in seen:
            violations.append(f"duplicate node id {i!r}")
        seen.add(i)
    known = set(ids)

    roots = [n.id for n in spec.nodes if n.kind is NodeKind.ROOT]
    if len(roots) == 0:
        violations.append("no root node")
    elif len(roots) > 1:
        violations.append("multiple roots: " + ", ".join(sorted(roots)))

    if not (0.0 <= spec.root_prior <= 1.0):
        violations.append(f"root prior {spec.root_prior} out of range [0, 1]")

    parents: dict[str, list[str]] = {}
    for l in spec.links:
        if l.parent not in known:
            violations.append(f"link references unknown parent {l.parent!r}")
        if l.child not in known:
            violations.append(f"link references unknown child {l.child!r}")
        for p in (l.cpt.p_given_true, l.cpt.p_given_false):
            if not (0.0 <= p <= 1.0):
                violations.append(
                    f"link {l.parent}->{l.child}: probability {p} out of range [0, 1]"
                )
        parents.setdefault(l.child, []).append(l.parent)

    for child, ps in parents.items():
        if len(ps) > 1:
            violations.append(f"node {child} has {len(ps)} incoming links")
    for r in roots:
        if r in parents:
            violations.append(f"root {r} has an incoming link")
    for i in known:
        if i not in parents and i not in roots:
            violations.append(f"node {i} is not reachable from the root (not a tree)")

    # cycle detection over the parent pointers
    for start in known:
        cur = start
        hops = 0
        while cur in parents and len(parents[cur]) == 1:
            cur = parents[cur][0]
            hops += 1
            if cur == start or hops > len(known):
                violations.append(f"cycle through node {start} (not a tree)")
                break
            if cur not in known:
                break

    children: set[str] = {l.parent for l in spec.links}
    for n in spec.nodes:
        has_children = n.id in children
        if n.kind is NodeKind.OBSERVABLE and has_children:
            violations.append(f"observable node {n.id} is not a leaf")
        if (
            not has_children
            and n.kind is NodeKind.INTERMEDIATE
        ):
            violations.append(f"leaf node {n.id} is not observable")
        if n.cost < 0:
            violations.append(f"node {n.id}: negative observation cost {n.cost}")

    for node_id, th in spec.thresholds:
        if node_id not in known:
            violations.append(f"thresholds reference unknown node {node_id!r}")
        if not (0.0 <= th.low <= th.high <= 1.0):
            violations.append(
                f"thresholds for {node_id}: need 0 <= low <= high <= 1, "
                f"got low={th.low}, high={th.high}"
            )

    return violations


# -- JSON form --------------------------------------------------------------


def network_from_dict(data: dict) -> NetworkSpec:
    """Build a spec from the parsed JSON object; schema problems raise
    NetworkFormatError, structural problems raise NetworkValidationError."""
    if not isinstance(data, dict):
        raise NetworkFormatError("network file must be a JSON object")
    try:
        nodes = tuple(
            NodeSpec(
                id=str(n["id"]),
                kind=NodeKind(n["kind"]),
                label=str(n.get("label", "")),
                target=bool(n.get("target", False)),
                cost=float(n.get("cost", DEFAULT_COST)),
            )
            for n in data["nodes"]
        )
        links = tuple(
            LinkSpec(
                parent=str(l["parent"]),
                child=str(l["child"]),
                cpt=LinkCpt(float(l["p_given_true"]), float(l["p_given_false"])),
            )
            for l in data["links"]
        )
        thresholds = tuple(
            sorted(
                (str(k), Thresholds(high=float(v["high"]), low=float(v["low"])))
                for k, v in data.get("thresholds", {}).items()
            )
        )
        spec = NetworkSpec(
            name=str(data["name"]),
            nodes=nodes,
            links=links,
            root_prior=float(data["root_prior"]),
            thresholds=thresholds,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise NetworkFormatError(f"malformed network object: {exc}") from exc

    problems = validate_network(spec)
    if problems:
        raise NetworkValidationError(problems)
    return _canonical(spec)


def _canonical(spec: NetworkSpec) -> NetworkSpec:
    """Order links by child document position so equality is structural."""
    position = {n.id: i for i, n in enumerate(spec.nodes)}
    links = tuple(sorted(spec.links, key=lambda l: position[l.child]))
    return replace(spec, links=links)


def load_network(data: bytes | str) -> NetworkSpec:
    """Parse and validate a network file.

    Raises NetworkFormatError for unreadable content (with line/column
    for JSON syntax errors) and NetworkValidationError, carrying the
    full violation list, for a well-formed file describing a bad tree.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(
            f"network file is not valid JSON: {exc.msg} at line {exc.lineno}, column {exc.colno}"
        ) from exc
    return network_from_dict(raw)


def network_to_dict(spec: NetworkSpec) -> dict:
    return {
        "name": spec.name,
        "root_prior": spec.root_prior,
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind.value,
                "label": n.label,
                "target": n.target,
                "cost": n.cost,
            }
            for n in spec.nodes
        ],
        "links": [
            {
                "parent": l.parent,
                "child": l.child,
                "p_given_true": l.cpt.p_given_true,
                "p_given_false": l.cpt.p_given_false,
            }
            for l in spec.links
        ],
        "thresholds": {
            node_id: {"high": th.high, "low": th.low} for node_id, th in spec.thresholds
        },
    }


def serialize_network(spec: NetworkSpec) -> str:
    return json.dumps(network_to_dict(spec), indent=2) + "\n"
