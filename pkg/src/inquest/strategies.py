"""Query-selection strategies and the diagnosis session state machine.

A strategy bundles three choices: when to stop (per-node decision
thresholds on the goal nodes), what to answer (accept / reject /
undecided against those thresholds), and which observable node to ask
for next. Selection is scored over a condensed view of the tree chosen
by the strategy's depth vector:

* flat: every indicator competes globally on its synthesized direct
  link to the root; no intermediate plays a role.
* grouped: an intermediate is focused first and its indicators are
  exhausted before moving on; only the root decides termination.
* distributed: like grouped, but a focused intermediate is abandoned
  as soon as its own thresholds resolve it, and the root criterion is
  still checked after every answer.
* isolated: like distributed, but the root criterion is consulted only
  when a subgoal finishes; wasteful by design, and useful as a
  baseline for exactly that reason.

Sessions are immutable values: ``step`` returns a new state, so replay
and what-if analysis never mutate anything.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from math import log2
from typing import Callable, Mapping

from .model import (
    ContradictionError,
    EvidenceValue,
    Hard,
    InquestError,
    LinkCpt,
    NetworkSpec,
    SessionError,
    Soft,
    Thresholds,
)
from .propagation import (
    BeliefState,
    DepthVector,
    VirtualTree,
    check_evidence,
    propagate_beliefs,
    transform_tree,
    virtual_link,
)


class Decision(str, Enum):
    POSITIVE = "+"
    NEGATIVE = "-"
    UNDECIDED = "?"

    @property
    def rank(self) -> int:
        """Order - < ? < + for monotonicity checks."""
        return {"-": 0, "?": 1, "+": 2}[self.value]


class Mode(str, Enum):
    FLAT = "flat"
    GROUPED = "grouped"
    DISTRIBUTED = "distributed"
    ISOLATED = "isolated"


class EvKind(str, Enum):
    DISCRIMINATION = "discrimination"
    INFO_GAIN = "info_gain"


class EvTiming(str, Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


class Goal(str, Enum):
    ROOT_ONLY = "root_only"
    ROOT_PLUS_SELECTED = "root_plus_selected"


def decide(p: float, th: Thresholds) -> Decision:
    """Map a posterior onto {+, -, ?}; both boundaries are inclusive."""
    if p >= th.high:
        return Decision.POSITIVE
    if p <= th.low:
        return Decision.NEGATIVE
    return Decision.UNDECIDED


def ev_discrimination(link: LinkCpt) -> float:
    """How far apart the two conditional rows sit; prior-independent."""
    return abs(link.p_given_true - link.p_given_false)


def _entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * log2(p) + (1.0 - p) * log2(1.0 - p))


def ev_info_gain(parent_posterior: float, link: LinkCpt) -> float:
    """Expected entropy drop of the parent from observing the child (bits)."""
    q = parent_posterior
    p_child = q * link.p_given_true + (1.0 - q) * link.p_given_false
    gain = _entropy(q)
    if 0.0 < p_child:
        gain -= p_child * _entropy(q * link.p_given_true / p_child)
    if p_child < 1.0:
        gain -= (1.0 - p_child) * _entropy(q * (1.0 - link.p_given_true) / (1.0 - p_child))
    return max(gain, 0.0)


@dataclass(frozen=True)
class StrategySpec:
    mode: Mode
    depth_vector: tuple[int, ...] | None = None
    ev: EvKind = EvKind.DISCRIMINATION
    ev_timing: EvTiming = EvTiming.STATIC
    goal: Goal = Goal.ROOT_ONLY
    selected_targets: tuple[str, ...] = ()
    name: str | None = None

    @property
    def display_name(self) -> str:
        if self.name:
            return self.name
        return f"{self.mode.value}-{self.ev.value}-{self.ev_timing.value}"

    def to_dict(self) -> dict:
        data = {
            "mode": self.mode.value,
            "depth_vector": list(self.depth_vector) if self.depth_vector else None,
            "ev": self.ev.value,
            "ev_timing": self.ev_timing.value,
            "goal": self.goal.value,
            "selected_targets": list(self.selected_targets),
        }
        if self.name:
            data["name"] = self.name
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "StrategySpec":
        try:
            dv = data.get("depth_vector")
            return cls(
                mode=Mode(data["mode"]),
                depth_vector=tuple(int(j) for j in dv) if dv else None,
                ev=EvKind(data.get("ev", "discrimination")),
                ev_timing=EvTiming(data.get("ev_timing", "static")),
                goal=Goal(data.get("goal", "root_only")),
                selected_targets=tuple(data.get("selected_targets", ())),
                name=data.get("name"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InquestError(f"malformed strategy: {exc}") from exc


@dataclass(frozen=True)
class QueryRecord:
    node: str
    value: EvidenceValue
    cost: float


@dataclass(frozen=True)
class SessionState:
    """One diagnosis session; every transition returns a fresh value."""

    spec: NetworkSpec
    strategy: StrategySpec
    belief: BeliefState
    focus_stack: tuple[str, ...] = ()
    released: frozenset[str] = frozenset()
    query_log: tuple[QueryRecord, ...] = ()
    decisions: Mapping[str, Decision] | None = None

    @property
    def active(self) -> bool:
        return self.decisions is None

    @property
    def terminated(self) -> bool:
        return self.decisions is not None

    @property
    def query_count(self) -> int:
        return len(self.query_log)

    @property
    def total_cost(self) -> float:
        return sum(r.cost for r in self.query_log)


def normalize_strategy(spec: NetworkSpec, strategy: StrategySpec) -> StrategySpec:
    """Resolve the default depth vector and validate the strategy for `spec`.

    Flat looks straight through to the leaves (one jump); the other
    modes default to seeing every level and must retain at least one
    intermediate level on trees that have one.
    """
    try:
        strategy = replace(
            strategy,
            mode=Mode(strategy.mode),
            ev=EvKind(strategy.ev),
            ev_timing=EvTiming(strategy.ev_timing),
            goal=Goal(strategy.goal),
            selected_targets=tuple(strategy.selected_targets),
        )
    except ValueError as exc:
        raise InquestError(f"malformed strategy: {exc}") from exc
    if strategy.depth_vector is None:
        if strategy.mode is Mode.FLAT:
            dv = (max(spec.max_depth, 1),)
        else:
            dv = tuple(1 for _ in range(max(spec.max_depth, 1)))
        strategy = replace(strategy, depth_vector=dv)
    vector = DepthVector(strategy.depth_vector)
    if spec.max_depth > 0:
        vector.validate_for(spec)
    if strategy.mode is Mode.FLAT and len(strategy.depth_vector) != 1:
        raise InquestError("flat strategies use a single-jump depth vector")
    if (
        strategy.mode is not Mode.FLAT
        and spec.max_depth >= 2
        and len(strategy.depth_vector) < 2
    ):
        raise InquestError(
            f"{strategy.mode.value} strategies must retain at least one intermediate level"
        )
    if strategy.goal is Goal.ROOT_PLUS_SELECTED:
        for node_id in strategy.selected_targets:
            if node_id not in spec.node_map:
                raise InquestError(f"selected target {node_id!r} is not in the network")
            if node_id != spec.root and not spec.node_map[node_id].target:
                raise InquestError(
                    f"selected target {node_id} is not flagged as a target node"
                )
    return strategy


def goal_nodes(spec: NetworkSpec, strategy: StrategySpec) -> tuple[str, ...]:
    if strategy.goal is Goal.ROOT_PLUS_SELECTED:
        extra = [n for n in strategy.selected_targets if n != spec.root]
        return (spec.root, *extra)
    return (spec.root,)


def decision_nodes(spec: NetworkSpec, strategy: StrategySpec) -> tuple[str, ...]:
    """Nodes that get a decision at termination: goal nodes plus flagged targets."""
    out = list(goal_nodes(spec, strategy))
    for node_id in spec.targets():
        if node_id not in out:
            out.append(node_id)
    return tuple(out)


def goal_met(state: SessionState) -> bool:
    """True when every goal node is decided under the current beliefs."""
    return _goal_met(state.spec, state.strategy, state.belief)


def _goal_met(spec: NetworkSpec, strategy: StrategySpec, belief: BeliefState) -> bool:
    return all(
        decide(belief.posterior[n], spec.threshold_for(n)) is not Decision.UNDECIDED
        for n in goal_nodes(spec, strategy)
    )


# -- the condensed view a strategy works on ----------------------------------


@dataclass(frozen=True)
class _Plan:
    spec: NetworkSpec
    strategy: StrategySpec
    vtree: VirtualTree
    leaf_kids: Mapping[str, tuple[str, ...]]
    internal_kids: Mapping[str, tuple[str, ...]]
    leaves_below: Mapping[str, frozenset[str]]
    static_posterior: Mapping[str, float]


@lru_cache(maxsize=128)
def _plan(spec: NetworkSpec, strategy: StrategySpec) -> _Plan:
    vtree = transform_tree(spec, DepthVector(strategy.depth_vector))
    net = vtree.network
    leaf_kids: dict[str, tuple[str, ...]] = {}
    internal_kids: dict[str, tuple[str, ...]] = {}
    for node in net.node_map:
        kids = net.children_map[node]
        leaf_kids[node] = tuple(k for k in kids if net.is_leaf(k))
        internal_kids[node] = tuple(k for k in kids if not net.is_leaf(k))

    leaves_below: dict[str, frozenset[str]] = {}

    def collect(node: str) -> frozenset[str]:
        if net.is_leaf(node):
            below = frozenset((node,))
        else:
            below = frozenset().union(*(collect(k) for k in net.children_map[node]))
        leaves_below[node] = below
        return below

    collect(net.root)

    return _Plan(
        spec=spec,
        strategy=strategy,
        vtree=vtree,
        leaf_kids=leaf_kids,
        internal_kids=internal_kids,
        leaves_below=leaves_below,
        static_posterior=dict(propagate_beliefs(spec, {}).posterior),
    )


def _score(plan: _Plan, belief: BeliefState, parent: str, child: str) -> float:
    """EV of querying/focusing `child` as seen from `parent`."""
    strategy = plan.strategy
    if strategy.ev_timing is EvTiming.STATIC:
        cpt = plan.vtree.cpt(parent, child)
        base = plan.static_posterior[parent]
    else:
        try:
            cpt = virtual_link(plan.spec, belief.evidence, child, parent)
        except ContradictionError:
            return 0.0
        base = belief.posterior[parent]
    if strategy.ev is EvKind.DISCRIMINATION:
        return ev_discrimination(cpt)
    return ev_info_gain(base, cpt)


def _blocked(plan: _Plan, state: SessionState, node: str) -> bool:
    """A focus candidate is skipped once abandoned or already resolved."""
    if node in state.released:
        return True
    if plan.strategy.mode in (Mode.DISTRIBUTED, Mode.ISOLATED):
        th = plan.spec.threshold_for(node)
        return decide(state.belief.posterior[node], th) is not Decision.UNDECIDED
    return False


@dataclass(frozen=True)
class _Selection:
    extension: tuple[str, ...]  # focus nodes to persist (descent below the stack)
    leaf: str
    anchor: str  # the node the chosen leaf hangs under in the condensed view


def _selection(
    plan: _Plan, state: SessionState, exclude: frozenset[str] = frozenset()
) -> _Selection | None:
    """Deterministic choice of the next leaf to query.

    Follows the persisted focus chain while it still leads to something
    selectable, then free-descends: at each node the unobserved leaf
    children and the viable unreleased intermediates compete on EV, ties
    broken by ascending node id. When every intermediate beneath a node
    has been abandoned but unobserved leaves remain, the abandoned ones
    are revisited in EV order rather than stranding the session.
    """
    observed = set(state.belief.evidence)
    selectable = {
        l for l in plan.leaves_below[plan.vtree.network.root]
        if l not in observed and l not in exclude
    }
    if not selectable:
        return None

    def viable(node: str) -> bool:
        return bool(plan.leaves_below[node] & selectable)

    node = plan.vtree.network.root
    extension: list[str] = []
    pending = list(state.focus_stack)
    while True:
        if pending:
            nxt = pending.pop(0)
            if viable(nxt):
                node = nxt
                continue
            pending.clear()  # skipped-leaf round left this chain empty

        leaf_cands = [k for k in plan.leaf_kids[node] if k in selectable]
        internal = [k for k in plan.internal_kids[node] if viable(k)]
        open_cands = [k for k in internal if not _blocked(plan, state, k)]

        pool = leaf_cands + open_cands
        revisit = False
        if not pool:
            pool = internal  # every subgoal here is done; revisit the best one
            revisit = True
        if not pool:
            return None

        best = min(pool, key=lambda c: (-_score(plan, state.belief, node, c), c))
        if best in leaf_cands:
            return _Selection(extension=tuple(extension), leaf=best, anchor=node)
        if not revisit:
            extension.append(best)
        node = best


def select_next(state: SessionState, exclude: frozenset[str] = frozenset()) -> str | None:
    """The leaf the strategy wants answered next, or None when exhausted."""
    if state.terminated:
        raise SessionError("session already terminated")
    plan = _plan(state.spec, state.strategy)
    sel = _selection(plan, state, exclude)
    return sel.leaf if sel else None


def leaf_score(state: SessionState, leaf: str) -> float:
    """Current EV of an unobserved leaf against its condensed-view parent."""
    plan = _plan(state.spec, state.strategy)
    parent = plan.vtree.network.parent(leaf)
    if parent is None:
        raise InquestError(f"{leaf} is not a leaf of the condensed view")
    return _score(plan, state.belief, parent, leaf)


# -- transitions --------------------------------------------------------------


def _decisions(spec: NetworkSpec, strategy: StrategySpec, belief: BeliefState) -> dict[str, Decision]:
    return {
        n: decide(belief.posterior[n], spec.threshold_for(n))
        for n in decision_nodes(spec, strategy)
    }


def _subgoal_done(plan: _Plan, belief: BeliefState, observed: set[str], node: str) -> bool:
    exhausted = plan.leaves_below[node] <= observed
    if plan.strategy.mode in (Mode.DISTRIBUTED, Mode.ISOLATED):
        th = plan.spec.threshold_for(node)
        if decide(belief.posterior[node], th) is not Decision.UNDECIDED:
            return True
    return exhausted


def _settle(
    plan: _Plan,
    state: SessionState,
    belief: BeliefState,
    record: QueryRecord,
    anchor: str | None,
    extension: tuple[str, ...],
    force_goal_check: bool = False,
) -> SessionState:
    """Shared post-observation bookkeeping: releases, goal check, termination."""
    spec, strategy = plan.spec, plan.strategy
    observed = set(belief.evidence)

    chain = state.focus_stack + extension
    keep: list[str] = []
    released = set(state.released)
    boundary = False
    for focus in chain:
        if _subgoal_done(plan, belief, observed, focus):
            if strategy.mode in (Mode.DISTRIBUTED, Mode.ISOLATED):
                released.add(focus)
            boundary = True
            break  # this focus and everything below it is abandoned
        keep.append(focus)

    if anchor is not None and anchor not in chain:
        # flat pick, a root-attached leaf, or a revisited subgoal
        boundary = boundary or anchor == spec.root or _subgoal_done(plan, belief, observed, anchor)

    exhausted_all = all(l in observed for l in spec.leaves)
    check_goal = (
        strategy.mode is not Mode.ISOLATED or boundary or exhausted_all or force_goal_check
    )

    base = replace(
        state,
        belief=belief,
        focus_stack=tuple(keep),
        released=frozenset(released),
        query_log=state.query_log + (record,),
    )
    if (check_goal and _goal_met(spec, strategy, belief)) or exhausted_all:
        return replace(base, decisions=_decisions(spec, strategy, belief))
    return base


def create_session(spec: NetworkSpec, strategy: StrategySpec) -> SessionState:
    """Open a session: propagate priors and terminate outright if the goal
    criterion already holds (or there is nothing to observe)."""
    strategy = normalize_strategy(spec, strategy)
    plan = _plan(spec, strategy)
    belief = propagate_beliefs(spec, {})
    state = SessionState(spec=spec, strategy=strategy, belief=belief)
    if _goal_met(spec, strategy, belief) or not spec.leaves:
        state = replace(state, decisions=_decisions(spec, strategy, belief))
    return state


def step(state: SessionState, answer: EvidenceValue) -> SessionState:
    """Apply the answer for the currently suggested leaf and advance."""
    if state.terminated:
        raise SessionError("session already terminated")
    plan = _plan(state.spec, state.strategy)
    sel = _selection(plan, state)
    if sel is None:
        raise SessionError("no unobserved leaves remain")
    if not isinstance(answer, (Hard, Soft)):
        raise SessionError(f"unsupported answer type {type(answer)!r}")

    evidence = dict(state.belief.evidence)
    evidence[sel.leaf] = answer
    belief = propagate_beliefs(state.spec, evidence)
    record = QueryRecord(sel.leaf, answer, state.spec.cost(sel.leaf))
    return _settle(plan, state, belief, record, sel.anchor, sel.extension)


def apply_override(state: SessionState, node: str, value: EvidenceValue) -> SessionState:
    """Operator-initiated observation outside the suggested order.

    Hard values may land on any unobserved node, soft values only on
    leaves. The focus chain is re-settled from the new beliefs, and the
    goal criterion is always checked (the operator acted globally, so
    isolated-mode deferral does not apply).
    """
    if state.terminated:
        raise SessionError("session already terminated")
    if node in state.belief.evidence:
        raise SessionError(f"node {node} is already observed")
    probe = dict(state.belief.evidence)
    probe[node] = value
    check_evidence(state.spec, probe)

    plan = _plan(state.spec, state.strategy)
    belief = propagate_beliefs(state.spec, probe)
    record = QueryRecord(node, value, state.spec.cost(node))
    return _settle(plan, state, belief, record, None, (), force_goal_check=True)


def run_to_termination(
    spec: NetworkSpec,
    strategy: StrategySpec,
    answer_source: Callable[[str], EvidenceValue],
) -> SessionState:
    """Drive a session with answers from `answer_source` until it closes."""
    state = create_session(spec, strategy)
    while state.active:
        leaf = select_next(state)
        if leaf is None:
            raise SessionError("active session with nothing left to ask")
        state = step(state, answer_source(leaf))
    return state
