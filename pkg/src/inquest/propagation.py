"""Exact inference on the tree, link chaining, and depth-vector condensation.

Two independent routes compute posteriors:

* ``propagate_beliefs``: two-pass message passing (likelihoods up,
  priors down), linear in the number of nodes.
* ``enumerate_posterior``: brute-force summation of the full joint,
  exponential, capped at 20 nodes. It exists purely as the ground
  truth the fast path is checked against.

Both accept the same evidence maps: hard values anywhere, soft
likelihood weights on leaves only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import (
    ContradictionError,
    Evidence,
    EvidenceValue,
    Hard,
    InquestError,
    LinkCpt,
    LinkSpec,
    NetworkSpec,
    NodeSpec,
    Soft,
    EvidenceError,
)

ENUMERATION_LIMIT = 20

IDENTITY_LINK = LinkCpt(1.0, 0.0)


class DepthVectorError(InquestError):
    """A depth vector does not match the depth of the network."""


@dataclass(frozen=True)
class BeliefState:
    """Posterior P(node = 1 | evidence) for every node, plus the evidence."""

    posterior: Mapping[str, float]
    evidence: Mapping[str, EvidenceValue]

    def __getitem__(self, node_id: str) -> float:
        return self.posterior[node_id]


def check_evidence(spec: NetworkSpec, evidence: Evidence) -> None:
    """Reject evidence on unknown nodes and soft evidence off the leaves."""
    for node_id, value in evidence.items():
        if node_id not in spec.node_map:
            raise EvidenceError(f"evidence on unknown node {node_id!r}")
        if isinstance(value, Soft) and not spec.is_leaf(node_id):
            raise EvidenceError(f"soft evidence on non-leaf node {node_id}")
        if not isinstance(value, (Hard, Soft)):
            raise EvidenceError(f"evidence for {node_id} has unsupported type {type(value)!r}")


def _factor(value: EvidenceValue | None) -> tuple[float, float]:
    """Likelihood weights (state 0, state 1) an observation puts on its node."""
    if value is None:
        return (1.0, 1.0)
    if isinstance(value, Hard):
        return (0.0, 1.0) if value.value == 1 else (1.0, 0.0)
    return (1.0 - value.weight, value.weight)


def _normalized(pair: tuple[float, float]) -> tuple[float, float]:
    total = pair[0] + pair[1]
    if total <= 0.0:
        raise ContradictionError("evidence has probability zero under the model")
    return (pair[0] / total, pair[1] / total)


def chain_links(upper: LinkCpt, lower: LinkCpt) -> LinkCpt:
    """Compose two stacked links into the direct grandparent->child table.

    With `upper` describing parent->mid and `lower` describing
    mid->child, the result marginalizes the middle node out by total
    probability. Composition is associative with (1, 0) as identity.
    """
    return LinkCpt(
        p_given_true=lower.p_given_true * upper.p_given_true
        + lower.p_given_false * (1.0 - upper.p_given_true),
        p_given_false=lower.p_given_true * upper.p_given_false
        + lower.p_given_false * (1.0 - upper.p_given_false),
    )


def chain_path(spec: NetworkSpec, anchor: str, node_id: str) -> LinkCpt:
    """Chain the original link tables along the anchor->node path."""
    path = spec.path(anchor, node_id)
    cpt = IDENTITY_LINK
    for parent, child in zip(path, path[1:]):
        cpt = chain_links(cpt, spec.incoming[child].cpt)
    return cpt


def _postorder(spec: NetworkSpec) -> list[str]:
    order: list[str] = []
    stack = [spec.root]
    while stack:
        cur = stack.pop()
        order.append(cur)
        stack.extend(spec.children_map[cur])
    order.reverse()
    return order


def propagate_beliefs(spec: NetworkSpec, evidence: Evidence) -> BeliefState:
    """Exact posteriors for every node under the given evidence.

    Upward pass: each node sends its parent the likelihood of the
    evidence in its subtree per parent state. Downward pass: each node
    receives the root prior filtered through the evidence everywhere
    outside its own subtree. Sibling products are recomputed directly
    rather than divided out so hard zeros stay harmless. Messages are
    renormalized at every combination step to keep drift down.
    """
    check_evidence(spec, evidence)

    factors = {n.id: _factor(evidence.get(n.id)) for n in spec.nodes}
    post = _postorder(spec)

    # likelihood of the subtree evidence per own state, own factor included
    lam: dict[str, tuple[float, float]] = {}
    # message each node sends to its parent: likelihood per *parent* state
    lam_msg: dict[str, tuple[float, float]] = {}
    for node in post:
        l0, l1 = factors[node]
        for child in spec.children_map[node]:
            m0, m1 = lam_msg[child]
            l0 *= m0
            l1 *= m1
        lam[node] = _normalized((l0, l1)) if (l0 + l1) > 0 else (0.0, 0.0)
        if lam[node] == (0.0, 0.0):
            raise ContradictionError("evidence has probability zero under the model")
        link = spec.incoming.get(node)
        if link is not None:
            pt, pf = link.cpt.p_given_true, link.cpt.p_given_false
            s0, s1 = lam[node]
            lam_msg[node] = _normalized((s1 * pf + s0 * (1.0 - pf), s1 * pt + s0 * (1.0 - pt)))

    # downward pass
    pi: dict[str, tuple[float, float]] = {
        spec.root: (1.0 - spec.root_prior, spec.root_prior)
    }
    posterior: dict[str, float] = {}
    for node in reversed(post):  # root first
        p0, p1 = pi[node]
        s0, s1 = lam[node]
        q0, q1 = p0 * s0, p1 * s1
        total = q0 + q1
        if total <= 0.0:
            raise ContradictionError("evidence has probability zero under the model")
        posterior[node] = q1 / total

        children = spec.children_map[node]
        f0, f1 = factors[node]
        for child in children:
            m0, m1 = p0 * f0, p1 * f1
            for sibling in children:
                if sibling == child:
                    continue
                t0, t1 = lam_msg[sibling]
                m0 *= t0
                m1 *= t1
            m0, m1 = _normalized((m0, m1))
            cpt = spec.incoming[child].cpt
            pi[child] = _normalized(
                (
                    m0 * (1.0 - cpt.p_given_false) + m1 * (1.0 - cpt.p_given_true),
                    m0 * cpt.p_given_false + m1 * cpt.p_given_true,
                )
            )

    return BeliefState(posterior=posterior, evidence=dict(evidence))


def enumerate_posterior(spec: NetworkSpec, evidence: Evidence) -> BeliefState:
    """Ground-truth marginals by summing the joint over all assignments.

    Limited to ``ENUMERATION_LIMIT`` nodes; this is the verification
    oracle for ``propagate_beliefs``, deliberately written with none of
    its machinery.
    """
    if len(spec.nodes) > ENUMERATION_LIMIT:
        raise InquestError(
            f"network too large to enumerate ({len(spec.nodes)} nodes > {ENUMERATION_LIMIT})"
        )
    check_evidence(spec, evidence)

    ids = [n.id for n in spec.nodes]
    index = {node_id: i for i, node_id in enumerate(ids)}
    factors = [_factor(evidence.get(node_id)) for node_id in ids]
    root_i = index[spec.root]

    mass = {node_id: 0.0 for node_id in ids}
    total = 0.0
    for assignment in itertools.product((0, 1), repeat=len(ids)):
        p = spec.root_prior if assignment[root_i] == 1 else 1.0 - spec.root_prior
        for link in spec.links:
            given = (
                link.cpt.p_given_true
                if assignment[index[link.parent]] == 1
                else link.cpt.p_given_false
            )
            p *= given if assignment[index[link.child]] == 1 else 1.0 - given
        for i, (f0, f1) in enumerate(factors):
            p *= f1 if assignment[i] == 1 else f0
        total += p
        for node_id in ids:
            if assignment[index[node_id]] == 1:
                mass[node_id] += p

    if total <= 0.0:
        raise ContradictionError("evidence has probability zero under the model")
    return BeliefState(
        posterior={node_id: mass[node_id] / total for node_id in ids},
        evidence=dict(evidence),
    )


def virtual_link(
    spec: NetworkSpec, evidence: Evidence, node_id: str, anchor: str
) -> LinkCpt:
    """Evidence-conditioned direct link anchor->node.

    Returns (P(node=1 | anchor=1, e), P(node=1 | anchor=0, e)) by
    clamping the anchor to each state and propagating; any existing
    evidence on the anchor itself is replaced by the clamp. With empty
    evidence this coincides with chaining the path's link tables.
    """
    if node_id not in spec.node_map or anchor not in spec.node_map:
        raise EvidenceError(f"unknown node in virtual link {anchor}->{node_id}")
    if not spec.is_ancestor(anchor, node_id):
        raise InquestError(f"{anchor} is not an ancestor of {node_id}")
    if node_id in evidence:
        raise EvidenceError(f"virtual link target {node_id} is already observed")

    clamped = dict(evidence)
    clamped[anchor] = Hard(1)
    p_true = propagate_beliefs(spec, clamped).posterior[node_id]
    clamped[anchor] = Hard(0)
    p_false = propagate_beliefs(spec, clamped).posterior[node_id]
    return LinkCpt(p_given_true=p_true, p_given_false=p_false)


# -- depth vectors and tree condensation -------------------------------------


@dataclass(frozen=True)
class DepthVector:
    """How far a strategy looks down at each stage.

    Each entry is the number of levels skipped in one jump; entries sum
    to the depth of the deepest leaf. The equivalent level vector lists
    the retained levels below the root, via cumulative sums.
    """

    jumps: tuple[int, ...]

    def __post_init__(self):
        if not self.jumps or any(j < 1 for j in self.jumps):
            raise DepthVectorError(f"depth vector entries must be positive: {self.jumps!r}")

    @classmethod
    def from_levels(cls, levels: Iterable[int]) -> "DepthVector":
        jumps = []
        prev = 1
        for level in levels:
            if level <= prev:
                raise DepthVectorError(f"level vector must increase from 2 upward: {levels!r}")
            jumps.append(level - prev)
            prev = level
        return cls(tuple(jumps))

    def levels(self) -> tuple[int, ...]:
        out = []
        depth = 1
        for j in self.jumps:
            depth += j
            out.append(depth)
        return tuple(out)

    def validate_for(self, spec: NetworkSpec) -> None:
        if sum(self.jumps) != spec.max_depth:
            raise DepthVectorError(
                f"depth vector {list(self.jumps)} sums to {sum(self.jumps)}, "
                f"but the deepest leaf of {spec.name!r} sits {spec.max_depth} links down"
            )


@dataclass(frozen=True)
class VirtualTree:
    """A condensed network plus the original path behind each link."""

    network: NetworkSpec
    provenance: Mapping[tuple[str, str], tuple[str, ...]]

    def cpt(self, parent: str, child: str) -> LinkCpt:
        return self.network.incoming[child].cpt


def transform_tree(spec: NetworkSpec, dv: DepthVector) -> VirtualTree:
    """Condense the tree to the levels named by the depth vector.

    Kept nodes are the root, every node on a retained level, and every
    leaf. Each kept node links to its nearest kept ancestor with the
    chain of the original tables along that path, so leaves shallower
    than the next retained level attach directly to their nearest kept
    ancestor.
    """
    dv.validate_for(spec)
    retained_levels = {1, *dv.levels()}

    keep: list[NodeSpec] = []
    for n in spec.nodes:
        if (
            spec.levels[n.id] in retained_levels
            or n.id == spec.root
            or spec.is_leaf(n.id)
        ):
            keep.append(n)
    kept_ids = {n.id for n in keep}

    links: list[LinkSpec] = []
    provenance: dict[tuple[str, str], tuple[str, ...]] = {}
    for n in keep:
        if n.id == spec.root:
            continue
        anchor = spec.parent(n.id)
        while anchor not in kept_ids:
            anchor = spec.parent(anchor)
        links.append(LinkSpec(parent=anchor, child=n.id, cpt=chain_path(spec, anchor, n.id)))
        provenance[(anchor, n.id)] = spec.path(anchor, n.id)

    network = NetworkSpec(
        name=spec.name,
        nodes=tuple(keep),
        links=tuple(links),
        root_prior=spec.root_prior,
        thresholds=tuple((i, t) for i, t in spec.thresholds if i in kept_ids),
    )
    return VirtualTree(network=network, provenance=provenance)


def virtual_tree_to_dict(vt: VirtualTree) -> dict:
    from .model import network_to_dict

    data = network_to_dict(vt.network)
    data["provenance"] = {
        f"{parent}->{child}": list(path) for (parent, child), path in sorted(vt.provenance.items())
    }
    return data
