"""Shared generators for randomized structural tests."""

from __future__ import annotations

import random

from inquest import (
    Evidence,
    Hard,
    LinkCpt,
    LinkSpec,
    NetworkSpec,
    NodeKind,
    NodeSpec,
    Soft,
)


def random_network(rnd: random.Random, max_nodes: int = 12, name: str = "random") -> NetworkSpec:
    """A random valid tree with random strictly-interior link tables."""
    n = rnd.randint(2, max_nodes)
    parents = [None] + [rnd.randrange(i) for i in range(1, n)]
    has_children = [False] * n
    for p in parents[1:]:
        has_children[p] = True

    nodes = []
    for i in range(n):
        if i == 0:
            kind = NodeKind.ROOT
        elif has_children[i]:
            kind = NodeKind.INTERMEDIATE
        else:
            kind = NodeKind.OBSERVABLE
        nodes.append(NodeSpec(f"X{i:02d}", kind, target=(i == 0)))

    links = tuple(
        LinkSpec(
            parent=f"X{parents[i]:02d}",
            child=f"X{i:02d}",
            cpt=LinkCpt(rnd.uniform(0.01, 0.99), rnd.uniform(0.01, 0.99)),
        )
        for i in range(1, n)
    )
    return NetworkSpec(
        name=name,
        nodes=tuple(nodes),
        links=links,
        root_prior=rnd.uniform(0.05, 0.95),
    )


def random_evidence(rnd: random.Random, spec: NetworkSpec) -> Evidence:
    """Random mix of hard and soft observations; soft only on leaves."""
    evidence = {}
    for node in spec.nodes:
        if spec.is_leaf(node.id):
            roll = rnd.random()
            if roll < 0.25:
                evidence[node.id] = Hard(rnd.randint(0, 1))
            elif roll < 0.40:
                evidence[node.id] = Soft(rnd.uniform(0.05, 0.95))
        elif rnd.random() < 0.10:
            evidence[node.id] = Hard(rnd.randint(0, 1))
    return evidence
