"""Built-in reference networks."""

from __future__ import annotations

from .model import (
    LinkCpt,
    LinkSpec,
    NetworkSpec,
    NodeKind,
    NodeSpec,
    Thresholds,
)


def figure4() -> NetworkSpec:
    """The three-level reference tree used throughout the tests and demos.

    One root hypothesis, two intermediate hypotheses, six indicators.
    Within each branch the indicators are ordered by decreasing link
    strength, and the left branch binds tighter to the root than the
    right one.
    """
    nodes = (
        NodeSpec("N1", NodeKind.ROOT, label="root hypothesis", target=True),
        NodeSpec("N11", NodeKind.INTERMEDIATE, label="left hypothesis"),
        NodeSpec("N12", NodeKind.INTERMEDIATE, label="right hypothesis"),
        NodeSpec("N111", NodeKind.OBSERVABLE, label="indicator 1.1"),
        NodeSpec("N112", NodeKind.OBSERVABLE, label="indicator 1.2"),
        NodeSpec("N113", NodeKind.OBSERVABLE, label="indicator 1.3"),
        NodeSpec("N121", NodeKind.OBSERVABLE, label="indicator 2.1"),
        NodeSpec("N122", NodeKind.OBSERVABLE, label="indicator 2.2"),
        NodeSpec("N123", NodeKind.OBSERVABLE, label="indicator 2.3"),
    )
    links = (
        LinkSpec("N1", "N11", LinkCpt(0.9, 0.2)),
        LinkSpec("N1", "N12", LinkCpt(0.8, 0.3)),
        LinkSpec("N11", "N111", LinkCpt(0.8, 0.1)),
        LinkSpec("N11", "N112", LinkCpt(0.7, 0.2)),
        LinkSpec("N11", "N113", LinkCpt(0.6, 0.3)),
        LinkSpec("N12", "N121", LinkCpt(0.9, 0.1)),
        LinkSpec("N12", "N122", LinkCpt(0.7, 0.3)),
        LinkSpec("N12", "N123", LinkCpt(0.6, 0.4)),
    )
    return NetworkSpec(
        name="figure4",
        nodes=nodes,
        links=links,
        root_prior=0.5,
        thresholds=(("N1", Thresholds(high=0.95, low=0.05)),),
    )
