import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inquest import (
    ContradictionError,
    DepthVector,
    DepthVectorError,
    EvidenceError,
    Hard,
    InquestError,
    LinkCpt,
    LinkSpec,
    NetworkSpec,
    NodeKind,
    NodeSpec,
    Soft,
    chain_links,
    chain_path,
    enumerate_posterior,
    propagate_beliefs,
    transform_tree,
    virtual_link,
    virtual_tree_to_dict,
)

from util import random_network, random_evidence

TOL = 1e-9

probs = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
cpts = st.builds(LinkCpt, probs, probs)


def chain4(p=0.9, q=0.2):
    """A 4-level chain A -> B -> C -> D."""
    nodes = (
        NodeSpec("A", NodeKind.ROOT),
        NodeSpec("B", NodeKind.INTERMEDIATE),
        NodeSpec("C", NodeKind.INTERMEDIATE),
        NodeSpec("D", NodeKind.OBSERVABLE),
    )
    links = (
        LinkSpec("A", "B", LinkCpt(0.9, 0.2)),
        LinkSpec("B", "C", LinkCpt(0.8, 0.1)),
        LinkSpec("C", "D", LinkCpt(0.7, 0.3)),
    )
    return NetworkSpec("chain4", nodes, links, 0.5)


# -- chaining -----------------------------------------------------------------


def test_chain_links_worked_example():
    got = chain_links(LinkCpt(0.9, 0.2), LinkCpt(0.8, 0.1))
    assert got.p_given_true == pytest.approx(0.73, abs=1e-12)
    assert got.p_given_false == pytest.approx(0.24, abs=1e-12)


def test_chain_links_matches_oracle_on_three_node_chain():
    # independent check: condition the middle node out by enumeration
    nodes = (
        NodeSpec("A", NodeKind.ROOT),
        NodeSpec("B", NodeKind.INTERMEDIATE),
        NodeSpec("C", NodeKind.OBSERVABLE),
    )
    links = (
        LinkSpec("A", "B", LinkCpt(0.9, 0.2)),
        LinkSpec("B", "C", LinkCpt(0.8, 0.1)),
    )
    for prior, expected in ((1.0, 0.73), (0.0, 0.24)):
        spec = NetworkSpec("c3", nodes, links, prior)
        got = enumerate_posterior(spec, {}).posterior["C"]
        assert got == pytest.approx(expected, abs=TOL)


@given(cpts)
def test_chain_identity_and_absorbing(cpt):
    identity = LinkCpt(1.0, 0.0)
    assert chain_links(identity, cpt) == cpt
    flat = LinkCpt(0.5, 0.5)
    out = chain_links(cpt, flat)
    assert out.p_given_true == pytest.approx(0.5, abs=1e-12)
    assert out.p_given_false == pytest.approx(0.5, abs=1e-12)


@given(cpts, cpts, cpts)
def test_chain_associativity(a, b, c):
    left = chain_links(chain_links(a, b), c)
    right = chain_links(a, chain_links(b, c))
    assert left.p_given_true == pytest.approx(right.p_given_true, abs=1e-12)
    assert left.p_given_false == pytest.approx(right.p_given_false, abs=1e-12)


# -- exact propagation ----------------------------------------------------------


def test_single_leaf_posteriors_match_hand_bayes(fig4):
    belief = propagate_beliefs(fig4, {"N111": Hard(1)})
    assert belief.posterior["N1"] == pytest.approx(0.73 / (0.73 + 0.24), abs=TOL)
    assert belief.posterior["N11"] == pytest.approx(0.44 / 0.485, abs=TOL)


def test_prior_chaining_with_empty_evidence(fig4):
    belief = propagate_beliefs(fig4, {})
    assert belief.posterior["N1"] == 0.5
    assert belief.posterior["N11"] == pytest.approx(0.5 * 0.9 + 0.5 * 0.2, abs=TOL)
    assert belief.posterior["N111"] == pytest.approx(0.485, abs=TOL)


def test_uniform_soft_evidence_is_a_no_op(fig4):
    plain = propagate_beliefs(fig4, {})
    softened = propagate_beliefs(fig4, {"N111": Soft(0.5)})
    for node in plain.posterior:
        assert softened.posterior[node] == pytest.approx(plain.posterior[node], abs=TOL)


def test_hard_evidence_clamps_exactly(fig4):
    belief = propagate_beliefs(fig4, {"N11": Hard(1), "N123": Hard(0)})
    assert belief.posterior["N11"] == 1.0
    assert belief.posterior["N123"] == 0.0


def test_soft_on_non_leaf_rejected(fig4):
    with pytest.raises(EvidenceError):
        propagate_beliefs(fig4, {"N11": Soft(0.7)})


def test_unknown_node_rejected(fig4):
    with pytest.raises(EvidenceError):
        propagate_beliefs(fig4, {"BOGUS": Hard(1)})


def test_contradiction_raises():
    nodes = (NodeSpec("A", NodeKind.ROOT), NodeSpec("B", NodeKind.OBSERVABLE))
    links = (LinkSpec("A", "B", LinkCpt(1.0, 1.0)),)
    spec = NetworkSpec("det", nodes, links, 0.5)
    with pytest.raises(ContradictionError):
        propagate_beliefs(spec, {"B": Hard(0)})
    with pytest.raises(ContradictionError):
        enumerate_posterior(spec, {"B": Hard(0)})


def test_enumerate_single_node():
    solo = NetworkSpec("solo", (NodeSpec("A", NodeKind.ROOT),), (), 0.3)
    assert enumerate_posterior(solo, {}).posterior["A"] == pytest.approx(0.3, abs=TOL)


def test_enumerate_clamped_root_reads_off_cpt():
    nodes = (NodeSpec("A", NodeKind.ROOT), NodeSpec("B", NodeKind.OBSERVABLE))
    links = (LinkSpec("A", "B", LinkCpt(0.8, 0.1)),)
    spec = NetworkSpec("c2", nodes, links, 0.5)
    got = enumerate_posterior(spec, {"A": Hard(1)}).posterior["B"]
    assert got == pytest.approx(0.8, abs=TOL)


def test_enumeration_size_cap():
    rnd = random.Random(0)
    big = random_network(rnd, max_nodes=12)
    import dataclasses

    extra = tuple(
        NodeSpec(f"Y{i}", NodeKind.OBSERVABLE) for i in range(21 - len(big.nodes))
    )
    extra_links = tuple(LinkSpec(big.root, n.id, LinkCpt(0.5, 0.5)) for n in extra)
    toobig = dataclasses.replace(big, nodes=big.nodes + extra, links=big.links + extra_links)
    with pytest.raises(InquestError):
        enumerate_posterior(toobig, {})


def test_oracle_equivalence_random_trees():
    rnd = random.Random(2024)
    for _ in range(60):
        spec = random_network(rnd, max_nodes=12)
        evidence = random_evidence(rnd, spec)
        fast = propagate_beliefs(spec, evidence)
        slow = enumerate_posterior(spec, evidence)
        for node in slow.posterior:
            assert fast.posterior[node] == pytest.approx(slow.posterior[node], abs=TOL)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_evidence_order_independence(seed):
    rnd = random.Random(seed)
    spec = random_network(rnd, max_nodes=10)
    evidence = dict(random_evidence(rnd, spec))
    items = list(evidence.items())
    rnd.shuffle(items)
    a = propagate_beliefs(spec, evidence)
    b = propagate_beliefs(spec, dict(items))
    for node in a.posterior:
        assert a.posterior[node] == pytest.approx(b.posterior[node], abs=TOL)


# -- virtual links --------------------------------------------------------------


def test_virtual_link_empty_evidence_equals_chaining(fig4):
    got = virtual_link(fig4, {}, "N111", "N1")
    assert got.p_given_true == pytest.approx(0.73, abs=TOL)
    assert got.p_given_false == pytest.approx(0.24, abs=TOL)
    direct = virtual_link(fig4, {}, "N111", "N11")
    assert direct.p_given_true == pytest.approx(0.8, abs=TOL)
    assert direct.p_given_false == pytest.approx(0.1, abs=TOL)


def test_virtual_link_shifts_under_sibling_evidence(fig4):
    conditioned = virtual_link(fig4, {"N112": Hard(1)}, "N111", "N1")
    # oracle: clamp the root by hand and enumerate
    for state, got in ((1, conditioned.p_given_true), (0, conditioned.p_given_false)):
        oracle = enumerate_posterior(
            fig4, {"N112": Hard(1), "N1": Hard(state)}
        ).posterior["N111"]
        assert got == pytest.approx(oracle, abs=TOL)
    assert abs(conditioned.p_given_true - 0.73) > 1e-6


def test_virtual_link_preconditions(fig4):
    with pytest.raises(InquestError):
        virtual_link(fig4, {}, "N111", "N12")  # not an ancestor
    with pytest.raises(EvidenceError):
        virtual_link(fig4, {"N111": Hard(1)}, "N111", "N1")  # already observed


def test_chain_path_matches_virtual_link_everywhere(fig4):
    for leaf in fig4.leaves:
        chained = chain_path(fig4, "N1", leaf)
        virtual = virtual_link(fig4, {}, leaf, "N1")
        assert chained.p_given_true == pytest.approx(virtual.p_given_true, abs=TOL)
        assert chained.p_given_false == pytest.approx(virtual.p_given_false, abs=TOL)


# -- depth vectors and condensation ----------------------------------------------


def test_depth_vector_level_vector_round_trip():
    assert DepthVector((1, 1, 1)).levels() == (2, 3, 4)
    assert DepthVector((1, 2)).levels() == (2, 4)
    assert DepthVector((2, 1)).levels() == (3, 4)
    assert DepthVector((3,)).levels() == (4,)
    assert DepthVector.from_levels((2, 3, 4)) == DepthVector((1, 1, 1))
    assert DepthVector.from_levels((3, 4)) == DepthVector((2, 1))


def test_depth_vector_rejects_bad_entries():
    with pytest.raises(DepthVectorError):
        DepthVector(())
    with pytest.raises(DepthVectorError):
        DepthVector((1, 0))
    with pytest.raises(DepthVectorError):
        DepthVector.from_levels((2, 2))


def test_depth_vector_sum_mismatch(fig4):
    with pytest.raises(DepthVectorError):
        transform_tree(fig4, DepthVector((1, 1, 1)))


def test_chain_collapse_to_two_levels():
    spec = chain4()
    vt = transform_tree(spec, DepthVector((3,)))
    assert {n.id for n in vt.network.nodes} == {"A", "D"}
    link = vt.network.incoming["D"]
    expected = chain_links(chain_links(LinkCpt(0.9, 0.2), LinkCpt(0.8, 0.1)), LinkCpt(0.7, 0.3))
    assert link.cpt == expected
    assert vt.provenance[("A", "D")] == ("A", "B", "C", "D")


def test_identity_transform(fig4):
    vt = transform_tree(fig4, DepthVector((1, 1)))
    assert vt.network == fig4


def test_flatten_figure4(fig4):
    vt = transform_tree(fig4, DepthVector((2,)))
    assert {n.id for n in vt.network.nodes} == {"N1", *fig4.leaves}
    cpt = vt.cpt("N1", "N111")
    assert cpt.p_given_true == pytest.approx(0.73, abs=TOL)
    assert cpt.p_given_false == pytest.approx(0.24, abs=TOL)


def test_irregular_depth_leaf_attaches_to_nearest_kept_ancestor():
    # root -> mid -> deep leaf, plus a shallow leaf directly under the root
    nodes = (
        NodeSpec("R", NodeKind.ROOT),
        NodeSpec("M", NodeKind.INTERMEDIATE),
        NodeSpec("S", NodeKind.OBSERVABLE),
        NodeSpec("L", NodeKind.OBSERVABLE),
    )
    links = (
        LinkSpec("R", "M", LinkCpt(0.9, 0.2)),
        LinkSpec("R", "S", LinkCpt(0.6, 0.3)),
        LinkSpec("M", "L", LinkCpt(0.8, 0.1)),
    )
    spec = NetworkSpec("lopsided", nodes, links, 0.5)
    vt = transform_tree(spec, DepthVector((2,)))
    assert {n.id for n in vt.network.nodes} == {"R", "S", "L"}
    assert vt.network.incoming["S"].cpt == LinkCpt(0.6, 0.3)
    assert vt.provenance[("R", "L")] == ("R", "M", "L")


def test_flattening_consistency_single_leaf(fig4):
    """With one observed leaf, the condensed tree reproduces the original
    posterior for the root and for any node whose path to the evidence
    runs through the root; sibling leaves under the dropped intermediate
    legitimately differ (their shared ancestor is gone)."""
    vt = transform_tree(fig4, DepthVector((2,)))
    evidence = {"N111": Hard(1)}
    flat = propagate_beliefs(vt.network, evidence)
    orig = propagate_beliefs(fig4, evidence)
    assert flat.posterior["N1"] == pytest.approx(orig.posterior["N1"], abs=TOL)
    for other_branch_leaf in ("N121", "N122", "N123"):
        assert flat.posterior[other_branch_leaf] == pytest.approx(
            orig.posterior[other_branch_leaf], abs=TOL
        )
    # sibling under the unretained N11: conditional independence is lost
    assert abs(flat.posterior["N112"] - orig.posterior["N112"]) > 1e-3


def test_flattening_two_leaves_sharing_dropped_ancestor_differ(fig4):
    vt = transform_tree(fig4, DepthVector((2,)))
    evidence = {"N111": Hard(1), "N112": Hard(1)}
    flat = propagate_beliefs(vt.network, evidence)
    orig = propagate_beliefs(fig4, evidence)
    assert abs(flat.posterior["N1"] - orig.posterior["N1"]) > 1e-4


def test_virtual_tree_serialization(fig4):
    vt = transform_tree(fig4, DepthVector((2,)))
    data = virtual_tree_to_dict(vt)
    assert data["name"] == "figure4"
    assert data["provenance"]["N1->N111"] == ["N1", "N11", "N111"]
    assert len(data["nodes"]) == 7
