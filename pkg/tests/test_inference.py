from __future__ import annotations

import json

import oracle
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purposecheck.fixtures import fixture_graph
from purposecheck.inference import (
    RULE_IDS,
    Decision,
    DerivationTree,
    FeatureDisabled,
    decide_request,
    decide_ternary,
    saturate,
)
from purposecheck.model import Fact, Request

pytestmark = pytest.mark.filterwarnings("ignore")


def req(*key):
    return Request(*key, request_id="t")


def decide(facts, *key, **kw):
    return decide_request(oracle.to_graph(facts), req(*key), now=0, **kw)


# -- fixture decisions -------------------------------------------------------


def test_print_invoice_tree_shape():
    d = decide_request(fixture_graph("fig5.graph"), req("Company", "PrintInvoice", "DeliverGoods", "BobsRecords"), now=0)
    assert d.permitted and d.rule == "EQ7-SPECIFIC"
    assert [c.conclusion[0] for c in d.tree.children] == [
        "prerequisite-of",
        "specific-of",
        "legal-basis",
        "processor-for",
    ]
    assert d.tree.children[1].rule_id == "EQ11-REFLEXIVE"
    assert (d.basis, d.controller, d.anchor) == ("contract", "Company", "DeliverGoods")


def test_compatible_rule_tree_has_forall_block():
    d = decide_request(fixture_graph("fig5.graph"), req("Company", "PrintOffer", "MakePersonalOffer", "BobsRecords"), now=0)
    assert d.rule == "EQ8-COMPATIBLE"
    assert [s for s, _ in d.tree.forall_block] == ["Bob"]
    assert d.tree.find("compatible-with").rule_id == "AXIOM"


def test_deny_carries_diagnosis_with_failed_premise():
    d = decide_request(fixture_graph("fig5_no_cw.graph"), req("Company", "PrintOffer", "MakePersonalOffer", "BobsRecords"), now=0)
    assert not d.permitted and d.tree is None
    assert any("legal-basis-claim" in t for t in d.diagnosis.failed())


def test_missing_prerequisite_is_reported():
    d = decide_request(fixture_graph("fig5.graph"), req("Company", "PrintOffer", "DeliverGoods", "BobsRecords"), now=0)
    assert "prerequisite-of(PrintOffer,DeliverGoods)" in d.diagnosis.failed()


def test_processor_needs_dpa():
    facts = {
        ("prerequisite-of", "A", "P"),
        ("sufficiently-specific", "P"),
        ("legal-basis-claim", "legitimate-interest", "C", "P"),
        ("subject-of", "S", "D"),
        ("has-been-informed", "S", "C", "P"),
    }
    assert not decide(facts, "U", "A", "P", "D").permitted
    d = decide(facts | {("dpa", "C", "U", "P")}, "U", "A", "P", "D")
    assert d.permitted and d.tree.find("processor-for").rule_id == "EQ3-DPA"


def test_sufficient_specificity_propagates_downwards():
    facts = {
        ("specific-of", "Child", "Parent"),
        ("sufficiently-specific", "Parent"),
        ("prerequisite-of", "A", "Child"),
        ("legal-basis-claim", "vital-interest", "C", "Child"),
    }
    d = decide(facts, "C", "A", "Child", "D")
    assert d.permitted
    assert d.tree.find("sufficiently-specific").rule_id == "EQ9-SPECIFICITY-PROP"
    # but never upwards
    up = {("specific-of", "Child", "Parent"), ("sufficiently-specific", "Child"),
          ("prerequisite-of", "A", "Parent"), ("legal-basis-claim", "vital-interest", "C", "Parent")}
    assert not decide(up, "C", "A", "Parent", "D").permitted


def test_basis_preference_follows_enum_order():
    facts = {
        ("prerequisite-of", "A", "P"),
        ("sufficiently-specific", "P"),
        ("legal-basis-claim", "legitimate-interest", "C", "P"),
        ("legal-basis-claim", "contract", "C", "P"),
        ("subject-of", "S", "D"),
        ("contract", "S", "C", "P"),
    }
    assert decide(facts, "C", "A", "P", "D").basis == "contract"


def test_vacuous_asset_warns():
    facts = {("prerequisite-of", "A", "P"), ("sufficiently-specific", "P"), ("legal-basis-claim", "consent", "C", "P")}
    d = decide(facts, "C", "A", "P", "Nobody")
    assert d.permitted and d.warnings and d.warnings[0].startswith("w3")


def test_compatible_gate_switch():
    # P itself is not sufficiently specific; its compatible anchor is
    facts = {
        ("prerequisite-of", "A", "P"),
        ("compatible-with", "P", "Q"),
        ("sufficiently-specific", "Q"),
        ("legal-basis-claim", "public-interest", "C", "Q"),
    }
    assert not decide(facts, "C", "A", "P", "D").permitted
    assert decide(facts, "C", "A", "P", "D", compatible_gate="anchor").permitted
    with pytest.raises(ValueError):
        decide(facts, "C", "A", "P", "D", compatible_gate="nope")


def test_compatible_with_is_not_symmetric_or_transitive():
    facts = {
        ("prerequisite-of", "A", "P"),
        ("compatible-with", "Q", "P"),
        ("compatible-with", "P", "R"),
        ("compatible-with", "R", "Z"),
        ("sufficiently-specific", "P"),
        ("sufficiently-specific", "Z"),
        ("legal-basis-claim", "public-interest", "C", "Q"),
        ("legal-basis-claim", "public-interest", "C", "Z"),
    }
    assert not decide(facts, "C", "A", "P", "D").permitted


def test_ternary_requests():
    g = fixture_graph("fig5.graph")
    with pytest.raises(FeatureDisabled):
        decide_ternary(g, "Company", "PrintInvoice", "BobsRecords")
    from purposecheck.model import Capability, Provenance, assert_fact

    g = assert_fact(g, Fact("processing-purpose-for", ("PrintInvoice", "DeliverGoods")), Provenance("Company", Capability.QUALIFY))
    d = decide_ternary(g, "Company", "PrintInvoice", "BobsRecords", enabled=True, request_id="t3", now=0)
    assert d.permitted and d.tree.rule_id == "EQ12-TERNARY"
    assert d.rule == "EQ7-SPECIFIC"
    assert Decision.from_json(json.loads(d.canonical())) == d
    assert not decide_ternary(g, "Company", "PrintOffer", "BobsRecords", enabled=True, now=0).permitted


def test_decision_json_round_trip():
    g = fixture_graph("fig5.graph")
    for key in [("Company", "PrintOffer", "MakePersonalOffer", "BobsRecords"), ("Company", "PrintOffer", "Marketing", "BobsRecords")]:
        d = decide_request(g, req(*key), now=3)
        assert Decision.from_json(json.loads(d.canonical())) == d


def test_decision_invariants_enforced():
    tree = DerivationTree(("x",), "AXIOM")
    with pytest.raises(ValueError):
        Decision("permit", req("C", "A", "P", "D"), 0, 0)
    with pytest.raises(ValueError):
        Decision("deny", req("C", "A", "P", "D"), 0, 0, tree=tree)


def test_tree_text_is_indented_one_node_per_line():
    d = decide_request(fixture_graph("fig5.graph"), req("Company", "PrintInvoice", "DeliverGoods", "BobsRecords"), now=0)
    lines = d.tree.to_text().splitlines()
    assert lines[0] == "lawful-request(Company,PrintInvoice,DeliverGoods,BobsRecords)  [EQ7-SPECIFIC]"
    assert all(line.startswith("  ") for line in lines[1:])


# -- trees are sound proofs --------------------------------------------------


def _holds(m: oracle.Model, key: tuple) -> bool:
    pred, args = key[0], key[1:]
    if pred == "specific-of":
        return args in m.so
    if pred == "sufficiently-specific":
        return args[0] in m.ss
    if pred == "consent-given":
        return args in m.consent
    if pred == "contract":
        return args in m.contract
    if pred == "has-been-informed":
        return args in m.informed
    if pred == "legal-basis":
        return oracle._lb(m, *args)
    if pred == "processor-for":
        return m.pf(*args)
    if pred == "lawful-request":
        return oracle.lawful(m, *args)
    return key in m.facts


def test_every_permit_tree_is_a_sound_proof():
    checked = 0
    for u, facts in oracle.oracle_graphs(150, seed=11):
        g = oracle.to_graph(facts)
        state = saturate(g)
        m = oracle.build(facts)
        for key in u.requests():
            d = decide_request(g, req(*key), state=state, now=0)
            if not d.permitted:
                continue
            checked += 1
            for node in d.tree.walk():
                assert node.rule_id in RULE_IDS
                assert _holds(m, node.conclusion), node.conclusion
                if node.rule_id == "AXIOM":
                    assert node.conclusion in facts and not node.children
            assert DerivationTree.from_json(d.tree.to_json()) == d.tree
    assert checked > 50


# -- closure properties ------------------------------------------------------

purposes = st.sampled_from([f"P{i}" for i in range(6)])


@settings(max_examples=300, deadline=None)
@given(st.sets(st.tuples(purposes, purposes), max_size=12))
def test_specific_of_closure_reflexive_and_transitive(edges):
    facts = {("specific-of", a, b) for a, b in edges} | {("purpose-decl", "P0")}
    state = saturate(oracle.to_graph(facts))
    closure = set(state.specific_of_closure)
    for p in state.purposes:
        assert (p, p) in closure
    for a, b in closure:
        for b2, c in closure:
            if b == b2:
                assert (a, c) in closure
    # and nothing beyond the reflexive-transitive closure of the edges
    assert closure == oracle.build(facts).so
