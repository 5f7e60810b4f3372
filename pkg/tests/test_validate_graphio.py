from __future__ import annotations

import oracle
import pytest

from purposecheck.fixtures import fixture_graph, load_graph
from purposecheck.graphio import dump_graph, read_graph, to_dot
from purposecheck.model import PurposeGraph
from purposecheck.validate import validate_graph


def codes(facts):
    return validate_graph(oracle.to_graph(facts)).codes()


def test_fixture_graphs_are_clean():
    for name in ("fig5.graph", "fig5_no_cw.graph"):
        assert not validate_graph(fixture_graph(name))


def test_empty_graph_has_no_findings():
    report = validate_graph(PurposeGraph())
    assert not report and len(report) == 0 and report.to_json() == []


def test_w1_specific_of_cycle():
    report = validate_graph(oracle.to_graph({("specific-of", "A", "B"), ("specific-of", "B", "C"), ("specific-of", "C", "A")}))
    (finding,) = report.findings
    assert finding.code == "w1" and set(finding.items) == {"A", "B", "C"}
    # a self-loop is not a cycle worth reporting
    assert codes({("specific-of", "A", "A")}) == set()


def test_w2_claim_on_insufficiently_specific_purpose():
    assert codes({("legal-basis-claim", "consent", "C", "P")}) == {"w2"}
    assert codes({("legal-basis-claim", "consent", "C", "P"), ("sufficiently-specific", "P")}) == set()


def test_w3_asset_without_subjects():
    assert codes({("asset", "D")}) == {"w3"}
    assert codes({("asset", "D"), ("subject-of", "S", "D")}) == set()


def test_w4_dpa_with_undeclared_actors():
    report = validate_graph(oracle.to_graph({("dpa", "C", "U", "P")}))
    assert report.codes() == {"w4"} and set(report.findings[0].items) == {"C", "U"}
    declared = {("dpa", "C", "U", "P"), ("actor-decl", "controller", "C"), ("actor-decl", "processor", "U")}
    assert codes(declared) == set()


def test_dot_conventions():
    dot = to_dot(fixture_graph("fig5.graph"))
    assert dot.startswith("digraph purpose_graph {")
    assert '"DeliverGoods" [shape=ellipse, style=filled' in dot
    assert '"PrintInvoice" [shape=ellipse, style=dotted];' in dot
    assert '"BobsRecords" [shape=box, style=dashed];' in dot
    assert '"Company" [shape=house];' in dot
    assert '[label="po"]' in dot and '[label="so"]' in dot and '[label="cw"]' in dot
    assert "(ss)" in dot and "style=bold" in dot


def test_dump_and_read_round_trip(tmp_path):
    g = load_graph("+asset(D). @{by=Org,exp=50,sig=beef}\n+subject-of(S,D).\n", now=7)
    path = tmp_path / "g.graph"
    path.write_text(dump_graph(g))
    back = read_graph(path)
    assert back.fact_set() == g.fact_set()
    for f in g:
        assert back.provenance(f) == g.provenance(f)


def test_graph_files_reject_triggers():
    with pytest.raises(ValueError):
        load_graph("make-request(C,A,P,D).")
