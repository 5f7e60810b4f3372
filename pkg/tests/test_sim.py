from __future__ import annotations

import json
from importlib import resources

import pytest

from purposecheck.dsl import DslSyntaxError, Outcome, parse_program
from purposecheck.fixtures import fixture_graph, fixture_program
from purposecheck.sim import (
    PROCESSOR_PAP_VIOLATION,
    Archetype,
    Endpoint,
    Governance,
    Node,
    OrgCountMismatch,
    SimCapabilityViolation,
    Topology,
    WiringError,
    build_topology,
    format_topology,
    graph_statements,
    load_topology,
    parse_topology_config,
    run_scenario,
    run_steps,
    split_program,
    verify_capability_assignment,
)

KPN_DIR = resources.files("purposecheck.fixtures") / "kpn"


def kpn_scripts():
    return {org: parse_program((KPN_DIR / f"{org}.plg").read_text()) for org in ("KPN", "Agency")}


def scenario_a_steps(topology):
    program = graph_statements(fixture_graph("fig5.graph")) + fixture_program("scenario_a.plg")
    return split_program(program, topology)


@pytest.mark.parametrize("archetype", list(Archetype))
@pytest.mark.parametrize("governance", list(Governance))
def test_every_built_topology_is_sound(archetype, governance):
    topo = build_topology(archetype, governance)
    assert verify_capability_assignment(topo) == []
    if governance is Governance.INTERMEDIARY:
        assert {e.host for e in topo.wiring.values()} == {"Intermediary"}


def test_org_count_mismatch():
    with pytest.raises(OrgCountMismatch):
        build_topology(Archetype.DISTRIBUTED, Governance.SELF, ["A", "B"])
    with pytest.raises(OrgCountMismatch):
        build_topology(Archetype.DELEGATED_ACTION, Governance.SELF, ["A", "A"])


def test_processor_hosting_a_pap_is_reported():
    good = build_topology(Archetype.DELEGATED_ACTION, Governance.SELF, ["Ctrl", "Perf"])
    perf = good.node("Perf")
    bad = Topology(
        good.archetype,
        good.governance,
        (good.node("Ctrl"), Node("Perf", perf.admin_roles, perf.enforcement_roles | {"PAP", "PDP"})),
        {**good.wiring, "Perf": Endpoint("Perf", "Ctrl")},
    )
    assert any(PROCESSOR_PAP_VIOLATION in v for v in verify_capability_assignment(bad))


def test_controller_with_own_pdp_under_an_intermediary_is_allowed():
    topo = build_topology(Archetype.DISTRIBUTED, Governance.INTERMEDIARY)
    ctrl = topo.node("Ctrl")
    nodes = tuple(Node(n.org, n.admin_roles, n.enforcement_roles | {"PDP"}) if n is ctrl else n for n in topo.nodes)
    assert verify_capability_assignment(Topology(topo.archetype, topo.governance, nodes, topo.wiring)) == []


def test_performer_asserting_consent_is_a_capability_violation():
    topo = build_topology(Archetype.DELEGATED_ACTION)
    scripts = {"Perf": parse_program("make-request(Ctrl,A,P,D).\n+consent-given(Bob,Ctrl,Marketing).")}
    with pytest.raises(SimCapabilityViolation) as info:
        run_scenario(topo, scripts)
    assert info.value.org == "Perf" and info.value.step == 1


def test_wiring_errors():
    topo = build_topology(Archetype.DISTRIBUTED)
    with pytest.raises(WiringError):
        run_scenario(topo, {"Nobody": []})
    # the controller hosts no PEP in the distributed archetype
    with pytest.raises(WiringError):
        run_steps(topo, [("Ctrl", parse_program("make-request(C,A,P,D).")[0])])


def test_message_sequence_for_query_and_process():
    topo = build_topology(Archetype.DISTRIBUTED)
    trace = run_steps(topo, scenario_a_steps(topo))
    flow = [m.label for m in trace.messages if m.label != "admin"]
    assert flow == ["a", "b", "c", "d", "e"]
    a, b, c, d, e = (m for m in trace.messages if m.label != "admin")
    assert (a.src, a.dst, a.src_role, a.dst_role) == ("Perf", "Ctrl", "PEP", "PDP")
    assert (b.src_role, b.dst_role, c.src_role, c.dst_role) == ("PDP", "PAP", "PAP", "PDP")
    assert (d.dst, d.dst_role, e.src_role) == ("Perf", "PEP", "PEP")
    assert len({m.request_id for m in (a, b, c, d, e)}) == 1
    # the collector's subject-of assertions go to the controller's PAP
    assert any(m.label == "admin" and m.src == "Col" and m.dst == "Ctrl" for m in trace.messages)


def test_decisions_are_invariant_under_topology():
    signatures = []
    for archetype in (Archetype.NO_DELEGATION, Archetype.DELEGATED_ACTION, Archetype.DISTRIBUTED):
        for governance in Governance:
            topo = build_topology(archetype, governance)
            trace = run_steps(topo, scenario_a_steps(topo))
            assert [e.outcome for t in trace.traces.values() for e in t.entries if e.decision] == [
                Outcome.QUERY_SUCCESS,
                Outcome.OK,
            ]
            signatures.append(trace.decision_signature())
    assert all(s == signatures[0] for s in signatures)


def test_loopback_matches_in_process():
    topo = build_topology(Archetype.DISTRIBUTED, Governance.INTERMEDIARY)
    local = run_steps(topo, scenario_a_steps(topo))
    remote = run_steps(topo, scenario_a_steps(topo), loopback=True)
    assert remote.decision_signature() == local.decision_signature()
    assert [m.label for m in remote.messages] == [m.label for m in local.messages]


def test_kpn_wiretap_case():
    topo = load_topology((KPN_DIR / "topology.cfg").read_text())
    assert topo.archetype is Archetype.INDEPENDENT_CONTROLLERS
    trace = run_scenario(topo, kpn_scripts())
    assert all(t.clean for t in trace.traces.values())
    bases = [(org, d.request.purpose, d.basis) for org, d in trace.decisions]
    assert ("KPN", "ProvideService", "contract") in bases
    assert ("KPN", "ComplyWithWiretapObligation", "legal-obligation") in bases
    assert ("Agency", "CriminalInvestigation", "public-interest") in bases
    assert trace.cross_stack_messages() == []
    agency = [d for org, d in trace.decisions if org == "Agency"]
    assert all(w.startswith("w3") for d in agency for w in d.warnings)


def test_topology_config_round_trip_and_errors():
    topo = build_topology(Archetype.DISTRIBUTED, Governance.INTERMEDIARY, ["X", "Y", "Z"], intermediary="Hub")
    assert load_topology(format_topology(topo)) == topo
    cfg = parse_topology_config("archetype(NoDelegation). // one org\norg(Solo).\n")
    assert cfg["orgs"] == ["Solo"] and cfg["governance"] is Governance.SELF
    with pytest.raises(DslSyntaxError) as info:
        parse_topology_config("archetype(Distributed).\nrole(Ctrl).")
    assert info.value.line == 2
    with pytest.raises(DslSyntaxError):
        parse_topology_config("org(A).")
    with pytest.raises(DslSyntaxError):
        parse_topology_config("archetype(Distributed).\narchetype(NoDelegation).")


def test_trace_export_is_line_delimited_json():
    topo = build_topology(Archetype.NO_DELEGATION)
    trace = run_steps(topo, scenario_a_steps(topo))
    events = [json.loads(line) for line in trace.to_jsonl().splitlines()]
    assert {e["type"] for e in events} == {"message", "entry"}
    assert sum(e["type"] == "entry" and "decision" in e for e in events) == 2
