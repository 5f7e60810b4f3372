from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purposecheck.model import (
    FACT_KINDS,
    ActorRef,
    Capability,
    CapabilityViolation,
    Fact,
    GraphStore,
    MalformedFact,
    MalformedRequest,
    Provenance,
    PurposeGraph,
    Request,
    assert_fact,
    expire_facts,
    graph_from_facts,
    licenses,
    replay,
    retract_fact,
)

P = Provenance("Company", Capability.COLLECT)


def prov(cap: Capability, **kw) -> Provenance:
    return Provenance("Company", cap, **kw)


def test_assert_adds_fact_and_bumps_version():
    f = Fact("subject-of", ("Alice", "AlicesRecords"))
    g = assert_fact(PurposeGraph(), f, P, enforce_capabilities=True)
    assert f in g and g.version == 1


def test_consent_under_qualify_is_a_capability_violation():
    f = Fact("consent-given", ("Bob", "Company", "Marketing"))
    with pytest.raises(CapabilityViolation):
        assert_fact(PurposeGraph(), f, prov(Capability.QUALIFY), enforce_capabilities=True)
    # without enforcement the same assertion is accepted
    assert f in assert_fact(PurposeGraph(), f, prov(Capability.QUALIFY))


def test_reassertion_replaces_provenance():
    f = Fact("asset", ("BobsRecords",))
    g1 = assert_fact(PurposeGraph(), f, P)
    g2 = assert_fact(g1, f, prov(Capability.COLLECT, asserted_at=5))
    assert g2.fact_set() == g1.fact_set()
    assert g2.provenance(f).asserted_at == 5
    assert g2.version > g1.version


def test_assert_does_not_mutate_input():
    g = PurposeGraph()
    assert_fact(g, Fact("asset", ("D",)), P)
    assert len(g) == 0 and g.version == 0


@pytest.mark.parametrize(
    "kind,args",
    [
        ("subject-of", ("Alice",)),
        ("subject-of", ("Alice", "")),
        ("asset", ("1abc",)),
        ("legal-basis-claim", ("bribery", "C", "P")),
        ("no-such-kind", ("x",)),
    ],
)
def test_malformed_facts(kind, args):
    with pytest.raises(MalformedFact):
        Fact(kind, args)


def test_retract_absent_fact_is_noop():
    g = assert_fact(PurposeGraph(), Fact("asset", ("D",)), P)
    g2 = retract_fact(g, Fact("asset", ("E",)))
    assert g2 is g and g2.version == g.version


def test_assert_retract_assert_last_write_wins():
    f = Fact("asset", ("D",))
    g = assert_fact(retract_fact(assert_fact(PurposeGraph(), f, P), f), f, P)
    assert f in g and g.version == 3
    assert [m.op for m in g.history()] == ["assert", "retract", "assert"]


def test_retract_under_enforcement_checks_capability():
    f = Fact("consent-given", ("Bob", "Company", "Marketing"))
    g = assert_fact(PurposeGraph(), f, prov(Capability.CONSENT))
    with pytest.raises(CapabilityViolation):
        retract_fact(g, f, prov(Capability.PERFORM), enforce_capabilities=True)
    assert f not in retract_fact(g, f, prov(Capability.CONSENT), enforce_capabilities=True)


def test_expiry_boundary_is_inclusive():
    f = Fact("asset", ("D",))
    g = assert_fact(PurposeGraph(), f, prov(Capability.COLLECT, expires_at=100))
    g2, expired = expire_facts(g, 100)
    assert expired == [f] and f not in g2


def test_no_ttl_never_expires():
    f = Fact("asset", ("D",))
    g = assert_fact(PurposeGraph(), f, P)
    g2, expired = expire_facts(g, 10**12)
    assert expired == [] and g2 is g


def test_expiry_removes_exactly_the_due_facts():
    a, b, c = (Fact("asset", (x,)) for x in "ABC")
    g = PurposeGraph()
    g = assert_fact(g, a, prov(Capability.COLLECT, expires_at=50))
    g = assert_fact(g, b, prov(Capability.COLLECT, expires_at=150))
    g = assert_fact(g, c, P)
    g2, expired = expire_facts(g, 100)
    assert expired == [a]
    assert g2.fact_set() == {b, c}
    assert g2.history()[-1].op == "expire"


def test_provenance_rejects_expiry_before_assertion():
    with pytest.raises(MalformedFact):
        Provenance("X", Capability.CONTROL, asserted_at=10, expires_at=10)


def test_provenance_json_round_trip():
    p = Provenance("X", Capability.CONTROL, asserted_at=1.5, expires_at=9, signature=b"\x01\xff")
    assert Provenance.from_json(p.to_json()) == p


def test_capability_table():
    table = {
        Capability.CONTROL: {"legal-basis-claim", "dpa", "has-been-informed", "contract"},
        Capability.QUALIFY: {"prerequisite-of", "compatible-with", "specific-of", "sufficiently-specific"},
        Capability.COLLECT: {"asset", "subject-of"},
        Capability.PERFORM: set(),
        Capability.CONSENT: {"consent-given"},
    }
    for cap, kinds in table.items():
        for kind in kinds:
            assert licenses(cap, kind)
        for other, other_kinds in table.items():
            if other is not cap:
                assert not any(licenses(cap, k) for k in other_kinds)
    # every fact kind is licensed by exactly one capability
    for kind in FACT_KINDS:
        assert sum(licenses(c, kind) for c in Capability) == 1


def test_request_validation():
    with pytest.raises(MalformedRequest):
        Request("Company", "", "P", "D")
    r1, r2 = Request("C", "A", "P", "D"), Request("C", "A", "P", "D")
    assert r1.request_id != r2.request_id
    assert r1.key == ("C", "A", "P", "D")


def test_actor_ref():
    assert ActorRef("Company", "controller").as_fact() == Fact("actor-decl", ("controller", "Company"))
    with pytest.raises(MalformedFact):
        ActorRef("Company", "janitor")


def test_replay_reproduces_graph():
    g = PurposeGraph()
    a, b = Fact("asset", ("A",)), Fact("asset", ("B",))
    g = assert_fact(g, a, prov(Capability.COLLECT, expires_at=5))
    g = assert_fact(g, b, P)
    g = retract_fact(g, b)
    g, _ = expire_facts(g, 5)
    r = replay(g.history())
    assert r.fact_set() == g.fact_set() and r.version == g.version


def test_graph_store_single_writer():
    store = GraphStore()
    snap = store.snapshot()
    store.update(lambda g: assert_fact(g, Fact("asset", ("D",)), P))
    assert len(snap) == 0 and len(store.snapshot()) == 1


# -- properties ---------------------------------------------------------------

atoms = st.sampled_from(["A", "B", "C", "D"])
facts = st.one_of(
    st.builds(lambda a, b: Fact("subject-of", (a, b)), atoms, atoms),
    st.builds(lambda a: Fact("asset", (a,)), atoms),
    st.builds(lambda a, b: Fact("specific-of", (a, b)), atoms, atoms),
    st.builds(lambda a, b, c: Fact("consent-given", (a, b, c)), atoms, atoms, atoms),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(facts, max_size=8), facts)
def test_retract_after_assert_equals_retract(base, f):
    g = graph_from_facts(base)
    left = retract_fact(assert_fact(g, f, P), f)
    right = retract_fact(g, f)
    assert left.fact_set() == right.fact_set()


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(facts, st.one_of(st.none(), st.integers(1, 20))), max_size=8), st.integers(0, 25))
def test_expiry_idempotent_at_fixed_time(items, now):
    g = PurposeGraph()
    for f, exp in items:
        g = assert_fact(g, f, Provenance("X", Capability.COLLECT, expires_at=exp))
    once, _ = expire_facts(g, now)
    twice, again = expire_facts(once, now)
    assert twice.fact_set() == once.fact_set() and again == []


@settings(max_examples=200, deadline=None)
@given(st.lists(facts, max_size=8), facts)
def test_version_strictly_increases_on_change(base, f):
    g = graph_from_facts(base)
    g2 = assert_fact(g, f, P)
    assert g2.version > g.version
    g3 = retract_fact(g2, f)
    assert g3.version > g2.version
