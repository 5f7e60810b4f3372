"""Naive ground-instantiation fixpoint, written straight from the rule list.

Shares nothing with the engine beyond the tuple encoding of facts
``(kind, *args)``: no kernels, no witnesses, no trees.  Every derived
relation is computed by iterating its rules over ground tuples until
nothing changes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product

from purposecheck.model import Fact, Provenance, PurposeGraph, assert_fact, licensing_capability

PURPOSE_SLOTS = {
    "prerequisite-of": (2,),
    "specific-of": (1, 2),
    "sufficiently-specific": (1,),
    "compatible-with": (1, 2),
    "legal-basis-claim": (3,),
    "consent-given": (3,),
    "contract": (3,),
    "dpa": (3,),
    "has-been-informed": (3,),
    "purpose-decl": (1,),
    "processing-purpose-for": (2,),
}


def _fix(rel: set, step) -> set:
    while True:
        new = step(rel) - rel
        if not new:
            return rel
        rel = rel | new


@dataclass
class Model:
    """All derived relations of one fact set."""

    facts: frozenset
    so: set  # specific-of, reflexive-transitive
    so_strict: set  # specific-of, transitive only
    ss: set
    consent: set
    contract: set
    informed: set
    lb: set  # (c, p, d)
    subjects: dict

    def pf(self, u, c, p) -> bool:
        return u == c or ("dpa", c, u, p) in self.facts


def build(facts) -> Model:
    facts = frozenset(facts)
    kind = lambda k: [f[1:] for f in facts if f[0] == k]  # noqa: E731
    purposes = {f[i] for f in facts for i in PURPOSE_SLOTS.get(f[0], ())}
    spec = set(kind("specific-of"))

    def trans(rel):
        return rel | {(a, c) for (a, b) in rel for (b2, c) in rel if b == b2}

    so_strict = _fix(set(spec), trans)
    so = _fix(set(spec) | {(p, p) for p in purposes}, trans)

    ss = _fix(
        {p for (p,) in kind("sufficiently-specific")},
        lambda s: s | {p for (p, q) in so if q in s},
    )

    def propagate(base):
        return _fix(
            set(base),
            lambda r: r | {(s, c, p) for (s, c, q) in r for (p, q2) in so if q2 == q},
        )

    consent = propagate(kind("consent-given"))
    contract = propagate(kind("contract"))
    informed = set(kind("has-been-informed")) | consent | contract

    subjects: dict = {}
    for s, d in kind("subject-of"):
        subjects.setdefault(d, set()).add(s)
    assets = set(subjects) | {d for (d,) in kind("asset")}

    lb = set()
    for basis, c, p in kind("legal-basis-claim"):
        if p not in ss:
            continue
        for d in assets:
            ok = True
            for s in subjects.get(d, ()):
                if (s, c, p) not in informed:
                    ok = False
                if basis == "consent" and (s, c, p) not in consent:
                    ok = False
                if basis == "contract" and (s, c, p) not in contract:
                    ok = False
            if ok:
                lb.add((c, p, d))
    return Model(facts, so, so_strict, ss, consent, contract, informed, lb, subjects)


def _lb(m: Model, c, p, d) -> bool:
    if (c, p, d) in m.lb:
        return True
    # an asset unknown to the graph has no subjects: only the gate matters
    if d not in m.subjects and ("asset", d) not in m.facts:
        return p in m.ss and any(f[0] == "legal-basis-claim" and f[2:] == (c, p) for f in m.facts)
    return False


def controllers(m: Model):
    return {f[2] for f in m.facts if f[0] == "legal-basis-claim"}


def lawful(m: Model, u, a, p, d, *, variant: str = "eq7", gate: str = "processing") -> bool:
    """``variant="eq7"``: more-specific rule over the reflexive closure.
    ``variant="eq1"``: the base rule plus the more-specific rule over the
    strict closure."""
    if ("prerequisite-of", a, p) not in m.facts:
        return False
    cs = controllers(m)
    if variant == "eq1":
        for c in cs:
            if _lb(m, c, p, d) and m.pf(u, c, p):
                return True
        anchors = {q for (x, q) in m.so_strict if x == p}
    else:
        anchors = {q for (x, q) in m.so if x == p}
    for q, c in product(anchors, cs):
        if _lb(m, c, q, d) and m.pf(u, c, q):
            return True
    for f in m.facts:
        if f[0] != "compatible-with" or f[1] != p:
            continue
        q = f[2]
        if (p if gate == "processing" else q) not in m.ss:
            continue
        for c in cs:
            if _lb(m, c, q, d) and m.pf(u, c, q):
                if all((s, c, p) in m.informed for s in m.subjects.get(d, ())):
                    return True
    return False


# -- random graphs ------------------------------------------------------------

BASES = ("consent", "contract", "legal-obligation", "vital-interest", "public-interest", "legitimate-interest")


@dataclass
class Universe:
    purposes: list
    actions: list
    subjects: list
    assets: list
    controllers: list
    processors: list

    def requests(self):
        actors = self.controllers + self.processors
        return list(product(actors, self.actions, self.purposes, self.assets))


def random_universe(rng: random.Random) -> Universe:
    return Universe(
        purposes=[f"P{i}" for i in range(rng.randint(1, 8))],
        actions=[f"A{i}" for i in range(rng.randint(1, 4))],
        subjects=[f"S{i}" for i in range(rng.randint(1, 3))],
        assets=[f"D{i}" for i in range(rng.randint(1, 2))],
        controllers=[f"C{i}" for i in range(rng.randint(1, 2))],
        processors=["U0"],
    )


def random_fact(rng: random.Random, u: Universe, kinds=None) -> tuple:
    P = lambda: rng.choice(u.purposes)  # noqa: E731
    S = lambda: rng.choice(u.subjects)  # noqa: E731
    C = lambda: rng.choice(u.controllers)  # noqa: E731
    choices = {
        "subject-of": lambda: ("subject-of", S(), rng.choice(u.assets)),
        "prerequisite-of": lambda: ("prerequisite-of", rng.choice(u.actions), P()),
        "specific-of": lambda: ("specific-of", P(), P()),
        "sufficiently-specific": lambda: ("sufficiently-specific", P()),
        "compatible-with": lambda: ("compatible-with", P(), P()),
        "legal-basis-claim": lambda: ("legal-basis-claim", rng.choice(BASES), C(), P()),
        "consent-given": lambda: ("consent-given", S(), C(), P()),
        "contract": lambda: ("contract", S(), C(), P()),
        "dpa": lambda: ("dpa", C(), rng.choice(u.processors), P()),
        "has-been-informed": lambda: ("has-been-informed", S(), C(), P()),
        "asset": lambda: ("asset", rng.choice(u.assets)),
    }
    kinds = kinds or list(choices)
    return choices[rng.choice(kinds)]()


def random_facts(rng: random.Random, u: Universe) -> set:
    facts = set()
    # enough prerequisite/claim/ss structure that permits are common
    for a in u.actions:
        if rng.random() < 0.8:
            facts.add(("prerequisite-of", a, rng.choice(u.purposes)))
    for _ in range(rng.randint(0, 14)):
        facts.add(random_fact(rng, u))
    for _ in range(rng.randint(1, 4)):
        facts.add(random_fact(rng, u, ["legal-basis-claim", "sufficiently-specific", "specific-of"]))
    for _ in range(rng.randint(0, 4)):
        facts.add(random_fact(rng, u, ["has-been-informed", "consent-given", "contract", "compatible-with"]))
    if rng.random() < 0.35:
        # a compatibility motif, so the compatible-purpose rule is exercised
        p, q, c = rng.choice(u.purposes), rng.choice(u.purposes), rng.choice(u.controllers)
        facts |= {
            ("compatible-with", p, q),
            ("sufficiently-specific", rng.choice([p, q])),
            ("legal-basis-claim", rng.choice(BASES), c, q),
            ("prerequisite-of", rng.choice(u.actions), p),
        }
        for s in u.subjects:
            if rng.random() < 0.7:
                facts.add(("has-been-informed", s, c, rng.choice([p, q])))
    return facts


def to_graph(facts) -> PurposeGraph:
    g = PurposeGraph()
    for key in sorted(facts):
        f = Fact(key[0], tuple(key[1:]))
        g = assert_fact(g, f, Provenance("oracle", licensing_capability(f.kind)))
    return g


def oracle_graphs(n: int, seed: int = 0):
    """Yield ``(universe, facts)`` for ``n`` reproducible random graphs."""
    rng = random.Random(seed)
    for _ in range(n):
        u = random_universe(rng)
        yield u, random_facts(rng, u)


def consent_family(n: int, seed: int = 0):
    """Graphs where consent is the only possible ground.

    One controller, consent-basis claims only, and at most one
    consent-given per subject, so every consent-given leaf of a Permit
    tree is the unique source of that subject's consent.
    """
    rng = random.Random(seed)
    for _ in range(n):
        u = random_universe(rng)
        u.controllers = u.controllers[:1]
        c = u.controllers[0]
        facts = {("prerequisite-of", a, rng.choice(u.purposes)) for a in u.actions}
        for _ in range(rng.randint(0, 6)):
            facts.add(random_fact(rng, u, ["specific-of", "subject-of", "has-been-informed", "compatible-with", "dpa"]))
        for _ in range(rng.randint(1, 3)):
            facts.add(("sufficiently-specific", rng.choice(u.purposes)))
            facts.add(("legal-basis-claim", "consent", c, rng.choice(u.purposes)))
        for s in u.subjects:
            facts.add(("subject-of", s, rng.choice(u.assets)))
            if rng.random() < 0.9:
                facts.add(("consent-given", s, c, rng.choice(u.purposes)))
        yield u, facts
