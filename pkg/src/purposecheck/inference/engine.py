"""Bottom-up saturation of a purpose graph and request decisions.

Only ``specific-of`` transitivity is recursive; every other rule reads from
strata below it.  Saturation therefore runs as a fixed sequence of strata:

1. reflexive-transitive ``specific-of`` closure (shortest-hop BFS kernel);
2. ``sufficiently-specific`` propagated to more specific purposes;
3. consent and contracts propagated to more specific purposes;
4. ``has-been-informed`` from assertions, contracts and consent;
5. ``legal-basis(C, P, D)`` per claimed basis, gated on specificity;
6. ``processor-for`` from controller identity and DPAs.

Each stratum is a least fixpoint of its rules given the strata below, so
the result is the least model of the whole rule set.  Derivation links are
reconstructed on demand from shortest-hop witnesses, which keeps every
proof well-founded.
"""

from __future__ import annotations

import time
from collections import defaultdict
from collections.abc import Mapping, Set
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .. import kernels
from ..terms import format_key
from ..model import (
    BASIS_ORDER,
    MalformedRequest,
    PurposeCheckError,
    PurposeGraph,
    Request,
    is_atom,
)
from .tree import BASIS_RULES, RULE_BASIS, DerivationTree

RULE_SET_VERSION = "purpose-lawfulness/1.0"


class FeatureDisabled(PurposeCheckError):
    pass


@dataclass(frozen=True)
class Link:
    """How one tuple was derived: a rule plus its premise tuples."""

    rule: str
    premises: tuple[tuple, ...] = ()
    forall: tuple[tuple[str, tuple[tuple, ...]], ...] | None = None


AXIOM = Link("AXIOM")


class _ClosureView(Set):
    """Set of ``(P, P2)`` pairs with P more specific than (or equal to) P2."""

    def __init__(self, state: "DerivedState"):
        self._s = state

    def __contains__(self, pair) -> bool:
        try:
            a, b = pair
        except (TypeError, ValueError):
            return False
        return self._s.hop(a, b) >= 0

    def __iter__(self):
        s = self._s
        n = len(s.purposes)
        for i, a in enumerate(s.purposes):
            base = i * n
            for j, b in enumerate(s.purposes):
                if s._hops[base + j] >= 0:
                    yield (a, b)

    def __len__(self) -> int:
        return sum(1 for h in self._s._hops if h >= 0)


class _LinkMap(Mapping):
    def __init__(self, state: "DerivedState"):
        self._s = state

    def __getitem__(self, key: tuple) -> Link:
        link = self._s.link(key)
        if link is None:
            raise KeyError(key)
        return link

    def __iter__(self):
        s = self._s
        seen = set()
        for k in s.asserted:
            seen.add(k)
            yield k
        for a, b in s.specific_of_closure:
            k = ("specific-of", a, b)
            if k not in seen:
                yield k
        for p in sorted(s.sufficiently_specific):
            k = ("sufficiently-specific", p)
            if k not in seen:
                yield k
        for pred, tuples in (
            ("consent-given", s.consent_closed),
            ("contract", s.contract_closed),
            ("has-been-informed", s.informed),
        ):
            for t in sorted(tuples):
                k = (pred, *t)
                if k not in seen:
                    yield k
        for t in sorted(s.legal_basis):
            yield ("legal-basis", *t)
        for t in sorted(s.processor_for):
            yield ("processor-for", *t)

    def __len__(self) -> int:
        return sum(1 for _ in self)


class DerivedState:
    """Everything derivable from one purpose graph."""

    def __init__(self, graph: PurposeGraph):
        self.graph_version = graph.version
        self.asserted: frozenset[tuple] = frozenset(f.key for f in graph.facts)
        by_kind: dict[str, list[tuple]] = defaultdict(list)
        sorts: dict[str, set[str]] = defaultdict(set)
        for f in graph.facts:
            by_kind[f.kind].append(f.args)
            for sort, atom in f.sorted_atoms():
                sorts[sort].add(atom)
        self._by_kind = by_kind

        self.purposes: tuple[str, ...] = tuple(sorted(sorts["purpose"]))
        self._pidx = {p: i for i, p in enumerate(self.purposes)}
        self.assets: tuple[str, ...] = tuple(sorted(sorts["asset"]))
        self.controllers: tuple[str, ...] = tuple(sorted(sorts["controller"]))
        self.processors: tuple[str, ...] = tuple(sorted(sorts["processor"]))
        self.subjects: tuple[str, ...] = tuple(sorted(sorts["subject"]))
        self.actions: tuple[str, ...] = tuple(sorted(sorts["action"]))

        subjects_of: dict[str, list[str]] = defaultdict(list)
        for s, d in by_kind["subject-of"]:
            subjects_of[d].append(s)
        self.subjects_of = {d: tuple(sorted(v)) for d, v in subjects_of.items()}

        # stratum 1: specific-of closure
        n = len(self.purposes)
        src, dst = [], []
        for a, b in sorted(by_kind["specific-of"]):
            src.append(self._pidx[a])
            dst.append(self._pidx[b])
        self._hops = kernels.all_pairs_hops(n, src, dst)
        self.specific_of_closure: Set = _ClosureView(self)

        # stratum 2: sufficiently-specific flows to more specific purposes
        seeds = bytearray(n)
        for (p,) in by_kind["sufficiently-specific"]:
            seeds[self._pidx[p]] = 1
        near = kernels.nearest_seed(self._hops, n, seeds)
        self._ss_witness = {self.purposes[i]: self.purposes[w] for i, w in enumerate(near) if w >= 0}
        self.sufficiently_specific: frozenset[str] = frozenset(self._ss_witness)

        # stratum 3: consent and contracts flow to more specific purposes
        self._consent_witness = self._propagate(by_kind["consent-given"])
        self._contract_witness = self._propagate(by_kind["contract"])
        self.consent_closed: frozenset[tuple] = frozenset(self._consent_witness)
        self.contract_closed: frozenset[tuple] = frozenset(self._contract_witness)

        # stratum 4: informed
        self._informed_asserted = frozenset(by_kind["has-been-informed"])
        self.informed: frozenset[tuple] = (
            self._informed_asserted | self.contract_closed | self.consent_closed
        )

        # stratum 5: legal basis per asset
        claims: dict[tuple[str, str], list[str]] = defaultdict(list)
        for basis, c, p in by_kind["legal-basis-claim"]:
            claims[(c, p)].append(basis)
        self.claims = {
            k: tuple(b for b in BASIS_ORDER if b in v) for k, v in sorted(claims.items())
        }
        self._claims_at: dict[str, list[str]] = defaultdict(list)
        for c, p in self.claims:
            self._claims_at[p].append(c)
        self._lb_cache: dict[tuple, Link | None] = {}
        lb = set()
        for c, p in self.claims:
            for d in self.assets:
                if self.legal_basis_link(c, p, d) is not None:
                    lb.add((c, p, d))
        self.legal_basis: frozenset[tuple] = frozenset(lb)

        # stratum 6: processor-for
        self._dpa = frozenset(by_kind["dpa"])
        pf = {(c, c, p) for c in self.controllers for p in self.purposes}
        pf.update((u, c, p) for c, u, p in self._dpa)
        self.processor_for: frozenset[tuple] = frozenset(pf)

        self.provenance_links: Mapping = _LinkMap(self)
        self._tree_cache: dict[tuple, DerivationTree] = {}

    # -- helpers -----------------------------------------------------------

    def hop(self, a: str, b: str) -> int:
        i = self._pidx.get(a)
        j = self._pidx.get(b)
        if i is None or j is None:
            return -1
        return self._hops[i * len(self.purposes) + j]

    def more_general(self, p: str) -> list[str]:
        """Purposes P2 with specific-of(p, P2) in the closure, sorted."""
        i = self._pidx.get(p)
        if i is None:
            return []
        n = len(self.purposes)
        base = i * n
        return [self.purposes[j] for j in range(n) if self._hops[base + j] >= 0]

    def _propagate(self, triples: Iterable[tuple[str, str, str]]) -> dict[tuple, str]:
        n = len(self.purposes)
        grouped: dict[tuple[str, str], bytearray] = {}
        for s, c, p in triples:
            grouped.setdefault((s, c), bytearray(n))[self._pidx[p]] = 1
        out: dict[tuple, str] = {}
        for (s, c), seeds in sorted(grouped.items()):
            near = kernels.nearest_seed(self._hops, n, seeds)
            for i, w in enumerate(near):
                if w >= 0:
                    out[(s, c, self.purposes[i])] = self.purposes[w]
        return out

    def subjects_for(self, asset: str) -> tuple[str, ...]:
        return self.subjects_of.get(asset, ())

    def controllers_claiming(self, purpose: str) -> list[str]:
        return sorted(self._claims_at.get(purpose, ()))

    def is_processor_for(self, u: str, c: str, p: str) -> bool:
        return u == c or (c, u, p) in self._dpa

    def legal_basis_link(self, c: str, p: str, d: str) -> Link | None:
        key = (c, p, d)
        if key in self._lb_cache:
            return self._lb_cache[key]
        link = None
        if p in self.sufficiently_specific:
            subjects = self.subjects_for(d)
            for basis in self.claims.get((c, p), ()):
                per_subject = []
                for s in subjects:
                    prem = []
                    if basis == "consent":
                        prem.append(("consent-given", s, c, p))
                    elif basis == "contract":
                        prem.append(("contract", s, c, p))
                    prem.append(("has-been-informed", s, c, p))
                    if not all(self.holds(k) for k in prem):
                        break
                    per_subject.append((s, tuple(prem)))
                else:
                    link = Link(
                        BASIS_RULES[basis],
                        (("legal-basis-claim", basis, c, p), ("sufficiently-specific", p)),
                        tuple(per_subject),
                    )
                    break
        self._lb_cache[key] = link
        return link

    def holds(self, key: tuple) -> bool:
        pred = key[0]
        if pred == "specific-of":
            return self.hop(key[1], key[2]) >= 0
        if pred == "sufficiently-specific":
            return key[1] in self.sufficiently_specific
        if pred == "consent-given":
            return key[1:] in self.consent_closed
        if pred == "contract":
            return key[1:] in self.contract_closed
        if pred == "has-been-informed":
            return key[1:] in self.informed
        if pred == "legal-basis":
            return self.legal_basis_link(*key[1:]) is not None
        if pred == "processor-for":
            return self.is_processor_for(*key[1:])
        return key in self.asserted

    def link(self, key: tuple) -> Link | None:
        """The derivation link for ``key``, or None when it does not hold."""
        if key in self.asserted:
            return AXIOM
        pred = key[0]
        if pred == "specific-of":
            a, b = key[1:]
            h = self.hop(a, b)
            if h < 0:
                return None
            if h == 0:
                return Link("EQ11-REFLEXIVE")
            for mid in self.more_general(a):
                if ("specific-of", a, mid) in self.asserted and self.hop(mid, b) == h - 1:
                    return Link("EQ10-TRANSITIVE", (("specific-of", a, mid), ("specific-of", mid, b)))
            raise AssertionError(f"no transitive witness for {key}")
        if pred == "sufficiently-specific":
            w = self._ss_witness.get(key[1])
            if w is None:
                return None
            return Link("EQ9-SPECIFICITY-PROP", (("specific-of", key[1], w), ("sufficiently-specific", w)))
        if pred in ("consent-given", "contract"):
            witness = self._consent_witness if pred == "consent-given" else self._contract_witness
            w = witness.get(key[1:])
            if w is None:
                return None
            s, c, p = key[1:]
            rule = "PROP-CONSENT-SPECIFIC" if pred == "consent-given" else "PROP-CONTRACT-SPECIFIC"
            return Link(rule, (("specific-of", p, w), (pred, s, c, w)))
        if pred == "has-been-informed":
            t = key[1:]
            if t in self.contract_closed:
                return Link("EQ6-CONTRACT-INFORMS", (("contract", *t),))
            if t in self.consent_closed:
                return Link("CONSENT-INFORMS", (("consent-given", *t),))
            return None
        if pred == "legal-basis":
            return self.legal_basis_link(*key[1:])
        if pred == "processor-for":
            u, c, p = key[1:]
            if u == c:
                return Link("EQ2-CONTROLLER-IS-PROCESSOR")
            if (c, u, p) in self._dpa:
                return Link("EQ3-DPA", (("dpa", c, u, p),))
            return None
        return None

    def tree(self, key: tuple) -> DerivationTree:
        cached = self._tree_cache.get(key)
        if cached is not None:
            return cached
        link = self.link(key)
        if link is None:
            raise KeyError(f"{format_key(key)} is not derivable")
        forall = None
        if link.forall is not None:
            forall = tuple(
                (s, tuple(self.tree(k) for k in keys)) for s, keys in link.forall
            )
        t = DerivationTree(key, link.rule, tuple(self.tree(k) for k in link.premises), forall)
        self._tree_cache[key] = t
        return t


def saturate(graph: PurposeGraph) -> DerivedState:
    """Compute the least fixpoint of the rule set over ``graph``."""
    return DerivedState(graph)


# -- decisions -----------------------------------------------------------------


@dataclass(frozen=True)
class Premise:
    text: str
    satisfied: bool
    details: tuple["Premise", ...] = ()

    def to_json(self) -> dict:
        out: dict = {"premise": self.text, "satisfied": self.satisfied}
        if self.details:
            out["details"] = [d.to_json() for d in self.details]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Premise":
        return cls(
            data["premise"],
            data["satisfied"],
            tuple(cls.from_json(d) for d in data.get("details", ())),
        )

    def failed(self) -> Iterator["Premise"]:
        if not self.satisfied:
            yield self
        for d in self.details:
            yield from d.failed()


@dataclass(frozen=True)
class Candidate:
    """Premise checks for one (rule, anchor purpose, controller) attempt."""

    rule: str
    anchor: str
    controller: str
    premises: tuple[Premise, ...]

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "anchor": self.anchor,
            "controller": self.controller,
            "premises": [p.to_json() for p in self.premises],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Candidate":
        return cls(
            data["rule"],
            data["anchor"],
            data["controller"],
            tuple(Premise.from_json(p) for p in data["premises"]),
        )


@dataclass(frozen=True)
class Diagnosis:
    premises: tuple[Premise, ...] = ()
    candidates: tuple[Candidate, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.premises or self.candidates)

    def failed(self) -> list[str]:
        out = []
        for p in self.premises:
            out.extend(x.text for x in p.failed())
        for c in self.candidates:
            for p in c.premises:
                out.extend(x.text for x in p.failed())
        return out

    def to_json(self) -> dict:
        return {
            "premises": [p.to_json() for p in self.premises],
            "candidates": [c.to_json() for c in self.candidates],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Diagnosis":
        return cls(
            tuple(Premise.from_json(p) for p in data["premises"]),
            tuple(Candidate.from_json(c) for c in data["candidates"]),
        )


@dataclass(frozen=True)
class TernaryRequest:
    actor: str
    action: str
    asset: str
    request_id: str = ""

    def to_json(self) -> dict:
        return {
            "actor": self.actor,
            "action": self.action,
            "asset": self.asset,
            "request_id": self.request_id,
        }


@dataclass(frozen=True)
class Decision:
    outcome: str  # "permit" | "deny"
    request: Request | TernaryRequest
    graph_version: int
    decided_at: float
    tree: DerivationTree | None = None
    diagnosis: Diagnosis | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if (self.outcome == "permit") != (self.tree is not None):
            raise ValueError("a Permit carries a tree and a Deny does not")
        if (self.outcome == "deny") != (self.diagnosis is not None):
            raise ValueError("a Deny carries a diagnosis and a Permit does not")

    @property
    def permitted(self) -> bool:
        return self.outcome == "permit"

    @property
    def rule(self) -> str | None:
        if self.tree is None:
            return None
        node = self.tree
        if node.rule_id == "EQ12-TERNARY":
            node = node.children[1]
        return node.rule_id

    def _legal_basis_node(self) -> DerivationTree | None:
        return self.tree.find("legal-basis") if self.tree is not None else None

    @property
    def basis(self) -> str | None:
        node = self._legal_basis_node()
        return RULE_BASIS[node.rule_id] if node else None

    @property
    def controller(self) -> str | None:
        node = self._legal_basis_node()
        return node.conclusion[1] if node else None

    @property
    def anchor(self) -> str | None:
        node = self._legal_basis_node()
        return node.conclusion[2] if node else None

    def to_json(self) -> dict:
        out: dict = {
            "decision": self.outcome,
            "request": self.request.to_json(),
            "graph_version": self.graph_version,
            "decided_at": self.decided_at,
            "warnings": list(self.warnings),
        }
        if self.tree is not None:
            out["tree"] = self.tree.to_json()
        if self.diagnosis is not None:
            out["diagnosis"] = self.diagnosis.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Decision":
        req = data["request"]
        if "purpose" in req:
            request = Request(req["actor"], req["action"], req["purpose"], req["asset"], req["request_id"])
        else:
            request = TernaryRequest(req["actor"], req["action"], req["asset"], req["request_id"])
        return cls(
            outcome=data["decision"],
            request=request,
            graph_version=data["graph_version"],
            decided_at=data["decided_at"],
            tree=DerivationTree.from_json(data["tree"]) if "tree" in data else None,
            diagnosis=Diagnosis.from_json(data["diagnosis"]) if "diagnosis" in data else None,
            warnings=tuple(data.get("warnings", ())),
        )

    def canonical(self) -> str:
        import json

        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _fmt(*key: str) -> str:
    return format_key(key)


def _explain_legal_basis(state: DerivedState, c: str, p: str, d: str) -> Premise:
    key = ("legal-basis", c, p, d)
    ok = state.legal_basis_link(c, p, d) is not None
    details = [Premise(_fmt("sufficiently-specific", p), p in state.sufficiently_specific)]
    for basis in state.claims.get((c, p), ()):
        per = []
        for s in state.subjects_for(d):
            prem = []
            if basis == "consent":
                prem.append(("consent-given", s, c, p))
            elif basis == "contract":
                prem.append(("contract", s, c, p))
            prem.append(("has-been-informed", s, c, p))
            per.extend(Premise(format_key(k), state.holds(k)) for k in prem)
        claim = ("legal-basis-claim", basis, c, p)
        details.append(Premise(format_key(claim), all(x.satisfied for x in per), tuple(per)))
    return Premise(format_key(key), ok, tuple(details))


def _informed_all(state: DerivedState, c: str, p: str, d: str) -> tuple[bool, tuple[Premise, ...]]:
    per = tuple(
        Premise(_fmt("has-been-informed", s, c, p), (s, c, p) in state.informed)
        for s in state.subjects_for(d)
    )
    return all(x.satisfied for x in per), per


def _check_atoms(**atoms: str) -> None:
    for name, value in atoms.items():
        if not is_atom(value):
            raise MalformedRequest(f"invalid {name}: {value!r}")


def decide_request(
    graph: PurposeGraph,
    request: Request,
    *,
    state: DerivedState | None = None,
    now: float | None = None,
    compatible_gate: str = "processing",
    variant: str = "eq7",
) -> Decision:
    """Decide whether ``request`` is lawful over ``graph``.

    Witnesses are tried in a fixed order so the Permit tree is reproducible:
    the more-specific rule before the compatibility rule, anchor purposes in
    lexicographic order, then controllers in lexicographic order.

    ``compatible_gate`` selects which purpose the compatibility rule requires
    to be sufficiently specific: ``"processing"`` (the requested purpose) or
    ``"anchor"`` (the purpose holding the legal basis).

    ``variant="eq1"`` swaps reflexivity for an explicit base rule: the
    requested purpose itself is tried first under EQ1-BASE, then the
    more-specific rule over strictly more general purposes.  The two
    variants permit exactly the same requests; only the trees differ.
    """
    if not isinstance(request, Request):
        raise MalformedRequest(f"not a request: {request!r}")
    _check_atoms(actor=request.actor, action=request.action, purpose=request.purpose, asset=request.asset)
    if compatible_gate not in ("processing", "anchor"):
        raise ValueError(f"unknown compatible_gate {compatible_gate!r}")
    if variant not in ("eq7", "eq1"):
        raise ValueError(f"unknown variant {variant!r}")
    if state is None:
        state = saturate(graph)
    decided_at = time.time() if now is None else now
    u, a, p, d = request.key
    warnings = ()
    if not state.subjects_for(d):
        warnings = (f"w3: asset {d} has no subject-of edges; universal premises hold vacuously",)

    prereq_key = ("prerequisite-of", a, p)
    prereq_ok = prereq_key in state.asserted
    prereq = Premise(format_key(prereq_key), prereq_ok)
    candidates: list[Candidate] = []

    def permit(rule: str, children: list[DerivationTree], forall=None) -> Decision:
        tree = DerivationTree(("lawful-request", u, a, p, d), rule, tuple(children), forall)
        return Decision("permit", request, graph.version, decided_at, tree=tree, warnings=warnings)

    anchors = state.more_general(p)
    if variant == "eq1":
        anchors = [q for q in anchors if q != p]
        for c in state.controllers_claiming(p):
            lb = state.legal_basis_link(c, p, d) is not None
            pf = state.is_processor_for(u, c, p)
            if prereq_ok and lb and pf:
                return permit(
                    "EQ1-BASE",
                    [
                        state.tree(prereq_key),
                        state.tree(("legal-basis", c, p, d)),
                        state.tree(("processor-for", u, c, p)),
                    ],
                )
            candidates.append(
                Candidate(
                    "EQ1-BASE",
                    p,
                    c,
                    (prereq, _explain_legal_basis(state, c, p, d), Premise(_fmt("processor-for", u, c, p), pf)),
                )
            )

    # more-specific rule (with reflexivity this also covers the base rule)
    for anchor in anchors:
        for c in state.controllers_claiming(anchor):
            lb = state.legal_basis_link(c, anchor, d) is not None
            pf = state.is_processor_for(u, c, anchor)
            if prereq_ok and lb and pf:
                return permit(
                    "EQ7-SPECIFIC",
                    [
                        state.tree(prereq_key),
                        state.tree(("specific-of", p, anchor)),
                        state.tree(("legal-basis", c, anchor, d)),
                        state.tree(("processor-for", u, c, anchor)),
                    ],
                )
            candidates.append(
                Candidate(
                    "EQ7-SPECIFIC",
                    anchor,
                    c,
                    (
                        prereq,
                        Premise(_fmt("specific-of", p, anchor), True),
                        _explain_legal_basis(state, c, anchor, d),
                        Premise(_fmt("processor-for", u, c, anchor), pf),
                    ),
                )
            )

    # compatibility rule: compatible-with is used exactly as asserted
    compatible = sorted(
        k[2] for k in state.asserted if k[0] == "compatible-with" and k[1] == p
    )
    for anchor in compatible:
        gate_purpose = p if compatible_gate == "processing" else anchor
        ss = gate_purpose in state.sufficiently_specific
        for c in state.controllers_claiming(anchor):
            lb = state.legal_basis_link(c, anchor, d) is not None
            pf = state.is_processor_for(u, c, anchor)
            informed, per = _informed_all(state, c, p, d)
            if prereq_ok and ss and lb and pf and informed:
                forall = tuple(
                    (s, (state.tree(("has-been-informed", s, c, p)),)) for s in state.subjects_for(d)
                )
                return permit(
                    "EQ8-COMPATIBLE",
                    [
                        state.tree(prereq_key),
                        state.tree(("sufficiently-specific", gate_purpose)),
                        state.tree(("compatible-with", p, anchor)),
                        state.tree(("legal-basis", c, anchor, d)),
                        state.tree(("processor-for", u, c, anchor)),
                    ],
                    forall,
                )
            candidates.append(
                Candidate(
                    "EQ8-COMPATIBLE",
                    anchor,
                    c,
                    (
                        prereq,
                        Premise(_fmt("sufficiently-specific", gate_purpose), ss),
                        Premise(_fmt("compatible-with", p, anchor), True),
                        _explain_legal_basis(state, c, anchor, d),
                        Premise(_fmt("processor-for", u, c, anchor), pf),
                        Premise(f"forall S: subject-of(S,{d}) -> has-been-informed(S,{c},{p})", informed, per),
                    ),
                )
            )

    premises = [prereq]
    if not candidates:
        premises.append(
            Premise(
                f"legal-basis-claim(_,_,P') with specific-of({p},P') or compatible-with({p},P')",
                False,
            )
        )
    diag = Diagnosis(tuple(premises), tuple(candidates))
    return Decision("deny", request, graph.version, decided_at, diagnosis=diag, warnings=warnings)


def decide_ternary(
    graph: PurposeGraph,
    actor: str,
    action: str,
    asset: str,
    enabled: bool = False,
    *,
    request_id: str = "",
    state: DerivedState | None = None,
    now: float | None = None,
) -> Decision:
    """Decide a request without a stated purpose.

    Candidate purposes come from ``processing-purpose-for(action, P)``
    facts, tried in lexicographic order.
    """
    if not enabled:
        raise FeatureDisabled("ternary requests are disabled")
    _check_atoms(actor=actor, action=action, asset=asset)
    if state is None:
        state = saturate(graph)
    decided_at = time.time() if now is None else now
    treq = TernaryRequest(actor, action, asset, request_id)
    purposes = sorted(
        k[2] for k in state.asserted if k[0] == "processing-purpose-for" and k[1] == action
    )
    sub_candidates: list[Candidate] = []
    for p in purposes:
        inner = decide_request(
            graph,
            Request(actor, action, p, asset, request_id or "ternary"),
            state=state,
            now=decided_at,
        )
        if inner.permitted:
            ppf = ("processing-purpose-for", action, p)
            tree = DerivationTree(
                ("lawful-request", actor, action, asset),
                "EQ12-TERNARY",
                (state.tree(ppf), inner.tree),
            )
            return Decision("permit", treq, graph.version, decided_at, tree=tree, warnings=inner.warnings)
        sub_candidates.extend(inner.diagnosis.candidates)
        if not inner.diagnosis.candidates:
            sub_candidates.append(Candidate("EQ12-TERNARY", p, "", inner.diagnosis.premises))
    diag = Diagnosis(
        (Premise(f"processing-purpose-for({action},_)", bool(purposes)),),
        tuple(sub_candidates),
    )
    return Decision("deny", treq, graph.version, decided_at, diagnosis=diag)
