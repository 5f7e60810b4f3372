"""Topology files: the same statement syntax family as graph files.

Example::

    // three-party distributed processing, self-governed
    archetype(Distributed).
    governance(SelfGoverned).
    org(Ctrl).
    org(Col).
    org(Perf).
    intermediary(Broker).   // only used with IntermediaryGoverned

Organisations fill the archetype's role slots in the order listed.
"""

from __future__ import annotations

import re

from ..dsl import DslSyntaxError
from .topology import Archetype, Governance, Topology, build_topology

_STMT = re.compile(r"([a-z]+)\(([A-Za-z][A-Za-z0-9_-]*)\)\.")


def parse_topology_config(text: str) -> dict:
    """Return ``{"archetype", "governance", "orgs", "intermediary"}`` from config text."""
    out: dict = {"orgs": []}
    where: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        m = _STMT.fullmatch(line.replace(" ", ""))
        if m is None:
            raise DslSyntaxError(lineno, 1, ["archetype(..).", "governance(..).", "org(..).", "intermediary(..)."], line)
        key, value = m.groups()
        if key == "org":
            out["orgs"].append(value)
        elif key in ("archetype", "governance", "intermediary"):
            if key in out:
                raise DslSyntaxError(lineno, 1, [f"a single {key} statement"], line)
            out[key] = value
            where[key] = lineno
        else:
            raise DslSyntaxError(lineno, 1, ["archetype", "governance", "org", "intermediary"], key)
    if "archetype" not in out:
        raise DslSyntaxError(len(text.splitlines()) + 1, 1, ["archetype(..)."], "end of input")
    for key, enum_type in (("archetype", Archetype), ("governance", Governance)):
        if key not in out:
            out[key] = Governance.SELF
            continue
        try:
            out[key] = enum_type(out[key])
        except ValueError:
            known = [m.value for m in enum_type]
            raise DslSyntaxError(where[key], 1, known, out[key]) from None
    return out


def load_topology(text: str) -> Topology:
    cfg = parse_topology_config(text)
    kw = {"intermediary": cfg["intermediary"]} if "intermediary" in cfg else {}
    return build_topology(cfg["archetype"], cfg["governance"], cfg["orgs"] or None, **kw)


def format_topology(topology: Topology) -> str:
    lines = [f"archetype({topology.archetype.value}).", f"governance({topology.governance.value})."]
    lines += [f"org({n.org})." for n in topology.nodes if n.admin_roles]
    lines += [f"intermediary({n.org})." for n in topology.nodes if not n.admin_roles]
    return "\n".join(lines) + "\n"
