"""Rendering of fact and derived-tuple keys in surface syntax."""

from __future__ import annotations

# surface predicate names that differ from the internal fact kind
_DECL_NAMES = {"purpose-decl": "purpose", "action-decl": "processing-action"}


def format_key(key: tuple) -> str:
    pred, *args = key
    if pred == "legal-basis-claim":
        basis, *rest = args
        return f"legal-basis-{basis}({','.join(rest)})"
    if pred == "actor-decl":
        return f"{args[0]}({args[1]})"
    pred = _DECL_NAMES.get(pred, pred)
    return f"{pred}({','.join(args)})"
