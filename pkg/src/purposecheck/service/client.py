"""Minimal client for the decision service's HTTP protocol."""

from __future__ import annotations

import json
import urllib.error
import urllib.request

from ..dsl.format import format_fact
from ..inference import Decision, DerivationTree, Diagnosis
from ..model import Fact, MalformedRequest, Provenance, Request
from . import store as _store


class ServiceError(Exception):
    def __init__(self, status: int, name: str, message: str):
        self.status = status
        self.name = name
        super().__init__(f"{status} {name}: {message}")


_RAISE = {
    "UnknownRequest": _store.UnknownRequest,
    "NotPermitted": _store.NotPermitted,
    "AlreadyProcessed": _store.AlreadyProcessed,
    "DuplicateRequest": _store.DuplicateRequest,
    "StoreUnavailable": _store.StoreUnavailable,
    "MalformedRequest": MalformedRequest,
    "BadPayload": MalformedRequest,
}


class ServiceClient:
    def __init__(self, url: str, timeout: float = 10.0):
        self.url = url.rstrip("/")
        self.timeout = timeout

    def call(self, method: str, path: str, body=None) -> tuple[int, dict]:
        """Send one request; return (status, decoded JSON) without raising on 4xx/5xx."""
        data = json.dumps(body).encode() if body is not None else None
        req = urllib.request.Request(self.url + path, data=data, method=method)
        req.add_header("Content-Type", "application/json")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return resp.status, json.loads(resp.read() or b"{}")
        except urllib.error.HTTPError as exc:
            return exc.code, json.loads(exc.read() or b"{}")

    def _ok(self, method: str, path: str, body=None) -> dict:
        status, payload = self.call(method, path, body)
        if status >= 400:
            name = payload.get("error", "Error")
            message = payload.get("message", "")
            if name == "CapabilityViolation":
                raise ServiceError(status, name, message)
            exc = _RAISE.get(name)
            if exc is not None:
                raise exc(message)
            raise ServiceError(status, name, message)
        return payload

    @staticmethod
    def _fact_entries(items) -> list[dict]:
        out = []
        for fact, prov in items:
            entry = {"fact": format_fact(fact)}
            if prov is not None:
                entry.update(prov.to_json())
            out.append(entry)
        return out

    def assert_facts(self, items: list[tuple[Fact, Provenance]]) -> int:
        return self._ok("POST", "/pap/facts", {"facts": self._fact_entries(items)})["graph_version"]

    def retract_facts(self, items: list[tuple[Fact, Provenance | None]]) -> int:
        return self._ok("DELETE", "/pap/facts", {"facts": self._fact_entries(items)})["graph_version"]

    def graph(self) -> dict:
        return self._ok("GET", "/pap/graph")

    def decide(self, request: Request, *, verbose: bool = True) -> Decision:
        payload = self._ok("POST", "/pdp/decision", {**request.to_json(), "verbose": verbose})
        return decision_from_payload(request, payload)

    def processed(self, request_id: str) -> dict:
        return self._ok("POST", "/pdp/processed", {"request_id": request_id})

    def audit_report(self) -> dict:
        return self._ok("GET", "/audit/report")

    def subject_report(self, subject: str) -> dict:
        return self._ok("GET", f"/audit/subject/{subject}")


def decision_from_payload(request: Request, payload: dict) -> Decision:
    """Rebuild a Decision from a verbose decision response."""
    tree = DerivationTree.from_json(payload["tree"]) if "tree" in payload else None
    diag = Diagnosis.from_json(payload["diagnosis"]) if "diagnosis" in payload else None
    return Decision(
        payload["decision"],
        request,
        payload["graph_version"],
        payload["decided_at"],
        tree=tree,
        diagnosis=diag,
        warnings=tuple(payload.get("warnings", ())),
    )
