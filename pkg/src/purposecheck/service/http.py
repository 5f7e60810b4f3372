"""HTTP transport for the decision service.

Wire protocol (JSON bodies, JSON responses)::

    POST   /pap/facts          {"facts": [FACT, ...], "by": ATOM, "cap": CAP, "exp": TS}
    DELETE /pap/facts          {"facts": [FACT, ...], "by": ATOM}
    GET    /pap/graph          -> {"version": N, "graph": "<graph file text>"}
    POST   /pdp/decision       {"actor", "action", "purpose", "asset", "request_id", "verbose"}
    POST   /pdp/processed      {"request_id"}
    GET    /audit/report       -> audit report
    GET    /audit/subject/ATOM -> subject report

A FACT is either DSL text such as ``"subject-of(Bob,BobsRecords)"`` or an
object ``{"fact": TEXT, "by": .., "cap": .., "at": .., "exp": .., "sig": HEX}``
whose keys override the body-level defaults.  ``purpose`` may be omitted
from a decision request only when the ternary feature is enabled.

Errors are ``{"error": NAME, "message": TEXT}`` with status 400 (malformed
input), 403 (capability violation), 404 (unknown request), 409 (duplicate,
not permitted, already processed) or 503 (store unavailable).
"""

from __future__ import annotations

import json
import logging
import threading
import uuid
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import unquote

from ..dsl import DslSyntaxError, UnknownPredicate, parse_fact
from ..graphio import dump_graph
from ..inference import FeatureDisabled, TernaryRequest
from ..model import (
    Capability,
    CapabilityViolation,
    MalformedFact,
    MalformedRequest,
    Provenance,
    Request,
    check_atom,
    licensing_capability,
)
from .config import ServiceConfig
from .store import (
    AlreadyProcessed,
    DuplicateRequest,
    NotPermitted,
    ServiceStore,
    StoreUnavailable,
    UnknownRequest,
    tree_ref,
)

log = logging.getLogger("purposecheck.service")

_STATUS = [
    ((MalformedRequest, MalformedFact, DslSyntaxError, UnknownPredicate, FeatureDisabled), 400),
    ((CapabilityViolation,), 403),
    ((UnknownRequest,), 404),
    ((DuplicateRequest, NotPermitted, AlreadyProcessed), 409),
    ((StoreUnavailable,), 503),
]


class BadPayload(MalformedRequest):
    pass


def _fact_items(body: dict, now: float):
    if not isinstance(body, dict) or not isinstance(body.get("facts"), list):
        raise BadPayload("body must be an object with a 'facts' list")
    items = []
    for entry in body["facts"]:
        spec = dict(body)
        if isinstance(entry, str):
            text = entry
        elif isinstance(entry, dict) and isinstance(entry.get("fact"), str):
            spec.update(entry)
            text = entry["fact"]
        else:
            raise BadPayload(f"bad fact entry: {entry!r}")
        fact = parse_fact(text)
        try:
            cap = Capability(spec["cap"]) if spec.get("cap") else licensing_capability(fact.kind)
            sig = spec.get("sig")
            prov = Provenance(
                asserted_by=check_atom(spec.get("by", "pap"), "asserter"),
                capability=cap,
                asserted_at=spec.get("at", now),
                expires_at=spec.get("exp"),
                signature=bytes.fromhex(sig) if sig else None,
            )
        except (ValueError, TypeError) as exc:
            raise BadPayload(str(exc)) from None
        items.append((fact, prov))
    return items


def parse_decision_payload(body, *, ternary: bool = False) -> Request | TernaryRequest:
    if not isinstance(body, dict):
        raise BadPayload("decision request must be a JSON object")
    rid = body.get("request_id") or uuid.uuid4().hex
    if not isinstance(rid, str):
        raise BadPayload("request_id must be a string")
    required = ("actor", "action", "purpose", "asset")
    if "purpose" not in body and ternary:
        required = ("actor", "action", "asset")
    missing = [k for k in required if k not in body]
    if missing:
        raise BadPayload(f"missing fields: {', '.join(missing)}")
    for k in required:
        if not isinstance(body[k], str):
            raise BadPayload(f"{k} must be a string")
    if len(required) == 3:
        for k in required:
            try:
                check_atom(body[k], k)
            except MalformedFact as exc:
                raise BadPayload(str(exc)) from None
        return TernaryRequest(body["actor"], body["action"], body["asset"], rid)
    return Request(body["actor"], body["action"], body["purpose"], body["asset"], rid)


def decision_payload(store: ServiceStore, decision, *, verbose: bool = False) -> dict:
    out = {
        "decision": decision.outcome,
        "request_id": decision.request.request_id,
        "graph_version": decision.graph_version,
        "decided_at": decision.decided_at,
        "rule_set_version": store.rule_set_version,
        "warnings": list(decision.warnings),
    }
    if decision.permitted:
        out.update(
            rule=decision.rule,
            basis=decision.basis,
            controller=decision.controller,
            anchor=decision.anchor,
            tree_ref=tree_ref(decision),
        )
        if verbose:
            out["tree"] = decision.tree.to_json()
    else:
        out["diagnosis"] = decision.diagnosis.to_json()
        out["failed"] = decision.diagnosis.failed()
    return out


class _Handler(BaseHTTPRequestHandler):
    server: "PurposeHTTPServer"
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # route through logging, not stderr
        log.debug("%s " + fmt, self.address_string(), *args)

    def _send(self, status: int, payload) -> None:
        body = json.dumps(payload, sort_keys=True).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _body(self):
        n = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(n) if n else b""
        try:
            return json.loads(raw or b"{}")
        except json.JSONDecodeError as exc:
            raise BadPayload(f"invalid JSON: {exc}") from None

    def _dispatch(self, method: str) -> None:
        try:
            status, payload = self.server.route(method, self.path, self._body)
        except Exception as exc:  # map domain errors onto status codes
            for types, code in _STATUS:
                if isinstance(exc, types):
                    status, payload = code, {"error": type(exc).__name__, "message": str(exc)}
                    break
            else:
                log.exception("internal error handling %s %s", method, self.path)
                status, payload = 500, {"error": "InternalError", "message": str(exc)}
        self._send(status, payload)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_DELETE(self):
        self._dispatch("DELETE")


class PurposeHTTPServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, store: ServiceStore, address: tuple[str, int]):
        super().__init__(address, _Handler)
        self.store = store

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"

    def route(self, method: str, path: str, body):
        store = self.store
        path = path.split("?", 1)[0]
        if path == "/pap/facts" and method in ("POST", "DELETE"):
            items = _fact_items(body(), store.clock())
            if method == "POST":
                g = store.assert_facts(items)
            else:
                g = store.retract_facts(items)
            return 200, {"graph_version": g.version}
        if path == "/pap/graph" and method == "GET":
            g = store.graph()
            return 200, {"version": g.version, "graph": dump_graph(g)}
        if path == "/pdp/decision" and method == "POST":
            data = body()
            req = parse_decision_payload(data, ternary=store.ternary)
            decision = store.decide(req)
            return 200, decision_payload(store, decision, verbose=bool(data.get("verbose")))
        if path == "/pdp/processed" and method == "POST":
            data = body()
            rid = data.get("request_id") if isinstance(data, dict) else None
            if not isinstance(rid, str):
                raise BadPayload("request_id required")
            rec = store.processed(rid)
            return 200, {"request_id": rid, "processed_at": rec.processed_at}
        if path == "/audit/report" and method == "GET":
            return 200, store.audit_report().to_json()
        if path.startswith("/audit/subject/") and method == "GET":
            subject = unquote(path[len("/audit/subject/"):])
            try:
                check_atom(subject, "subject")
            except MalformedFact as exc:
                raise BadPayload(str(exc)) from None
            return 200, store.subject_report(subject).to_json()
        return HTTPStatus.NOT_FOUND, {"error": "NotFound", "message": f"{method} {path}"}


class PurposeService:
    """Store, HTTP server and optional expiry timer, started together."""

    def __init__(self, config: ServiceConfig, store: ServiceStore | None = None):
        self.config = config
        self.store = store or ServiceStore(
            config.log_path,
            snapshot_dir=config.snapshot_dir,
            snapshot_every=config.snapshot_every,
            rule_set_version=config.rule_set_version,
            ternary=config.ternary,
            enforce_capabilities=config.enforce_capabilities,
        )
        self.httpd = PurposeHTTPServer(self.store, (config.host, config.port))
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []

    @property
    def url(self) -> str:
        return self.httpd.url

    def _sweeper(self) -> None:
        while not self._stop.wait(self.config.sweep_interval):
            try:
                expired = self.store.sweep()
                if expired:
                    log.info("expired %d facts", len(expired))
            except Exception:
                log.exception("expiry sweep failed")

    def start(self) -> "PurposeService":
        """Serve in background threads and return immediately."""
        t = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        t.start()
        self._threads.append(t)
        if self.config.sweep_interval > 0:
            s = threading.Thread(target=self._sweeper, daemon=True)
            s.start()
            self._threads.append(s)
        return self

    def serve_forever(self) -> None:
        if self.config.sweep_interval > 0:
            threading.Thread(target=self._sweeper, daemon=True).start()
        try:
            self.httpd.serve_forever()
        finally:
            self._stop.set()

    def stop(self) -> None:
        self._stop.set()
        self.httpd.shutdown()
        self.httpd.server_close()
        self.store.write_snapshot()
        self.store.close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
