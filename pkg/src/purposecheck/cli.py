"""Command-line entry point.

Exit codes: 0 success, 1 violation or denial (check/simulate), 2 usage error.

Structured output (``--format json``) is a stable interface:

* ``check``    -> ``{"entries": [{"statement", "outcome", "label", "decision"?}], "clean", "graph_version"}``
* ``graph validate`` -> ``{"findings": [{"code", "message", "items"}]}``
* ``audit report``   -> the audit report object (plus ``"replay"`` with ``--verify``)
* ``audit subject``  -> ``{"subject", "entries": [...]}``
* ``simulate``       -> ``{"topology", "decisions": [...], "messages": N, "cross_stack": N}``
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .dsl import DslSyntaxError, Outcome, UnknownPredicate, execute_program, parse_program
from .dsl.format import format_statement
from .fixtures import load_graph
from .graphio import to_dot
from .model import PurposeCheckError, PurposeGraph
from .validate import validate_graph


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _emit(args, payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _decision_lines(decision) -> list[str]:
    if decision.permitted:
        return [f"    permit via {decision.rule} ({decision.basis}, {decision.controller}, {decision.anchor})"]
    failed = decision.diagnosis.failed()
    return ["    deny; unmet: " + "; ".join(dict.fromkeys(failed))] if failed else ["    deny"]


def cmd_check(args) -> int:
    program = parse_program(_read(args.file))
    graph = load_graph(_read(args.graph)) if args.graph else PurposeGraph()
    trace, final = execute_program(program, graph, enforce_capabilities=args.enforce)
    if args.format == "json":
        entries = []
        for e in trace.entries:
            item = {
                "statement": format_statement(e.statement),
                "outcome": e.outcome.value,
                "label": e.outcome.label,
            }
            if e.decision is not None:
                item["decision"] = e.decision.to_json()
            if e.message:
                item["message"] = e.message
            entries.append(item)
        _emit(args, {"entries": entries, "clean": trace.clean, "graph_version": final.version})
    else:
        for e in trace.entries:
            print(f"{format_statement(e.statement)}  //{e.outcome.label}")
            if e.decision is not None and args.verbose:
                print("\n".join(_decision_lines(e.decision)))
            if e.message:
                print(f"    {e.message}")
    return 0 if trace.clean else 1


def cmd_serve(args) -> int:
    from .service import PurposeService, load_config

    cfg = load_config(args.config)
    if args.listen:
        cfg.listen = args.listen
    svc = PurposeService(cfg)
    logging.getLogger("purposecheck").info("listening on %s", svc.url)
    print(f"purposecheck service listening on {svc.url}", flush=True)
    try:
        svc.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        svc.httpd.server_close()
        svc.store.write_snapshot()
        svc.store.close()
    return 0


def cmd_graph(args) -> int:
    graph = load_graph(_read(args.file))
    if args.action == "dot":
        sys.stdout.write(to_dot(graph))
        return 0
    report = validate_graph(graph)
    if args.format == "json":
        _emit(args, {"findings": report.to_json()})
    elif not report:
        print("no findings")
    else:
        for f in report.findings:
            print(f"{f.code}: {f.message}")
    return 0


def _open_store(directory: str):
    from .service import ServiceStore

    log_path = Path(directory) / "log.jsonl"
    if not log_path.exists():
        raise UsageError(f"no decision log at {log_path}")
    return ServiceStore(log_path)


def cmd_audit(args) -> int:
    from .service import verify_audit_report

    with _open_store(args.store) as store:
        if args.action == "report":
            report = store.audit_report()
            payload = report.to_json()
            if args.verify:
                r = verify_audit_report(report)
                payload["replay"] = {
                    "checked": r.checked,
                    "mismatches": r.mismatches,
                    "missing_leaves": r.missing_leaves,
                }
            if args.format == "json":
                _emit(args, payload)
            else:
                print(f"rule set {report.rule_set_version}")
                print(f"{len(report.history)} mutations, {len(report.decisions)} decisions")
                for d in report.decisions:
                    dec = d["decision"]
                    req = dec["request"]
                    print(
                        f"  {req['request_id']}: {dec['decision']} "
                        f"{req['actor']} {req['action']} {req.get('purpose', '-')} {req['asset']}"
                        + (" processed" if d["processed_at"] is not None else "")
                    )
                if args.verify:
                    rep = payload["replay"]
                    ok = not rep["mismatches"] and not rep["missing_leaves"]
                    print(f"replay: {rep['checked']} decisions, {'identical' if ok else 'MISMATCH'}")
                    for line in rep["mismatches"] + rep["missing_leaves"]:
                        print(f"  {line}")
            if args.verify and payload["replay"]["mismatches"] + payload["replay"]["missing_leaves"]:
                return 1
            return 0
        report = store.subject_report(args.subject)
        if args.format == "json":
            _emit(args, report.to_json())
        else:
            print(f"subject {report.subject}: {len(report.entries)} entries")
            for e in report.entries:
                print(
                    f"  {e.asset} {e.action} for {e.purpose} ({e.basis}, {e.controller})"
                    f" {'processed' if e.processed else 'not processed'}"
                )
        return 0


def cmd_simulate(args) -> int:
    from .sim import Archetype, Governance, build_topology, load_topology, run_scenario

    scripts_dir = Path(args.scripts)
    if not scripts_dir.is_dir():
        raise UsageError(f"not a directory: {scripts_dir}")
    cfg_file = scripts_dir / "topology.cfg"
    if args.archetype is None:
        if not cfg_file.exists():
            raise UsageError("--archetype is required when the scripts directory has no topology.cfg")
        topology = load_topology(cfg_file.read_text(encoding="utf-8"))
    else:
        try:
            archetype = Archetype(args.archetype)
            governance = Governance(args.governance)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        orgs = args.orgs.split(",") if args.orgs else None
        if orgs is None and cfg_file.exists():
            orgs = [n.org for n in load_topology(cfg_file.read_text(encoding="utf-8")).nodes if n.admin_roles]
        topology = build_topology(archetype, governance, orgs)
    scripts = {}
    for org in topology.orgs:
        f = scripts_dir / f"{org}.plg"
        if f.exists():
            scripts[org] = parse_program(f.read_text(encoding="utf-8"))
    trace = run_scenario(topology, scripts, loopback=args.loopback)
    if args.trace_out:
        Path(args.trace_out).write_text(trace.to_jsonl(), encoding="utf-8")
    clean = all(t.clean for t in trace.traces.values())
    if args.format == "json":
        _emit(
            args,
            {
                "topology": topology.to_json(),
                "decisions": [{"org": o, **d.to_json()} for o, d in trace.decisions],
                "messages": len(trace.messages),
                "cross_stack": len(trace.cross_stack_messages()),
                "clean": clean,
            },
        )
    else:
        print(f"{topology.archetype.value} / {topology.governance.value}: {', '.join(topology.orgs)}")
        for org, t in trace.traces.items():
            for e in t.entries:
                print(f"[{org}] {format_statement(e.statement)}  //{e.outcome.label}")
        print(f"{len(trace.messages)} messages, {len(trace.cross_stack_messages())} cross-stack")
    return 0 if clean else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="purposecheck", description=__doc__.splitlines()[0])
    p.add_argument("--format", choices=("text", "json"), default="text", help="output format")
    p.add_argument("-v", "--verbose", action="store_true", help="explain decisions")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run a scenario program")
    c.add_argument("file")
    c.add_argument("--graph", help="graph file loaded before the program runs")
    c.add_argument("--enforce", action="store_true", help="enforce assertion capabilities")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("serve", help="run the decision service")
    s.add_argument("--config", help="JSON configuration file")
    s.add_argument("--listen", help="host:port, overrides the config")
    s.set_defaults(func=cmd_serve)

    g = sub.add_parser("graph", help="validate or export a graph file")
    g.add_argument("action", choices=("validate", "dot"))
    g.add_argument("file")
    g.set_defaults(func=cmd_graph)

    a = sub.add_parser("audit", help="export reports from a service store")
    asub = a.add_subparsers(dest="action", required=True)
    ar = asub.add_parser("report", help="full audit report")
    ar.add_argument("--store", required=True, help="service store directory")
    ar.add_argument("--verify", action="store_true", help="replay and compare every decision")
    as_ = asub.add_parser("subject", help="report for one data subject")
    as_.add_argument("subject")
    as_.add_argument("--store", required=True, help="service store directory")
    a.set_defaults(func=cmd_audit)

    m = sub.add_parser("simulate", help="run per-organisation scripts on an archetype")
    m.add_argument("--archetype", help="archetype name, e.g. Distributed")
    m.add_argument("--governance", default="SelfGoverned", help="SelfGoverned or IntermediaryGoverned")
    m.add_argument("--scripts", required=True, help="directory with <org>.plg files")
    m.add_argument("--orgs", help="comma-separated organisations in role-slot order")
    m.add_argument("--loopback", action="store_true", help="run each policy stack as a real service")
    m.add_argument("--trace-out", help="write the line-delimited simulation trace here")
    m.set_defaults(func=cmd_simulate)

    # accept --format/--verbose after the subcommand too
    for sp in (c, s, g, ar, as_, m):
        sp.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
        sp.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"purposecheck: error: {exc}", file=sys.stderr)
        return 2
    except (DslSyntaxError, UnknownPredicate) as exc:
        print(f"purposecheck: syntax error: {exc}", file=sys.stderr)
        return 2
    except PurposeCheckError as exc:
        print(f"purposecheck: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


run_cli = main

if __name__ == "__main__":
    sys.exit(main())
