"""Service configuration: a JSON file plus ``PURPOSECHECK_*`` environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

from ..inference import RULE_SET_VERSION


@dataclass
class ServiceConfig:
    listen: str = "127.0.0.1:8080"
    sweep_interval: float = 0.0  # seconds; 0 disables the timer
    rule_set_version: str = RULE_SET_VERSION
    log_path: str | None = None
    snapshot_dir: str | None = None
    snapshot_every: int = 100
    ternary: bool = False
    enforce_capabilities: bool = False

    @property
    def host(self) -> str:
        return self.listen.rsplit(":", 1)[0] or "127.0.0.1"

    @property
    def port(self) -> int:
        return int(self.listen.rsplit(":", 1)[1])

    @classmethod
    def for_store(cls, directory: str | os.PathLike, **kw) -> "ServiceConfig":
        d = Path(directory)
        return cls(log_path=str(d / "log.jsonl"), snapshot_dir=str(d / "snapshots"), **kw)


def _coerce(kind, raw: str):
    if kind is bool or kind == "bool":
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind in (float, "float"):
        return float(raw)
    if kind in (int, "int"):
        return int(raw)
    return raw


def load_config(path: str | os.PathLike | None = None, env: dict | None = None) -> ServiceConfig:
    """Read ``path`` (JSON) if given, then apply environment overrides.

    Every key ``k`` can be overridden by ``PURPOSECHECK_<K>``.
    """
    env = os.environ if env is None else env
    data: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    known = {f.name: f for f in fields(ServiceConfig)}
    unknown = set(data) - set(known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    cfg = ServiceConfig(**data)
    for name, f in known.items():
        raw = env.get(f"PURPOSECHECK_{name.upper()}")
        if raw is not None:
            kind = f.type.split(" |")[0] if isinstance(f.type, str) else f.type
            setattr(cfg, name, _coerce(kind, raw))
    return cfg
