"""Run directory layout, line-delimited record stores and the run manifest."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from collections.abc import Iterable, Iterator
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from .model import Event, Mention, event_from_record, mention_from_record, to_record

logger = logging.getLogger(__name__)

STAGES = ("draft", "pull", "recover", "verify")


class ManifestError(RuntimeError):
    pass


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(text: str | bytes) -> str:
    if isinstance(text, str):
        text = text.encode("utf-8")
    return hashlib.sha256(text).hexdigest()


def write_jsonl(path: Path, records: Iterable[dict]) -> str:
    """Write records atomically; returns the sha256 of the bytes written."""
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = "".join(canonical_json(r) + "\n" for r in records)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(payload, encoding="utf-8")
    os.replace(tmp, path)
    return digest(payload)


def read_jsonl(path: Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None


def file_digest(path: Path) -> str:
    return digest(path.read_bytes())


def save_events(path: Path, events: Iterable[Event]) -> str:
    return write_jsonl(path, (to_record(e) for e in events))


def load_events(path: Path) -> list[Event]:
    return [event_from_record(r) for r in read_jsonl(path)]


def save_mentions(path: Path, mentions: Iterable[Mention]) -> str:
    return write_jsonl(path, (to_record(m) for m in mentions))


def load_mentions(path: Path) -> list[Mention]:
    return [mention_from_record(r) for r in read_jsonl(path)]


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class RunDir:
    """Paths under ``runs/<run_id>/``."""

    def __init__(self, root: Path | str, run_id: str):
        self.run_id = run_id
        self.path = Path(root) / run_id

    @property
    def manifest(self) -> Path:
        return self.path / "manifest.json"

    @property
    def events(self) -> Path:
        return self.path / "events.jsonl"

    def stage_file(self, stage: str, event_id: str) -> Path:
        return self.path / "stages" / stage / f"{event_id}.jsonl"

    @property
    def oembed_cache(self) -> Path:
        return self.path / "oembed"

    @property
    def adjudications(self) -> Path:
        return self.path / "adjudications.jsonl"

    @property
    def probe(self) -> Path:
        return self.path / "probe.json"

    @property
    def tables(self) -> Path:
        return self.path / "tables"


class RunManifest:
    """Per-run record of stage status, provider query ids and errors.

    Records are only ever added to: completed stages keep their checksum,
    errors and warnings accumulate. The whole document is rewritten
    atomically on every save.
    """

    def __init__(self, path: Path, data: dict):
        self.path = path
        self.data = data

    @classmethod
    def create(cls, path: Path, run_id: str, config: dict, config_hash: str) -> RunManifest:
        data = {
            "run_id": run_id,
            "config": config,
            "config_hash": config_hash,
            "created_at": _now(),
            "updated_at": _now(),
            "run_stages": {},
            "events": {},
            "warnings": [],
            "request_count": 0,
            "virtual_elapsed_s": 0.0,
        }
        m = cls(path, data)
        m.save()
        return m

    @classmethod
    def load(cls, path: Path) -> RunManifest:
        if not path.exists():
            raise ManifestError(f"no manifest at {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ManifestError(f"corrupt manifest {path}: {exc}") from None
        for key in ("run_id", "config_hash", "events", "run_stages"):
            if key not in data:
                raise ManifestError(f"corrupt manifest {path}: missing {key!r}")
        return cls(path, data)

    def save(self) -> None:
        self.data["updated_at"] = _now()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(self.data, indent=2, sort_keys=True), encoding="utf-8")
        os.replace(tmp, self.path)

    # event-level records

    def event(self, event_id: str) -> dict:
        return self.data["events"].setdefault(
            event_id,
            {"stages": {}, "errors": [], "warnings": [], "query_id": None,
             "backfill_percent": None, "pull_counts": {}, "verification": {},
             "status": "seeded"},
        )

    def stage_done(self, event_id: str, stage: str) -> bool:
        return self.event(event_id)["stages"].get(stage, {}).get("status") == "done"

    def mark_stage(self, event_id: str, stage: str, checksum: str | None, **extra: Any) -> None:
        rec = self.event(event_id)
        rec["stages"][stage] = {"status": "done", "checksum": checksum, "at": _now(), **extra}
        rec["status"] = stage

    def invalidate_from(self, event_id: str, stage: str) -> None:
        """Drop completion marks for ``stage`` and everything downstream."""
        rec = self.event(event_id)
        for s in STAGES[STAGES.index(stage):]:
            if s in rec["stages"]:
                rec["stages"][s]["status"] = "stale"

    def add_error(self, event_id: str | None, message: str) -> None:
        logger.warning("%s: %s", event_id or "run", message)
        if event_id is None:
            self.data["warnings"].append(message)
        else:
            self.event(event_id)["errors"].append(message)

    def add_warning(self, event_id: str | None, message: str) -> None:
        if event_id is None:
            self.data["warnings"].append(message)
        else:
            self.event(event_id)["warnings"].append(message)

    def set_status(self, event_id: str, status: str) -> None:
        self.event(event_id)["status"] = status

    # run-level records

    def run_stage_done(self, stage: str) -> bool:
        return self.data["run_stages"].get(stage, {}).get("status") == "done"

    def mark_run_stage(self, stage: str, checksum: str | None = None, **extra: Any) -> None:
        self.data["run_stages"][stage] = {"status": "done", "checksum": checksum, "at": _now(), **extra}
