"""Content-addressed artifact store and scenario file IO.

Flat directory layout, one JSON file per artifact under <root>/<kind>/<id>.json,
append-only. The id is the SHA-256 of the canonicalized payload (sorted keys,
compact separators, shortest round-trip floats), so identical content dedupes
and artifacts stay diffable. Timestamps live in the envelope, outside the
digest. Writes take an advisory lock on the store root; reads are lock-free.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .model import Scenario, ScenarioFormatError, ScenarioValidationError, scenario_from_dict, scenario_to_dict, validate_scenario

ARTIFACT_KINDS = ("scenario", "equilibrium", "sweep", "score", "counterfactual")


class NotFoundError(KeyError):
    pass


@dataclass(frozen=True)
class StoredArtifact:
    id: str
    kind: str
    created_at: str
    payload: dict


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def content_id(payload) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


class ArtifactStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def store(self, kind: str, payload: dict) -> tuple[str, bool]:
        """Persist a payload under its content id; returns (id, created).
        Re-storing identical content is a no-op on the same id."""
        if kind not in ARTIFACT_KINDS:
            raise ValueError(f"unknown artifact kind {kind!r}; expected one of {ARTIFACT_KINDS}")
        artifact_id = content_id(payload)
        path = self._path(kind, artifact_id)
        if path.exists():
            return artifact_id, False
        with self._lock():
            if path.exists():
                return artifact_id, False
            path.parent.mkdir(parents=True, exist_ok=True)
            envelope = {
                "id": artifact_id,
                "kind": kind,
                "created_at": datetime.now(timezone.utc).isoformat(),
                "payload": payload,
            }
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(envelope, sort_keys=True, ensure_ascii=False, indent=1), encoding="utf-8")
            tmp.replace(path)
        return artifact_id, True

    def fetch(self, artifact_id: str) -> StoredArtifact:
        for kind in ARTIFACT_KINDS:
            path = self._path(kind, artifact_id)
            if path.exists():
                envelope = json.loads(path.read_text(encoding="utf-8"))
                return StoredArtifact(
                    id=envelope["id"],
                    kind=envelope["kind"],
                    created_at=envelope["created_at"],
                    payload=envelope["payload"],
                )
        raise NotFoundError(artifact_id)

    def list(self, kind: str) -> list[str]:
        if kind not in ARTIFACT_KINDS:
            raise ValueError(f"unknown artifact kind {kind!r}")
        directory = self.root / kind
        if not directory.is_dir():
            return []
        return sorted(p.stem for p in directory.glob("*.json"))

    def rebuild_index(self) -> dict[str, list[str]]:
        """Regenerate <root>/index.json from the files on disk."""
        index = {kind: self.list(kind) for kind in ARTIFACT_KINDS}
        with self._lock():
            (self.root / "index.json").write_text(
                json.dumps(index, sort_keys=True, indent=1), encoding="utf-8"
            )
        return index

    def _path(self, kind: str, artifact_id: str) -> Path:
        return self.root / kind / f"{artifact_id}.json"

    def _lock(self):
        return _DirectoryLock(self.root / ".lock")


class _DirectoryLock:
    def __init__(self, path: Path):
        self.path = path
        self._handle = None

    def __enter__(self):
        self._handle = open(self.path, "a+")
        fcntl.flock(self._handle.fileno(), fcntl.LOCK_EX)
        return self

    def __exit__(self, *exc):
        fcntl.flock(self._handle.fileno(), fcntl.LOCK_UN)
        self._handle.close()
        self._handle = None


def load_scenario(path: str | Path) -> Scenario:
    """Read, parse (strict), and validate a scenario file. Parse errors carry
    line/column; invariant violations raise ScenarioValidationError with the
    full list."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioFormatError(f"parse error at line {e.lineno}, column {e.colno}: {e.msg}") from e
    scenario = scenario_from_dict(doc)
    violations = validate_scenario(scenario)
    if violations:
        raise ScenarioValidationError(violations)
    return scenario


def save_scenario(path: str | Path, scenario: Scenario) -> None:
    Path(path).write_text(
        json.dumps(scenario_to_dict(scenario), sort_keys=True, ensure_ascii=False, indent=1) + "\n",
        encoding="utf-8",
    )
