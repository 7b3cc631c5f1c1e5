"""Local-first workspace persistence: one human-readable JSON document per
workspace, written atomically (temp file + rename) under the user's data
directory.

Unknown top-level fields in a workspace file survive a load/save round trip,
so files written by a slightly newer build keep their extras when edited by
this one. A bumped ``schema_version`` beyond what this build supports is
rejected instead of silently mangled.
"""

from __future__ import annotations

import fcntl
import json
import os
import re
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    CorruptFile,
    InvalidWorkspace,
    IoError,
    SchemaMismatch,
    WorkspaceLocked,
    WorkspaceNotFound,
)
from .model import Comparison, snapshot_hash

SCHEMA_VERSION = 1

FILE_SUFFIX = ".raws.json"

_ID_RE = re.compile(r"[a-z0-9-]{1,64}$")

#: Known top-level fields, in serialization order.
_KNOWN_FIELDS = (
    "schema_version",
    "id",
    "created",
    "modified",
    "problem",
    "contexts",
    "comparison",
    "log",
)


def utc_now() -> str:
    """UTC timestamp at second precision, e.g. ``2026-08-08T15:30:00Z``."""
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


@dataclass
class StoredContext:
    label: str
    body: str
    source: str | None = None

    def to_json(self) -> dict:
        return {"label": self.label, "body": self.body, "source": self.source}

    @classmethod
    def from_json(cls, doc: dict) -> "StoredContext":
        return cls(
            label=doc.get("label", ""),
            body=doc.get("body", ""),
            source=doc.get("source"),
        )


@dataclass
class ProvenanceEntry:
    """One prompt/response round trip; the log is append-only."""

    timestamp: str
    scenario_id: str
    prompt_text: str
    response_text: str | None = None
    ingest_warnings: list[str] = field(default_factory=list)
    pre_hash: str = ""
    post_hash: str = ""

    def to_json(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "scenario_id": self.scenario_id,
            "prompt_text": self.prompt_text,
            "response_text": self.response_text,
            "ingest_warnings": list(self.ingest_warnings),
            "pre_hash": self.pre_hash,
            "post_hash": self.post_hash,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ProvenanceEntry":
        return cls(
            timestamp=doc.get("timestamp", ""),
            scenario_id=doc.get("scenario_id", ""),
            prompt_text=doc.get("prompt_text", ""),
            response_text=doc.get("response_text"),
            ingest_warnings=list(doc.get("ingest_warnings", [])),
            pre_hash=doc.get("pre_hash", ""),
            post_hash=doc.get("post_hash", ""),
        )


@dataclass
class Workspace:
    id: str
    problem: str = ""
    created: str = ""
    modified: str = ""
    contexts: list[StoredContext] = field(default_factory=list)
    comparison: Comparison = field(default_factory=Comparison)
    log: list[ProvenanceEntry] = field(default_factory=list)
    #: Unknown top-level fields from the file, preserved opaquely.
    extra: dict = field(default_factory=dict)

    def record_prompt(self, scenario_id: str, prompt_text: str) -> ProvenanceEntry:
        entry = ProvenanceEntry(
            timestamp=utc_now(),
            scenario_id=scenario_id,
            prompt_text=prompt_text,
            pre_hash=snapshot_hash(self.comparison),
            post_hash=snapshot_hash(self.comparison),
        )
        self.log.append(entry)
        return entry

    def record_ingest(
        self,
        warnings: list[str],
        pre_hash: str,
        post_hash: str,
        response_text: str,
        scenario_id: str | None = None,
        prompt_text: str | None = None,
    ) -> ProvenanceEntry:
        """Append the round trip that produced the current comparison.

        When scenario/prompt are not given (manual paste-back), they are
        taken from the most recent prompt entry still awaiting a response.
        """
        if prompt_text is None:
            for earlier in reversed(self.log):
                if earlier.response_text is None:
                    scenario_id = scenario_id or earlier.scenario_id
                    prompt_text = earlier.prompt_text
                    break
        entry = ProvenanceEntry(
            timestamp=utc_now(),
            scenario_id=scenario_id or "manual-ingest",
            prompt_text=prompt_text or "(response pasted without a generated prompt)",
            response_text=response_text,
            ingest_warnings=list(warnings),
            pre_hash=pre_hash,
            post_hash=post_hash,
        )
        self.log.append(entry)
        return entry

    def to_document(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "created": self.created,
            "modified": self.modified,
            "problem": self.problem,
            "contexts": [c.to_json() for c in self.contexts],
            "comparison": self.comparison.to_json(),
            "log": [entry.to_json() for entry in self.log],
        }
        for key in sorted(self.extra):
            if key not in _KNOWN_FIELDS:
                doc[key] = self.extra[key]
        return doc


def valid_id(workspace_id: str) -> bool:
    return bool(_ID_RE.fullmatch(workspace_id))


def default_root() -> Path:
    home = os.environ.get("RA_HOME")
    base = Path(home) if home else Path.home() / ".ra-forge"
    return base / "workspaces"


def workspace_path(root: str | Path, workspace_id: str) -> Path:
    return Path(root) / f"{workspace_id}{FILE_SUFFIX}"


def new_workspace(workspace_id: str, problem: str = "") -> Workspace:
    if not valid_id(workspace_id):
        raise InvalidWorkspace(
            f"workspace id {workspace_id!r} must match [a-z0-9-]{{1,64}}"
        )
    return Workspace(id=workspace_id, problem=problem, comparison=Comparison(problem=problem))


def save(workspace: Workspace, root: str | Path) -> Path:
    """Atomically write the workspace document; returns the file path."""
    if not valid_id(workspace.id):
        raise InvalidWorkspace(
            f"workspace id {workspace.id!r} must match [a-z0-9-]{{1,64}}"
        )
    try:
        workspace.comparison.check_invariants()
    except ValueError as exc:
        raise InvalidWorkspace(f"comparison invariant broken: {exc}") from exc
    now = utc_now()
    if not workspace.created:
        workspace.created = now
    workspace.modified = now
    path = workspace_path(root, workspace.id)
    payload = json.dumps(workspace.to_document(), ensure_ascii=False, indent=2) + "\n"
    tmp = path.with_name(f"{path.name}.tmp.{os.getpid()}")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        try:
            tmp.unlink()
        except OSError:
            pass
        raise IoError(f"could not write workspace file {path}: {exc}") from exc
    return path


def load(path: str | Path) -> Workspace:
    path = Path(path)
    if not path.exists():
        raise WorkspaceNotFound(str(path))
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"could not read workspace file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptFile(f"{path.name}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise CorruptFile(f"{path.name}: top level is not an object")
    version = doc.get("schema_version")
    if not isinstance(version, int):
        raise CorruptFile(f"{path.name}: missing schema_version")
    if version > SCHEMA_VERSION:
        raise SchemaMismatch(version, SCHEMA_VERSION)
    try:
        comparison = Comparison.from_json(doc.get("comparison", {}))
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise CorruptFile(f"{path.name}: bad comparison section ({exc})") from exc
    workspace_id = doc.get("id")
    if not isinstance(workspace_id, str) or not valid_id(workspace_id):
        raise CorruptFile(f"{path.name}: bad workspace id {workspace_id!r}")
    try:
        contexts = [StoredContext.from_json(c) for c in doc.get("contexts", [])]
        log = [ProvenanceEntry.from_json(entry) for entry in doc.get("log", [])]
    except AttributeError as exc:
        raise CorruptFile(f"{path.name}: bad contexts or log section ({exc})") from exc
    extra = {k: v for k, v in doc.items() if k not in _KNOWN_FIELDS}
    return Workspace(
        id=workspace_id,
        problem=doc.get("problem", ""),
        created=doc.get("created", ""),
        modified=doc.get("modified", ""),
        contexts=contexts,
        comparison=comparison,
        log=log,
        extra=extra,
    )


def load_by_id(root: str | Path, workspace_id: str) -> Workspace:
    path = workspace_path(root, workspace_id)
    if not path.exists():
        raise WorkspaceNotFound(workspace_id)
    return load(path)


def delete(root: str | Path, workspace_id: str) -> None:
    path = workspace_path(root, workspace_id)
    if not path.exists():
        raise WorkspaceNotFound(workspace_id)
    path.unlink()


def list_ids(root: str | Path) -> list[str]:
    root = Path(root)
    if not root.is_dir():
        return []
    return sorted(
        p.name[: -len(FILE_SUFFIX)] for p in root.glob(f"*{FILE_SUFFIX}")
    )


@contextmanager
def workspace_lock(root: str | Path, workspace_id: str):
    """Advisory single-writer lock; concurrent readers stay lock-free."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    lock_path = root / f"{workspace_id}.lock"
    fh = open(lock_path, "a+")
    try:
        try:
            fcntl.flock(fh.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            raise WorkspaceLocked(
                f"workspace {workspace_id!r} is being written by another process"
            ) from None
        yield
    finally:
        fh.close()


@contextmanager
def workspace_txn(root: str | Path, workspace_id: str):
    """Load-mutate-save under the single-writer lock.

    Yields the workspace; on clean exit the workspace is saved. Exceptions
    skip the save, leaving the file as it was.
    """
    with workspace_lock(root, workspace_id):
        workspace = load_by_id(root, workspace_id)
        yield workspace
        save(workspace, root)
