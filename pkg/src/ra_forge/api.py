"""Local HTTP facade over the core workflow.

Serves the JSON API consumed by the web UI (and any other client) plus the
UI's static assets. Binds loopback only unless told otherwise; there is no
auth - the service is a local companion process, not a shared server.

Writes are serialized per workspace: an in-process lock per id on top of the
store's advisory file lock. Edit batches may carry the snapshot hash they
were built against; a stale hash is rejected whole (409), never partially
applied.
"""

from __future__ import annotations

import json
import mimetypes
import re
import sys
import threading
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .catalog import ScenarioInputs, default_catalog
from .errors import RaError, StaleSnapshot
from .export import ExportProfile, export, export_filename
from .ingest import parse_response
from .model import EditCommand, apply_edits, merge_ingest, snapshot_hash
from .store import (
    StoredContext,
    Workspace,
    delete as delete_workspace,
    list_ids,
    load_by_id,
    new_workspace,
    save,
    workspace_lock,
    workspace_path,
)

_STATUS_BY_CODE = {
    "workspace_not_found": 404,
    "stale_snapshot": 409,
    "workspace_locked": 409,
    "no_usable_table": 422,
    "io_error": 500,
    "corrupt_file": 500,
    "schema_mismatch": 500,
}

_FLAVOR_ALIASES = {
    "generic": "generic_comparison",
    "generic_comparison": "generic_comparison",
    "definitions": "definitions",
    "orkg": "orkg_import",
    "orkg_import": "orkg_import",
}

_WS_ROUTE = re.compile(r"^/api/workspaces/(?P<id>[a-z0-9-]{1,64})(?P<rest>/.*)?$")


class RaServer(ThreadingHTTPServer):
    """HTTP server carrying the shared application state."""

    daemon_threads = True

    def __init__(self, address, handler, root: Path, static_dir: Path | None):
        super().__init__(address, handler)
        self.root = Path(root)
        self.static_dir = Path(static_dir) if static_dir else None
        self.catalog = default_catalog()
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def write_lock(self, workspace_id: str) -> threading.Lock:
        with self._locks_guard:
            if workspace_id not in self._locks:
                self._locks[workspace_id] = threading.Lock()
            return self._locks[workspace_id]

    def handle_error(self, request, client_address):
        # clients hanging up mid-request (tab closed, curl aborted) are not
        # server errors worth a traceback
        exc = sys.exc_info()[1]
        if isinstance(exc, (ConnectionError, BrokenPipeError, TimeoutError)):
            return
        super().handle_error(request, client_address)


class _Handler(BaseHTTPRequestHandler):
    server: RaServer
    protocol_version = "HTTP/1.1"

    # --- plumbing ---

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, status: int, body: bytes, content_type: str, extra: dict | None = None):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        for name, value in (extra or {}).items():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(body)

    def _json(self, status: int, obj) -> None:
        payload = json.dumps(obj, ensure_ascii=False).encode("utf-8")
        self._send(status, payload, "application/json; charset=utf-8")

    def _error(self, status: int, code: str, message: str, pointer: str | None = None):
        doc = {"error": {"code": code, "message": message}}
        if pointer:
            doc["error"]["pointer"] = pointer
        self._json(status, doc)

    def _ra_error(self, exc: RaError) -> None:
        status = _STATUS_BY_CODE.get(exc.code, 400)
        self._error(status, exc.code, str(exc), exc.pointer)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise _BadRequest(f"request body is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise _BadRequest("request body must be a JSON object")
        return doc

    # --- dispatch ---

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def _dispatch(self, method: str) -> None:
        parsed = urllib.parse.urlparse(self.path)
        path = parsed.path
        query = urllib.parse.parse_qs(parsed.query)
        try:
            if path == "/api/tasks" and method == "GET":
                return self._get_tasks()
            if path == "/api/workspaces":
                if method == "GET":
                    return self._list_workspaces()
                if method == "POST":
                    return self._create_workspace()
                return self._error(405, "method_not_allowed", f"{method} not allowed here")
            match = _WS_ROUTE.match(path)
            if match:
                return self._workspace_route(method, match.group("id"),
                                             match.group("rest") or "", query)
            if method == "GET" and not path.startswith("/api/"):
                return self._static(path)
            self._error(404, "not_found", f"no route for {method} {path}")
        except _BadRequest as exc:
            self._error(400, "bad_request", str(exc))
        except RaError as exc:
            self._ra_error(exc)
        except Exception as exc:  # pragma: no cover - defensive
            self._error(500, "internal_error", f"{type(exc).__name__}: {exc}")

    # --- routes ---

    def _get_tasks(self) -> None:
        self._json(200, [s.to_json() for s in self.server.catalog.list_scenarios()])

    def _list_workspaces(self) -> None:
        out = []
        for ws_id in list_ids(self.server.root):
            try:
                workspace = load_by_id(self.server.root, ws_id)
            except RaError:
                continue
            out.append({
                "id": workspace.id,
                "problem": workspace.problem,
                "modified": workspace.modified,
                "dimensions": len(workspace.comparison.dimensions),
                "columns": len(workspace.comparison.columns),
            })
        self._json(200, out)

    def _create_workspace(self) -> None:
        body = self._read_body()
        ws_id = str(body.get("id", "")).strip()
        if not ws_id:
            raise _BadRequest("field 'id' is required")
        if workspace_path(self.server.root, ws_id).exists():
            return self._error(409, "workspace_exists", f"workspace {ws_id!r} already exists")
        workspace = new_workspace(ws_id, problem=str(body.get("problem", "")))
        with self.server.write_lock(ws_id), workspace_lock(self.server.root, ws_id):
            save(workspace, self.server.root)
        self._json(201, _workspace_doc(workspace))

    def _workspace_route(self, method: str, ws_id: str, rest: str, query: dict) -> None:
        if rest in ("", "/"):
            if method == "GET":
                return self._json(200, _workspace_doc(load_by_id(self.server.root, ws_id)))
            if method == "DELETE":
                with self.server.write_lock(ws_id):
                    delete_workspace(self.server.root, ws_id)
                return self._json(200, {"deleted": ws_id})
            return self._error(405, "method_not_allowed", f"{method} not allowed here")
        if rest == "/prompt" and method == "POST":
            return self._prompt(ws_id)
        if rest == "/ingest" and method == "POST":
            return self._ingest(ws_id)
        if rest == "/edits" and method == "POST":
            return self._edits(ws_id)
        if rest == "/export" and method == "GET":
            return self._export(ws_id, query)
        self._error(404, "not_found", f"no route for {method} /api/workspaces/{ws_id}{rest}")

    def _prompt(self, ws_id: str) -> None:
        body = self._read_body()
        scenario_id = str(body.get("scenario", ""))
        inputs = ScenarioInputs.from_json(body.get("inputs") or {})
        with self.server.write_lock(ws_id), workspace_lock(self.server.root, ws_id):
            workspace = load_by_id(self.server.root, ws_id)
            prompt = self.server.catalog.instantiate(scenario_id, inputs)
            _absorb_inputs(workspace, inputs)
            workspace.record_prompt(scenario_id, prompt)
            save(workspace, self.server.root)
        self._json(200, {"scenario": scenario_id, "prompt": prompt})

    def _ingest(self, ws_id: str) -> None:
        body = self._read_body()
        text = body.get("text", "")
        if not isinstance(text, str) or not text.strip():
            raise _BadRequest("field 'text' (the pasted response) is required")
        strategy = body.get("strategy", "replace")
        if strategy not in ("replace", "extend"):
            raise _BadRequest("field 'strategy' must be 'replace' or 'extend'")
        with self.server.write_lock(ws_id), workspace_lock(self.server.root, ws_id):
            workspace = load_by_id(self.server.root, ws_id)
            pre = snapshot_hash(workspace.comparison)
            parsed = parse_response(text)
            workspace.comparison = merge_ingest(workspace.comparison, parsed, strategy)
            post = snapshot_hash(workspace.comparison)
            workspace.record_ingest(parsed.warnings, pre, post, response_text=text)
            save(workspace, self.server.root)
        self._json(200, {
            "warnings": parsed.warnings,
            "workspace": _workspace_doc(workspace),
        })

    def _edits(self, ws_id: str) -> None:
        body = self._read_body()
        raw_edits = body.get("edits", [])
        if not isinstance(raw_edits, list):
            raise _BadRequest("field 'edits' must be a list")
        commands = [EditCommand.from_json(item) for item in raw_edits]
        base_hash = body.get("base_hash")
        with self.server.write_lock(ws_id), workspace_lock(self.server.root, ws_id):
            workspace = load_by_id(self.server.root, ws_id)
            current = snapshot_hash(workspace.comparison)
            if base_hash is not None and base_hash != current:
                raise StaleSnapshot(expected=current, got=str(base_hash))
            workspace.comparison = apply_edits(workspace.comparison, commands)
            save(workspace, self.server.root)
        self._json(200, {"applied": len(commands), "workspace": _workspace_doc(workspace)})

    def _export(self, ws_id: str, query: dict) -> None:
        flavor_arg = (query.get("flavor") or ["generic"])[0]
        flavor = _FLAVOR_ALIASES.get(flavor_arg)
        if flavor is None:
            raise _BadRequest(f"unknown export flavor {flavor_arg!r}")
        empty_cell = (query.get("empty_cell") or ["empty"])[0]
        if empty_cell == "na":
            empty_cell = "literal_na"
        crlf = (query.get("crlf") or ["0"])[0] in ("1", "true", "yes")
        metadata = None
        meta_arg = (query.get("meta") or [None])[0]
        if meta_arg:
            try:
                metadata = json.loads(meta_arg)
            except json.JSONDecodeError as exc:
                raise _BadRequest(f"'meta' query parameter is not valid JSON: {exc}") from exc
        workspace = load_by_id(self.server.root, ws_id)
        try:
            profile = ExportProfile(
                flavor=flavor,
                empty_cell_policy=empty_cell,
                line_ending="CRLF" if crlf else "LF",
                metadata=metadata,
            )
        except ValueError as exc:
            raise _BadRequest(str(exc)) from exc
        payload = export(workspace.comparison, profile)
        filename = export_filename(ws_id, flavor)
        self._send(
            200,
            payload,
            "text/csv; charset=utf-8",
            extra={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    # --- static assets ---

    def _static(self, path: str) -> None:
        static_dir = self.server.static_dir
        if static_dir is None or not static_dir.is_dir():
            return self._error(404, "not_found", "no web UI assets configured")
        relative = path.lstrip("/") or "index.html"
        target = (static_dir / relative).resolve()
        if not str(target).startswith(str(static_dir.resolve())):
            return self._error(404, "not_found", "no such asset")
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            # single-page app: unknown paths fall back to the shell
            target = static_dir / "index.html"
            if not target.is_file():
                return self._error(404, "not_found", "no such asset")
        content_type = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self._send(200, target.read_bytes(), content_type)


class _BadRequest(Exception):
    pass


def _workspace_doc(workspace: Workspace) -> dict:
    doc = workspace.to_document()
    doc["snapshot_hash"] = snapshot_hash(workspace.comparison)
    return doc


def _absorb_inputs(workspace: Workspace, inputs: ScenarioInputs) -> None:
    """Keep user-entered problem/contexts on the workspace for reuse."""
    if inputs.problem and not workspace.problem:
        workspace.problem = inputs.problem
    by_label = {c.label: i for i, c in enumerate(workspace.contexts)}
    for i, ctx in enumerate(inputs.contexts):
        label = ctx.label or f"Context {i + 1}"
        entry = StoredContext(label=label, body=ctx.body)
        if label in by_label:
            workspace.contexts[by_label[label]] = entry
        else:
            by_label[label] = len(workspace.contexts)
            workspace.contexts.append(entry)


def make_server(host: str = "127.0.0.1", port: int = 8765,
                root: Path | str | None = None,
                static_dir: Path | str | None = None) -> RaServer:
    from .store import default_root

    return RaServer((host, port), _Handler,
                    root=Path(root) if root else default_root(),
                    static_dir=Path(static_dir) if static_dir else None)


def serve_forever(host: str = "127.0.0.1", port: int = 8765,
                  root: Path | str | None = None,
                  static_dir: Path | str | None = None) -> None:
    server = make_server(host=host, port=port, root=root, static_dir=static_dir)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
