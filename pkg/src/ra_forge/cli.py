"""Command-line surface for the full prompt -> ingest -> edit -> export loop.

Exit codes: 0 success, 2 usage error (bad flags, missing/short slots - the
error message includes the scenario's input schema), 1 operational error
(I/O, parse, gateway). Read commands accept ``--json`` for machine output.
"""

from __future__ import annotations

import argparse
import json
import shutil
import subprocess
import sys
from pathlib import Path

from . import __version__, api, gateway, store
from .catalog import ContextInput, DimensionInput, ScenarioInputs, default_catalog
from .errors import USAGE_CODES, IoError, RaError
from .export import (
    ExportProfile,
    FLAVOR_DEFINITIONS,
    FLAVOR_GENERIC,
    FLAVOR_ORKG,
    export,
    export_filename,
)
from .ingest import parse_response, render_pipe_table
from .model import EditCommand, apply_edit, merge_ingest, snapshot_hash

_FLAVORS = {
    "generic": FLAVOR_GENERIC,
    "definitions": FLAVOR_DEFINITIONS,
    "orkg": FLAVOR_ORKG,
}

_EMPTY_CELL = {"empty": "empty", "na": "literal_na"}


def main(argv: list[str] | None = None) -> int:
    try:
        return _run(argv)
    except SystemExit as exc:  # argparse usage errors / --help
        code = exc.code
        return code if isinstance(code, int) else (0 if code is None else 2)


def _run(argv: list[str] | None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "handler"):
        parser.print_help()
        return 2
    try:
        return args.handler(args)
    except RaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.code in USAGE_CODES:
            scenario_id = getattr(args, "scenario", None)
            if scenario_id:
                _print_slot_schema(scenario_id, file=sys.stderr)
            return 2
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ra-forge",
        description="Local-first research assistant workbench: generate research-task "
        "prompts, ingest pasted chat responses, edit the comparison, export CSV.",
    )
    parser.add_argument("--version", action="version", version=f"ra-forge {__version__}")
    sub = parser.add_subparsers(dest="command")

    # tasks
    p_tasks = sub.add_parser("tasks", help="inspect the scenario catalog")
    tasks_sub = p_tasks.add_subparsers(dest="tasks_command")
    p_tasks_list = tasks_sub.add_parser("list", help="list the 11 scenarios")
    p_tasks_list.add_argument("--json", action="store_true")
    p_tasks_list.set_defaults(handler=_cmd_tasks_list)

    # ws
    p_ws = sub.add_parser("ws", help="manage workspaces")
    ws_sub = p_ws.add_subparsers(dest="ws_command")
    p_ws_new = ws_sub.add_parser("new", help="create a workspace")
    p_ws_new.add_argument("id")
    p_ws_new.add_argument("--problem", default="")
    _add_root(p_ws_new)
    p_ws_new.set_defaults(handler=_cmd_ws_new)
    p_ws_show = ws_sub.add_parser("show", help="show a workspace")
    p_ws_show.add_argument("id")
    p_ws_show.add_argument("--json", action="store_true")
    _add_root(p_ws_show)
    p_ws_show.set_defaults(handler=_cmd_ws_show)
    p_ws_list = ws_sub.add_parser("list", help="list workspaces")
    p_ws_list.add_argument("--json", action="store_true")
    _add_root(p_ws_list)
    p_ws_list.set_defaults(handler=_cmd_ws_list)

    # prompt
    p_prompt = sub.add_parser("prompt", help="instantiate a scenario prompt")
    _add_scenario_inputs(p_prompt)
    p_prompt.add_argument("--copy", action="store_true", help="also copy to clipboard")
    p_prompt.add_argument("--json", action="store_true")
    p_prompt.set_defaults(handler=_cmd_prompt)

    # ingest
    p_ingest = sub.add_parser("ingest", help="parse a pasted chat response into the comparison")
    p_ingest.add_argument("response", nargs="?", default="-",
                          help="response file, or - for stdin (default)")
    p_ingest.add_argument("--ws", required=True, dest="ws_id")
    p_ingest.add_argument("--strategy", choices=("replace", "extend"), default="replace")
    p_ingest.add_argument("--json", action="store_true")
    _add_root(p_ingest)
    p_ingest.set_defaults(handler=_cmd_ingest)

    # edit
    p_edit = sub.add_parser("edit", help="post-edit the comparison")
    p_edit.add_argument("--ws", required=True, dest="ws_id")
    _add_root(p_edit)
    edit_sub = p_edit.add_subparsers(dest="edit_command")

    def edit_cmd(name, *params, **options):
        p = edit_sub.add_parser(name)
        for param in params:
            p.add_argument(param)
        for flag, default in options.items():
            p.add_argument(f"--{flag}", default=default)
        p.set_defaults(handler=_cmd_edit, edit_kind=name)
        return p

    edit_cmd("add-dimension", "name", definition="")
    edit_cmd("delete-dimension", "name")
    edit_cmd("rename-dimension", "name", "new_name")
    edit_cmd("set-definition", "name", "definition")
    edit_cmd("add-column", "label", source=None)
    edit_cmd("delete-column", "label")
    edit_cmd("rename-column", "label", "new_label")
    edit_cmd("set-cell", "name", "label", "value")

    # export
    p_export = sub.add_parser("export", help="export CSV")
    p_export.add_argument("--ws", required=True, dest="ws_id")
    p_export.add_argument("--flavor", choices=sorted(_FLAVORS), required=True)
    p_export.add_argument("-o", "--output", default=None,
                          help="output file; - for stdout (default: <ws>-<flavor>.csv)")
    p_export.add_argument("--meta", default=None,
                          help="JSON file with per-column {title, doi, year} for the orkg flavor")
    p_export.add_argument("--empty-cell", choices=sorted(_EMPTY_CELL), default="empty")
    p_export.add_argument("--crlf", action="store_true", help="use CRLF line endings")
    _add_root(p_export)
    p_export.set_defaults(handler=_cmd_export)

    # chat
    p_chat = sub.add_parser("chat", help="send the prompt to the configured endpoint and ingest the reply")
    _add_scenario_inputs(p_chat)
    p_chat.add_argument("--strategy", choices=("replace", "extend"), default="replace")
    p_chat.add_argument("--json", action="store_true")
    p_chat.set_defaults(handler=_cmd_chat)

    # serve
    p_serve = sub.add_parser("serve", help="start the local HTTP service and web UI")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--static", default=None, help="directory of web UI assets")
    _add_root(p_serve)
    p_serve.set_defaults(handler=_cmd_serve)

    return parser


def _add_root(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--root", default=None, help="workspace directory (default: RA_HOME)")


def _add_scenario_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scenario", help="scenario id (see 'tasks list')")
    parser.add_argument("--problem", default=None)
    parser.add_argument("--context", action="append", default=[], metavar="[LABEL=]FILE",
                        help="context file; repeatable")
    parser.add_argument("--dimensions", default=None, metavar="FILE",
                        help="dimensions file (JSON object or 'name: definition' lines)")
    parser.add_argument("--entity", action="append", default=[], help="entity name; repeatable")
    parser.add_argument("--keyword", action="append", default=[], help="search term; repeatable")
    parser.add_argument("--call-objectives", default=None, metavar="TEXT|@FILE",
                        dest="call_objectives")
    parser.add_argument("--ws", default=None, dest="ws_id",
                        help="workspace to log to and pull default inputs from")
    _add_root(parser)


def _root(args) -> Path:
    return Path(args.root) if args.root else store.default_root()


def _print_json(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False, indent=2))


# --- handlers ---

def _cmd_tasks_list(args) -> int:
    scenarios = default_catalog().list_scenarios()
    if args.json:
        _print_json([s.to_json() for s in scenarios])
    else:
        for s in scenarios:
            print(f"{s.id:32} {s.group:4} {s.title}")
    return 0


def _cmd_ws_new(args) -> int:
    root = _root(args)
    path = store.workspace_path(root, args.id)
    if path.exists():
        raise IoError(f"workspace {args.id!r} already exists at {path}")
    workspace = store.new_workspace(args.id, problem=args.problem)
    store.save(workspace, root)
    print(f"created workspace {args.id} at {path}")
    return 0


def _cmd_ws_show(args) -> int:
    workspace = store.load_by_id(_root(args), args.id)
    if args.json:
        doc = workspace.to_document()
        doc["snapshot_hash"] = snapshot_hash(workspace.comparison)
        _print_json(doc)
        return 0
    comparison = workspace.comparison
    print(f"workspace: {workspace.id}")
    print(f"problem: {workspace.problem}")
    print(f"contexts: {len(workspace.contexts)}")
    print(f"dimensions: {len(comparison.dimensions)} | columns: {len(comparison.columns)}")
    if comparison.dimensions:
        print()
        print(render_pipe_table(
            ["Dimension"] + [c.label for c in comparison.columns],
            [[d.name] + comparison.row(d.key) for d in comparison.dimensions],
        ))
        print()
        print(render_pipe_table(
            ["Dimension", "Definition"],
            [[d.name, d.definition] for d in comparison.dimensions],
        ))
    print(f"log entries: {len(workspace.log)}")
    return 0


def _cmd_ws_list(args) -> int:
    ids = store.list_ids(_root(args))
    if args.json:
        _print_json(ids)
    else:
        for ws_id in ids:
            print(ws_id)
    return 0


def _collect_inputs(args, workspace: store.Workspace | None) -> ScenarioInputs:
    """Build scenario inputs from flags, falling back to workspace state."""
    contexts = []
    context_sources = []
    for spec in args.context:
        label, path = _split_context_arg(spec)
        body = _read_text_arg(path)
        contexts.append(ContextInput(label, body.strip()))
        context_sources.append(path)
    dimensions = []
    if args.dimensions:
        dimensions = _read_dimensions_file(args.dimensions)

    problem = args.problem
    if workspace is not None:
        if problem is None and workspace.problem:
            problem = workspace.problem
        if not contexts and workspace.contexts:
            contexts = [ContextInput(c.label or None, c.body) for c in workspace.contexts]
        if not dimensions and workspace.comparison.dimensions:
            dimensions = [
                DimensionInput(d.name, d.definition) for d in workspace.comparison.dimensions
            ]

    call_objectives = args.call_objectives
    if call_objectives and call_objectives.startswith("@"):
        call_objectives = _read_text_arg(call_objectives[1:]).strip()

    inputs = ScenarioInputs(
        problem=problem,
        contexts=contexts,
        entities=list(args.entity),
        dimensions=dimensions,
        call_objectives=call_objectives,
        keywords=list(args.keyword),
    )
    inputs._context_sources = context_sources  # used when storing into a workspace
    return inputs


def _split_context_arg(spec: str) -> tuple[str | None, str]:
    if "=" in spec:
        label, _, path = spec.partition("=")
        if Path(path).is_file():
            return (label or None), path
    return None, spec


def _read_text_arg(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _read_dimensions_file(path: str) -> list[DimensionInput]:
    text = _read_text_arg(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    dims: list[DimensionInput] = []
    if isinstance(data, dict):
        for name, definition in data.items():
            dims.append(DimensionInput(str(name), str(definition or "")))
        return dims
    if isinstance(data, list):
        for item in data:
            if isinstance(item, str):
                dims.append(DimensionInput(item, ""))
            elif isinstance(item, dict):
                dims.append(DimensionInput(str(item.get("name", "")), str(item.get("definition", ""))))
            else:
                name, definition = (list(item) + [""])[:2]
                dims.append(DimensionInput(str(name), str(definition or "")))
        return dims
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, definition = line.partition(":")
        dims.append(DimensionInput(name.strip(), definition.strip() if sep else ""))
    return dims


def _store_contexts(workspace: store.Workspace, inputs: ScenarioInputs) -> None:
    sources = getattr(inputs, "_context_sources", [])
    if not sources:
        return
    by_label = {c.label: i for i, c in enumerate(workspace.contexts)}
    for i, ctx in enumerate(inputs.contexts):
        label = ctx.label or f"Context {i + 1}"
        entry = store.StoredContext(label=label, body=ctx.body,
                                    source=sources[i] if i < len(sources) else None)
        if label in by_label:
            workspace.contexts[by_label[label]] = entry
        else:
            by_label[label] = len(workspace.contexts)
            workspace.contexts.append(entry)


def _cmd_prompt(args) -> int:
    catalog = default_catalog()
    root = _root(args)
    workspace = store.load_by_id(root, args.ws_id) if args.ws_id else None
    inputs = _collect_inputs(args, workspace)
    prompt = catalog.instantiate(args.scenario, inputs)
    if workspace is not None:
        with store.workspace_lock(root, workspace.id):
            workspace = store.load_by_id(root, workspace.id)
            _store_contexts(workspace, inputs)
            if inputs.problem and not workspace.problem:
                workspace.problem = inputs.problem
            workspace.record_prompt(args.scenario, prompt)
            store.save(workspace, root)
    copied = False
    if args.copy:
        copied = _copy_to_clipboard(prompt)
        if not copied:
            print("note: no clipboard tool available; prompt printed only", file=sys.stderr)
    if args.json:
        _print_json({"scenario": args.scenario, "prompt": prompt, "copied": copied})
    else:
        print(prompt)
    return 0


def _copy_to_clipboard(text: str) -> bool:
    candidates = (
        ["wl-copy"],
        ["xclip", "-selection", "clipboard"],
        ["xsel", "--clipboard", "--input"],
        ["pbcopy"],
        ["clip.exe"],
    )
    for cmd in candidates:
        if shutil.which(cmd[0]):
            try:
                subprocess.run(cmd, input=text.encode("utf-8"), check=True, timeout=5)
                return True
            except (OSError, subprocess.SubprocessError):
                continue
    return False


def _cmd_ingest(args) -> int:
    text = _read_text_arg(args.response)
    root = _root(args)
    with store.workspace_txn(root, args.ws_id) as workspace:
        pre = snapshot_hash(workspace.comparison)
        parsed = parse_response(text)
        workspace.comparison = merge_ingest(workspace.comparison, parsed, args.strategy)
        post = snapshot_hash(workspace.comparison)
        workspace.record_ingest(parsed.warnings, pre, post, response_text=text)
        summary = {
            "dimensions": len(workspace.comparison.dimensions),
            "columns": len(workspace.comparison.columns),
            "warnings": parsed.warnings,
            "snapshot_hash": post,
        }
    if args.json:
        _print_json(summary)
    else:
        print(
            f"ingested: {summary['dimensions']} dimensions x {summary['columns']} columns "
            f"({len(summary['warnings'])} warnings)"
        )
        for warning in summary["warnings"]:
            print(f"warning: {warning}", file=sys.stderr)
    return 0


def _cmd_edit(args) -> int:
    kind = args.edit_kind.replace("-", "_")
    doc = {"kind": kind}
    for attr in ("name", "new_name", "definition", "label", "new_label", "value"):
        if hasattr(args, attr):
            doc[attr] = getattr(args, attr)
    if getattr(args, "source", None) is not None:
        doc["source_ref"] = args.source
    cmd = EditCommand.from_json(doc)
    with store.workspace_txn(_root(args), args.ws_id) as workspace:
        workspace.comparison = apply_edit(workspace.comparison, cmd)
        post = snapshot_hash(workspace.comparison)
    print(f"applied {args.edit_kind}; snapshot {post[:12]}")
    return 0


def _cmd_export(args) -> int:
    workspace = store.load_by_id(_root(args), args.ws_id)
    flavor = _FLAVORS[args.flavor]
    metadata = None
    if args.meta:
        metadata = json.loads(_read_text_arg(args.meta))
    profile = ExportProfile(
        flavor=flavor,
        empty_cell_policy=_EMPTY_CELL[args.empty_cell],
        line_ending="CRLF" if args.crlf else "LF",
        metadata=metadata,
    )
    payload = export(workspace.comparison, profile)
    target = args.output or export_filename(workspace.id, flavor)
    if target == "-":
        sys.stdout.buffer.write(payload)
    else:
        Path(target).write_bytes(payload)
        print(f"wrote {target} ({len(payload)} bytes)")
    return 0


def _cmd_chat(args) -> int:
    catalog = default_catalog()
    root = _root(args)
    if not args.ws_id:
        raise IoError("chat requires --ws to store the response")
    workspace = store.load_by_id(root, args.ws_id)
    inputs = _collect_inputs(args, workspace)
    prompt = catalog.instantiate(args.scenario, inputs)
    config = gateway.GatewayConfig.from_env()
    result = gateway.complete(prompt, config)
    with store.workspace_lock(root, workspace.id):
        workspace = store.load_by_id(root, workspace.id)
        _store_contexts(workspace, inputs)
        pre = snapshot_hash(workspace.comparison)
        parsed = parse_response(result.text)
        workspace.comparison = merge_ingest(workspace.comparison, parsed, args.strategy)
        post = snapshot_hash(workspace.comparison)
        workspace.record_ingest(
            parsed.warnings, pre, post,
            response_text=result.text,
            scenario_id=args.scenario,
            prompt_text=prompt,
        )
        store.save(workspace, root)
    if args.json:
        _print_json({
            "scenario": args.scenario,
            "dimensions": len(workspace.comparison.dimensions),
            "columns": len(workspace.comparison.columns),
            "warnings": parsed.warnings,
            "usage": result.usage,
        })
    else:
        print(
            f"chat round trip complete: {len(workspace.comparison.dimensions)} dimensions x "
            f"{len(workspace.comparison.columns)} columns ({len(parsed.warnings)} warnings)"
        )
    return 0


def _cmd_serve(args) -> int:
    root = _root(args)
    static = Path(args.static) if args.static else None
    print(f"serving on http://{args.host}:{args.port} (workspaces: {root})")
    api.serve_forever(host=args.host, port=args.port, root=root, static_dir=static)
    return 0


def _print_slot_schema(scenario_id: str, file=sys.stderr) -> None:
    try:
        scenario = default_catalog().get(scenario_id)
    except RaError:
        ids = ", ".join(s.id for s in default_catalog().list_scenarios())
        print(f"known scenarios: {ids}", file=file)
        return
    print(f"inputs for {scenario.id}:", file=file)
    for spec in scenario.slots:
        need = "required" if spec.required else "optional"
        if spec.multiplicity == "many":
            count = f"at least {spec.min_count} value(s)" if spec.min_count else "any number of values"
        else:
            count = "one value"
        print(f"  {spec.name:16} {need:9} {count}", file=file)


if __name__ == "__main__":
    sys.exit(main())
