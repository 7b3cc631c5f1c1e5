"""Acceptance suite: one test per release criterion.

Each test is a self-contained check of a shipping requirement, sized to its
stated budget; the terminal summary (see conftest) prints one PASS/FAIL line
per criterion. Everything runs locally - the only network activity is a
loopback stub.
"""

import json
import os
import random
import re
import threading
import urllib.parse
import urllib.request

import pytest

from corpus_util import (
    GOLDEN,
    GPT_ORKG_METADATA,
    GPT_PROBLEM,
    RESPONSES,
    corpus_cases,
    check_corpus_case,
    random_comparison,
    random_workspace,
)
from refmodel import run_random_session

from ra_forge import store
from ra_forge.api import make_server
from ra_forge.catalog import ContextInput, DimensionInput, ScenarioInputs, default_catalog
from ra_forge.cli import main
from ra_forge.errors import IoError
from ra_forge.export import ExportProfile, ORKG_RESERVED_HEADER, export_comparison, export_orkg
from ra_forge.ingest import validate_dimension_name
from ra_forge.model import snapshot_hash


# --- criterion: scenario completeness ---

def test_scenario_catalog_complete(capsys):
    """`tasks list` yields exactly 11 scenarios, 5 of them comparisons."""
    assert main(["tasks", "list"]) == 0
    plain = capsys.readouterr().out
    assert len(plain.splitlines()) == 11

    assert main(["tasks", "list", "--json"]) == 0
    tasks = json.loads(capsys.readouterr().out)
    assert len(tasks) == 11
    assert sum(1 for t in tasks if t["group"] == "RC") == 5
    assert [t["group"] for t in tasks[:5]] == ["RC"] * 5
    assert {t["group"] for t in tasks} == {"RC", "BI", "GA", "BP", "PR", "KQS"}


# --- criterion: template fidelity ---

def test_template_fidelity_bytes():
    """The three stock templates instantiate byte-identically to golden files."""
    catalog = default_catalog()
    cases = {
        "compare-contexts": ScenarioInputs(
            problem=GPT_PROBLEM,
            contexts=[
                ContextInput(None, "GPT-1 uses a 12-layer decoder-only transformer trained on BooksCorpus."),
                ContextInput(None, "GPT-2 scales to 1.5B parameters trained on WebText."),
                ContextInput(None, "GPT-3 has 175B parameters and shows strong few-shot behaviour."),
            ],
        ),
        "research-ideas": ScenarioInputs(
            problem=GPT_PROBLEM,
            dimensions=[
                DimensionInput("model size", "Depth of the network measured in transformer layers."),
                DimensionInput("fine-tuning", "Adaptation procedure applied after pre-training."),
            ],
        ),
        "project-proposal": ScenarioInputs(
            problem=GPT_PROBLEM,
            call_objectives="Advance trustworthy language technologies for the public sector.",
        ),
    }
    for scenario_id, inputs in cases.items():
        prompt = catalog.instantiate(scenario_id, inputs)
        golden = (GOLDEN / f"prompt-{scenario_id}.txt").read_bytes()
        assert prompt.encode("utf-8") + b"\n" == golden, scenario_id


# --- criterion: parser corpus ---

def test_parser_corpus_all_match():
    """Every corpus response parses to its hand-written canonical value."""
    cases = corpus_cases()
    assert len(cases) >= 20
    for _case_id, response_path, expected_path in cases:
        text = response_path.read_text(encoding="utf-8")
        check_corpus_case(text, expected_path)
        check_corpus_case(text.replace("\n", "\r\n"), expected_path)


# --- criterion: dimension-name rule ---

TABLE1_LLM_DIMENSIONS = [
    # transformer-model catalog
    "parameters", "architecture", "pre-training data", "model size",
    "vocabulary size", "layer configuration", "optimizer",
    # infectious-disease reproduction estimates
    "R0 estimate", "incubation period", "zoonotic origin",
    # climate-change species impact
    "impact on species", "geographical range", "adaptation potential",
    "biodiversity impact",
]


def test_dimension_name_rule_and_tokenizer_oracle():
    """All reference dimension strings validate; tokenizer matches the oracle on fuzz."""
    for name in TABLE1_LLM_DIMENSIONS:
        check = validate_dimension_name(name)
        assert check.ok, (name, check)

    pieces = ["word", "pre-training", "a", "Bb", "λx", "R0", "", " ", "  ", "\t", "\n", "x-y-z"]
    rng = random.Random(98531)
    for _ in range(10_000):
        name = "".join(rng.choice(pieces) for _ in range(rng.randrange(8)))
        oracle_tokens = len(re.findall(r"\S+", name))  # brute-force whitespace split
        check = validate_dimension_name(name)
        assert check.token_count == oracle_tokens, repr(name)
        assert check.ok == (1 <= oracle_tokens <= 3), repr(name)


# --- criterion: edit-model property suite ---

def test_edit_model_random_sessions():
    """1,000 random valid edit sequences agree with the reference model at every step."""
    rng = random.Random(20260808)
    total = 0
    for i in range(1_000):
        length = rng.randint(1, 200)
        total += run_random_session(seed=rng.randrange(2 ** 31), length=length)
    assert total >= 1_000


# --- criterion: export round trip ---

def test_export_round_trip_500_random_comparisons():
    """Generic CSV reproduces every cell byte-for-byte under an independent reader."""
    import csv
    import io

    rng = random.Random(424242)
    for i in range(500):
        comparison = random_comparison(rng)
        line_ending = "CRLF" if i % 3 == 0 else "LF"
        payload = export_comparison(comparison, ExportProfile.generic(line_ending=line_ending))
        rows = list(csv.reader(io.StringIO(payload.decode("utf-8"), newline="")))
        # row structure survives arbitrary cell content (commas, quotes, newlines)
        assert len(rows) == 1 + len(comparison.dimensions)
        assert rows[0] == ["Dimension"] + [c.label for c in comparison.columns]
        for row, dim in zip(rows[1:], comparison.dimensions):
            assert row == [dim.name] + comparison.row(dim.key)


# --- criterion: knowledge-graph export golden ---

def test_orkg_export_golden(gpt_comparison):
    """Import header leads with the reserved columns; fixture bytes are frozen."""
    payload = export_orkg(gpt_comparison, ExportProfile.orkg(GPT_ORKG_METADATA))
    text = payload.decode("utf-8")
    assert text.startswith("paper:title,paper:doi,paper:publication_year,contribution:research_problem,")
    assert list(ORKG_RESERVED_HEADER) == [
        "paper:title", "paper:doi", "paper:publication_year", "contribution:research_problem",
    ]
    assert payload == (GOLDEN / "gpt-orkg-import.csv").read_bytes()


# --- criterion: persistence round trip ---

def test_persistence_round_trip_500_workspaces(tmp_path, monkeypatch):
    """save -> load is the identity for 500 generated workspaces; crashes lose nothing."""
    rng = random.Random(777)
    for i in range(500):
        ws = random_workspace(rng, i)
        store.save(ws, tmp_path)
        assert store.load_by_id(tmp_path, ws.id) == ws

    victim = store.load_by_id(tmp_path, "ws-0000")
    path = store.workspace_path(tmp_path, victim.id)
    before = path.read_bytes()

    def explode(src, dst):
        raise OSError("simulated crash")

    monkeypatch.setattr(os, "replace", explode)
    victim.problem = "lost update"
    with pytest.raises(IoError):
        store.save(victim, tmp_path)
    monkeypatch.undo()
    assert path.read_bytes() == before  # prior file intact


# --- criterion: end-to-end golden, CLI and HTTP byte-identical ---

def _api_call(srv, method, path, body=None):
    host, port = srv.server_address
    data = json.dumps(body).encode("utf-8") if body is not None else None
    request = urllib.request.Request(f"http://{host}:{port}{path}", data=data, method=method)
    if data is not None:
        request.add_header("Content-Type", "application/json")
    with urllib.request.urlopen(request, timeout=10) as response:
        return response.read()


def test_end_to_end_golden_cli_and_api(tmp_path, capsys):
    """new ws -> prompt -> ingest -> delete a dimension -> export == golden, on both surfaces."""
    response_text = (RESPONSES / "gpt_fixture.md").read_text(encoding="utf-8")
    ctx1 = tmp_path / "gpt1.txt"
    ctx2 = tmp_path / "gpt2.txt"
    ctx1.write_text("GPT-1 uses a 12-layer decoder-only transformer.", encoding="utf-8")
    ctx2.write_text("GPT-2 scales to 1.5B parameters.", encoding="utf-8")

    # CLI session
    cli_root = tmp_path / "cli-root"
    response_file = tmp_path / "response.md"
    response_file.write_text(response_text, encoding="utf-8")
    out_csv = tmp_path / "cli.csv"
    assert main(["ws", "new", "gpt-study", "--problem", GPT_PROBLEM, "--root", str(cli_root)]) == 0
    assert main(["prompt", "compare-contexts", "--ws", "gpt-study", "--root", str(cli_root),
                 "--context", str(ctx1), "--context", str(ctx2)]) == 0
    assert main(["ingest", str(response_file), "--ws", "gpt-study", "--root", str(cli_root)]) == 0
    assert main(["edit", "--ws", "gpt-study", "--root", str(cli_root),
                 "delete-dimension", "optimizer"]) == 0
    assert main(["export", "--ws", "gpt-study", "--root", str(cli_root),
                 "--flavor", "generic", "-o", str(out_csv)]) == 0
    capsys.readouterr()
    cli_bytes = out_csv.read_bytes()
    assert cli_bytes == (GOLDEN / "gpt-e2e-comparison.csv").read_bytes()

    # identical session over HTTP
    srv = make_server(host="127.0.0.1", port=0, root=tmp_path / "api-root")
    thread = threading.Thread(target=lambda: srv.serve_forever(poll_interval=0.02), daemon=True)
    thread.start()
    try:
        _api_call(srv, "POST", "/api/workspaces", {"id": "gpt-study", "problem": GPT_PROBLEM})
        _api_call(srv, "POST", "/api/workspaces/gpt-study/prompt", {
            "scenario": "compare-contexts",
            "inputs": {
                "problem": GPT_PROBLEM,
                "contexts": [
                    {"body": ctx1.read_text(encoding="utf-8").strip()},
                    {"body": ctx2.read_text(encoding="utf-8").strip()},
                ],
            },
        })
        _api_call(srv, "POST", "/api/workspaces/gpt-study/ingest", {"text": response_text})
        _api_call(srv, "POST", "/api/workspaces/gpt-study/edits",
                  {"edits": [{"kind": "delete_dimension", "name": "optimizer"}]})
        api_bytes = _api_call(srv, "GET", "/api/workspaces/gpt-study/export?flavor=generic")
    finally:
        srv.shutdown()
        srv.server_close()

    assert api_bytes == cli_bytes
    cli_ws = store.load_by_id(cli_root, "gpt-study")
    api_ws = store.load_by_id(tmp_path / "api-root", "gpt-study")
    assert snapshot_hash(cli_ws.comparison) == snapshot_hash(api_ws.comparison)
