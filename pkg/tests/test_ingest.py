import pytest
from hypothesis import given, settings, strategies as st

from corpus_util import canonical_ingest, check_corpus_case, corpus_cases

from ra_forge.errors import NoUsableTable
from ra_forge.ingest import (
    classify_and_parse,
    extract_tables,
    parse_response,
    render_pipe_table,
    validate_dimension_name,
)


# --- extraction ---

def test_empty_text_yields_no_tables():
    assert extract_tables("") == []


def test_prose_only_yields_no_tables():
    assert extract_tables("Nothing tabular here.\nJust words.\n") == []


def test_basic_extraction_shape(gpt_response):
    tables = extract_tables(gpt_response)
    assert len(tables) == 2
    comparison, definitions = tables
    assert comparison.header == ["Dimension", "GPT-1", "GPT-2", "GPT-3"]
    assert len(comparison.rows) == 7
    assert definitions.header == ["Dimension", "Description"]
    assert len(definitions.rows) == 7


def test_line_span_points_at_source_lines(gpt_response):
    lines = gpt_response.splitlines()
    table = extract_tables(gpt_response)[0]
    start, end = table.line_span
    assert "| Dimension |" in lines[start - 1]
    assert "|" in lines[end - 1]


def test_every_extracted_table_is_rectangular(gpt_response):
    for table in extract_tables(gpt_response):
        for row in table.rows:
            assert len(row) == len(table.header)


def test_missing_outer_pipes_tolerated():
    text = "Dimension | A\n--- | ---\nsize | 1\n"
    (table,) = extract_tables(text)
    assert table.header == ["Dimension", "A"]
    assert table.rows == [["size", "1"]]


def test_long_rows_truncate_with_warning():
    text = "| Dimension | A |\n| --- | --- |\n| size | 1 | 2 | 3 |\n"
    (table,) = extract_tables(text)
    assert table.rows == [["size", "1"]]
    assert any("extra cells dropped" in w for w in table.warnings)


def test_short_rows_padded_silently():
    text = "| Dimension | A | B |\n| --- | --- | --- |\n| size | 1 |\n"
    (table,) = extract_tables(text)
    assert table.rows == [["size", "1", ""]]
    assert table.warnings == []


def test_single_pipe_line_is_not_a_table():
    assert extract_tables("a | b\n") == []


def test_escaped_pipes_stay_in_cells():
    text = "| Dimension | A |\n| --- | --- |\n| x | a \\| b |\n"
    (table,) = extract_tables(text)
    assert table.rows[0][1] == "a | b"


# --- canonical serialization round trip ---

def test_render_pipe_table_round_trips(gpt_comparison):
    header = ["Dimension"] + [c.label for c in gpt_comparison.columns]
    rows = [[d.name] + gpt_comparison.row(d.key) for d in gpt_comparison.dimensions]
    rendered = render_pipe_table(header, rows)
    (table,) = extract_tables(rendered)
    assert table.header == header
    assert table.rows == rows


_cell_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc"), blacklist_characters="*`"),
    max_size=12,
).map(lambda s: " ".join(s.split())).filter(lambda s: s != "---" and not set(s) <= {"-", ":"} or s == "")


@settings(max_examples=80, deadline=None)
@given(
    header=st.lists(_cell_text.filter(bool), min_size=1, max_size=5),
    body=st.data(),
)
def test_extraction_idempotent_on_canonical_form(header, body):
    width = len(header)
    rows = body.draw(
        st.lists(st.lists(_cell_text, min_size=width, max_size=width), min_size=0, max_size=5)
    )
    rendered = render_pipe_table(header, rows)
    (table,) = extract_tables(rendered)
    assert table.header == header
    assert table.rows == rows


@settings(max_examples=150, deadline=None)
@given(st.text(max_size=400))
def test_extraction_is_total(text):
    for table in extract_tables(text):
        assert table.header
        for row in table.rows:
            assert len(row) == len(table.header)


# --- classification ---

def test_gpt_fixture_classification(gpt_response):
    parsed = parse_response(gpt_response)
    assert parsed.comparison_table is not None
    assert parsed.definitions_table is not None
    assert [d.name for d in parsed.dimensions] == [
        "parameters",
        "architecture",
        "pre-training data",
        "model size",
        "vocabulary size",
        "layer configuration",
        "optimizer",
    ]
    assert [c.label for c in parsed.columns] == ["GPT-1", "GPT-2", "GPT-3"]
    assert parsed.columns[1].cells["pre-training data"] == 'WebText (uses "BPE", 40GB)'
    assert parsed.dimensions[0].definition == "Total count of trainable weights in the model."
    assert parsed.warnings == []


def test_definitions_only_response():
    text = "| Research Dimension | Description |\n| --- | --- |\n| model size | Count. |\n"
    parsed = parse_response(text)
    assert parsed.comparison_table is None
    assert parsed.definitions_table is not None
    assert parsed.columns == []
    assert [d.name for d in parsed.dimensions] == ["model size"]


def test_no_tables_raises():
    with pytest.raises(NoUsableTable):
        classify_and_parse([])


def test_classification_ignores_surrounding_prose(gpt_response):
    base = canonical_ingest(parse_response(gpt_response))
    shuffled = "Intro paragraph.\n\n" + gpt_response.replace(
        "Let me know if you would like any adjustments.", "Different outro."
    ) + "\nPostscript line.\n"
    assert canonical_ingest(parse_response(shuffled)) == base


# --- fixture corpus ---

@pytest.mark.parametrize("case_id,response_path,expected_path",
                         corpus_cases(), ids=[c[0] for c in corpus_cases()])
def test_corpus_case(case_id, response_path, expected_path):
    text = response_path.read_text(encoding="utf-8")
    check_corpus_case(text, expected_path)
    # line endings must not change the outcome
    check_corpus_case(text.replace("\n", "\r\n"), expected_path)


def test_corpus_is_large_enough():
    assert len(corpus_cases()) >= 20


# --- dimension-name rule ---

def test_paper_style_names_pass():
    for name in ("pre-training architecture", "optimizer", "impact on species"):
        check = validate_dimension_name(name)
        assert check.ok


def test_empty_name_violates():
    check = validate_dimension_name("")
    assert not check.ok
    assert check.token_count == 0


def test_six_token_name_violates():
    check = validate_dimension_name("impact of climate change on species")
    assert not check.ok
    assert check.token_count == 6


def test_hyphenated_words_are_one_token():
    assert validate_dimension_name("pre-training data").token_count == 2


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=40))
def test_token_count_matches_whitespace_split_oracle(name):
    tokens = [t for t in name.split() if t]
    check = validate_dimension_name(name)
    assert check.token_count == len(tokens)
    assert check.ok == (1 <= len(tokens) <= 3)
