"""Extract and classify pipe-markdown tables from pasted chat responses.

Extraction is total: any text yields a (possibly empty) list of tables, never
an error. The parser is deliberately tolerant - missing outer pipes, ragged
rows, separator rows anywhere, emphasis-decorated headers, tables inside code
fences - because the contract is assist-then-curate: keep the data, attach a
warning, and let the human fix it in the editor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import NoUsableTable
from .model import dimension_key, validate_dimension_name

__all__ = [
    "RawTable",
    "ParsedIngest",
    "IngestDimension",
    "IngestColumn",
    "extract_tables",
    "classify_and_parse",
    "parse_response",
    "render_pipe_table",
    "validate_dimension_name",
]

_UNESCAPED_PIPE = re.compile(r"(?<!\\)\|")
_SEPARATOR_CELL = re.compile(r":?-+:?$")
_HEADER_DECORATION = re.compile(r"^[*`]+|[*`]+$")

_DIMENSION_HEADER = re.compile(r"dimension|propert", re.IGNORECASE)
_DEFINITION_HEADER = re.compile(r"definition|description", re.IGNORECASE)


@dataclass
class RawTable:
    """One extracted table, normalized to a rectangular cell grid."""

    header: list[str]
    rows: list[list[str]]
    line_span: tuple[int, int]  # 1-based inclusive line numbers in the source
    warnings: list[str] = field(default_factory=list)

    @property
    def width(self) -> int:
        return len(self.header)


class IngestDimension(NamedTuple):
    name: str
    definition: str


class IngestColumn(NamedTuple):
    label: str
    cells: dict  # dimension key -> cell text


@dataclass
class ParsedIngest:
    """Classified ingest result: which tables were what, plus linked data."""

    comparison_table: RawTable | None
    definitions_table: RawTable | None
    dimensions: list[IngestDimension]
    columns: list[IngestColumn]
    warnings: list[str]


def _split_cells(line: str) -> list[str]:
    s = line.strip()
    if s.startswith("|"):
        s = s[1:]
    if s.endswith("|") and not s.endswith("\\|"):
        s = s[:-1]
    return [part.replace("\\|", "|").strip() for part in _UNESCAPED_PIPE.split(s)]


def _is_rowish(line: str) -> bool:
    if not _UNESCAPED_PIPE.search(line):
        return False
    return line.strip().startswith("|") or len(_split_cells(line)) >= 2


def _is_separator(cells: list[str]) -> bool:
    return bool(cells) and all(_SEPARATOR_CELL.fullmatch(c) for c in cells)


def _strip_header_decoration(cell: str) -> str:
    return _HEADER_DECORATION.sub("", cell).strip()


def extract_tables(raw_text: str) -> list[RawTable]:
    """Find every maximal contiguous pipe table, in document order."""
    lines = raw_text.splitlines()
    tables: list[RawTable] = []
    run_start = None
    for i in range(len(lines) + 1):
        rowish = i < len(lines) and _is_rowish(lines[i])
        if rowish and run_start is None:
            run_start = i
        elif not rowish and run_start is not None:
            table = _parse_run(lines, run_start, i)
            if table is not None:
                tables.append(table)
            run_start = None
    return tables


def _parse_run(lines: list[str], start: int, end: int) -> RawTable | None:
    if end - start < 2:
        return None
    header: list[str] | None = None
    rows: list[list[str]] = []
    warnings: list[str] = []
    data_ordinal = 0
    for i in range(start, end):
        cells = _split_cells(lines[i])
        if _is_separator(cells):
            continue
        if header is None:
            header = [_strip_header_decoration(c) for c in cells]
            continue
        data_ordinal += 1
        if len(cells) > len(header):
            warnings.append(
                f"row {data_ordinal}: {len(cells)} cells but {len(header)} columns; extra cells dropped"
            )
            cells = cells[: len(header)]
        elif len(cells) < len(header):
            cells = cells + [""] * (len(header) - len(cells))
        rows.append(cells)
    if header is None:
        return None
    return RawTable(header=header, rows=rows, line_span=(start + 1, end), warnings=warnings)


def render_pipe_table(header: list[str], rows: list[list[str]]) -> str:
    """Canonical pipe-table form; re-extracting it reproduces the cells.

    Pipes in cell text are escaped; newlines are flattened to spaces (the
    display form is single-line per row by construction).
    """

    def fmt(cells: list[str]) -> str:
        safe = [" ".join(c.split("\n")).replace("|", "\\|") for c in cells]
        return "| " + " | ".join(safe) + " |"

    lines = [fmt(header), "| " + " | ".join("---" for _ in header) + " |"]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)


def classify_and_parse(tables: list[RawTable]) -> ParsedIngest:
    """Decide which table is the comparison and which holds definitions.

    The definitions table is the first 2-column table whose headers read like
    dimension/definition; the comparison is the first other table with >= 2
    columns whose first header reads like a dimension column. If nothing
    matches by header, the first remaining table with >= 3 columns is taken
    as the comparison, with a warning.
    """
    warnings: list[str] = []
    definitions_table = None
    definitions_index = -1
    for i, table in enumerate(tables):
        if (
            table.width == 2
            and _DIMENSION_HEADER.search(table.header[0])
            and _DEFINITION_HEADER.search(table.header[1])
        ):
            definitions_table = table
            definitions_index = i
            break

    comparison_table = None
    comparison_index = -1
    for i, table in enumerate(tables):
        if i == definitions_index:
            continue
        if table.width >= 2 and _DIMENSION_HEADER.search(table.header[0]):
            comparison_table = table
            comparison_index = i
            break
    if comparison_table is None:
        for i, table in enumerate(tables):
            if i == definitions_index:
                continue
            if table.width >= 3:
                comparison_table = table
                comparison_index = i
                warnings.append(
                    f"table {i + 1}: headers did not identify a comparison table; "
                    "selected by column count"
                )
                break

    if comparison_table is None and definitions_table is None:
        raise NoUsableTable()

    for index, table in ((comparison_index, comparison_table), (definitions_index, definitions_table)):
        if table is not None:
            warnings.extend(f"table {index + 1}: {w}" for w in table.warnings)

    if comparison_table is not None and definitions_table is None:
        warnings.append("no definitions table found; dimension definitions left empty")

    definitions: dict[str, str] = {}
    definition_names: dict[str, str] = {}
    if definitions_table is not None:
        for ordinal, row in enumerate(definitions_table.rows, start=1):
            name, definition = row[0], row[1]
            if not name:
                warnings.append(f"definitions row {ordinal}: empty dimension name; row skipped")
                continue
            key = dimension_key(name)
            if key in definitions:
                warnings.append(
                    f"definitions row {ordinal}: duplicate definition for {name!r}; first one kept"
                )
                continue
            definitions[key] = definition
            definition_names[key] = name

    dimensions: list[IngestDimension] = []
    dim_keys: list[str] = []
    used_keys: set[str] = set()

    def admit(name: str, definition: str, where: str) -> str:
        base = " ".join(name.split())
        display = base
        key = dimension_key(display)
        serial = 1
        while key in used_keys:
            serial += 1
            display = f"{base} ({serial})"
            key = dimension_key(display)
        if serial > 1:
            warnings.append(
                f"{where}: duplicate dimension name {base!r}; renamed to {display!r}"
            )
        check = validate_dimension_name(display)
        if not check.ok:
            warnings.append(
                f"{where}: dimension name {display!r} breaks the 1-3 token rule "
                f"({check.token_count} tokens); kept for curation"
            )
        used_keys.add(key)
        dimensions.append(IngestDimension(name=display, definition=definition))
        dim_keys.append(key)
        return key

    matched_definition_keys: set[str] = set()
    comparison_row_keys: list[str | None] = []
    if comparison_table is not None:
        for ordinal, row in enumerate(comparison_table.rows, start=1):
            name = row[0]
            if not name:
                warnings.append(
                    f"comparison row {ordinal}: empty dimension name; row skipped"
                )
                comparison_row_keys.append(None)
                continue
            lookup = dimension_key(name)
            definition = definitions.get(lookup, "")
            if lookup in definitions:
                matched_definition_keys.add(lookup)
            comparison_row_keys.append(admit(name, definition, f"comparison row {ordinal}"))

        for key, definition in definitions.items():
            if key not in matched_definition_keys:
                warnings.append(
                    f"definition for {definition_names[key]!r} has no matching "
                    "comparison row; kept as a dimension without values"
                )
                admit(definition_names[key], definition, "definitions table")
    else:
        for ordinal, (key, definition) in enumerate(definitions.items(), start=1):
            admit(definition_names[key], definition, f"definitions row {ordinal}")

    columns: list[IngestColumn] = []
    if comparison_table is not None:
        used_labels: set[str] = set()
        for j, raw_label in enumerate(comparison_table.header[1:], start=1):
            base = raw_label if raw_label else f"Column {j}"
            if not raw_label:
                warnings.append(f"column {j + 1}: empty header; labelled {base!r}")
            label = base
            serial = 1
            while label in used_labels:
                serial += 1
                label = f"{base} ({serial})"
            if serial > 1:
                warnings.append(
                    f"column {j + 1}: duplicate label {base!r}; renamed to {label!r}"
                )
            used_labels.add(label)
            cells = {}
            for row, key in zip(comparison_table.rows, comparison_row_keys):
                if key is not None:
                    cells[key] = row[j]
            columns.append(IngestColumn(label=label, cells=cells))

    return ParsedIngest(
        comparison_table=comparison_table,
        definitions_table=definitions_table,
        dimensions=dimensions,
        columns=columns,
        warnings=warnings,
    )


def parse_response(raw_text: str) -> ParsedIngest:
    """extract_tables + classify_and_parse in one call."""
    return classify_and_parse(extract_tables(raw_text))
