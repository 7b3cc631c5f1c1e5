"""Bit-exact CSV serialization of comparisons and definitions.

All flavors write UTF-8 with no byte-order mark and a trailing line ending.
Fields containing a comma, a double quote, or a line break are quoted and
embedded quotes doubled; everything else is written bare, so equal inputs
always produce identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import MissingMetadata
from .model import Comparison

FLAVOR_GENERIC = "generic_comparison"
FLAVOR_DEFINITIONS = "definitions"
FLAVOR_ORKG = "orkg_import"

#: Reserved leading columns of the knowledge-graph import layout. Kept as
#: data so a schema change upstream is a one-line edit, not a code change.
ORKG_RESERVED_HEADER = (
    "paper:title",
    "paper:doi",
    "paper:publication_year",
    "contribution:research_problem",
)

#: Per-column metadata fields consumed by the orkg flavor, in emit order
#: after the title.
ORKG_METADATA_FIELDS = ("doi", "year")

_NEEDS_QUOTING = (",", '"', "\n", "\r")


@dataclass(frozen=True)
class ExportProfile:
    flavor: str
    empty_cell_policy: str = "empty"  # "empty" | "literal_na"
    line_ending: str = "LF"  # "LF" | "CRLF"
    metadata: Mapping[str, Mapping[str, str]] | None = None

    def __post_init__(self):
        if self.flavor not in (FLAVOR_GENERIC, FLAVOR_DEFINITIONS, FLAVOR_ORKG):
            raise ValueError(f"unknown export flavor {self.flavor!r}")
        if self.empty_cell_policy not in ("empty", "literal_na"):
            raise ValueError(f"unknown empty-cell policy {self.empty_cell_policy!r}")
        if self.line_ending not in ("LF", "CRLF"):
            raise ValueError(f"unknown line ending {self.line_ending!r}")

    @property
    def eol(self) -> str:
        return "\r\n" if self.line_ending == "CRLF" else "\n"

    @classmethod
    def generic(cls, **kwargs) -> "ExportProfile":
        return cls(flavor=FLAVOR_GENERIC, **kwargs)

    @classmethod
    def definitions(cls, **kwargs) -> "ExportProfile":
        return cls(flavor=FLAVOR_DEFINITIONS, **kwargs)

    @classmethod
    def orkg(cls, metadata: Mapping[str, Mapping[str, str]], **kwargs) -> "ExportProfile":
        return cls(flavor=FLAVOR_ORKG, metadata=metadata, **kwargs)


def csv_field(value: str) -> str:
    """Quote one field per RFC 4180."""
    if any(ch in value for ch in _NEEDS_QUOTING):
        return '"' + value.replace('"', '""') + '"'
    return value


def _emit(rows: list[list[str]], eol: str) -> bytes:
    out = []
    for row in rows:
        out.append(",".join(csv_field(field) for field in row))
        out.append(eol)
    return "".join(out).encode("utf-8")


def _cell(value: str, profile: ExportProfile) -> str:
    if value == "" and profile.empty_cell_policy == "literal_na":
        return "N/A"
    return value


def export_comparison(comparison: Comparison, profile: ExportProfile | None = None) -> bytes:
    """Dimensions as rows: header ``Dimension,<label>,...`` then one row each."""
    profile = profile or ExportProfile.generic()
    rows = [["Dimension"] + [col.label for col in comparison.columns]]
    for dim in comparison.dimensions:
        rows.append(
            [dim.name]
            + [
                _cell(comparison.cells[(dim.key, j)], profile)
                for j in range(len(comparison.columns))
            ]
        )
    return _emit(rows, profile.eol)


def export_definitions(comparison: Comparison, profile: ExportProfile | None = None) -> bytes:
    """Two columns: dimension name and its definition, in model order."""
    profile = profile or ExportProfile.definitions()
    rows = [["Dimension", "Definition"]]
    for dim in comparison.dimensions:
        rows.append([dim.name, dim.definition])
    return _emit(rows, profile.eol)


def export_orkg(comparison: Comparison, profile: ExportProfile) -> bytes:
    """Transposed knowledge-graph import layout: one row per compared column.

    Requires a title for every column; doi and year are optional. Empty cells
    stay empty here regardless of policy - in the import format an empty
    field means the property is absent.
    """
    metadata = profile.metadata or {}
    for col in comparison.columns:
        entry = metadata.get(col.label) or {}
        if not str(entry.get("title", "")).strip():
            raise MissingMetadata(col.label)
    rows = [list(ORKG_RESERVED_HEADER) + [dim.name for dim in comparison.dimensions]]
    for j, col in enumerate(comparison.columns):
        entry = metadata[col.label]
        rows.append(
            [
                str(entry["title"]),
                str(entry.get("doi", "") or ""),
                str(entry.get("year", "") or ""),
                comparison.problem,
            ]
            + [comparison.cells[(dim.key, j)] for dim in comparison.dimensions]
        )
    return _emit(rows, profile.eol)


def export(comparison: Comparison, profile: ExportProfile) -> bytes:
    if profile.flavor == FLAVOR_GENERIC:
        return export_comparison(comparison, profile)
    if profile.flavor == FLAVOR_DEFINITIONS:
        return export_definitions(comparison, profile)
    return export_orkg(comparison, profile)


def export_filename(workspace_id: str, flavor: str) -> str:
    suffix = {
        FLAVOR_GENERIC: "comparison",
        FLAVOR_DEFINITIONS: "definitions",
        FLAVOR_ORKG: "orkg-import",
    }[flavor]
    return f"{workspace_id}-{suffix}.csv"
