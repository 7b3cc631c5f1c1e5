"""Canonical comparison model and post-editing operations.

A :class:`Comparison` is a matrix: research dimensions as rows, compared
entities/contexts as columns, free-text cells. The dimension list doubles as
the definitions registry, so matrix rows and definitions can never drift
apart. All operations return new values; callers treat instances as
immutable.

Dimension identity is the case-folded, whitespace-collapsed name: chat agents
routinely vary capitalization between the comparison table and the
definitions table, and exact-match joining would split those dimensions.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .errors import (
    ColumnLabelClash,
    DuplicateKey,
    DuplicateLabel,
    InvalidEdit,
    UnknownColumn,
    UnknownDimension,
)

if TYPE_CHECKING:  # pragma: no cover
    from .ingest import ParsedIngest

ORIGIN_LLM = "llm"
ORIGIN_USER = "user"

MAX_NAME_TOKENS = 3


def dimension_key(name: str) -> str:
    """Identity form of a dimension name: whitespace collapsed, case folded."""
    return " ".join(name.split()).casefold()


@dataclass(frozen=True)
class NameCheck:
    """Outcome of the dimension-name rule (1-3 whitespace tokens)."""

    ok: bool
    token_count: int
    reason: str | None = None


def validate_dimension_name(name: str) -> NameCheck:
    """Check the short-phrase rule; a violation is a value, not an error.

    Tokens are maximal runs of non-whitespace characters, so hyphenated words
    count as one token.
    """
    count = len(name.split())
    if count == 0:
        return NameCheck(False, 0, "name is empty")
    if count > MAX_NAME_TOKENS:
        return NameCheck(False, count, f"name has {count} tokens; the limit is {MAX_NAME_TOKENS}")
    return NameCheck(True, count)


@dataclass(frozen=True)
class Dimension:
    name: str
    key: str
    definition: str = ""
    origin: str = ORIGIN_LLM
    needs_curation: bool = False

    @classmethod
    def create(cls, name: str, definition: str = "", origin: str = ORIGIN_LLM) -> "Dimension":
        name = name.strip()
        return cls(
            name=name,
            key=dimension_key(name),
            definition=definition,
            origin=origin,
            needs_curation=not validate_dimension_name(name).ok,
        )


@dataclass(frozen=True)
class ComparisonColumn:
    label: str
    source_ref: str | None = None


@dataclass(frozen=True)
class Comparison:
    problem: str = ""
    columns: tuple[ComparisonColumn, ...] = ()
    dimensions: tuple[Dimension, ...] = ()
    #: (dimension key, column index) -> cell text; defined for the full cross
    #: product, empty string meaning "no value".
    cells: dict = field(default_factory=dict)

    def dimension(self, name_or_key: str) -> Dimension:
        key = dimension_key(name_or_key)
        for dim in self.dimensions:
            if dim.key == key:
                return dim
        raise UnknownDimension(name_or_key)

    def has_dimension(self, name_or_key: str) -> bool:
        key = dimension_key(name_or_key)
        return any(dim.key == key for dim in self.dimensions)

    def column_index(self, label: str) -> int:
        for i, col in enumerate(self.columns):
            if col.label == label:
                return i
        raise UnknownColumn(label)

    def has_column(self, label: str) -> bool:
        return any(col.label == label for col in self.columns)

    def cell(self, name_or_key: str, label: str) -> str:
        dim = self.dimension(name_or_key)
        return self.cells[(dim.key, self.column_index(label))]

    def row(self, name_or_key: str) -> list[str]:
        dim = self.dimension(name_or_key)
        return [self.cells[(dim.key, j)] for j in range(len(self.columns))]

    def check_invariants(self) -> None:
        """Raise ValueError if any structural invariant is broken."""
        keys = [d.key for d in self.dimensions]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate dimension keys")
        if any(not k for k in keys):
            raise ValueError("empty dimension key")
        labels = [c.label for c in self.columns]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate column labels")
        if any(not lbl for lbl in labels):
            raise ValueError("empty column label")
        expected = {(k, j) for k in keys for j in range(len(labels))}
        if set(self.cells.keys()) != expected:
            raise ValueError("cells do not cover exactly dimensions x columns")
        if any(not isinstance(v, str) for v in self.cells.values()):
            raise ValueError("non-string cell value")

    def to_json(self) -> dict:
        return {
            "problem": self.problem,
            "columns": [
                {"label": c.label, "source_ref": c.source_ref} for c in self.columns
            ],
            "dimensions": [
                {
                    "name": d.name,
                    "definition": d.definition,
                    "origin": d.origin,
                    "needs_curation": d.needs_curation,
                }
                for d in self.dimensions
            ],
            "cells": [
                [self.cells[(d.key, j)] for j in range(len(self.columns))]
                for d in self.dimensions
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Comparison":
        columns = tuple(
            ComparisonColumn(label=c["label"], source_ref=c.get("source_ref"))
            for c in doc.get("columns", [])
        )
        dimensions = tuple(
            Dimension.create(
                d["name"],
                definition=d.get("definition", ""),
                origin=d.get("origin", ORIGIN_LLM),
            )
            for d in doc.get("dimensions", [])
        )
        rows = doc.get("cells", [])
        if len(rows) != len(dimensions):
            raise ValueError("cell matrix row count does not match dimensions")
        cells = {}
        for dim, row in zip(dimensions, rows):
            if len(row) != len(columns):
                raise ValueError("cell matrix width does not match columns")
            for j, value in enumerate(row):
                cells[(dim.key, j)] = str(value)
        comparison = cls(
            problem=doc.get("problem", ""),
            columns=columns,
            dimensions=dimensions,
            cells=cells,
        )
        comparison.check_invariants()
        return comparison


def snapshot(comparison: Comparison) -> bytes:
    """Byte-deterministic canonical form, for hashing and diffing."""
    return json.dumps(
        comparison.to_json(), ensure_ascii=False, separators=(",", ":")
    ).encode("utf-8")


def snapshot_hash(comparison: Comparison) -> str:
    return hashlib.sha256(snapshot(comparison)).hexdigest()


# --- ingest merging ---

def merge_ingest(
    comparison: Comparison, ingest: "ParsedIngest", strategy: str = "replace"
) -> Comparison:
    """Fold a parsed response into the comparison.

    ``replace`` rebuilds dimensions/columns/cells from the ingest (the
    research problem is kept). ``extend`` appends the ingest's columns,
    matching dimensions by key: existing definitions are kept unless they
    were empty, new dimensions are appended, and missing cells become empty
    strings. Fails atomically on a column-label clash.
    """
    if strategy not in ("replace", "extend"):
        raise ValueError(f"unknown merge strategy {strategy!r}")

    incoming = [
        Dimension.create(d.name, definition=d.definition, origin=ORIGIN_LLM)
        for d in ingest.dimensions
    ]

    if strategy == "replace":
        columns = tuple(ComparisonColumn(label=col.label) for col in ingest.columns)
        cells = {}
        for dim in incoming:
            for j, col in enumerate(ingest.columns):
                cells[(dim.key, j)] = col.cells.get(dim.key, "")
        merged = Comparison(
            problem=comparison.problem,
            columns=columns,
            dimensions=tuple(incoming),
            cells=cells,
        )
        merged.check_invariants()
        return merged

    existing_labels = {c.label for c in comparison.columns}
    for col in ingest.columns:
        if col.label in existing_labels:
            raise ColumnLabelClash(col.label)

    dimensions = list(comparison.dimensions)
    by_key = {d.key: i for i, d in enumerate(dimensions)}
    for dim in incoming:
        if dim.key in by_key:
            current = dimensions[by_key[dim.key]]
            if not current.definition and dim.definition:
                dimensions[by_key[dim.key]] = Dimension(
                    name=current.name,
                    key=current.key,
                    definition=dim.definition,
                    origin=current.origin,
                    needs_curation=current.needs_curation,
                )
        else:
            by_key[dim.key] = len(dimensions)
            dimensions.append(dim)

    columns = tuple(comparison.columns) + tuple(
        ComparisonColumn(label=col.label) for col in ingest.columns
    )
    old_width = len(comparison.columns)
    cells = {}
    for dim in dimensions:
        for j in range(old_width):
            cells[(dim.key, j)] = comparison.cells.get((dim.key, j), "")
        for offset, col in enumerate(ingest.columns):
            cells[(dim.key, old_width + offset)] = col.cells.get(dim.key, "")
    merged = Comparison(
        problem=comparison.problem,
        columns=columns,
        dimensions=tuple(dimensions),
        cells=cells,
    )
    merged.check_invariants()
    return merged


# --- post-editing ---

EDIT_KINDS = (
    "add_dimension",
    "delete_dimension",
    "rename_dimension",
    "set_definition",
    "add_column",
    "delete_column",
    "rename_column",
    "set_cell",
)


@dataclass(frozen=True)
class EditCommand:
    kind: str
    name: str | None = None
    new_name: str | None = None
    definition: str | None = None
    label: str | None = None
    new_label: str | None = None
    value: str | None = None
    source_ref: str | None = None

    @classmethod
    def add_dimension(cls, name: str, definition: str = "") -> "EditCommand":
        return cls(kind="add_dimension", name=name, definition=definition)

    @classmethod
    def delete_dimension(cls, name: str) -> "EditCommand":
        return cls(kind="delete_dimension", name=name)

    @classmethod
    def rename_dimension(cls, name: str, new_name: str) -> "EditCommand":
        return cls(kind="rename_dimension", name=name, new_name=new_name)

    @classmethod
    def set_definition(cls, name: str, definition: str) -> "EditCommand":
        return cls(kind="set_definition", name=name, definition=definition)

    @classmethod
    def add_column(cls, label: str, source_ref: str | None = None) -> "EditCommand":
        return cls(kind="add_column", label=label, source_ref=source_ref)

    @classmethod
    def delete_column(cls, label: str) -> "EditCommand":
        return cls(kind="delete_column", label=label)

    @classmethod
    def rename_column(cls, label: str, new_label: str) -> "EditCommand":
        return cls(kind="rename_column", label=label, new_label=new_label)

    @classmethod
    def set_cell(cls, name: str, label: str, value: str) -> "EditCommand":
        return cls(kind="set_cell", name=name, label=label, value=value)

    @classmethod
    def from_json(cls, doc: dict) -> "EditCommand":
        if not isinstance(doc, dict):
            raise InvalidEdit("edit command must be an object")
        kind = str(doc.get("kind", "")).replace("-", "_")
        if kind not in EDIT_KINDS:
            raise InvalidEdit(f"unknown edit kind {doc.get('kind')!r}")
        cmd = cls(
            kind=kind,
            name=doc.get("name"),
            new_name=doc.get("new_name"),
            definition=doc.get("definition"),
            label=doc.get("label"),
            new_label=doc.get("new_label"),
            value=doc.get("value"),
            source_ref=doc.get("source_ref"),
        )
        cmd.validate_payload()
        return cmd

    def validate_payload(self) -> None:
        """Identity-bearing payload fields must be present and nonempty."""
        need: list[str] = []
        if self.kind in ("add_dimension", "delete_dimension", "rename_dimension",
                         "set_definition", "set_cell"):
            need.append("name")
        if self.kind == "rename_dimension":
            need.append("new_name")
        if self.kind in ("add_column", "delete_column", "rename_column", "set_cell"):
            need.append("label")
        if self.kind == "rename_column":
            need.append("new_label")
        for field_name in need:
            value = getattr(self, field_name)
            if value is None or not str(value).strip():
                raise InvalidEdit(f"edit {self.kind!r} requires a nonempty {field_name!r}")
        if self.kind == "set_definition" and self.definition is None:
            raise InvalidEdit("edit 'set_definition' requires a 'definition' field")
        if self.kind == "set_cell" and self.value is None:
            raise InvalidEdit("edit 'set_cell' requires a 'value' field")

    def to_json(self) -> dict:
        doc = {"kind": self.kind}
        for field_name in ("name", "new_name", "definition", "label", "new_label",
                           "value", "source_ref"):
            value = getattr(self, field_name)
            if value is not None:
                doc[field_name] = value
        return doc


def apply_edit(comparison: Comparison, cmd: EditCommand) -> Comparison:
    """Apply one edit atomically: validate everything, then rebuild."""
    cmd.validate_payload()
    handler = _EDIT_HANDLERS[cmd.kind]
    edited = handler(comparison, cmd)
    edited.check_invariants()
    return edited


def apply_edits(comparison: Comparison, cmds: list[EditCommand]) -> Comparison:
    """Apply a batch in order; any failure leaves the input value untouched."""
    for cmd in cmds:
        comparison = apply_edit(comparison, cmd)
    return comparison


def _width(comparison: Comparison) -> int:
    return len(comparison.columns)


def _edit_add_dimension(comparison: Comparison, cmd: EditCommand) -> Comparison:
    dim = Dimension.create(cmd.name, definition=cmd.definition or "", origin=ORIGIN_USER)
    if any(d.key == dim.key for d in comparison.dimensions):
        raise DuplicateKey(cmd.name)
    cells = dict(comparison.cells)
    for j in range(_width(comparison)):
        cells[(dim.key, j)] = ""
    return Comparison(
        problem=comparison.problem,
        columns=comparison.columns,
        dimensions=comparison.dimensions + (dim,),
        cells=cells,
    )


def _edit_delete_dimension(comparison: Comparison, cmd: EditCommand) -> Comparison:
    dim = comparison.dimension(cmd.name)
    cells = {k: v for k, v in comparison.cells.items() if k[0] != dim.key}
    return Comparison(
        problem=comparison.problem,
        columns=comparison.columns,
        dimensions=tuple(d for d in comparison.dimensions if d.key != dim.key),
        cells=cells,
    )


def _edit_rename_dimension(comparison: Comparison, cmd: EditCommand) -> Comparison:
    dim = comparison.dimension(cmd.name)
    new_name = cmd.new_name.strip()
    new_key = dimension_key(new_name)
    if new_key != dim.key and any(d.key == new_key for d in comparison.dimensions):
        raise DuplicateKey(cmd.new_name)
    renamed = Dimension(
        name=new_name,
        key=new_key,
        definition=dim.definition,
        origin=dim.origin,
        needs_curation=not validate_dimension_name(new_name).ok,
    )
    dimensions = tuple(renamed if d.key == dim.key else d for d in comparison.dimensions)
    cells = {}
    for (key, j), value in comparison.cells.items():
        cells[(new_key if key == dim.key else key, j)] = value
    return Comparison(
        problem=comparison.problem,
        columns=comparison.columns,
        dimensions=dimensions,
        cells=cells,
    )


def _edit_set_definition(comparison: Comparison, cmd: EditCommand) -> Comparison:
    dim = comparison.dimension(cmd.name)
    updated = Dimension(
        name=dim.name,
        key=dim.key,
        definition=cmd.definition,
        origin=dim.origin,
        needs_curation=dim.needs_curation,
    )
    return Comparison(
        problem=comparison.problem,
        columns=comparison.columns,
        dimensions=tuple(updated if d.key == dim.key else d for d in comparison.dimensions),
        cells=dict(comparison.cells),
    )


def _edit_add_column(comparison: Comparison, cmd: EditCommand) -> Comparison:
    label = cmd.label.strip()
    if comparison.has_column(label):
        raise DuplicateLabel(label)
    j = _width(comparison)
    cells = dict(comparison.cells)
    for dim in comparison.dimensions:
        cells[(dim.key, j)] = ""
    return Comparison(
        problem=comparison.problem,
        columns=comparison.columns + (ComparisonColumn(label=label, source_ref=cmd.source_ref),),
        dimensions=comparison.dimensions,
        cells=cells,
    )


def _edit_delete_column(comparison: Comparison, cmd: EditCommand) -> Comparison:
    index = comparison.column_index(cmd.label)
    columns = tuple(c for i, c in enumerate(comparison.columns) if i != index)
    cells = {}
    for (key, j), value in comparison.cells.items():
        if j == index:
            continue
        cells[(key, j - 1 if j > index else j)] = value
    return Comparison(
        problem=comparison.problem,
        columns=columns,
        dimensions=comparison.dimensions,
        cells=cells,
    )


def _edit_rename_column(comparison: Comparison, cmd: EditCommand) -> Comparison:
    index = comparison.column_index(cmd.label)
    new_label = cmd.new_label.strip()
    if new_label != cmd.label and comparison.has_column(new_label):
        raise DuplicateLabel(new_label)
    columns = tuple(
        ComparisonColumn(label=new_label, source_ref=c.source_ref) if i == index else c
        for i, c in enumerate(comparison.columns)
    )
    return Comparison(
        problem=comparison.problem,
        columns=columns,
        dimensions=comparison.dimensions,
        cells=dict(comparison.cells),
    )


def _edit_set_cell(comparison: Comparison, cmd: EditCommand) -> Comparison:
    dim = comparison.dimension(cmd.name)
    index = comparison.column_index(cmd.label)
    cells = dict(comparison.cells)
    cells[(dim.key, index)] = cmd.value
    return Comparison(
        problem=comparison.problem,
        columns=comparison.columns,
        dimensions=comparison.dimensions,
        cells=cells,
    )


_EDIT_HANDLERS = {
    "add_dimension": _edit_add_dimension,
    "delete_dimension": _edit_delete_dimension,
    "rename_dimension": _edit_rename_dimension,
    "set_definition": _edit_set_definition,
    "add_column": _edit_add_column,
    "delete_column": _edit_delete_column,
    "rename_column": _edit_rename_column,
    "set_cell": _edit_set_cell,
}
