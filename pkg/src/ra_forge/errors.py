"""Exception types shared across the package.

Every error carries a stable machine ``code`` so the CLI and the HTTP API can
map failures to exit codes / status codes without matching on message text.
``pointer`` optionally names the offending slot, field, or label.
"""

from __future__ import annotations


class RaError(Exception):
    """Base class for all ra-forge errors."""

    code = "error"

    def __init__(self, message: str, *, pointer: str | None = None):
        super().__init__(message)
        self.pointer = pointer

    @property
    def message(self) -> str:
        return str(self)


# --- task catalog / prompt instantiation ---

class UnknownScenario(RaError):
    code = "unknown_scenario"

    def __init__(self, scenario_id: str):
        super().__init__(f"unknown scenario: {scenario_id!r}", pointer=scenario_id)
        self.scenario_id = scenario_id


class MissingSlot(RaError):
    code = "missing_slot"

    def __init__(self, name: str):
        super().__init__(f"missing required input: {name}", pointer=name)
        self.slot = name


class TooFewValues(RaError):
    code = "too_few_values"

    def __init__(self, name: str, got: int, need: int):
        super().__init__(
            f"input {name!r} needs at least {need} value(s), got {got}", pointer=name
        )
        self.slot = name
        self.got = got
        self.need = need


class TooManyValues(RaError):
    code = "too_many_values"

    def __init__(self, name: str, got: int):
        super().__init__(f"input {name!r} accepts a single value, got {got}", pointer=name)
        self.slot = name
        self.got = got


class EmptyInput(RaError):
    code = "empty_input"

    def __init__(self, name: str):
        super().__init__(f"input {name!r} is empty after trimming whitespace", pointer=name)
        self.slot = name


class TemplateError(RaError):
    """Malformed template text (bad placeholder syntax, unbalanced sections)."""

    code = "template_error"


# --- response ingest ---

class NoUsableTable(RaError):
    code = "no_usable_table"

    def __init__(self, message: str = "no table in the response qualifies as a comparison or a definitions table"):
        super().__init__(message)


# --- comparison model / edits ---

class UnknownDimension(RaError):
    code = "unknown_dimension"

    def __init__(self, name: str):
        super().__init__(f"no dimension named {name!r}", pointer=name)
        self.name = name


class UnknownColumn(RaError):
    code = "unknown_column"

    def __init__(self, label: str):
        super().__init__(f"no column labelled {label!r}", pointer=label)
        self.label = label


class DuplicateKey(RaError):
    code = "duplicate_key"

    def __init__(self, name: str):
        super().__init__(f"a dimension with the same key as {name!r} already exists", pointer=name)
        self.name = name


class DuplicateLabel(RaError):
    code = "duplicate_label"

    def __init__(self, label: str):
        super().__init__(f"a column labelled {label!r} already exists", pointer=label)
        self.label = label


class ColumnLabelClash(RaError):
    code = "column_label_clash"

    def __init__(self, label: str):
        super().__init__(
            f"extend merge would duplicate column label {label!r}", pointer=label
        )
        self.label = label


class InvalidEdit(RaError):
    """Structurally invalid edit command (unknown kind, empty identity field)."""

    code = "invalid_edit"


# --- exporter ---

class MissingMetadata(RaError):
    code = "missing_metadata"

    def __init__(self, label: str):
        super().__init__(f"no import metadata (title) for column {label!r}", pointer=label)
        self.label = label


# --- llm gateway ---

class GatewayError(RaError):
    """Transport-level failure talking to the chat-completion endpoint."""

    code = "gateway_error"


class AuthFailed(GatewayError):
    code = "auth_failed"


class RateLimited(GatewayError):
    code = "rate_limited"

    def __init__(self, message: str, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class GatewayTimeout(GatewayError):
    code = "timeout"


class MalformedResponse(GatewayError):
    code = "malformed_response"


# --- workspace store ---

class IoError(RaError):
    code = "io_error"


class InvalidWorkspace(RaError):
    code = "invalid_workspace"


class WorkspaceNotFound(RaError):
    code = "workspace_not_found"

    def __init__(self, ref: str):
        super().__init__(f"workspace not found: {ref}", pointer=ref)
        self.ref = ref


class WorkspaceLocked(RaError):
    code = "workspace_locked"


class SchemaMismatch(RaError):
    code = "schema_mismatch"

    def __init__(self, found: object, supported: int):
        super().__init__(
            f"workspace file has schema version {found!r}; this build supports up to {supported}"
        )
        self.found = found
        self.supported = supported


class CorruptFile(RaError):
    code = "corrupt_file"

    def __init__(self, diagnostic: str):
        super().__init__(f"corrupt workspace file: {diagnostic}")
        self.diagnostic = diagnostic


# --- api service ---

class StaleSnapshot(RaError):
    code = "stale_snapshot"

    def __init__(self, expected: str, got: str):
        super().__init__(
            "edit batch was built against a stale comparison snapshot; reload and retry"
        )
        self.expected = expected
        self.got = got


#: Error codes the CLI treats as usage errors (exit code 2).
USAGE_CODES = frozenset({
    "unknown_scenario",
    "missing_slot",
    "too_few_values",
    "too_many_values",
    "empty_input",
})
