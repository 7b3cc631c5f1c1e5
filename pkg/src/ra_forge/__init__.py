"""ra-forge: a local-first research assistant workbench.

Turns a research problem, scientific contexts, and comparison dimensions
into standardized chat prompts for 11 research-task scenarios, parses the
agent's tabular replies into an editable comparison model, and exports the
result as CSV ready for knowledge-graph import. All data stays in plain
files on the user's device.
"""

__version__ = "0.1.0"

from .catalog import (  # noqa: F401
    Catalog,
    ContextInput,
    DimensionInput,
    ScenarioInputs,
    default_catalog,
    instantiate,
    list_scenarios,
    load_catalog,
    required_slots,
)
from .ingest import (  # noqa: F401
    ParsedIngest,
    RawTable,
    classify_and_parse,
    extract_tables,
    parse_response,
    validate_dimension_name,
)
from .model import (  # noqa: F401
    Comparison,
    ComparisonColumn,
    Dimension,
    EditCommand,
    apply_edit,
    apply_edits,
    merge_ingest,
    snapshot,
    snapshot_hash,
)
