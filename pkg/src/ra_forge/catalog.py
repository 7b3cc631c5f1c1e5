"""Task catalog: the 11 research-task scenarios and prompt instantiation.

Scenarios are grouped by the kind of research work they assist:

* RC  - research comparisons (the five primary scenarios)
* BI  - brainstorming research ideas
* GA  - grant applications
* BP  - science blog posts
* PR  - preliminary peer reviews
* KQS - keyword query synthesis (boolean literature search strings)

Template wording ships as data (one UTF-8 text file per scenario under
``templates/``) so it can be audited and overridden without code changes.
Templates marked ``verbatim`` reproduce the original published prompt wording
for their task unchanged; ``authored`` templates were written for this package
in the same imperative style.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import NamedTuple

from . import templating
from .errors import (
    EmptyInput,
    MissingSlot,
    TemplateError,
    TooFewValues,
    TooManyValues,
    UnknownScenario,
)

GROUPS = ("RC", "BI", "GA", "BP", "PR", "KQS")

SLOT_NAMES = (
    "problem",
    "contexts",
    "entities",
    "dimensions",
    "call_objectives",
    "context_single",
    "keywords",
)

#: Slots whose value is a list; ``context_single`` draws one value from the
#: contexts input.
_MANY_SLOTS = {"contexts", "entities", "dimensions", "keywords"}

VERBATIM = "verbatim"
AUTHORED = "authored"


@dataclass(frozen=True)
class SlotSpec:
    """Input schema for one slot of a scenario."""

    name: str
    required: bool = False
    multiplicity: str = "one"  # "one" | "many"
    min_count: int = 0

    def __post_init__(self):
        if self.name not in SLOT_NAMES:
            raise ValueError(f"unknown slot name {self.name!r}")
        if self.multiplicity not in ("one", "many"):
            raise ValueError(f"bad multiplicity {self.multiplicity!r}")
        if self.required and self.min_count < 1:
            raise ValueError(f"slot {self.name}: required implies min_count >= 1")
        if self.multiplicity == "one" and self.min_count > 1:
            raise ValueError(f"slot {self.name}: multiplicity 'one' caps min_count at 1")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "required": self.required,
            "multiplicity": self.multiplicity,
            "min_count": self.min_count,
        }


@dataclass(frozen=True)
class PromptTemplate:
    """Template text plus its provenance tag, compiled once."""

    text: str
    provenance: str  # VERBATIM | AUTHORED
    compiled: templating.Template = dataclass_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "compiled", templating.Template(self.text))


@dataclass(frozen=True)
class TaskScenario:
    id: str
    group: str
    title: str
    template: PromptTemplate
    slots: tuple[SlotSpec, ...]

    def slot(self, name: str) -> SlotSpec | None:
        for spec in self.slots:
            if spec.name == name:
                return spec
        return None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "group": self.group,
            "title": self.title,
            "provenance": self.template.provenance,
            "slots": [spec.to_json() for spec in self.slots],
        }


class ContextInput(NamedTuple):
    """One context excerpt; label may be None (rendered as ``Context N``)."""

    label: str | None
    body: str


class DimensionInput(NamedTuple):
    name: str
    definition: str = ""


@dataclass
class ScenarioInputs:
    """User-supplied values for a scenario's slots."""

    problem: str | None = None
    contexts: list[ContextInput] = dataclass_field(default_factory=list)
    entities: list[str] = dataclass_field(default_factory=list)
    dimensions: list[DimensionInput] = dataclass_field(default_factory=list)
    call_objectives: str | None = None
    keywords: list[str] = dataclass_field(default_factory=list)

    @classmethod
    def from_json(cls, data: dict) -> "ScenarioInputs":
        """Build inputs from a JSON body (HTTP API / ``--json`` CLI mode)."""
        contexts = []
        for item in data.get("contexts") or []:
            if isinstance(item, str):
                contexts.append(ContextInput(None, item))
            else:
                contexts.append(ContextInput(item.get("label"), item.get("body", "")))
        dimensions = []
        raw_dims = data.get("dimensions") or []
        if isinstance(raw_dims, dict):
            raw_dims = list(raw_dims.items())
        for item in raw_dims:
            if isinstance(item, str):
                dimensions.append(DimensionInput(item, ""))
            elif isinstance(item, dict):
                dimensions.append(DimensionInput(item.get("name", ""), item.get("definition", "")))
            else:
                name, definition = (list(item) + [""])[:2]
                dimensions.append(DimensionInput(name, definition or ""))
        return cls(
            problem=data.get("problem"),
            contexts=contexts,
            entities=list(data.get("entities") or []),
            dimensions=dimensions,
            call_objectives=data.get("call_objectives"),
            keywords=list(data.get("keywords") or []),
        )


# --- canonical slot renderers ---

def render_contexts(contexts: list[ContextInput]) -> str:
    """``Context 1: ...`` blocks separated by blank lines; user labels win."""
    blocks = []
    for i, ctx in enumerate(contexts, start=1):
        label = ctx.label if ctx.label else f"Context {i}"
        blocks.append(f"{label}: {ctx.body}")
    return "\n\n".join(blocks)


def render_context_single(contexts: list[ContextInput]) -> str:
    ctx = contexts[0]
    label = ctx.label if ctx.label else "Context"
    return f"{label}: {ctx.body}"


def render_dimensions(dimensions: list[DimensionInput]) -> str:
    """Dictionary literal in input order; empty definitions stay empty."""
    items = ", ".join(f'"{d.name}": "{d.definition}"' for d in dimensions)
    return "{" + items + "}"


def render_string_list(values: list[str]) -> str:
    return ", ".join(f'"{v}"' for v in values)


class Catalog:
    """Immutable set of scenarios; instantiation is a pure function."""

    def __init__(self, scenarios: list[TaskScenario]):
        self.scenarios: tuple[TaskScenario, ...] = tuple(scenarios)
        self._by_id = {s.id: s for s in self.scenarios}
        for scenario in self.scenarios:
            declared = {spec.name for spec in scenario.slots}
            undeclared = scenario.template.compiled.referenced_slots - declared
            if undeclared:
                raise TemplateError(
                    f"template {scenario.id!r} references undeclared slots: {sorted(undeclared)}"
                )

    def list_scenarios(self) -> tuple[TaskScenario, ...]:
        return self.scenarios

    def get(self, scenario_id: str) -> TaskScenario:
        try:
            return self._by_id[scenario_id]
        except KeyError:
            raise UnknownScenario(scenario_id) from None

    def required_slots(self, scenario_id: str) -> tuple[SlotSpec, ...]:
        return self.get(scenario_id).slots

    def instantiate(self, scenario_id: str, inputs: ScenarioInputs) -> str:
        """Render the scenario's prompt; deterministic for equal inputs."""
        scenario = self.get(scenario_id)
        values: dict[str, str] = {}
        for spec in scenario.slots:
            raw = _slot_values(spec.name, inputs)
            count = len(raw)
            if count == 0:
                if spec.required and spec.multiplicity == "many":
                    raise TooFewValues(spec.name, 0, spec.min_count)
                if spec.required:
                    raise MissingSlot(spec.name)
                continue
            if spec.multiplicity == "one" and count > 1:
                raise TooManyValues(spec.name, count)
            if count < spec.min_count:
                raise TooFewValues(spec.name, count, spec.min_count)
            _check_nonempty(spec.name, raw)
            values[spec.name] = _render_slot(spec.name, raw)
        prompt = scenario.template.compiled.render(values)
        if templating.has_marker(prompt) and not any(
            templating.has_marker(v) for v in values.values()
        ):
            raise TemplateError(f"template {scenario.id!r} left unresolved placeholders")
        return prompt


def _slot_values(name: str, inputs: ScenarioInputs) -> list:
    if name == "problem":
        return [inputs.problem] if inputs.problem is not None else []
    if name == "call_objectives":
        return [inputs.call_objectives] if inputs.call_objectives is not None else []
    if name in ("contexts", "context_single"):
        return list(inputs.contexts)
    if name == "entities":
        return list(inputs.entities)
    if name == "dimensions":
        return list(inputs.dimensions)
    if name == "keywords":
        return list(inputs.keywords)
    raise ValueError(f"unknown slot {name!r}")


def _check_nonempty(name: str, raw: list) -> None:
    # Identity-bearing strings must survive trimming; dimension definitions
    # are the one field allowed to be empty.
    for item in raw:
        if isinstance(item, ContextInput):
            text = item.body
        elif isinstance(item, DimensionInput):
            text = item.name
        else:
            text = item
        if not (text or "").strip():
            raise EmptyInput(name)


def _render_slot(name: str, raw: list) -> str:
    if name == "contexts":
        return render_contexts(raw)
    if name == "context_single":
        return render_context_single(raw)
    if name == "dimensions":
        return render_dimensions(raw)
    if name in ("entities", "keywords"):
        return render_string_list(raw)
    return raw[0]


# --- scenario table ---
# (id, group, title, provenance, slots); listing order: the five comparison
# scenarios first, then the six secondary tasks.

_SCENARIO_TABLE = (
    (
        "dimensions-for-problem", "RC", "Get research dimensions for a research problem",
        AUTHORED,
        (SlotSpec("problem", required=True, min_count=1),
         SlotSpec("contexts", multiplicity="many")),
    ),
    (
        "compare-entities", "RC", "Compare entities for a research problem",
        AUTHORED,
        (SlotSpec("problem", required=True, min_count=1),
         SlotSpec("entities", required=True, multiplicity="many", min_count=2)),
    ),
    (
        "compare-contexts", "RC", "Compare research from scientific contexts",
        VERBATIM,
        (SlotSpec("problem", required=True, min_count=1),
         SlotSpec("contexts", required=True, multiplicity="many", min_count=2)),
    ),
    (
        "compare-contexts-by-dimensions", "RC", "Compare scientific contexts based on research dimensions",
        AUTHORED,
        (SlotSpec("problem", required=True, min_count=1),
         SlotSpec("contexts", required=True, multiplicity="many", min_count=2),
         SlotSpec("dimensions", required=True, multiplicity="many", min_count=1)),
    ),
    (
        "define-dimensions", "RC", "Create definitions for selected research dimensions",
        AUTHORED,
        (SlotSpec("problem", required=True, min_count=1),
         SlotSpec("dimensions", required=True, multiplicity="many", min_count=1),
         SlotSpec("contexts", multiplicity="many")),
    ),
    (
        "blog-post", "BP", "Write a blog about selected research dimensions",
        AUTHORED,
        (SlotSpec("problem", required=True, min_count=1),
         SlotSpec("dimensions", required=True, multiplicity="many", min_count=1)),
    ),
    (
        "preliminary-review", "PR", "Write a scientific review from a context",
        AUTHORED,
        (SlotSpec("context_single", required=True, min_count=1),
         SlotSpec("dimensions", multiplicity="many")),
    ),
    (
        "research-ideas", "BI", "Get ideas for research using selected research dimensions",
        VERBATIM,
        (SlotSpec("problem", required=True, min_count=1),
         SlotSpec("dimensions", required=True, multiplicity="many", min_count=1)),
    ),
    (
        "literature-search-query", "KQS", "Get a literature search query from search terms",
        AUTHORED,
        (SlotSpec("problem", required=True, min_count=1),
         SlotSpec("keywords", required=True, multiplicity="many", min_count=1)),
    ),
    (
        "user-stories", "BI", "Create user stories and acceptance criteria from scientific contexts",
        AUTHORED,
        (SlotSpec("contexts", required=True, multiplicity="many", min_count=1),
         SlotSpec("problem",)),
    ),
    (
        "project-proposal", "GA", "Write a basic project proposal",
        VERBATIM,
        (SlotSpec("problem", required=True, min_count=1),
         SlotSpec("call_objectives", required=True, min_count=1)),
    ),
)


def _read_template(scenario_id: str, override_dir: Path | None) -> str:
    if override_dir is not None:
        candidate = Path(override_dir) / f"{scenario_id}.txt"
        if candidate.is_file():
            return candidate.read_text(encoding="utf-8").rstrip("\n")
    text = resources.files(__package__).joinpath(f"templates/{scenario_id}.txt").read_text(
        encoding="utf-8"
    )
    return text.rstrip("\n")


def load_catalog(template_dir: str | Path | None = None) -> Catalog:
    """Build the catalog, optionally overriding template files by scenario id."""
    override = Path(template_dir) if template_dir else None
    scenarios = []
    for scenario_id, group, title, provenance, slots in _SCENARIO_TABLE:
        text = _read_template(scenario_id, override)
        scenarios.append(
            TaskScenario(
                id=scenario_id,
                group=group,
                title=title,
                template=PromptTemplate(text=text, provenance=provenance),
                slots=slots,
            )
        )
    return Catalog(scenarios)


@lru_cache(maxsize=1)
def default_catalog() -> Catalog:
    return load_catalog()


def list_scenarios() -> tuple[TaskScenario, ...]:
    return default_catalog().list_scenarios()


def required_slots(scenario_id: str) -> tuple[SlotSpec, ...]:
    return default_catalog().required_slots(scenario_id)


def instantiate(scenario_id: str, inputs: ScenarioInputs) -> str:
    return default_catalog().instantiate(scenario_id, inputs)
