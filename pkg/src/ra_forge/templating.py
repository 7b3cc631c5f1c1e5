"""Minimal placeholder template engine for prompt text.

Supported syntax:

* ``{{slot}}`` substitutes the rendered value of a slot.
* ``{{#if slot}}...{{/if}}`` keeps the enclosed text only when the slot has a
  value. Sections may nest.

Values are inserted in a single pass over the parsed template, so inserted
text is never re-scanned: a rendered prompt cannot contain leftover markers
unless the caller's own values contained marker syntax.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Union

from .errors import TemplateError

_TOKEN = re.compile(r"\{\{\s*(#if\s+[a-z_][a-z0-9_]*|/if|[a-z_][a-z0-9_]*)\s*\}\}")

#: Matches anything that still looks like a placeholder marker.
MARKER_RE = re.compile(r"\{\{\s*[#/]?[a-z_][a-z0-9_ ]*\}\}")


@dataclass
class _If:
    slot: str
    children: list["_Node"] = field(default_factory=list)


@dataclass
class _Var:
    slot: str


_Node = Union[str, _Var, _If]


class Template:
    """A compiled template: parse once, render many times."""

    def __init__(self, text: str):
        self.text = text
        self._nodes = _parse(text)
        self.placeholders = _collect(self._nodes, vars_only=True)
        self.referenced_slots = _collect(self._nodes, vars_only=False)

    def render(self, values: Mapping[str, str]) -> str:
        """Substitute ``values`` into the template.

        Every ``{{slot}}`` outside a false section must have a value; a
        missing one raises :class:`TemplateError` (the catalog validates slot
        coverage up front, so hitting this means a misconfigured template).
        """
        out: list[str] = []
        _render(self._nodes, values, out)
        return "".join(out)


def _parse(text: str) -> list[_Node]:
    root: list[_Node] = []
    stack: list[_If] = []
    pos = 0
    for m in _TOKEN.finditer(text):
        literal = text[pos:m.start()]
        if "{{" in literal:
            raise TemplateError(f"stray '{{{{' near offset {pos}; placeholders must match {{{{name}}}}")
        target = stack[-1].children if stack else root
        if literal:
            target.append(literal)
        token = m.group(1)
        if token.startswith("#if"):
            section = _If(slot=token.split()[1])
            target.append(section)
            stack.append(section)
        elif token == "/if":
            if not stack:
                raise TemplateError("'{{/if}}' without a matching '{{#if}}'")
            stack.pop()
        else:
            target.append(_Var(slot=token))
        pos = m.end()
    tail = text[pos:]
    if "{{" in tail:
        raise TemplateError("stray '{{' in template tail; placeholders must match {{name}}")
    if stack:
        raise TemplateError(f"unclosed '{{{{#if {stack[-1].slot}}}}}' section")
    if tail:
        (stack[-1].children if stack else root).append(tail)
    return root


def _collect(nodes: list[_Node], *, vars_only: bool) -> frozenset[str]:
    found: set[str] = set()

    def walk(items: list[_Node]) -> None:
        for node in items:
            if isinstance(node, _Var):
                found.add(node.slot)
            elif isinstance(node, _If):
                if not vars_only:
                    found.add(node.slot)
                walk(node.children)

    walk(nodes)
    return frozenset(found)


def _render(nodes: list[_Node], values: Mapping[str, str], out: list[str]) -> None:
    for node in nodes:
        if isinstance(node, str):
            out.append(node)
        elif isinstance(node, _Var):
            try:
                out.append(values[node.slot])
            except KeyError:
                raise TemplateError(f"no value for placeholder {{{{{node.slot}}}}}") from None
        else:
            if values.get(node.slot):
                _render(node.children, values, out)


def has_marker(text: str) -> bool:
    """True if ``text`` still contains placeholder-marker syntax."""
    return MARKER_RE.search(text) is not None
