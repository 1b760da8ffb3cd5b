"""Template architecture: rule-matched fixed texts with slot filling.

Every template declares the intent set that triggers it, optional
attribute predicates, a body with ``[slot]`` markers and a binding from
each slot to an (intent, attribute) path.  Matching picks the applicable
template with the largest trigger set (most specific situation), breaking
ties by priority then id.  Filling is lookup-only and fails closed: a
missing bound attribute aborts the report rather than emitting a blank.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import yaml

from .analysis import leading_number
from .dates import format_date_pt, parse_flex_date
from .ir import DEFAULT_REGISTRY, Intent, IntentDocument
from .resources import data_path


class TemplateError(Exception):
    pass


class TemplateFormatError(TemplateError):
    """Bad template file: duplicate id, unbound slot, unknown trigger intent."""


class NoMatchError(TemplateError):
    """No template applies to the document; callers fall back to the pipeline."""


class MissingAttributeError(TemplateError):
    """A bound attribute is absent from the document (trigger/binding mismatch)."""


SLOT_PATTERN = re.compile(r"\[([a-z][a-z0-9_]*)\]")


@dataclass(frozen=True)
class TriggerPredicate:
    intent: str
    key: str
    op: str = "present"  # present | == | >= | > | <= | <
    value: object = None

    def holds(self, doc: IntentDocument) -> bool:
        for intent in doc:
            if intent.name != self.intent:
                continue
            raw = intent.get(self.key)
            if raw is None:
                continue
            if self.op == "present":
                return True
            if self.op == "==":
                return raw == str(self.value)
            number = leading_number(raw)
            if number is None or self.value is None:
                continue
            threshold = float(self.value)
            if self.op == ">=" and number >= threshold:
                return True
            if self.op == ">" and number > threshold:
                return True
            if self.op == "<=" and number <= threshold:
                return True
            if self.op == "<" and number < threshold:
                return True
        return False


@dataclass
class Template:
    id: str
    trigger_intents: frozenset[str]
    predicates: list[TriggerPredicate]
    priority: int
    body: str
    bindings: dict[str, tuple[str, str]]  # slot -> (intent name, attribute key)
    formatters: dict[str, str] = field(default_factory=dict)

    def applies(self, doc: IntentDocument) -> bool:
        names = set(doc.names())
        if not self.trigger_intents <= names:
            return False
        return all(p.holds(doc) for p in self.predicates)


@dataclass
class TemplateRegistry:
    templates: list[Template]

    def __len__(self):
        return len(self.templates)

    def by_id(self, template_id: str) -> Template:
        for t in self.templates:
            if t.id == template_id:
                return t
        raise KeyError(template_id)


# ---------------------------------------------------------------------------
# slot formatters

def _fmt_identity(value: str, intent: Intent, doc: IntentDocument) -> str:
    return value


def _fmt_city_uf(value: str, intent: Intent, doc: IntentDocument) -> str:
    uf = intent.get("uf")
    if uf is None:
        raise MissingAttributeError(f"{intent.name}.uf needed by city_uf formatter")
    return f"{value} ({uf})"


def _fmt_date_pt(value: str, intent: Intent, doc: IntentDocument) -> str:
    date = parse_flex_date(value)
    return format_date_pt(date) if date else value


def _fmt_number_pt(value: str, intent: Intent, doc: IntentDocument) -> str:
    return value.replace(".", ",")


# canonical feed enums -> Portuguese; unknown values (already Portuguese,
# or new conditions) pass through verbatim
_CONDITION_PT = {
    "sunny": "ensolarado",
    "cloudy": "nublado",
    "rainy": "chuvoso",
    "stormy": "tempestuoso",
    "overcast": "encoberto",
    "clear": "limpo",
}


def _fmt_condition_pt(value: str, intent: Intent, doc: IntentDocument) -> str:
    return _CONDITION_PT.get(value, value)


FORMATTERS = {
    "identity": _fmt_identity,
    "raw": _fmt_identity,  # unit-preserving pass-through
    "city_uf": _fmt_city_uf,
    "date_pt": _fmt_date_pt,
    "number_pt": _fmt_number_pt,
    "condition_pt": _fmt_condition_pt,
}


# ---------------------------------------------------------------------------
# loading

def _parse_path(path: str, template_id: str) -> tuple[str, str]:
    if "." not in path:
        raise TemplateFormatError(f"template {template_id}: binding path {path!r} needs INTENT.key")
    intent, key = path.split(".", 1)
    return intent, key


def load_templates(path=None, registry_names: set[str] | None = None) -> TemplateRegistry:
    """Load and structurally check a template file (defaults to the shipped one)."""
    source = data_path("templates.yaml") if path is None else path
    with open(source, "r", encoding="utf-8") as fh:
        rows = yaml.safe_load(fh) or []
    known_intents = registry_names or {s.name for s in DEFAULT_REGISTRY}
    templates: list[Template] = []
    seen_ids: set[str] = set()
    for row in rows:
        tid = row.get("id")
        if not tid:
            raise TemplateFormatError("template without id")
        if tid in seen_ids:
            raise TemplateFormatError(f"duplicate template id {tid!r}")
        seen_ids.add(tid)
        trigger = row.get("trigger") or {}
        intents = frozenset(trigger.get("intents") or [])
        if not intents:
            raise TemplateFormatError(f"template {tid}: empty trigger intent set")
        unknown = intents - known_intents
        if unknown:
            raise TemplateFormatError(f"template {tid}: unknown trigger intents {sorted(unknown)}")
        predicates = [
            TriggerPredicate(*_parse_path(p, tid)) for p in (trigger.get("require") or [])
        ]
        for cond in trigger.get("when") or []:
            intent, key = _parse_path(cond["path"], tid)
            predicates.append(
                TriggerPredicate(intent, key, op=cond.get("op", "=="), value=cond.get("value"))
            )
        body = row.get("body") or ""
        bindings = {
            slot: _parse_path(p, tid) for slot, p in (row.get("bindings") or {}).items()
        }
        slots_in_body = set(SLOT_PATTERN.findall(body))
        missing = slots_in_body - set(bindings)
        if missing:
            raise TemplateFormatError(f"template {tid}: unbound slots {sorted(missing)}")
        unused = set(bindings) - slots_in_body
        if unused:
            raise TemplateFormatError(f"template {tid}: bindings without slots {sorted(unused)}")
        formatters = dict(row.get("formatters") or {})
        for slot, name in formatters.items():
            if name not in FORMATTERS:
                raise TemplateFormatError(f"template {tid}: unknown formatter {name!r}")
            if slot not in bindings:
                raise TemplateFormatError(f"template {tid}: formatter for unknown slot {slot!r}")
        templates.append(
            Template(
                id=tid,
                trigger_intents=intents,
                predicates=predicates,
                priority=int(row.get("priority", 0)),
                body=body,
                bindings=bindings,
                formatters=formatters,
            )
        )
    return TemplateRegistry(templates=templates)


# ---------------------------------------------------------------------------
# matching + filling

def match_template(doc: IntentDocument, registry: TemplateRegistry) -> Template:
    """Most specific applicable template: largest trigger set, then priority, then id."""
    if not registry.templates:
        raise ValueError("template registry is empty")
    candidates = [t for t in registry.templates if t.applies(doc)]
    if not candidates:
        raise NoMatchError(f"no template matches intents {sorted(set(doc.names()))}")
    candidates.sort(key=lambda t: (-len(t.trigger_intents), -t.priority, t.id))
    return candidates[0]


def fill(template: Template, doc: IntentDocument) -> str:
    """Replace every slot with its formatted bound value; never emits partial text."""

    def replace(match: re.Match) -> str:
        slot = match.group(1)
        intent_name, key = template.bindings[slot]
        intent = doc.first(intent_name)
        if intent is None:
            raise MissingAttributeError(
                f"template {template.id}: intent {intent_name} absent for slot [{slot}]"
            )
        value = intent.get(key)
        if value is None:
            raise MissingAttributeError(
                f"template {template.id}: {intent_name}.{key} absent for slot [{slot}]"
            )
        formatter = FORMATTERS[template.formatters.get(slot, "identity")]
        return formatter(value, intent, doc)

    text = SLOT_PATTERN.sub(replace, template.body)
    leftover = SLOT_PATTERN.search(text)
    if leftover:  # a formatter produced a marker-looking string
        raise TemplateError(f"unfilled slot marker {leftover.group(0)} in output")
    return text
