"""Data-driven lexicons for the generation pipeline.

A lexicon maps (intent, attribute) pairs to lists of phrase-template
variants, carries value translations (e.g. enum tokens to inflected
Portuguese adjectives), city articles, salutations and clause-joining
policy.  Everything a journalist might want to tweak lives in the YAML
file, not in code; variant order matters — the first variant of an entry
is its canonical phrasing.

Phrase templates contain slots:

    {attribute}                value of the attribute, verbatim
    {attribute:formatter}      value passed through a named formatter
    {ENTITY:TAG}               referring-expression placeholder

Formatters: raw, value (translation table + agreement), date, window,
city_article, number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import yaml

from .dates import format_date_en_long, format_date_pt, parse_flex_date
from .resources import data_path


class LexiconError(Exception):
    pass


_SLOT_RE = re.compile(r"\{([^{}]+)\}")


@dataclass(frozen=True)
class SlotRef:
    key: str
    formatter: str = "raw"


@dataclass(frozen=True)
class EntityRef:
    tag: str


@dataclass(frozen=True)
class TextPart:
    text: str


VariantPart = TextPart | SlotRef | EntityRef


def parse_phrase(text: str) -> list[VariantPart]:
    parts: list[VariantPart] = []
    pos = 0
    for m in _SLOT_RE.finditer(text):
        if m.start() > pos:
            parts.append(TextPart(text[pos:m.start()]))
        inner = m.group(1)
        if inner.startswith("ENTITY:"):
            parts.append(EntityRef(tag=inner.split(":", 1)[1]))
        elif ":" in inner:
            key, formatter = inner.split(":", 1)
            parts.append(SlotRef(key=key, formatter=formatter))
        else:
            parts.append(SlotRef(key=inner))
        pos = m.end()
    if pos < len(text):
        parts.append(TextPart(text[pos:]))
    return parts


@dataclass
class LexEntry:
    intent: str
    attribute: str
    variants: list[list[VariantPart]]
    role: str = "clause"  # clause | pre | post
    requires: tuple[str, ...] = ()
    when: dict[str, str] = field(default_factory=dict)
    uses: tuple[str, ...] = ()
    agreement: str | None = None  # e.g. "f.pl", passed to the value formatter
    drop: bool = False  # consume the attribute silently

    def slot_keys(self) -> set[str]:
        keys = set()
        for variant in self.variants:
            for part in variant:
                if isinstance(part, SlotRef):
                    keys.add(part.key)
        return keys

    def consumes(self) -> set[str]:
        return {self.attribute} | self.slot_keys() | set(self.when) | set(self.uses)

    def applicable(self, attributes: dict[str, str]) -> bool:
        if self.attribute not in attributes:
            return False
        if any(req not in attributes for req in self.requires):
            return False
        return all(attributes.get(k) == v for k, v in self.when.items())


@dataclass
class Lexicon:
    language: str
    entries: list[LexEntry]
    causal_entries: list[LexEntry]
    values: dict[str, dict[str, object]]
    city_articles: dict[str, str]
    salutation: list[str]
    closing: list[str]
    clause_join: str = "sentence"  # sentence | comma_and
    join_word: str = ", e"

    def entries_for(self, intent_name: str, causal: bool = False) -> list[LexEntry]:
        pool = (self.causal_entries + self.entries) if causal else self.entries
        return [e for e in pool if e.intent == intent_name]

    def has_entry(self, intent_name: str, attribute: str) -> bool:
        return any(
            e.intent == intent_name and attribute in e.consumes()
            for e in self.entries + self.causal_entries
        )

    def translate(self, intent_name: str, key: str, raw: str, agreement: str | None) -> str:
        table = self.values.get(f"{intent_name}.{key}")
        if not table or raw not in table:
            return raw
        entry = table[raw]
        if isinstance(entry, dict):
            if agreement and agreement in entry:
                return str(entry[agreement])
            return str(entry.get("default", raw))
        return str(entry)


@dataclass
class EntityLexicon:
    """Per-tag descriptions: one full form plus shorter follow-up expressions."""

    entities: dict[str, tuple[str, list[str]]]

    def full(self, tag: str) -> str:
        return self.entities[tag][0]

    def alternatives(self, tag: str) -> list[str]:
        return self.entities[tag][1]

    def __contains__(self, tag: str) -> bool:
        return tag in self.entities


def _load_entry(row: dict) -> LexEntry:
    variants = [parse_phrase(v) for v in (row.get("variants") or [])]
    entry = LexEntry(
        intent=row["intent"],
        attribute=row["attribute"],
        variants=variants,
        role=row.get("role", "clause"),
        requires=tuple(row.get("requires") or ()),
        when={k: str(v) for k, v in (row.get("when") or {}).items()},
        uses=tuple(row.get("uses") or ()),
        agreement=row.get("agreement"),
        drop=bool(row.get("drop", False)),
    )
    if not entry.drop and not entry.variants:
        raise LexiconError(f"entry {entry.intent}.{entry.attribute} has no variants")
    # every variant must be renderable: its slots become presence requirements
    auto = entry.slot_keys() - {entry.attribute}
    return LexEntry(
        intent=entry.intent,
        attribute=entry.attribute,
        variants=entry.variants,
        role=entry.role,
        requires=tuple(sorted(set(entry.requires) | auto)),
        when=entry.when,
        uses=entry.uses,
        agreement=entry.agreement,
        drop=entry.drop,
    )


def load_lexicon(path=None, language: str = "pt") -> Lexicon:
    source = data_path(f"lexicon_{language}.yaml") if path is None else path
    with open(source, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise LexiconError(f"bad lexicon file {source}")
    return Lexicon(
        language=data.get("language", language),
        entries=[_load_entry(r) for r in data.get("entries") or []],
        causal_entries=[_load_entry(r) for r in data.get("causal_entries") or []],
        values=data.get("values") or {},
        city_articles=data.get("city_articles") or {},
        salutation=list(data.get("salutation") or []),
        closing=list(data.get("closing") or []),
        clause_join=data.get("clause_join", "sentence"),
        join_word=data.get("join_word", ", e"),
    )


def load_entities(path=None, language: str = "pt") -> EntityLexicon:
    source = data_path(f"entities_{language}.yaml") if path is None else path
    with open(source, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    entities = {}
    for tag, row in data.items():
        full = row.get("full")
        alternatives = list(row.get("alternatives") or [])
        if not full or not alternatives:
            raise LexiconError(f"entity {tag} needs a full description and alternatives")
        entities[tag] = (full, alternatives)
    return EntityLexicon(entities=entities)


# ---------------------------------------------------------------------------
# slot formatters

_WINDOW_MONTHS = re.compile(r"^\s*(\d+)\s*(months?|m[eê]s(?:es)?)\s*$", re.IGNORECASE)
_BARE_INT = re.compile(r"^\s*\d+\s*$")


def _fmt_window(raw: str, language: str) -> str:
    m = _WINDOW_MONTHS.match(raw)
    if m:
        n = m.group(1)
        return f"{n} meses" if language == "pt" else f"{n} months"
    if _BARE_INT.match(raw):
        n = raw.strip()
        return f"{n} dias" if language == "pt" else f"{n} days"
    return raw


def render_slot(
    lexicon: Lexicon,
    intent_name: str,
    slot: SlotRef,
    raw: str,
    agreement: str | None = None,
) -> str:
    """Apply one named formatter to a raw attribute value."""
    formatter = slot.formatter
    if formatter == "raw":
        return raw
    if formatter == "value":
        return lexicon.translate(intent_name, slot.key, raw, agreement)
    if formatter == "date":
        date = parse_flex_date(raw)
        if date is None:
            return raw
        return format_date_pt(date) if lexicon.language == "pt" else format_date_en_long(date)
    if formatter == "window":
        return _fmt_window(raw, lexicon.language)
    if formatter == "city_article":
        article = lexicon.city_articles.get(raw)
        return f"{article} {raw}" if article else raw
    if formatter == "number":
        return raw.replace(".", ",") if lexicon.language == "pt" else raw
    raise LexiconError(f"unknown slot formatter {formatter!r}")
