"""Staged report generation: ordering, structuring, lexicalization,
referring-expression resolution, and surface realization.

Each stage is a pure function producing a serializable plan, and the final
:class:`ReportText` keeps the whole per-stage trace so any sentence of a
published report can be audited back to the stored facts that produced it.
Randomness is confined to lexical-variant and referring-expression choice
and is fully determined by the seed.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .ir import IntentDocument
from .lexicon import (
    EntityLexicon,
    EntityRef,
    LexEntry,
    Lexicon,
    SlotRef,
    TextPart,
    load_entities,
    load_lexicon,
    render_slot,
)


class PipelineError(Exception):
    pass


class LexiconGapError(PipelineError):
    """An attribute the plan must verbalize has no applicable lexicon entry."""

    def __init__(self, intent_name: str, attribute: str):
        super().__init__(f"no lexicon entry covers {intent_name}.{attribute}")
        self.intent_name = intent_name
        self.attribute = attribute


class UnknownEntityError(PipelineError):
    pass


# ---------------------------------------------------------------------------
# discourse ordering

DEFAULT_PRIORITIES = {
    "LOCATION": 0,
    "WEATHER": 10,
    "OCEAN": 20,
    "VESSELS_IN_PORT": 30,
    "EARTHQUAKE": 40,
    "OIL": 50,
    "TIDES": 60,
}
_UNLISTED_PRIORITY = 100


@dataclass(frozen=True)
class CausalRule:
    cause_intent: str
    cause_key: str
    cause_values: frozenset[str]
    effect_intent: str
    effect_key: str
    effect_values: frozenset[str]


DEFAULT_CAUSAL_RULES = [
    CausalRule(
        cause_intent="OCEAN",
        cause_key="fishing_condition",
        cause_values=frozenset({"excellent", "excelente", "excelentes", "great"}),
        effect_intent="VESSELS_IN_PORT",
        effect_key="trend",
        effect_values=frozenset({"high", "alta"}),
    ),
]


@dataclass
class OrderedPlan:
    order: list[int]  # permutation of intent ids
    causal_links: list[tuple[int, int]] = field(default_factory=list)

    def to_dict(self, doc: IntentDocument) -> dict:
        return {
            "order": [doc.by_id(i).name for i in self.order],
            "order_ids": list(self.order),
            "causal_links": [
                [doc.by_id(c).name, doc.by_id(e).name] for c, e in self.causal_links
            ],
        }


def order_discourse(
    doc: IntentDocument,
    priorities: dict[str, int] | None = None,
    causal_rules: list[CausalRule] | None = None,
) -> OrderedPlan:
    """Sort intents by the priority table (stable) and attach causal links."""
    table = DEFAULT_PRIORITIES if priorities is None else priorities
    rules = DEFAULT_CAUSAL_RULES if causal_rules is None else causal_rules
    ranked = sorted(
        doc.intents, key=lambda i: (table.get(i.name, _UNLISTED_PRIORITY), i.id)
    )
    order = [i.id for i in ranked]

    links: list[tuple[int, int]] = []
    for rule in rules:
        cause = next(
            (i for i in doc if i.name == rule.cause_intent
             and (i.get(rule.cause_key) or "") in rule.cause_values),
            None,
        )
        effect = next(
            (i for i in doc if i.name == rule.effect_intent
             and (i.get(rule.effect_key) or "") in rule.effect_values),
            None,
        )
        if cause is not None and effect is not None:
            links.append((cause.id, effect.id))
    return OrderedPlan(order=order, causal_links=links)


# ---------------------------------------------------------------------------
# text structuring

MAX_INTENTS_PER_SENTENCE = 2


@dataclass
class StructuredPlan:
    paragraphs: list[list[list[int]]]  # paragraphs -> sentence groups -> intent ids
    causal_links: list[tuple[int, int]] = field(default_factory=list)

    def flatten(self) -> list[int]:
        return [i for para in self.paragraphs for group in para for i in group]

    def to_dict(self, doc: IntentDocument) -> dict:
        return {
            "paragraphs": [
                [[doc.by_id(i).name for i in group] for group in para]
                for para in self.paragraphs
            ]
        }


def structure_text(
    plan: OrderedPlan, doc: IntentDocument, rules: object | None = None
) -> StructuredPlan:
    """Partition the ordered intents into paragraphs and sentence groups.

    Default layout: LOCATION and WEATHER open the report in paragraph one;
    each causal chain gets its own paragraph; every other intent stands
    alone.  Flattening the result always reproduces the plan order exactly.
    """
    del rules  # reserved for configurable layouts
    chain_members: dict[int, int] = {}
    for chain_id, (cause, effect) in enumerate(plan.causal_links):
        chain_members[cause] = chain_id
        chain_members[effect] = chain_id

    paragraphs_ids: list[list[int]] = []
    current: list[int] = []
    current_kind: str | None = None  # "opening" | chain id as str | "solo"
    for intent_id in plan.order:
        name = doc.by_id(intent_id).name
        if name in ("LOCATION", "WEATHER") and intent_id not in chain_members:
            kind = "opening"
        elif intent_id in chain_members:
            kind = f"chain{chain_members[intent_id]}"
        else:
            kind = f"solo{intent_id}"
        if current and kind == current_kind and kind != f"solo{intent_id}":
            current.append(intent_id)
        else:
            if current:
                paragraphs_ids.append(current)
            current = [intent_id]
            current_kind = kind
    if current:
        paragraphs_ids.append(current)

    paragraphs = [
        [para[i:i + MAX_INTENTS_PER_SENTENCE] for i in range(0, len(para), MAX_INTENTS_PER_SENTENCE)]
        for para in paragraphs_ids
    ]
    return StructuredPlan(paragraphs=paragraphs, causal_links=list(plan.causal_links))


# ---------------------------------------------------------------------------
# lexicalization

@dataclass
class RenderedSlot:
    intent_id: int
    key: str
    formatter: str
    raw: str
    rendered: str

    def __str__(self) -> str:
        return self.rendered


@dataclass
class ResolvedEntity:
    tag: str
    expression: str

    def __str__(self) -> str:
        return self.expression


@dataclass
class LexSentence:
    segments: list  # TextPart | RenderedSlot | EntityRef | ResolvedEntity

    def template_string(self) -> str:
        out = []
        for seg in self.segments:
            if isinstance(seg, TextPart):
                out.append(seg.text)
            elif isinstance(seg, RenderedSlot):
                out.append(f"{{{seg.intent_id}.{seg.key}}}")
            elif isinstance(seg, EntityRef):
                out.append(f"{{ENTITY:{seg.tag}}}")
            else:
                out.append(str(seg))
        return "".join(out)

    def surface(self) -> str:
        return "".join(
            seg.text if isinstance(seg, TextPart) else str(seg) for seg in self.segments
        )


@dataclass
class LexicalizedPlan:
    paragraphs: list[list[LexSentence]]
    references: list[dict] = field(default_factory=list)

    def sentences(self) -> list[LexSentence]:
        return [s for para in self.paragraphs for s in para]

    def to_dict(self) -> dict:
        return {
            "sentences": [
                [s.template_string() for s in para] for para in self.paragraphs
            ],
            "references": list(self.references),
        }


def _render_variant(variant, intent, lexicon: Lexicon, agreement) -> list:
    segments: list = []
    for part in variant:
        if isinstance(part, TextPart):
            segments.append(part)
        elif isinstance(part, EntityRef):
            segments.append(part)
        else:  # SlotRef
            raw = intent.get(part.key)
            if raw is None:
                raise LexiconGapError(intent.name, part.key)
            segments.append(
                RenderedSlot(
                    intent_id=intent.id,
                    key=part.key,
                    formatter=part.formatter,
                    raw=raw,
                    rendered=render_slot(lexicon, intent.name, part, raw, agreement),
                )
            )
    return segments


def _pick_variant(entry: LexEntry, rng: random.Random, mode: str):
    if mode == "canonical" or len(entry.variants) == 1:
        return entry.variants[0]
    return rng.choice(entry.variants)


def _realize_intent(intent, lexicon: Lexicon, rng, mode, causal=False):
    """Apply lexicon entries to one intent; returns clauses by role."""
    produced = {"pre": [], "clause": [], "post": []}
    consumed: set[str] = set()
    for entry in lexicon.entries_for(intent.name, causal=causal):
        if entry.attribute in consumed:
            continue
        if not entry.applicable(intent.attributes):
            continue
        consumed.update(k for k in entry.consumes() if k in intent.attributes)
        if entry.drop:
            continue
        variant = _pick_variant(entry, rng, mode)
        produced[entry.role].append(_render_variant(variant, intent, lexicon, entry.agreement))
    for attribute in intent.attributes:
        if attribute not in consumed:
            raise LexiconGapError(intent.name, attribute)
    return produced


def _join_pieces(pieces: list[list]) -> list:
    """Splice clause/adjunct segment lists into one sentence, space-separated."""
    segments: list = []
    for piece in pieces:
        if not piece:
            continue
        if segments:
            segments.append(TextPart(" "))
        segments.extend(piece)
    return segments


def _assemble_group(intents, lexicon: Lexicon, rng, mode, causal_pair: bool) -> list[LexSentence]:
    if causal_pair:
        cause, effect = intents
        effect_parts = _realize_intent(effect, lexicon, rng, mode)
        cause_parts = _realize_intent(cause, lexicon, rng, mode, causal=True)
        sentences = _compose_sentences(effect_parts, lexicon)
        sentences.extend(_compose_sentences(cause_parts, lexicon))
        return sentences

    merged = {"pre": [], "clause": [], "post": []}
    for intent in intents:
        parts = _realize_intent(intent, lexicon, rng, mode)
        for role in merged:
            merged[role].extend(parts[role])
    return _compose_sentences(merged, lexicon)


def _compose_sentences(parts: dict[str, list], lexicon: Lexicon) -> list[LexSentence]:
    clauses = parts["clause"]
    pre, post = parts["pre"], parts["post"]
    if not clauses:
        segments = _join_pieces(pre + post)
        return [LexSentence(segments=segments)] if segments else []

    first = _join_pieces(pre + [clauses[0]] + post)
    rest = clauses[1:]
    if lexicon.clause_join == "comma_and":
        pieces = [first]
        for clause in rest:
            pieces.append([TextPart(lexicon.join_word)])
            pieces.append(clause)
        return [LexSentence(segments=_join_pieces(pieces))]
    sentences = [LexSentence(segments=first)]
    sentences.extend(LexSentence(segments=_join_pieces([c])) for c in rest)
    return sentences


def lexicalize(
    structured: StructuredPlan,
    doc: IntentDocument,
    lexicon: Lexicon,
    seed: int = 0,
    variant_mode: str = "seeded",
) -> LexicalizedPlan:
    """Choose phrase templates for every sentence group.

    Variant choice is seeded; ``variant_mode="canonical"`` pins every entry
    to its first (house-style) variant, which makes the output independent
    of the seed.
    """
    rng = random.Random(seed)
    links = set(structured.causal_links)
    paragraphs: list[list[LexSentence]] = []
    for para in structured.paragraphs:
        sentences: list[LexSentence] = []
        for group in para:
            intents = [doc.by_id(i) for i in group]
            causal_pair = len(group) == 2 and (group[0], group[1]) in links
            sentences.extend(_assemble_group(intents, lexicon, rng, variant_mode, causal_pair))
        if sentences:
            paragraphs.append(sentences)
    return LexicalizedPlan(paragraphs=paragraphs)


# ---------------------------------------------------------------------------
# referring expression generation

def generate_references(
    plan: LexicalizedPlan, entities: EntityLexicon, seed: int = 0
) -> LexicalizedPlan:
    """Resolve entity tags: full description first, then varied short forms."""
    rng = random.Random(seed)
    seen: set[str] = set()
    log: list[dict] = []
    paragraphs: list[list[LexSentence]] = []
    for para in plan.paragraphs:
        sentences = []
        for sentence in para:
            segments = []
            for seg in sentence.segments:
                if isinstance(seg, EntityRef):
                    if seg.tag not in entities:
                        raise UnknownEntityError(seg.tag)
                    if seg.tag in seen:
                        expression = rng.choice(entities.alternatives(seg.tag))
                        first_mention = False
                    else:
                        expression = entities.full(seg.tag)
                        seen.add(seg.tag)
                        first_mention = True
                    log.append(
                        {"tag": seg.tag, "expression": expression, "first": first_mention}
                    )
                    segments.append(ResolvedEntity(tag=seg.tag, expression=expression))
                else:
                    segments.append(seg)
            sentences.append(LexSentence(segments=segments))
        paragraphs.append(sentences)
    return LexicalizedPlan(paragraphs=paragraphs, references=log)


# ---------------------------------------------------------------------------
# textual realization

_CONTRACTIONS = [
    ("de", "o", "do"), ("de", "a", "da"), ("de", "os", "dos"), ("de", "as", "das"),
    ("em", "o", "no"), ("em", "a", "na"), ("em", "os", "nos"), ("em", "as", "nas"),
    ("por", "o", "pelo"), ("por", "a", "pela"), ("por", "os", "pelos"), ("por", "as", "pelas"),
    ("a", "o", "ao"), ("a", "a", "à"), ("a", "os", "aos"), ("a", "as", "às"),
]

_CONTRACTION_RES = [
    (re.compile(rf"\b{prep} {art}\b"), merged)
    for prep, art, merged in _CONTRACTIONS
]

_SPACE_BEFORE_PUNCT = re.compile(r"\s+([,.!?;:)])")
_SPACE_AFTER_OPEN = re.compile(r"([(])\s+")
_MULTI_SPACE = re.compile(r" {2,}")


def detokenize(tokens: list[str]) -> str:
    """Join tokens with standard spacing and apply Portuguese contractions."""
    return _polish(" ".join(tokens), capitalize=False)


def _polish(text: str, capitalize: bool = True) -> str:
    text = _MULTI_SPACE.sub(" ", text.strip())
    text = _SPACE_BEFORE_PUNCT.sub(r"\1", text)
    text = _SPACE_AFTER_OPEN.sub(r"\1", text)
    for pattern, merged in _CONTRACTION_RES:
        text = pattern.sub(merged, text)
    if capitalize and text:
        for i, ch in enumerate(text):
            if ch.isalpha():
                text = text[:i] + ch.upper() + text[i + 1:]
                break
    return text


def _finish_sentence(text: str) -> str:
    text = _polish(text)
    if text and text[-1] not in ".!?…":
        text += "."
    return text


def realize(
    plan: LexicalizedPlan,
    salutation: str | None = None,
    closing: str | None = None,
) -> str:
    """Surface text: detokenization, contractions, capitalization, paragraphs,
    plus the configurable audience layer (salutation/closing)."""
    paragraphs: list[str] = []
    for para in plan.paragraphs:
        rendered = [_finish_sentence(s.surface()) for s in para]
        rendered = [s for s in rendered if s]
        if rendered:
            paragraphs.append(" ".join(rendered))
    if salutation:
        if paragraphs:
            paragraphs[0] = f"{_finish_sentence(salutation)} {paragraphs[0]}"
        else:
            paragraphs = [_finish_sentence(salutation)]
    if closing:
        paragraphs.append(_finish_sentence(closing))
    return "\n\n".join(paragraphs)


# ---------------------------------------------------------------------------
# whole pipeline

@dataclass
class PipelineConfig:
    lexicon: Lexicon | None = None
    entities: EntityLexicon | None = None
    priorities: dict[str, int] | None = None
    causal_rules: list[CausalRule] | None = None
    variant_mode: str = "seeded"  # seeded | canonical
    salutation: str | None = None  # overrides the lexicon's list ("" disables)
    closing: str | None = None

    def resolved(self) -> "PipelineConfig":
        lex = self.lexicon or load_lexicon()
        ents = self.entities or load_entities(language=lex.language)
        return PipelineConfig(
            lexicon=lex,
            entities=ents,
            priorities=self.priorities,
            causal_rules=self.causal_rules,
            variant_mode=self.variant_mode,
            salutation=self.salutation,
            closing=self.closing,
        )


@dataclass
class ReportText:
    text: str
    trace: dict
    seed: int


def _audience_line(options: list[str], override: str | None, mode: str, seed: int) -> str | None:
    if override is not None:
        return override or None
    if not options:
        return None
    if mode == "canonical" or len(options) == 1:
        return options[0]
    return options[seed % len(options)]


def run_pipeline(doc: IntentDocument, config: PipelineConfig | None = None, seed: int = 0) -> ReportText:
    """Run all stages in order and keep the intermediate plans for auditing."""
    cfg = (config or PipelineConfig()).resolved()
    ordered = order_discourse(doc, cfg.priorities, cfg.causal_rules)
    structured = structure_text(ordered, doc)
    lexicalized = lexicalize(structured, doc, cfg.lexicon, seed=seed, variant_mode=cfg.variant_mode)
    resolved = generate_references(lexicalized, cfg.entities, seed=seed)
    salutation = _audience_line(cfg.lexicon.salutation, cfg.salutation, cfg.variant_mode, seed)
    closing = _audience_line(cfg.lexicon.closing, cfg.closing, cfg.variant_mode, seed)
    text = realize(resolved, salutation=salutation, closing=closing)
    trace = {
        "discourse_order": ordered.to_dict(doc),
        "text_structure": structured.to_dict(doc),
        "lexicalization": lexicalized.to_dict(),
        "references": resolved.references,
        "seed": seed,
        "variant_mode": cfg.variant_mode,
    }
    return ReportText(text=text, trace=trace, seed=seed)
