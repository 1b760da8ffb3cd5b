"""Content faithfulness checking for generated reports.

A report hallucinates when it claims values the source document never
contained.  The checker works at the value level (never fluency):

* every numeric token in the output must appear among the document's
  attribute values (decimal-comma and decimal-point forms compare equal);
* when the document names a place, the city and state code must survive
  into the text (restricted to city/uf — entities introduced by lexicon
  phrasing are legitimate);
* optionally, values must stay attached to the right attribute: an output
  saying "a umidade é de 29km/h" when the document has humidity 76% and
  wind 29km/h passes the number-presence check but fails the pairing check.

The checker always returns a verdict; it never raises on odd text.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

from .ir import IntentDocument
from .metrics import tokenize

_NUMBER_RE = re.compile(r"\d+(?:[.,]\d+)?")
_NUMBER_TOKEN = re.compile(r"^\d+(?:[.,]\d+)*$")


@dataclass(frozen=True)
class Violation:
    kind: str  # unsupported_number | missing_value | value_swap
    detail: str


@dataclass
class FaithfulnessVerdict:
    ok: bool
    violations: list[Violation] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _to_decimal(text: str) -> Decimal | None:
    try:
        return Decimal(text.replace(",", "."))
    except InvalidOperation:
        return None


def extract_numbers(text: str) -> set[Decimal]:
    """All numeric values mentioned in a text, decimal-normalized."""
    values = set()
    for m in _NUMBER_RE.finditer(text):
        value = _to_decimal(m.group(0))
        if value is not None:
            values.add(value)
    return values


def document_numbers(doc: IntentDocument) -> set[Decimal]:
    values = set()
    for intent in doc:
        for raw in intent.attributes.values():
            values.update(extract_numbers(raw))
    return values


def _fold(text: str) -> str:
    decomposed = unicodedata.normalize("NFD", text.lower())
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def _mentions(output: str, value: str) -> bool:
    pattern = re.compile(rf"(?<![^\W\d_]){re.escape(_fold(value))}(?![^\W\d_])")
    return bool(pattern.search(_fold(output)))


# Anchor words that tie a numeric attribute to its surface mention; used by
# the optional pairing check to catch swapped values.
_ANCHORS: dict[str, tuple[str, ...]] = {
    "temperature": ("temperatura", "temperature"),
    "humidity": ("umidade", "humidity"),
    "wind": ("vento", "wind"),
    "cloudiness": ("nebulosidade", "cloudiness"),
    "sea": ("mar", "sea"),
    "sea_height": ("mar", "sea"),
    "depth": ("profundidade", "depth"),
    "magnitude": ("magnitude",),
    "quantity": ("navios", "vessels", "embarcações"),
    "level": ("nível", "nivel", "level"),
}
_ANCHOR_SCAN_WINDOW = 8


def _pairing_violations(doc: IntentDocument, output: str) -> list[Violation]:
    # anchor word -> numbers any attribute using that anchor may legitimately
    # put next to it (two attributes can share a surface word, e.g. "mar")
    expected_by_anchor: dict[str, tuple[set[Decimal], list[str]]] = {}
    for intent in doc:
        for key, raw in intent.attributes.items():
            numbers = extract_numbers(raw)
            if not numbers:
                continue
            for anchor in {_fold(a) for a in _ANCHORS.get(key, ())}:
                slot = expected_by_anchor.setdefault(anchor, (set(), []))
                slot[0].update(numbers)
                slot[1].append(f"{intent.name}.{key}={raw!r}")
    if not expected_by_anchor:
        return []

    tokens = tokenize(output)
    folded = [_fold(t) for t in tokens]
    sentence_of = []
    sentence_id = 0
    for tok in tokens:
        sentence_of.append(sentence_id)
        if tok in (".", "!", "?"):
            sentence_id += 1
    violations = []
    for anchor, (expected, sources) in sorted(expected_by_anchor.items()):
        pos = next((i for i, t in enumerate(folded) if t == anchor), None)
        if pos is None:
            continue
        # nearest number around the first mention, inside the same sentence;
        # "é de N" patterns win ties over trailing context on the left
        found = None
        for dist in range(1, _ANCHOR_SCAN_WINDOW + 1):
            for idx in (pos + dist, pos - dist):
                if (
                    0 <= idx < len(tokens)
                    and sentence_of[idx] == sentence_of[pos]
                    and _NUMBER_TOKEN.match(tokens[idx])
                ):
                    found = tokens[idx]
                    break
            if found:
                break
        if found is None:
            continue
        value = _to_decimal(found)
        if value is not None and value not in expected:
            violations.append(
                Violation(
                    "value_swap",
                    f"text pairs {found!r} with '{anchor}' but the document has "
                    + "; ".join(sources),
                )
            )
    return violations


def check_faithfulness(
    doc: IntentDocument,
    output: str,
    required_values: list[str] | None = None,
    pairing: bool = False,
) -> FaithfulnessVerdict:
    """Verdict on whether `output` only claims values supported by `doc`.

    `required_values` lists raw attribute values that the generator's
    realized slots promised to verbalize (available from a pipeline trace
    or template bindings); their numbers must appear in the output.
    `pairing=True` adds the attribute-anchor check for swapped values.
    """
    violations: list[Violation] = []

    supported = document_numbers(doc)
    for value in sorted(extract_numbers(output)):
        if value not in supported:
            violations.append(
                Violation("unsupported_number", f"number {value} not present in the document")
            )

    for intent in doc:
        for key in ("city", "uf", "entity"):
            value = intent.get(key)
            if value and not _mentions(output, value):
                violations.append(
                    Violation(
                        "missing_value", f"{intent.name}.{key}={value!r} absent from output"
                    )
                )

    for raw in required_values or []:
        for number in extract_numbers(raw):
            if number not in extract_numbers(output):
                violations.append(
                    Violation("missing_value", f"required value {raw!r} absent from output")
                )
                break

    if pairing:
        violations.extend(_pairing_violations(doc, output))

    return FaithfulnessVerdict(ok=not violations, violations=violations)
