"""Corpus reading, tokenization and vocabulary for the generator."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass


class DataError(Exception):
    pass


PAD, BOS, EOS, UNK = 0, 1, 2, 3
SPECIALS = ["<pad>", "<bos>", "<eos>", "<unk>"]

# words (unicode letters/digits, decimal commas/points inside numbers) or
# single punctuation marks; shared by inputs and outputs
_TOKEN_RE = re.compile(r"\d+(?:[.,]\d+)*|[^\W\d_]+|\S", re.UNICODE)


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


_NO_SPACE_BEFORE = set(',.;:!?)"')
_NO_SPACE_AFTER = set('("')


def detokenize(tokens: list[str]) -> str:
    out: list[str] = []
    for tok in tokens:
        if out and tok not in _NO_SPACE_BEFORE and out[-1] not in _NO_SPACE_AFTER:
            out.append(" ")
        out.append(tok)
    return "".join(out)


def read_corpus_rows(path) -> list[dict]:
    """Rows of the corpus JSONL format: require id, input_ir, reference_text."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as err:
                raise DataError(f"{path}:{line_no}: not JSON ({err})") from err
            if not isinstance(row, dict):
                raise DataError(f"{path}:{line_no}: row is not an object")
            missing = [k for k in ("id", "input_ir", "reference_text") if not row.get(k)]
            if missing:
                raise DataError(f"{path}:{line_no}: missing fields {missing}")
            rows.append(row)
    return rows


@dataclass
class Vocab:
    tokens: list[str]

    def __post_init__(self):
        self.index = {tok: i for i, tok in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def encode(self, toks: list[str]) -> list[int]:
        return [self.index.get(t, UNK) for t in toks]

    def decode(self, ids: list[int]) -> list[str]:
        out = []
        for i in ids:
            if i == EOS:
                break
            if i in (PAD, BOS):
                continue
            out.append(self.tokens[i] if 0 <= i < len(self.tokens) else "<unk>")
        return out

    @classmethod
    def build(cls, texts: list[str]) -> "Vocab":
        seen: dict[str, None] = {}
        for text in texts:
            for tok in tokenize(text):
                seen.setdefault(tok, None)
        return cls(tokens=SPECIALS + sorted(seen))

    def to_json(self) -> str:
        return json.dumps({"tokens": self.tokens}, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "Vocab":
        return cls(tokens=json.loads(text)["tokens"])
