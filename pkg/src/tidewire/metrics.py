"""Text-overlap metrics for comparing generated reports against references.

All metrics work on token sequences from :func:`tokenize` and return scores
in [0, 1].  BLEU is the standard corpus-level definition (modified n-gram
precision, geometric mean, brevity penalty) with an add-one smoothed
sentence-level variant; GLEU is the pooled min(precision, recall) n-gram
score; ROUGE-L is LCS-based precision/recall/F1; the METEOR variant here
aligns unigrams by exact match then by a light Portuguese stem (plural
-s/-es, gender -o/-a) and applies the standard fragmentation penalty
0.5*(chunks/matches)^3 over Fmean = 10PR/(R+9P).
"""

from __future__ import annotations

import math
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass


class EmptyInputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# tokenization

# numbers keep their decimal separator ("0,8" is one token); letter runs
# include the degree sign so unit suffixes split off digits whole
# ("28ºc" -> ["28", "ºc"], "32°c" -> ["32", "°c"])
_TOKEN_RE = re.compile(r"\d+(?:[.,]\d+)*|(?:[^\W\d_]|°)+|\S", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased NFC tokens; punctuation split off, units split from digits."""
    normalized = unicodedata.normalize("NFC", text).lower()
    tokens = []
    for m in _TOKEN_RE.finditer(normalized):
        tok = m.group(0)
        if tok:
            tokens.append(tok)
    return tokens


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


# ---------------------------------------------------------------------------
# BLEU

def bleu(
    hypotheses: list[list[str]],
    reference_lists: list[list[list[str]]],
    max_n: int = 4,
) -> float:
    """Corpus-level BLEU over tokenized hypotheses and per-hypothesis reference lists."""
    if not hypotheses or not reference_lists:
        raise EmptyInputError("empty corpus")
    if len(hypotheses) != len(reference_lists):
        raise ValueError("hypotheses and reference lists must align")
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = 0
    ref_len = 0
    for hyp, refs in zip(hypotheses, reference_lists):
        if not refs:
            raise EmptyInputError("hypothesis without references")
        hyp_len += len(hyp)
        # closest reference length; ties go to the shorter
        ref_len += min((abs(len(r) - len(hyp)), len(r)) for r in refs)[1]
        for n in range(1, max_n + 1):
            hyp_counts = _ngrams(hyp, n)
            if not hyp_counts:
                continue
            max_ref = Counter()
            for ref in refs:
                for gram, count in _ngrams(ref, n).items():
                    if count > max_ref[gram]:
                        max_ref[gram] = count
            totals[n - 1] += sum(hyp_counts.values())
            matches[n - 1] += sum(min(c, max_ref[g]) for g, c in hyp_counts.items())
    # levels where the corpus has no candidate n-grams at all (every
    # hypothesis shorter than n) drop out of the geometric mean, so an
    # identical short pair still scores 1.0
    levels = [(m, t) for m, t in zip(matches, totals) if t > 0]
    if not levels or hyp_len == 0:
        return 0.0
    if any(m == 0 for m, _ in levels):
        return 0.0
    log_precision = sum(math.log(m / t) for m, t in levels) / len(levels)
    brevity = 1.0 if hyp_len > ref_len else math.exp(1 - ref_len / max(hyp_len, 1))
    return brevity * math.exp(log_precision)


def sentence_bleu(hypothesis: list[str], reference: list[str], max_n: int = 4) -> float:
    """Single-pair BLEU with add-one smoothing on the n>=2 precisions."""
    if not hypothesis or not reference:
        raise EmptyInputError("empty sentence")
    logs = []
    for n in range(1, max_n + 1):
        hyp_counts = _ngrams(hypothesis, n)
        ref_counts = _ngrams(reference, n)
        total = sum(hyp_counts.values())
        match = sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
        if n == 1:
            if match == 0 or total == 0:
                return 0.0
            logs.append(math.log(match / total))
        else:
            logs.append(math.log((match + 1) / (total + 1)))
    brevity = 1.0 if len(hypothesis) > len(reference) else math.exp(
        1 - len(reference) / len(hypothesis)
    )
    return brevity * math.exp(sum(logs) / max_n)


# ---------------------------------------------------------------------------
# GLEU

def gleu(hypothesis: list[str], reference: list[str], max_n: int = 4) -> float:
    """min(precision, recall) over the pooled 1..max_n n-gram counts."""
    if not hypothesis or not reference:
        raise EmptyInputError("empty sentence")
    match = hyp_total = ref_total = 0
    for n in range(1, max_n + 1):
        hyp_counts = _ngrams(hypothesis, n)
        ref_counts = _ngrams(reference, n)
        hyp_total += sum(hyp_counts.values())
        ref_total += sum(ref_counts.values())
        match += sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
    if hyp_total == 0 or ref_total == 0:
        return 0.0
    return min(match / hyp_total, match / ref_total)


# ---------------------------------------------------------------------------
# ROUGE-L

def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[-1]))
        previous = current
    return previous[-1]


def rouge_l(hypothesis: list[str], reference: list[str]) -> tuple[float, float, float]:
    """LCS precision, recall and F1."""
    if not hypothesis or not reference:
        raise EmptyInputError("empty sentence")
    lcs = _lcs_length(hypothesis, reference)
    precision = lcs / len(hypothesis)
    recall = lcs / len(reference)
    if precision + recall == 0:
        return (0.0, 0.0, 0.0)
    f1 = 2 * precision * recall / (precision + recall)
    return (precision, recall, f1)


# ---------------------------------------------------------------------------
# METEOR (exact + light-stem alignment)

def light_stem(token: str) -> str:
    """Portuguese-flavoured stem: drop plural -es/-s, then gender -o/-a."""
    t = token
    if t.endswith("es") and len(t) > 4:
        t = t[:-2]
    elif t.endswith("s") and len(t) > 3:
        t = t[:-1]
    if t and t[-1] in "oa" and len(t) > 3:
        t = t[:-1]
    return t


def _align(hypothesis: list[str], reference: list[str]) -> list[tuple[int, int]]:
    """In-order unigram alignment: exact pass first, then stem pass."""
    pairs: list[tuple[int, int]] = []
    used_h: set[int] = set()
    used_r: set[int] = set()
    for match_key in (lambda t: t, light_stem):
        ref_slots: dict[str, list[int]] = {}
        for j, tok in enumerate(reference):
            if j not in used_r:
                ref_slots.setdefault(match_key(tok), []).append(j)
        for i, tok in enumerate(hypothesis):
            if i in used_h:
                continue
            slots = ref_slots.get(match_key(tok))
            if slots:
                j = slots.pop(0)
                pairs.append((i, j))
                used_h.add(i)
                used_r.add(j)
    pairs.sort()
    return pairs


def meteor_lite(hypothesis: list[str], reference: list[str]) -> float:
    if not hypothesis or not reference:
        raise EmptyInputError("empty sentence")
    pairs = _align(hypothesis, reference)
    matches = len(pairs)
    if matches == 0:
        return 0.0
    precision = matches / len(hypothesis)
    recall = matches / len(reference)
    fmean = 10 * precision * recall / (recall + 9 * precision)
    chunks = 1
    for (h0, r0), (h1, r1) in zip(pairs, pairs[1:]):
        if h1 != h0 + 1 or r1 != r0 + 1:
            chunks += 1
    penalty = 0.5 * (chunks / matches) ** 3
    return fmean * (1 - penalty)


# ---------------------------------------------------------------------------
# lexical variety proxy

def distinct_n(outputs: list[list[str]] | list[str], n: int = 2) -> float:
    """Unique/total n-gram ratio across a set of outputs."""
    total = 0
    unique: set[tuple[str, ...]] = set()
    for output in outputs:
        tokens = tokenize(output) if isinstance(output, str) else output
        grams = [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]
        total += len(grams)
        unique.update(grams)
    if total == 0:
        return 0.0
    return len(unique) / total


@dataclass(frozen=True)
class PairScores:
    bleu: float
    gleu: float
    rouge_l_f1: float
    meteor: float


def score_pair(hypothesis: str, reference: str) -> PairScores:
    """Sentence-level scores for one (hypothesis, reference) text pair."""
    hyp, ref = tokenize(hypothesis), tokenize(reference)
    if not hyp or not ref:
        raise EmptyInputError("empty text")
    return PairScores(
        bleu=sentence_bleu(hyp, ref),
        gleu=gleu(hyp, ref),
        rouge_l_f1=rouge_l(hyp, ref)[2],
        meteor=meteor_lite(hyp, ref),
    )
