"""Corpus BLEU for training-progress checks (token-level, max_n=4)."""

from __future__ import annotations

import math
from collections import Counter


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(hypotheses: list[list[str]], references: list[list[str]], max_n: int = 4) -> float:
    if not hypotheses or len(hypotheses) != len(references):
        raise ValueError("hypotheses and references must be non-empty and aligned")
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            hyp_counts = _ngrams(hyp, n)
            ref_counts = _ngrams(ref, n)
            totals[n - 1] += sum(hyp_counts.values())
            matches[n - 1] += sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
    levels = [(m, t) for m, t in zip(matches, totals) if t > 0]
    if not levels or hyp_len == 0 or any(m == 0 for m, _ in levels):
        return 0.0
    log_precision = sum(math.log(m / t) for m, t in levels) / len(levels)
    brevity = 1.0 if hyp_len > ref_len else math.exp(1 - ref_len / hyp_len)
    return brevity * math.exp(log_precision)
