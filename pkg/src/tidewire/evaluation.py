"""Corpus splitting, system-level evaluation and human-rating bundles.

`evaluate_systems` scores one or more generators against shared references
(automatic overlap metrics, faithfulness pass rate, distinct-2 as the
lexical-variety proxy) and renders a compact comparison table plus a
machine-readable report.  `make_human_eval_bundle` packages a seeded sample
of (input, output) pairs into per-rater sheets for 1-5 Likert scoring of
fluency, semantics and lexical variety.
"""

from __future__ import annotations

import csv
import json
import os
import random
from dataclasses import asdict, dataclass, field

from .faithfulness import check_faithfulness
from .ir import IntentDocument, parse_ir
from .metrics import bleu, distinct_n, gleu, meteor_lite, rouge_l, tokenize

CORPUS_FIELDS = (
    "id", "date", "city", "uf", "input_ir",
    "discourse_order", "text_structure", "lexicalization", "references",
    "reference_text",
)

RATING_DIMENSIONS = {
    "fluency": "Is the text easy to read?",
    "semantics": "Does the text clearly express the input data?",
    "lexical_variety": "Is the text original or is the content repetitive?",
}


class EvaluationError(Exception):
    pass


# ---------------------------------------------------------------------------
# corpus splitting

def split_corpus(rows: list, seed: int = 0) -> tuple[list, list, list]:
    """Seeded shuffle then 60/20/20 split; remainder rows stay in train."""
    shuffled = list(rows)
    random.Random(seed).shuffle(shuffled)
    n = len(shuffled)
    n_validation = n // 5
    n_test = n // 5
    n_train = n - n_validation - n_test
    train = shuffled[:n_train]
    validation = shuffled[n_train:n_train + n_validation]
    test = shuffled[n_train + n_validation:]
    return train, validation, test


# ---------------------------------------------------------------------------
# corpus file IO

def write_corpus(path, rows: list[dict]) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_corpus(path) -> list[dict]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            missing = [k for k in ("id", "input_ir", "reference_text") if k not in row]
            if missing:
                raise EvaluationError(f"{path}:{line_no} missing fields {missing}")
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# system evaluation

@dataclass
class SystemScores:
    system: str
    bleu: float
    gleu: float
    rouge_l_f1: float
    meteor: float
    faithfulness: float
    distinct_2: float
    pairs: int


@dataclass
class MetricReport:
    rows: list[SystemScores] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "systems": [asdict(r) for r in self.rows],
            "metric_parameters": {
                "bleu": "corpus-level, max_n=4, brevity penalty, unsmoothed",
                "gleu": "pooled n-grams 1..4, min(precision, recall)",
                "rouge": "ROUGE-L F1",
                "meteor": "exact+light-stem alignment, Fmean=10PR/(R+9P), "
                          "penalty=0.5*(chunks/matches)^3",
                "lexical_variety_proxy": "distinct-2 (unique/total bigrams)",
            },
        }

    def render_table(self) -> str:
        header = f"{'System':<14}{'Bleu':>8}{'Gleu':>8}{'Rouge':>8}{'Meteor':>8}{'Faithful':>10}{'Dist-2':>8}{'Pairs':>7}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            lines.append(
                f"{r.system:<14}{r.bleu:>8.3f}{r.gleu:>8.3f}{r.rouge_l_f1:>8.3f}"
                f"{r.meteor:>8.3f}{r.faithfulness:>10.3f}{r.distinct_2:>8.3f}{r.pairs:>7d}"
            )
        return "\n".join(lines)


def evaluate_systems(
    outputs_per_system: dict[str, list[str]],
    references: list[str],
    docs: list[IntentDocument],
) -> MetricReport:
    """Score each system's outputs against shared references.

    `docs` runs parallel to `references` and feeds the faithfulness column:
    each output is checked against the document it was generated from.
    """
    if not references:
        raise EvaluationError("no references")
    report = MetricReport()
    ref_tokens = [tokenize(r) for r in references]
    for system in sorted(outputs_per_system):
        outputs = outputs_per_system[system]
        if len(outputs) != len(references):
            raise EvaluationError(
                f"system {system!r} has {len(outputs)} outputs for {len(references)} references"
            )
        hyp_tokens = [tokenize(o) for o in outputs]
        usable = [(h, r) for h, r in zip(hyp_tokens, ref_tokens) if h and r]
        if not usable:
            raise EvaluationError(f"system {system!r} has no scorable pairs")
        corpus_bleu = bleu([h for h, _ in usable], [[r] for _, r in usable])
        mean_gleu = sum(gleu(h, r) for h, r in usable) / len(usable)
        mean_rouge = sum(rouge_l(h, r)[2] for h, r in usable) / len(usable)
        mean_meteor = sum(meteor_lite(h, r) for h, r in usable) / len(usable)
        verdicts = [check_faithfulness(d, o).ok for d, o in zip(docs, outputs)]
        pass_rate = sum(verdicts) / len(verdicts)
        report.rows.append(
            SystemScores(
                system=system,
                bleu=corpus_bleu,
                gleu=mean_gleu,
                rouge_l_f1=mean_rouge,
                meteor=mean_meteor,
                faithfulness=pass_rate,
                distinct_2=distinct_n(outputs),
                pairs=len(outputs),
            )
        )
    return report


def evaluate_system_file(system_path, refs_path, report_path=None) -> MetricReport:
    """Score a system output file ({id, output} JSONL) against a corpus file."""
    refs = {row["id"]: row for row in read_corpus(refs_path)}
    outputs: list[str] = []
    references: list[str] = []
    docs: list[IntentDocument] = []
    with open(system_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            ref = refs.get(row.get("id"))
            if ref is None:
                continue
            outputs.append(str(row.get("output", "")))
            references.append(ref["reference_text"])
            docs.append(parse_ir(ref["input_ir"]))
    if not outputs:
        raise EvaluationError("no overlapping ids between system file and references")
    name = os.path.splitext(os.path.basename(str(system_path)))[0]
    report = evaluate_systems({name: outputs}, references, docs)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, ensure_ascii=False, indent=2)
    return report


# ---------------------------------------------------------------------------
# human evaluation bundles

@dataclass
class LikertBundle:
    directory: str
    sheet_paths: list[str]
    manifest_path: str
    sample_size: int
    raters: int
    seed: int


def make_human_eval_bundle(
    pairs: list[tuple[str, str]],
    out_dir,
    sample_size: int = 100,
    raters: int = 5,
    seed: int = 0,
) -> LikertBundle:
    """Write one randomized rating sheet per rater plus a manifest.

    `pairs` are (input_ir, output_text).  The sample and each rater's row
    order are fully determined by `seed`, so a bundle can be regenerated.
    """
    if sample_size > len(pairs):
        raise EvaluationError(
            f"sample_size {sample_size} exceeds population {len(pairs)}"
        )
    os.makedirs(out_dir, exist_ok=True)
    rng = random.Random(seed)
    sample = rng.sample(list(pairs), sample_size)
    sheet_paths = []
    for rater in range(1, raters + 1):
        order = list(range(sample_size))
        random.Random(seed * 1_000_003 + rater).shuffle(order)
        path = os.path.join(out_dir, f"rater_{rater}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["item", "input_ir", "output_text"] + [f"{d}_1_5" for d in RATING_DIMENSIONS]
            )
            for item in order:
                input_ir, output_text = sample[item]
                writer.writerow([item, input_ir, output_text, "", "", ""])
        sheet_paths.append(path)
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "sample_size": sample_size,
                "raters": raters,
                "seed": seed,
                "scale": "1-5 (1 = strongly disagree, 5 = strongly agree)",
                "dimensions": RATING_DIMENSIONS,
            },
            fh,
            ensure_ascii=False,
            indent=2,
        )
    return LikertBundle(
        directory=str(out_dir),
        sheet_paths=sheet_paths,
        manifest_path=manifest_path,
        sample_size=sample_size,
        raters=raters,
        seed=seed,
    )
