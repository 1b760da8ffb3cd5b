#!/usr/bin/env python3
"""Automatic evaluation: overlap metrics, system comparison, hallucination detection.

Builds a small synthetic corpus, scores three mock "systems" against the
references, and shows the faithfulness checker catching a fabricated
vessel count and a swapped value pair.
"""

from tidewire.corpus import build_synthetic_corpus
from tidewire.evaluation import evaluate_systems, split_corpus
from tidewire.faithfulness import check_faithfulness
from tidewire.ir import parse_ir
from tidewire.metrics import gleu, meteor_lite, rouge_l, sentence_bleu, tokenize

print("== tokenizer ==")
for text in ("Olá, mundo.", "28ºC", "0,8m", "18km/h"):
    print(f"  {text!r} -> {tokenize(text)}")

print("\n== sentence-level metrics ==")
hyp = tokenize("O mar está calmo hoje no porto.")
ref = tokenize("O mar segue calmo hoje no porto.")
print(f"  bleu={sentence_bleu(hyp, ref):.3f} gleu={gleu(hyp, ref):.3f} "
      f"rouge_f1={rouge_l(hyp, ref)[2]:.3f} meteor={meteor_lite(hyp, ref):.3f}")

print("\n== corpus split (60/20/20, seeded) ==")
corpus = build_synthetic_corpus(n=100, seed=11)
train, validation, test = split_corpus(corpus, seed=11)
print(f"  {len(train)}/{len(validation)}/{len(test)} rows")

print("\n== comparing systems on the test split ==")
refs = [row["reference_text"] for row in test]
docs = [parse_ir(row["input_ir"]) for row in test]
systems = {
    "pipeline": refs,  # the pipeline produced the references
    "echo-ir": [row["input_ir"] for row in test],  # a raw-IR strawman
    "truncated": [r[: max(20, len(r) // 2)] for r in refs],  # half reports
}
print(evaluate_systems(systems, refs, docs).render_table())

print("\n== hallucination detection ==")
doc = parse_ir('LOCALIZAÇÃO(cidade="Itajaí", uf="SC"); NAVIOS(quantidade="185", dias max="28")')
fabricated = ("Hoje em Itajaí (SC) foi detectada uma quantidade de 285 navios no porto, "
              "o maior valor dos últimos 28 dias.")
verdict = check_faithfulness(doc, fabricated)
print(f"  fabricated count -> ok={verdict.ok}")
for violation in verdict.violations:
    print(f"    {violation.kind}: {violation.detail}")

doc2 = parse_ir('LOCATION(city="Natal",uf="RN"); '
                'WEATHER(condition="sunny",temperature="30ºC",humidity="70%",wind="22km/h")')
swapped = "Hoje em Natal (RN) o clima é ensolarado. A umidade é de 22%. O vento é de 70km/h."
print(f"\n  swapped values, base check -> ok={check_faithfulness(doc2, swapped).ok}")
strict = check_faithfulness(doc2, swapped, pairing=True)
print(f"  swapped values, pairing check -> ok={strict.ok}")
for violation in strict.violations:
    print(f"    {violation.kind}: {violation.detail}")
