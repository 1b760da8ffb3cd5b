"""Synthetic report corpus.

Generates (intent document, pipeline reference text) rows with per-stage
annotations, mirroring what a season of ingested observations would yield.
Rows are faithful by construction (the pipeline only verbalizes document
values), which makes the corpus usable both for metric sanity checks and
for training sequence-to-sequence generators.
"""

from __future__ import annotations

import datetime as dt
import random

from .dates import format_date_en
from .ir import IntentDocument, build_document, linearize
from .lexicon import load_entities, load_lexicon
from .pipeline import PipelineConfig, run_pipeline

COASTAL_CITIES = [
    ("Santos", "SP"), ("Rio de Janeiro", "RJ"), ("Salvador", "BA"),
    ("Fortaleza", "CE"), ("Recife", "PE"), ("Natal", "RN"),
    ("Vitória", "ES"), ("Florianópolis", "SC"), ("Itajaí", "SC"),
    ("Paranaguá", "PR"), ("São Luís", "MA"), ("Maceió", "AL"),
    ("Aracaju", "SE"), ("João Pessoa", "PB"), ("Belém", "PA"),
    ("Macapá", "AP"), ("Ilhéus", "BA"), ("Cabo Frio", "RJ"),
    ("Ubatuba", "SP"), ("Rio Grande", "RS"),
]

CONDITIONS = ["sunny", "cloudy", "rainy", "overcast", "clear"]
FISHING = ["excellent", "good", "fair", "poor"]


def synthesize_document(rng: random.Random) -> IntentDocument:
    """One plausible day of observations for a random coastal city."""
    city, uf = rng.choice(COASTAL_CITIES)
    date = dt.date(2022, 1, 1) + dt.timedelta(days=rng.randrange(90))
    intents: list[tuple[str, dict[str, str]]] = [
        ("LOCATION", {"city": city, "uf": uf, "timestamp": format_date_en(date)})
    ]

    weather: dict[str, str] = {"condition": rng.choice(CONDITIONS)}
    weather["temperature"] = f"{rng.randint(16, 38)}ºC"
    if rng.random() < 0.5:
        weather["wind"] = f"{rng.randint(4, 42)}km/h"
    if rng.random() < 0.4:
        weather["humidity"] = f"{rng.randint(40, 98)}%"
    intents.append(("WEATHER", weather))

    if rng.random() < 0.6:
        vessels = {"quantity": str(rng.randint(40, 420))}
        roll = rng.random()
        if roll < 0.3:
            vessels["trend"] = "high"
            vessels["days_max"] = str(rng.choice([7, 15, 30, 60]))
        elif roll < 0.45:
            vessels["trend"] = "low"
            vessels["days_max"] = str(rng.choice([7, 15, 30, 60]))
        intents.append(("VESSELS_IN_PORT", vessels))

    if rng.random() < 0.45:
        ocean: dict[str, str] = {"fishing_condition": rng.choice(FISHING)}
        if rng.random() < 0.6:
            ocean["sea_height"] = f"{rng.randint(0, 2)},{rng.randint(0, 9)}m"
        intents.append(("OCEAN", ocean))

    if rng.random() < 0.08:
        quake = {"magnitude": f"{rng.randint(1, 4)}.{rng.randint(0, 9)} mR"}
        if rng.random() < 0.8:
            quake["depth"] = f"{rng.randint(2, 40)}km"
        intents.append(("EARTHQUAKE", quake))

    if rng.random() < 0.1:
        intents.append(("OIL", {"level": str(rng.randint(50, 99))}))

    return build_document(intents)


def build_synthetic_corpus(
    n: int = 500,
    seed: int = 2022,
    language: str = "pt",
) -> list[dict]:
    """`n` corpus rows: inputs, per-stage pipeline annotations, reference text."""
    rng = random.Random(seed)
    lexicon = load_lexicon(language=language)
    entities = load_entities(language=language)
    config = PipelineConfig(lexicon=lexicon, entities=entities, variant_mode="seeded")
    rows = []
    for i in range(n):
        doc = synthesize_document(rng)
        row_seed = seed * 100_000 + i
        report = run_pipeline(doc, config, seed=row_seed)
        location = doc.first("LOCATION")
        rows.append(
            {
                "id": f"row{i:05d}",
                "date": location.get("timestamp") if location else None,
                "city": location.get("city") if location else None,
                "uf": location.get("uf") if location else None,
                "input_ir": linearize(doc),
                "discourse_order": report.trace["discourse_order"]["order"],
                "text_structure": report.trace["text_structure"]["paragraphs"],
                "lexicalization": report.trace["lexicalization"]["sentences"],
                "references": report.trace["references"],
                "reference_text": report.text,
                "seed": row_seed,
            }
        )
    return rows
