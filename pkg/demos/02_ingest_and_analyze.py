#!/usr/bin/env python3
"""Feed ingestion, the document store, trend detection and routing.

Replays the shipped fixture feeds into a temporary store, selects the
day's content for two cities and shows how criticality decides the
generation architecture.
"""

import datetime as dt
import tempfile

from tidewire.analysis import classify_criticality, default_rules, route, select_content
from tidewire.ir import serialize_ir
from tidewire.resources import data_path
from tidewire.store import DocumentStore, ingest_feed

day = dt.date(2022, 1, 15)

with tempfile.TemporaryDirectory() as tmp:
    store = DocumentStore(tmp)
    print("== ingesting fixture feeds ==")
    for source in ("weather", "tides", "vessels", "earthquake", "oil"):
        result = ingest_feed(data_path(f"feeds/{source}.jsonl"), source)
        receipt = store.upsert(result.records)
        print(f"  {source:<11} {len(result.records):>3} records "
              f"(skipped={result.skipped}, inserted={receipt.inserted})")

    print("\n== vessel count window for Santos ==")
    series = store.query_window("Santos", "quantity", day - dt.timedelta(days=1), days=29)
    print(f"  {len(series.points)} prior days, max={max(series.values()):.0f}; today=350")

    rules = default_rules()
    for city in ("Santos", "Rio de Janeiro"):
        print(f"\n== {city} ==")
        doc = select_content(store, city, day)
        print("  " + serialize_ir(doc))
        criticality = classify_criticality(doc, rules)
        for override in (False, True):
            decision = route(criticality, override)
            print(f"  override={override!s:<5} -> {decision.architecture:<9} ({decision.reason})")
