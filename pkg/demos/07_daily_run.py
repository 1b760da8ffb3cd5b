#!/usr/bin/env python3
"""The whole system end to end: the one-shot daily cycle.

Ingests the fixture feeds for five coastal cities, then runs
select -> classify -> route -> generate -> faithfulness check -> publish
for each, printing the per-city summary.  With no neural endpoint
configured the router's neural branch falls back to the pipeline and the
summary records why.
"""

import datetime as dt
import json
import tempfile

from tidewire.daily import RunConfig, run_daily
from tidewire.resources import data_path
from tidewire.store import DocumentStore, ingest_feed

with tempfile.TemporaryDirectory() as tmp:
    data_dir = f"{tmp}/data"
    store = DocumentStore(data_dir)
    for source in ("weather", "tides", "vessels", "earthquake", "oil"):
        store.upsert(ingest_feed(data_path(f"feeds/{source}.jsonl"), source).records)

    config = RunConfig(
        data_dir=data_dir,
        cities=["Santos", "Rio de Janeiro", "Cabo Frio", "Itajaí", "Salvador"],
        date=dt.date(2022, 1, 15),
        seed=42,
        sink=f"dry-run:{tmp}/out",
        neural_override=True,  # no endpoint configured: watch the fallback
    )
    summary = run_daily(config)

    for report in summary.reports:
        print(f"== {report.city} ==")
        print(f"  criticality:  {report.criticality}")
        print(f"  routed to:    {report.architecture}"
              + (f"  (used {report.architecture_used}: {report.fallback})"
                 if report.fallback else ""))
        print(f"  faithful:     {report.faithfulness_ok}")
        print(f"  publish:      {report.status} {report.publish_states}")
        print(f"  text:         {report.text.splitlines()[0][:90]}...")
        print()

    print("machine-readable summary keys:", sorted(summary.to_dict().keys()))
    print(json.dumps(summary.to_dict()["reports"][0], ensure_ascii=False)[:200] + "...")
