"""File-backed document store for daily coastal observations.

One line-delimited JSON file per source collection under a data directory;
an in-memory index keyed by (source, city, date) is rebuilt on open.
Writes rewrite the touched collection file atomically (temp file + rename),
so a crash never leaves a half-written collection and reopening always
yields exactly the records of the last completed upsert.

Single writer, many readers: reads hand out snapshots, writes are
serialized on the store handle.
"""

from __future__ import annotations

import datetime as dt
import json
import os
import re
import threading
from dataclasses import dataclass, field

from .ir import BRAZILIAN_UFS

SOURCES = ("weather", "tides", "vessels", "earthquake", "oil")


class StoreError(Exception):
    pass


class FeedFormatError(StoreError):
    """More than half the feed lines were unusable; likely the wrong file."""


class UnknownCityError(StoreError):
    pass


@dataclass
class SourceRecord:
    source: str
    city: str
    uf: str
    date: dt.date
    payload: dict[str, float | int | str]
    fetched_at: str = ""

    @property
    def key(self) -> tuple[str, str, dt.date]:
        return (self.source, self.city, self.date)

    def to_json(self) -> str:
        row = {
            "source": self.source,
            "city": self.city,
            "uf": self.uf,
            "date": self.date.isoformat(),
            "fetched_at": self.fetched_at,
            **self.payload,
        }
        return json.dumps(row, ensure_ascii=False, sort_keys=True)


@dataclass
class TimeSeries:
    city: str
    metric: str
    points: list[tuple[dt.date, float]]
    window: int

    def values(self) -> list[float]:
        return [v for _, v in self.points]


@dataclass
class IngestResult:
    records: list[SourceRecord]
    skipped: int
    source: str

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


@dataclass
class UpsertReceipt:
    inserted: int
    replaced: int


_DECIMAL_COMMA = re.compile(r"^-?\d+,\d+$")
_PLAIN_NUMBER = re.compile(r"^-?\d+(\.\d+)?$")


def _normalize_payload_value(value):
    """Decimal comma to point for numeric-looking strings; numbers pass through."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        text = value.strip()
        if _DECIMAL_COMMA.match(text):
            return float(text.replace(",", "."))
        if _PLAIN_NUMBER.match(text):
            return float(text) if "." in text else int(text)
        return text
    raise ValueError(f"payload values must be scalar, got {type(value).__name__}")


def _record_from_obj(obj: dict, expected_source: str | None) -> SourceRecord:
    if not isinstance(obj, dict):
        raise ValueError("not an object")
    for required in ("source", "city", "uf", "date"):
        if required not in obj:
            raise ValueError(f"missing key {required!r}")
    source = str(obj["source"])
    if source not in SOURCES:
        raise ValueError(f"unknown source {source!r}")
    if expected_source is not None and source != expected_source:
        raise ValueError(f"record source {source!r} does not match feed {expected_source!r}")
    uf = str(obj["uf"]).upper()
    if uf not in BRAZILIAN_UFS:
        raise ValueError(f"invalid uf {uf!r}")
    date = dt.date.fromisoformat(str(obj["date"]))
    payload = {}
    for key, value in obj.items():
        if key in ("source", "city", "uf", "date", "fetched_at"):
            continue
        payload[key] = _normalize_payload_value(value)
    fetched = str(obj.get("fetched_at") or dt.datetime.now(dt.timezone.utc).isoformat())
    return SourceRecord(
        source=source, city=str(obj["city"]), uf=uf, date=date, payload=payload, fetched_at=fetched
    )


def ingest_feed(path: str | os.PathLike, source: str) -> IngestResult:
    """Read a line-delimited feed file into normalized records.

    Malformed lines are skipped and counted; a feed with more than 50%
    malformed lines raises :class:`FeedFormatError` (it is probably the
    wrong file for this source).
    """
    if source not in SOURCES:
        raise ValueError(f"unknown source {source!r}")
    records: list[SourceRecord] = []
    skipped = 0
    total = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            total += 1
            try:
                obj = json.loads(line)
                records.append(_record_from_obj(obj, expected_source=source))
            except (ValueError, TypeError):
                skipped += 1
    if total and skipped * 2 > total:
        raise FeedFormatError(f"{skipped}/{total} lines malformed in {path}")
    return IngestResult(records=records, skipped=skipped, source=source)


class DocumentStore:
    """Queryable store over one data directory; safe for concurrent reads."""

    def __init__(self, data_dir: str | os.PathLike):
        self.data_dir = str(data_dir)
        os.makedirs(self.data_dir, exist_ok=True)
        self._lock = threading.Lock()
        self._index: dict[tuple[str, str, dt.date], SourceRecord] = {}
        self._load()

    def _collection_path(self, source: str) -> str:
        return os.path.join(self.data_dir, f"{source}.jsonl")

    def _load(self) -> None:
        for source in SOURCES:
            path = self._collection_path(source)
            if not os.path.exists(path):
                continue
            with open(path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        record = _record_from_obj(json.loads(line), expected_source=source)
                    except (ValueError, TypeError):
                        continue  # tolerate a torn trailing line
                    self._index[record.key] = record

    def _write_collection(self, source: str) -> None:
        path = self._collection_path(source)
        rows = sorted(
            (r for r in self._index.values() if r.source == source),
            key=lambda r: (r.city, r.date),
        )
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            for record in rows:
                fh.write(record.to_json() + "\n")
        os.replace(tmp, path)

    def upsert(self, records) -> UpsertReceipt:
        """Insert or replace records by (source, city, date); atomic per collection."""
        records = list(records)
        inserted = replaced = 0
        with self._lock:
            touched = set()
            for record in records:
                if record.key in self._index:
                    replaced += 1
                else:
                    inserted += 1
                self._index[record.key] = record
                touched.add(record.source)
            for source in sorted(touched):
                self._write_collection(source)
        return UpsertReceipt(inserted=inserted, replaced=replaced)

    # --- queries ---

    def cities(self) -> list[str]:
        return sorted({r.city for r in self._index.values()})

    def has_city(self, city: str) -> bool:
        return any(r.city == city for r in self._index.values())

    def records_for(self, city: str, date: dt.date) -> dict[str, SourceRecord]:
        """Records of every source for one city/day, keyed by source."""
        out = {}
        for source in SOURCES:
            record = self._index.get((source, city, date))
            if record is not None:
                out[source] = record
        return out

    def record(self, source: str, city: str, date: dt.date) -> SourceRecord | None:
        return self._index.get((source, city, date))

    def query_window(self, city: str, metric: str, end_date: dt.date, days: int) -> TimeSeries:
        """Numeric series for a metric over [end_date-days+1, end_date]; gaps stay absent."""
        if days < 1:
            raise ValueError("days must be >= 1")
        if not self.has_city(city):
            raise UnknownCityError(city)
        start = end_date - dt.timedelta(days=days - 1)
        by_date: dict[dt.date, float] = {}
        for source in SOURCES:
            for (src, c, date), record in self._index.items():
                if src != source or c != city or not (start <= date <= end_date):
                    continue
                value = record.payload.get(metric)
                if isinstance(value, (int, float)) and date not in by_date:
                    by_date[date] = float(value)
        points = sorted(by_date.items())
        return TimeSeries(city=city, metric=metric, points=points, window=days)
