"""Thread composition and delivery.

Reports longer than the platform limit are split into a thread: at
sentence boundaries when possible, at word boundaries otherwise, never
inside a word.  Chunks carry " (i/n)" continuation markers whenever the
thread has more than one chunk, lengths are counted in Unicode code
points, and stripping the markers and concatenating the chunks
reconstructs the original text exactly.

Delivery goes to a dry-run file sink or to a generic webhook (one POST per
chunk, stopping at the first hard failure); the receipt records a status
per chunk so partial delivery is visible and retries can reuse the same
report id and chunk indexes.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import os
import re
from dataclasses import dataclass, field

import requests

DEFAULT_LIMIT = 280
MIN_LIMIT = 40
RECORD_SEPARATOR = "\x1e\n"
MARKER_RE = re.compile(r" \(\d+/\d+\)$")
TOKEN_ENV_VAR = "TIDEWIRE_WEBHOOK_TOKEN"


class PublishError(Exception):
    pass


class UnsplittableTokenError(PublishError):
    """A single word exceeds the chunk budget; no legal split exists."""


class SinkError(PublishError):
    def __init__(self, message: str, chunk_index: int | None = None, retryable: bool = False):
        super().__init__(message)
        self.chunk_index = chunk_index
        self.retryable = retryable


@dataclass
class Thread:
    report_id: str
    chunks: list[str]  # rendered, marker included
    marker_style: str = " (i/n)"

    def reconstruct(self) -> str:
        return "".join(MARKER_RE.sub("", chunk) for chunk in self.chunks)


@dataclass
class ChunkStatus:
    state: str  # ok | failed | skipped
    detail: str = ""
    retryable: bool = False


@dataclass
class PublishReceipt:
    sink: str
    statuses: list[ChunkStatus] = field(default_factory=list)
    timestamp: str = ""
    location: str = ""

    @property
    def ok(self) -> bool:
        return all(s.state == "ok" for s in self.statuses)

    def states(self) -> list[str]:
        return [s.state for s in self.statuses]


# ---------------------------------------------------------------------------
# thread composition

def _split_points(text: str) -> tuple[list[int], list[int]]:
    """Candidate cut offsets: after sentence punctuation, and after words."""
    sentence_cuts = []
    for m in re.finditer(r"[.!?…]+", text):
        sentence_cuts.append(m.end())
    word_cuts = []
    for i in range(1, len(text)):
        if not text[i - 1].isspace() and text[i].isspace():
            word_cuts.append(i)
    return sentence_cuts, word_cuts


def _pack(text: str, budget: int) -> list[str]:
    """Greedy partition into exact substrings of at most `budget` code points."""
    sentence_cuts, word_cuts = _split_points(text)
    pieces: list[str] = []
    start = 0
    n = len(text)
    while start < n:
        if n - start <= budget:
            pieces.append(text[start:])
            break
        limit = start + budget
        cut = max((c for c in sentence_cuts if start < c <= limit), default=None)
        if cut is None:
            cut = max((c for c in word_cuts if start < c <= limit), default=None)
        if cut is None:
            overflow = text[start:limit + 20]
            raise UnsplittableTokenError(
                f"token starting at {overflow.split()[0][:40]!r} exceeds the chunk budget"
            )
        pieces.append(text[start:cut])
        start = cut
    return pieces


def compose_thread(text: str, limit: int = DEFAULT_LIMIT, report_id: str | None = None) -> Thread:
    """Split `text` into a publishable thread under `limit` code points per chunk."""
    if limit < MIN_LIMIT:
        raise ValueError(f"limit must be >= {MIN_LIMIT}")
    if report_id is None:
        report_id = hashlib.sha1(text.encode("utf-8")).hexdigest()[:12]
    if len(text) <= limit:
        return Thread(report_id=report_id, chunks=[text])

    # marker length depends on the final chunk count, so iterate to a fixed point
    count = 2
    for _ in range(8):
        marker_reserve = len(f" ({count}/{count})")
        pieces = _pack(text, limit - marker_reserve)
        if len(pieces) == count:
            break
        count = max(len(pieces), 2)
    else:
        raise PublishError("thread size did not converge")
    total = len(pieces)
    chunks = [f"{piece} ({i}/{total})" for i, piece in enumerate(pieces, start=1)]
    for chunk in chunks:
        if len(chunk) > limit:
            raise PublishError("internal: chunk exceeded limit after marking")
    return Thread(report_id=report_id, chunks=chunks)


# ---------------------------------------------------------------------------
# delivery

def _parse_sink(sink: str) -> tuple[str, str]:
    if sink.startswith("dry-run:"):
        return ("dry-run", sink.split(":", 1)[1])
    if sink.startswith("webhook:"):
        return ("webhook", sink.split(":", 1)[1])
    raise SinkError(f"unknown sink {sink!r} (use dry-run:DIR or webhook:URL)")


def _publish_dry_run(thread: Thread, directory: str, date: str) -> PublishReceipt:
    try:
        os.makedirs(directory, exist_ok=True)
        path = os.path.join(directory, f"{date}_{thread.report_id}.txt")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(RECORD_SEPARATOR.join(thread.chunks))
    except OSError as err:
        raise SinkError(f"cannot write dry-run file: {err}") from err
    return PublishReceipt(
        sink="dry-run",
        statuses=[ChunkStatus("ok") for _ in thread.chunks],
        timestamp=dt.datetime.now(dt.timezone.utc).isoformat(),
        location=path,
    )


def _publish_webhook(
    thread: Thread, url: str, date: str, token_env: str = TOKEN_ENV_VAR, timeout: float = 10.0
) -> PublishReceipt:
    headers = {"Content-Type": "application/json"}
    token = os.environ.get(token_env)
    if token:
        headers["Authorization"] = f"Bearer {token}"
    statuses: list[ChunkStatus] = []
    failed = False
    total = len(thread.chunks)
    for index, chunk in enumerate(thread.chunks, start=1):
        if failed:
            statuses.append(ChunkStatus("skipped", "not attempted after failure"))
            continue
        body = {
            "report_id": thread.report_id,
            "index": index,
            "total": total,
            "text": chunk,
            "date": date,
        }
        try:
            response = requests.post(url, json=body, headers=headers, timeout=timeout)
        except requests.RequestException as err:
            statuses.append(ChunkStatus("failed", f"connection error: {err}", retryable=True))
            failed = True
            continue
        if 200 <= response.status_code < 300:
            statuses.append(ChunkStatus("ok"))
        else:
            retryable = response.status_code >= 500
            statuses.append(
                ChunkStatus("failed", f"HTTP {response.status_code}", retryable=retryable)
            )
            failed = True
    return PublishReceipt(
        sink="webhook",
        statuses=statuses,
        timestamp=dt.datetime.now(dt.timezone.utc).isoformat(),
        location=url,
    )


def publish(thread: Thread, sink: str, date: str | None = None) -> PublishReceipt:
    """Deliver a thread to `dry-run:DIR` or `webhook:URL`.

    Chunks go out strictly in order; delivery stops at the first hard
    failure and the receipt shows ok/failed/skipped per chunk.
    """
    kind, target = _parse_sink(sink)
    date = date or dt.date.today().isoformat()
    if kind == "dry-run":
        return _publish_dry_run(thread, target, date)
    return _publish_webhook(thread, target, date)
