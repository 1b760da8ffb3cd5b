"""Training loop: teacher forcing, per-epoch validation, early stopping.

The artifact directory holds the weights, the vocabulary, the model config
and a JSONL training log with one row per epoch (train loss, validation
loss, best-so-far marker), so runs can be audited after the fact.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass

import torch
from torch import nn

from .data import BOS, EOS, PAD, DataError, Vocab, tokenize
from .model import Seq2Seq


@dataclass
class Hyperparams:
    learning_rate: float = 1e-5
    max_epochs: int = 100
    patience: int = 3
    batch_size: int = 16
    embed_dim: int = 128
    hidden_dim: int = 256
    seed: int = 0


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    best: bool


def _encode_pairs(rows: list[dict], vocab: Vocab) -> list[tuple[list[int], list[int]]]:
    pairs = []
    for row in rows:
        src = vocab.encode(tokenize(row["input_ir"]))
        tgt = vocab.encode(tokenize(row["reference_text"]))
        pairs.append((src, [BOS] + tgt + [EOS]))
    return pairs


def _batches(pairs, batch_size):
    for start in range(0, len(pairs), batch_size):
        chunk = pairs[start:start + batch_size]
        src_len = max(len(s) for s, _ in chunk)
        tgt_len = max(len(t) for _, t in chunk)
        src = torch.full((len(chunk), src_len), PAD, dtype=torch.long)
        tgt = torch.full((len(chunk), tgt_len), PAD, dtype=torch.long)
        for i, (s, t) in enumerate(chunk):
            src[i, : len(s)] = torch.tensor(s)
            tgt[i, : len(t)] = torch.tensor(t)
        yield src, tgt


def _run_epoch(model, pairs, criterion, optimizer, batch_size) -> float:
    training = optimizer is not None
    model.train(training)
    total_loss = 0.0
    total_tokens = 0
    with torch.set_grad_enabled(training):
        for src, tgt in _batches(pairs, batch_size):
            logits = model(src, tgt[:, :-1])
            target = tgt[:, 1:]
            loss = criterion(logits.reshape(-1, logits.size(-1)), target.reshape(-1))
            tokens = int((target != PAD).sum())
            if training:
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
            total_loss += float(loss.detach()) * tokens
            total_tokens += tokens
    return total_loss / max(total_tokens, 1)


def train(
    train_rows: list[dict],
    out_dir: str,
    hyperparams: Hyperparams | None = None,
    validation_rows: list[dict] | None = None,
) -> str:
    """Train on corpus rows and save the model artifact; returns `out_dir`.

    When no validation split is given, the last tenth of the training rows
    is held out.  Early stopping halts at most `patience` epochs after the
    best validation loss; the best weights are what gets saved.
    """
    hp = hyperparams or Hyperparams()
    if not train_rows:
        raise DataError("empty train split")
    if validation_rows is None:
        holdout = max(1, len(train_rows) // 10)
        if len(train_rows) <= holdout:
            raise DataError("train split too small to carve a validation set")
        validation_rows = train_rows[-holdout:]
        train_rows = train_rows[:-holdout]

    torch.manual_seed(hp.seed)
    vocab = Vocab.build(
        [r["input_ir"] for r in train_rows + validation_rows]
        + [r["reference_text"] for r in train_rows + validation_rows]
    )
    model = Seq2Seq(len(vocab), embed_dim=hp.embed_dim, hidden_dim=hp.hidden_dim)
    optimizer = torch.optim.Adam(model.parameters(), lr=hp.learning_rate)
    criterion = nn.CrossEntropyLoss(ignore_index=PAD)

    train_pairs = _encode_pairs(train_rows, vocab)
    val_pairs = _encode_pairs(validation_rows, vocab)

    os.makedirs(out_dir, exist_ok=True)
    log_path = os.path.join(out_dir, "training_log.jsonl")
    best_val = float("inf")
    best_epoch = 0
    best_state = None
    started = time.monotonic()
    with open(log_path, "w", encoding="utf-8") as log:
        for epoch in range(1, hp.max_epochs + 1):
            train_loss = _run_epoch(model, train_pairs, criterion, optimizer, hp.batch_size)
            val_loss = _run_epoch(model, val_pairs, criterion, None, hp.batch_size)
            is_best = val_loss < best_val
            if is_best:
                best_val = val_loss
                best_epoch = epoch
                best_state = {k: v.clone() for k, v in model.state_dict().items()}
            log.write(json.dumps(asdict(EpochStats(epoch, train_loss, val_loss, is_best))) + "\n")
            log.flush()
            if epoch - best_epoch >= hp.patience:
                break

    if best_state is not None:
        model.load_state_dict(best_state)
    torch.save(model.state_dict(), os.path.join(out_dir, "model.pt"))
    with open(os.path.join(out_dir, "vocab.json"), "w", encoding="utf-8") as fh:
        fh.write(vocab.to_json())
    with open(os.path.join(out_dir, "config.json"), "w", encoding="utf-8") as fh:
        json.dump(
            {
                "model_id": f"seq2seq-gru-{hp.hidden_dim}",
                "vocab_size": len(vocab),
                "embed_dim": hp.embed_dim,
                "hidden_dim": hp.hidden_dim,
                "hyperparams": asdict(hp),
                "best_epoch": best_epoch,
                "best_val_loss": best_val,
                "train_rows": len(train_rows),
                "validation_rows": len(validation_rows),
                "wall_seconds": round(time.monotonic() - started, 2),
            },
            fh,
            indent=2,
        )
    return out_dir


def read_training_log(out_dir: str) -> list[dict]:
    with open(os.path.join(out_dir, "training_log.jsonl"), encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
