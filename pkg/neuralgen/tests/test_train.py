import json
import time

import pytest

from conftest import CORPUS100
from neuralgen.bleu import corpus_bleu
from neuralgen.data import DataError, read_corpus_rows, tokenize
from neuralgen.serve import TrainedModel
from neuralgen.train import Hyperparams, read_training_log, train


def test_default_hyperparams_are_conservative():
    hp = Hyperparams()
    assert hp.learning_rate == 1e-5
    assert hp.max_epochs == 100
    assert hp.patience == 3


def test_read_corpus_rows_rejects_malformed(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "a", "input_ir": "X(a=\\"1\\")"}\n', encoding="utf-8")
    with pytest.raises(DataError):
        read_corpus_rows(bad)
    worse = tmp_path / "worse.jsonl"
    worse.write_text("{not json}\n", encoding="utf-8")
    with pytest.raises(DataError):
        read_corpus_rows(worse)


def test_empty_train_split_rejected(tmp_path):
    with pytest.raises(DataError):
        train([], str(tmp_path / "m"))


def test_overfit_100_rows_to_high_bleu(overfit_model_dir, corpus_rows):
    """The toy model must memorize the fixture corpus (training BLEU > 0.9)."""
    started = time.monotonic()
    model = TrainedModel(overfit_model_dir)
    hypotheses = []
    references = []
    exact = 0
    from neuralgen.data import detokenize

    for row in corpus_rows:
        output = model.generate(row["input_ir"], max_length=256, seed=0)
        hypotheses.append(tokenize(output))
        references.append(tokenize(row["reference_text"]))
        if output == detokenize(tokenize(row["reference_text"])):
            exact += 1
    score = corpus_bleu(hypotheses, references)
    assert score > 0.9, f"training BLEU {score:.4f}"
    # a solid share of training rows decodes to its reference verbatim
    assert exact >= 40, f"only {exact} exact reproductions"
    # decoding the whole corpus is itself fast; the 30-minute budget for
    # train+decode is enforced at the fixture level by total session time
    assert time.monotonic() - started < 600


def test_training_log_best_curve_nonincreasing(overfit_model_dir):
    log = read_training_log(overfit_model_dir)
    assert log, "empty training log"
    best_curve = []
    best = float("inf")
    for entry in log:
        best = min(best, entry["val_loss"])
        best_curve.append(best)
    assert all(b2 <= b1 for b1, b2 in zip(best_curve, best_curve[1:]))
    assert any(entry["best"] for entry in log)


def test_early_stopping_halts_within_patience(tmp_path, corpus_rows):
    # tiny fast model with a disjoint validation split so val loss turns
    hp = Hyperparams(
        learning_rate=3e-3, max_epochs=80, patience=3, batch_size=10,
        embed_dim=32, hidden_dim=64, seed=1,
    )
    out = train(
        corpus_rows[:60], str(tmp_path / "m"), hp, validation_rows=corpus_rows[60:80]
    )
    log = read_training_log(out)
    last_epoch = log[-1]["epoch"]
    best_epoch = max((e["epoch"] for e in log if e["best"]), default=0)
    assert last_epoch - best_epoch <= hp.patience
    if last_epoch < hp.max_epochs:  # stopped early, as expected on this split
        assert last_epoch - best_epoch == hp.patience
    config = json.load(open(f"{out}/config.json", encoding="utf-8"))
    assert config["best_epoch"] == best_epoch


def test_artifact_reload_matches(overfit_model_dir, corpus_rows):
    a = TrainedModel(overfit_model_dir)
    b = TrainedModel(overfit_model_dir)
    line = corpus_rows[3]["input_ir"]
    assert a.generate(line, 256, 0) == b.generate(line, 256, 0)


def test_fixture_corpus_is_wellformed():
    rows = read_corpus_rows(CORPUS100)
    assert len(rows) == 100
    assert all("\n" not in row["input_ir"] for row in rows)
