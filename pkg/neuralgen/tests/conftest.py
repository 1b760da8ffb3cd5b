import os

import pytest

from neuralgen.data import read_corpus_rows
from neuralgen.train import Hyperparams, train

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
CORPUS100 = os.path.join(FIXTURES, "corpus100.jsonl")

# desk-scale overfit settings used by the acceptance tests; the library
# defaults stay at the conservative lr=1e-5/100-epoch configuration
OVERFIT = Hyperparams(learning_rate=2e-3, max_epochs=120, patience=120, batch_size=10, seed=0)


@pytest.fixture(scope="session")
def corpus_rows():
    return read_corpus_rows(CORPUS100)


@pytest.fixture(scope="session")
def overfit_model_dir(tmp_path_factory, corpus_rows):
    """Train the toy model once per session; several tests share it."""
    out = str(tmp_path_factory.mktemp("model") / "overfit")
    train(corpus_rows, out, OVERFIT, validation_rows=corpus_rows[:10])
    return out
