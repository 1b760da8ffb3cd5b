"""neuralgen CLI: train a model artifact, serve the generation protocol."""

from __future__ import annotations

import sys

import click

from .data import read_corpus_rows
from .serve import load_model, serve_http, serve_stdio
from .train import Hyperparams, train as train_fn


@click.group()
def main():
    """Desk-scale neural report generator."""


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--val", "val_path", default=None, type=click.Path(exists=True),
              help="Validation split; defaults to a carved tenth of the corpus.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--lr", default=1e-5, show_default=True, type=float)
@click.option("--max-epochs", default=100, show_default=True, type=int)
@click.option("--patience", default=3, show_default=True, type=int)
@click.option("--batch-size", default=16, show_default=True, type=int)
@click.option("--hidden-dim", default=256, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
def train(corpus_path, val_path, out_dir, lr, max_epochs, patience, batch_size,
          hidden_dim, seed):
    """Train on a corpus JSONL file and write the model artifact."""
    rows = read_corpus_rows(corpus_path)
    val_rows = read_corpus_rows(val_path) if val_path else None
    hp = Hyperparams(
        learning_rate=lr,
        max_epochs=max_epochs,
        patience=patience,
        batch_size=batch_size,
        hidden_dim=hidden_dim,
        seed=seed,
    )
    out = train_fn(rows, out_dir, hp, validation_rows=val_rows)
    click.echo(f"model artifact written to {out}")


@main.command()
@click.option("--model", "model_spec", required=True,
              help="Artifact directory, or 'echo' for the protocol fixture model.")
@click.option("--stdio", is_flag=True, default=False, help="Serve on stdin/stdout.")
@click.option("--http", "http_port", default=None, type=int, help="Serve one HTTP route.")
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(model_spec, stdio, http_port, host):
    """Answer generation requests over the wire protocol."""
    model = load_model(model_spec)
    if http_port is not None:
        server = serve_http(model, host=host, port=http_port)
        click.echo(f"serving {model.model_id} on http://{host}:{server.server_address[1]}",
                   err=True)
        server.serve_forever()
        return
    # stdio is the default transport
    del stdio
    serve_stdio(model, stdin=sys.stdin, stdout=sys.stdout)


if __name__ == "__main__":
    main()
