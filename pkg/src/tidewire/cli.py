"""Command-line interface.

    tidewire ingest   --source vessels --file feeds/vessels.jsonl --data-dir ./data
    tidewire analyze  --city Santos --date 2022-01-15 --data-dir ./data
    tidewire route    --ir - [--override-neural]
    tidewire generate --arch template|pipeline|neural --ir - [--seed N] [--trace out.json]
    tidewire evaluate --system out/pipeline.jsonl --refs corpus.test.jsonl --report report.json
    tidewire split    --corpus corpus.jsonl --out-dir splits/ [--seed N]
    tidewire bundle   --corpus corpus.jsonl --out-dir bundle/ [--sample-size N] [--raters N]
    tidewire publish  --in report.txt --sink dry-run:./out
    tidewire daily    --config daily.yaml
"""

from __future__ import annotations

import datetime as dt
import json
import sys

import click

from . import __version__
from .analysis import classify_criticality, default_rules, load_rules, route as route_fn, select_content
from .daily import RunConfig, load_run_config, run_daily
from .evaluation import (
    evaluate_system_file,
    make_human_eval_bundle,
    read_corpus,
    split_corpus,
    write_corpus,
)
from .ir import linearize, parse_ir, serialize_ir, validate, DEFAULT_REGISTRY
from .lexicon import load_entities, load_lexicon
from .neural_client import GeneratorClient
from .pipeline import PipelineConfig, run_pipeline
from .publish import compose_thread, publish as publish_fn
from .store import DocumentStore, ingest_feed
from .templates import fill, load_templates, match_template


@click.group()
@click.version_option(__version__)
@click.option("--data-dir", default="./data", show_default=True, help="Store directory.")
@click.option("--config", "config_path", default=None, help="Run config file (daily).")
@click.option("--seed", default=0, show_default=True, type=int, help="Base random seed.")
@click.pass_context
def main(ctx, data_dir, config_path, seed):
    """Coastal-monitoring robot journalism toolkit."""
    ctx.ensure_object(dict)
    ctx.obj.update(data_dir=data_dir, config_path=config_path, seed=seed)


def _read_ir(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    with open(source, "r", encoding="utf-8") as fh:
        return fh.read()


@main.command()
@click.option("--source", required=True,
              type=click.Choice(["weather", "tides", "vessels", "earthquake", "oil"]))
@click.option("--file", "path", required=True, type=click.Path(exists=True))
@click.option("--data-dir", default=None)
@click.pass_context
def ingest(ctx, source, path, data_dir):
    """Ingest a feed file into the document store."""
    store = DocumentStore(data_dir or ctx.obj["data_dir"])
    result = ingest_feed(path, source)
    receipt = store.upsert(result.records)
    click.echo(
        f"{source}: {len(result.records)} records "
        f"(inserted={receipt.inserted}, replaced={receipt.replaced}, skipped={result.skipped})"
    )


@main.command()
@click.option("--city", required=True)
@click.option("--date", required=True)
@click.option("--data-dir", default=None)
@click.option("--rules", "rules_path", default=None, type=click.Path(exists=True))
@click.pass_context
def analyze(ctx, city, date, data_dir, rules_path):
    """Select the day's content for a city and print the canonical IR."""
    store = DocumentStore(data_dir or ctx.obj["data_dir"])
    doc = select_content(store, city, dt.date.fromisoformat(date))
    click.echo(serialize_ir(doc))
    diagnostics = validate(doc, DEFAULT_REGISTRY)
    for diag in diagnostics:
        click.echo(f"# {diag.severity}: {diag.message}", err=True)


@main.command()
@click.option("--ir", "ir_source", default="-", show_default=True)
@click.option("--override-neural", is_flag=True, default=False)
@click.option("--rules", "rules_path", default=None, type=click.Path(exists=True))
def route(ir_source, override_neural, rules_path):
    """Classify criticality and print the routing decision."""
    doc = parse_ir(_read_ir(ir_source))
    rules = load_rules(rules_path) if rules_path else default_rules()
    criticality = classify_criticality(doc, rules)
    decision = route_fn(criticality, override_neural)
    click.echo(json.dumps(decision.__dict__, ensure_ascii=False))


@main.command()
@click.option("--arch", required=True, type=click.Choice(["template", "pipeline", "neural"]))
@click.option("--ir", "ir_source", default="-", show_default=True)
@click.option("--seed", default=None, type=int)
@click.option("--trace", "trace_path", default=None, help="Write the stage trace as JSON.")
@click.option("--language", default="pt", show_default=True)
@click.option("--templates", "templates_path", default=None, type=click.Path(exists=True))
@click.option("--lexicon", "lexicon_path", default=None, type=click.Path(exists=True))
@click.option("--entities", "entities_path", default=None, type=click.Path(exists=True))
@click.option("--endpoint", default=None, help="Neural generator endpoint (cmd:... or http://...).")
@click.pass_context
def generate(ctx, arch, ir_source, seed, trace_path, language, templates_path,
             lexicon_path, entities_path, endpoint):
    """Generate a report for an IR document on stdin or file."""
    doc = parse_ir(_read_ir(ir_source))
    seed = ctx.obj["seed"] if seed is None else seed
    if arch == "template":
        registry = load_templates(templates_path)
        click.echo(fill(match_template(doc, registry), doc))
        return
    if arch == "neural":
        if not endpoint:
            raise click.UsageError("--arch neural requires --endpoint")
        with GeneratorClient(endpoint) as client:
            result = client.generate(linearize(doc), seed=seed)
        click.echo(result.output)
        return
    config = PipelineConfig(
        lexicon=load_lexicon(lexicon_path, language=language),
        entities=load_entities(entities_path, language=language),
    )
    report = run_pipeline(doc, config, seed=seed)
    if trace_path:
        with open(trace_path, "w", encoding="utf-8") as fh:
            json.dump(report.trace, fh, ensure_ascii=False, indent=2)
    click.echo(report.text)


@main.command()
@click.option("--system", "system_path", required=True, type=click.Path(exists=True))
@click.option("--refs", "refs_path", required=True, type=click.Path(exists=True))
@click.option("--report", "report_path", default=None)
def evaluate(system_path, refs_path, report_path):
    """Score a system output file against corpus references."""
    report = evaluate_system_file(system_path, refs_path, report_path)
    click.echo(report.render_table())


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--seed", default=None, type=int)
@click.pass_context
def split(ctx, corpus_path, out_dir, seed):
    """Split a corpus into train/validation/test files (60/20/20)."""
    seed = ctx.obj["seed"] if seed is None else seed
    rows = read_corpus(corpus_path)
    train, validation, test = split_corpus(rows, seed=seed)
    import os

    os.makedirs(out_dir, exist_ok=True)
    for name, part in (("train", train), ("validation", validation), ("test", test)):
        write_corpus(os.path.join(out_dir, f"corpus.{name}.jsonl"), part)
    click.echo(f"split {len(rows)} rows -> {len(train)}/{len(validation)}/{len(test)} (seed={seed})")


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--sample-size", default=100, show_default=True, type=int)
@click.option("--raters", default=5, show_default=True, type=int)
@click.option("--seed", default=None, type=int)
@click.pass_context
def bundle(ctx, corpus_path, out_dir, sample_size, raters, seed):
    """Package rating sheets for a human evaluation round."""
    seed = ctx.obj["seed"] if seed is None else seed
    rows = read_corpus(corpus_path)
    pairs = [(row["input_ir"], row["reference_text"]) for row in rows]
    result = make_human_eval_bundle(pairs, out_dir, sample_size=sample_size,
                                    raters=raters, seed=seed)
    click.echo(f"wrote {len(result.sheet_paths)} sheets to {result.directory}")


@main.command(name="publish")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--sink", required=True)
@click.option("--limit", default=280, show_default=True, type=int)
@click.option("--date", default=None)
def publish_cmd(in_path, sink, limit, date):
    """Compose a thread from a report file and deliver it."""
    with open(in_path, "r", encoding="utf-8") as fh:
        text = fh.read().strip()
    thread = compose_thread(text, limit=limit)
    receipt = publish_fn(thread, sink, date=date)
    click.echo(json.dumps(
        {"report_id": thread.report_id, "chunks": len(thread.chunks),
         "states": receipt.states(), "location": receipt.location},
        ensure_ascii=False,
    ))


@main.command()
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option("--seed", default=None, type=int)
@click.pass_context
def daily(ctx, config_path, seed):
    """Run the full daily cycle for every configured city."""
    path = config_path or ctx.obj["config_path"]
    if not path:
        raise click.UsageError("daily needs --config")
    config = load_run_config(path)
    if seed is not None:
        config.seed = seed
    summary = run_daily(config)
    for report in summary.reports:
        line = (
            f"{report.city}: {report.status}"
            f" criticality={report.criticality or '-'}"
            f" arch={report.architecture_used or report.architecture or '-'}"
        )
        if report.fallback:
            line += f" fallback=({report.fallback})"
        if report.faithfulness_ok is not None:
            line += f" faithful={'yes' if report.faithfulness_ok else 'NO'}"
        if report.error:
            line += f" error={report.error}"
        click.echo(line)
    click.echo(json.dumps(summary.to_dict(), ensure_ascii=False))


if __name__ == "__main__":
    main()
