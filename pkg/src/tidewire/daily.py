"""One-shot daily run: select, classify, route, generate, check, publish.

Cities are processed independently; a failure in one never takes down the
run.  The neural branch is gated by the faithfulness checker (a violating
text is blocked and flagged instead of published) and falls back to the
pipeline when the generator endpoint is unavailable.  Given the same
store, config and seed, a daily run publishes byte-identical text.
"""

from __future__ import annotations

import datetime as dt
import os
import zlib
from dataclasses import dataclass, field

import yaml

from .analysis import (
    CriticalityRules,
    NoDataError,
    SelectionConfig,
    classify_criticality,
    default_rules,
    load_rules,
    route,
    select_content,
)
from .faithfulness import check_faithfulness
from .ir import linearize
from .lexicon import load_entities, load_lexicon
from .neural_client import GeneratorClient, GeneratorError, GeneratorUnavailable
from .pipeline import PipelineConfig, run_pipeline
from .publish import compose_thread, publish
from .store import DocumentStore
from .templates import NoMatchError, TemplateError, fill, load_templates, match_template


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    data_dir: str
    cities: list[str]
    date: dt.date
    seed: int = 0
    neural_override: bool = False
    generator_endpoint: str | None = None
    sink: str = "dry-run:./out"
    limit: int = 280
    language: str = "pt"
    templates_path: str | None = None
    lexicon_path: str | None = None
    entities_path: str | None = None
    rules_path: str | None = None
    trend_window_days: int = 30


def load_run_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    neural = data.get("neural") or {}
    paths = data.get("paths") or {}
    config = RunConfig(
        data_dir=str(data.get("data_dir", "./data")),
        cities=[str(c) for c in (data.get("cities") or [])],
        date=dt.date.fromisoformat(str(data.get("date"))),
        seed=int(data.get("seed", 0)),
        neural_override=bool(neural.get("override", False)),
        generator_endpoint=neural.get("endpoint"),
        sink=str(data.get("sink", "dry-run:./out")),
        limit=int(data.get("limit", 280)),
        language=str(data.get("language", "pt")),
        templates_path=paths.get("templates"),
        lexicon_path=paths.get("lexicon"),
        entities_path=paths.get("entities"),
        rules_path=paths.get("rules"),
        trend_window_days=int(data.get("trend_window_days", 30)),
    )
    if not os.path.isdir(config.data_dir):
        raise ConfigError(f"data_dir {config.data_dir!r} does not exist")
    for label, p in (
        ("templates", config.templates_path),
        ("lexicon", config.lexicon_path),
        ("entities", config.entities_path),
        ("rules", config.rules_path),
    ):
        if p is not None and not os.path.exists(p):
            raise ConfigError(f"{label} path {p!r} does not exist")
    if not config.cities:
        raise ConfigError("no cities configured")
    return config


@dataclass
class CityReport:
    city: str
    status: str  # published | blocked | error
    criticality: str = ""
    architecture: str = ""  # decided by the router
    architecture_used: str = ""  # after any fallback
    fallback: str | None = None
    faithfulness_ok: bool | None = None
    violations: list[str] = field(default_factory=list)
    publish_states: list[str] = field(default_factory=list)
    output_location: str = ""
    text: str = ""
    seed: int = 0
    error: str = ""

    def to_dict(self) -> dict:
        return {
            "city": self.city,
            "status": self.status,
            "criticality": self.criticality,
            "architecture": self.architecture,
            "architecture_used": self.architecture_used,
            "fallback": self.fallback,
            "faithfulness_ok": self.faithfulness_ok,
            "violations": self.violations,
            "publish_states": self.publish_states,
            "output_location": self.output_location,
            "seed": self.seed,
            "error": self.error,
        }


@dataclass
class DailySummary:
    date: str
    seed: int
    reports: list[CityReport] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "date": self.date,
            "seed": self.seed,
            "reports": [r.to_dict() for r in self.reports],
        }


def city_seed(base_seed: int, city: str) -> int:
    """Stable per-city seed so adding a city never reshuffles the others."""
    return base_seed ^ zlib.crc32(city.encode("utf-8"))


def _generate(doc, decision, config: RunConfig, registry, pipeline_config, client, seed):
    """Returns (text, architecture_used, fallback_note)."""
    if decision.architecture == "template":
        try:
            return fill(match_template(doc, registry), doc), "template", None
        except (NoMatchError, TemplateError) as err:
            text = run_pipeline(doc, pipeline_config, seed=seed).text
            return text, "pipeline", f"template failed: {err}"
    if decision.architecture == "neural":
        if client is not None:
            try:
                result = client.generate(linearize(doc), seed=seed)
                return result.output, "neural", None
            except (GeneratorUnavailable, GeneratorError) as err:
                note = f"neural generator unavailable: {err}"
            except ValueError as err:
                note = f"neural request rejected: {err}"
        else:
            note = "neural generator not configured"
        text = run_pipeline(doc, pipeline_config, seed=seed).text
        return text, "pipeline", note
    return run_pipeline(doc, pipeline_config, seed=seed).text, "pipeline", None


def run_daily(config: RunConfig, rules: CriticalityRules | None = None) -> DailySummary:
    store = DocumentStore(config.data_dir)
    registry = load_templates(config.templates_path)
    lexicon = load_lexicon(config.lexicon_path, language=config.language)
    entities = load_entities(config.entities_path, language=config.language)
    pipeline_config = PipelineConfig(lexicon=lexicon, entities=entities)
    if rules is None:
        rules = load_rules(config.rules_path) if config.rules_path else default_rules()
    selection = SelectionConfig(trend_window_days=config.trend_window_days)
    client = (
        GeneratorClient(config.generator_endpoint) if config.generator_endpoint else None
    )

    summary = DailySummary(date=config.date.isoformat(), seed=config.seed)
    try:
        for city in config.cities:
            seed = city_seed(config.seed, city)
            report = CityReport(city=city, status="error", seed=seed)
            summary.reports.append(report)
            try:
                doc = select_content(store, city, config.date, selection)
                criticality = classify_criticality(doc, rules)
                decision = route(criticality, config.neural_override)
                report.criticality = criticality
                report.architecture = decision.architecture

                text, used, fallback = _generate(
                    doc, decision, config, registry, pipeline_config, client, seed
                )
                report.architecture_used = used
                report.fallback = fallback
                report.text = text

                verdict = check_faithfulness(doc, text)
                report.faithfulness_ok = verdict.ok
                report.violations = [f"{v.kind}: {v.detail}" for v in verdict.violations]
                if used == "neural" and not verdict.ok:
                    # hallucination gate: never publish unchecked neural text
                    report.status = "blocked"
                    continue

                thread = compose_thread(text, limit=config.limit)
                receipt = publish(thread, config.sink, date=config.date.isoformat())
                report.publish_states = receipt.states()
                report.output_location = receipt.location
                report.status = "published" if receipt.ok else "error"
                if not receipt.ok:
                    report.error = "partial delivery"
            except NoDataError as err:
                report.error = str(err)
            except Exception as err:  # isolate per-city failures
                report.error = f"{type(err).__name__}: {err}"
    finally:
        if client is not None:
            client.close()
    return summary
