"""Content selection and routing.

Turns the day's stored records for a city into an intent document, detects
record-setting trends in time series, classifies the document's criticality
against a declarative rule file, and picks the generation architecture:
critical content always goes to templates; routine content goes to the
pipeline, or to the neural generator when the override flag is set.
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass, field

import yaml

from .dates import format_date_en
from .ir import IntentDocument, build_document
from .store import DocumentStore, TimeSeries


class AnalysisError(Exception):
    pass


class EmptySeriesError(AnalysisError):
    pass


class NoDataError(AnalysisError):
    """No record of any source for the requested (city, date)."""


@dataclass
class TrendDescriptor:
    direction: str  # high | low | none
    window_days: int
    current: float


@dataclass
class RoutingDecision:
    criticality: str  # critical | routine
    architecture: str  # template | pipeline | neural
    reason: str


@dataclass
class CriticalityRule:
    intent: str
    criticality: str = "critical"
    attribute: str | None = None
    op: str = "present"  # present | >= | > | <= | < | ==
    threshold: float | None = None
    id: str = ""

    def fires(self, doc: IntentDocument) -> bool:
        for intent in doc:
            if intent.name != self.intent:
                continue
            if self.op == "present" or self.attribute is None:
                return True
            raw = intent.get(self.attribute)
            if raw is None:
                continue
            value = leading_number(raw)
            if value is None or self.threshold is None:
                continue
            if self.op == ">=" and value >= self.threshold:
                return True
            if self.op == ">" and value > self.threshold:
                return True
            if self.op == "<=" and value <= self.threshold:
                return True
            if self.op == "<" and value < self.threshold:
                return True
            if self.op == "==" and value == self.threshold:
                return True
        return False


@dataclass
class CriticalityRules:
    rules: list[CriticalityRule] = field(default_factory=list)

    def fired(self, doc: IntentDocument) -> list[CriticalityRule]:
        return [r for r in self.rules if r.fires(doc)]


_LEADING_NUMBER = re.compile(r"-?\d+(?:[.,]\d+)?")


def leading_number(raw: str) -> float | None:
    m = _LEADING_NUMBER.search(raw)
    if not m:
        return None
    return float(m.group(0).replace(",", "."))


def load_rules(path) -> CriticalityRules:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or []
    rules = []
    for i, row in enumerate(data):
        rules.append(
            CriticalityRule(
                intent=row["intent"],
                criticality=row.get("criticality", "critical"),
                attribute=row.get("attribute"),
                op=str(row.get("op", "present")),
                threshold=row.get("threshold"),
                id=row.get("id") or f"rule{i}",
            )
        )
    return CriticalityRules(rules=rules)


def default_rules() -> CriticalityRules:
    """Earthquakes are always critical; oil extraction at >= 95 is critical."""
    return CriticalityRules(
        rules=[
            CriticalityRule(intent="EARTHQUAKE", id="earthquake_detected"),
            CriticalityRule(
                intent="OIL", attribute="level", op=">=", threshold=95.0, id="oil_critical_level"
            ),
        ]
    )


# ---------------------------------------------------------------------------
# trend detection

def detect_trend(series: TimeSeries, current: float, window_days: int) -> TrendDescriptor:
    """Record check against the prior values of a window.

    ``high`` only when `current` strictly exceeds every prior value in the
    window, ``low`` when strictly below all of them; a tie is ``none`` — we
    never claim a record the data does not support.
    """
    if window_days < 2:
        raise ValueError("window_days must be >= 2")
    prior = series.values()
    if not prior:
        raise EmptySeriesError(f"no prior values for {series.city}/{series.metric}")
    if all(current > v for v in prior):
        direction = "high"
    elif all(current < v for v in prior):
        direction = "low"
    else:
        direction = "none"
    return TrendDescriptor(direction=direction, window_days=window_days, current=current)


# ---------------------------------------------------------------------------
# content selection

@dataclass
class SelectionConfig:
    trend_window_days: int = 30
    earthquake_recency_days: int = 1


def _fmt_num(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def _fmt_decimal_comma(value) -> str:
    return _fmt_num(value).replace(".", ",")


def select_content(
    store: DocumentStore,
    city: str,
    date: dt.date,
    config: SelectionConfig | None = None,
) -> IntentDocument:
    """Build the day's intent document for a city from stored records.

    LOCATION always comes first.  Weather, tides and ocean facts are taken
    from the day's records; vessel counts get trend attributes only when
    the count is a strict window record; earthquakes are reported only while
    fresh (within the recency window); oil extraction when present.
    """
    config = config or SelectionConfig()
    records = store.records_for(city, date)
    quake = None
    for back in range(config.earthquake_recency_days + 1):
        candidate = store.record("earthquake", city, date - dt.timedelta(days=back))
        if candidate is not None:
            quake = candidate
            break
    if not records and quake is None:
        raise NoDataError(f"no records for {city} on {date.isoformat()}")

    uf = next(iter(records.values())).uf if records else quake.uf
    intents: list[tuple[str, dict[str, str]]] = [
        ("LOCATION", {"city": city, "uf": uf, "timestamp": format_date_en(date)})
    ]

    weather = records.get("weather")
    if weather is not None:
        attrs: dict[str, str] = {}
        p = weather.payload
        if "condition" in p:
            attrs["condition"] = str(p["condition"])
        if "temperature" in p:
            attrs["temperature"] = f"{_fmt_num(p['temperature'])}ºC"
        if "wind" in p:
            attrs["wind"] = f"{_fmt_num(p['wind'])}km/h"
        if "humidity" in p:
            attrs["humidity"] = f"{_fmt_num(p['humidity'])}%"
        if "cloudiness" in p:
            attrs["cloudiness"] = f"{_fmt_num(p['cloudiness'])}%"
        if "sunscreen" in p:
            attrs["sunscreen"] = str(p["sunscreen"])
        if attrs:
            intents.append(("WEATHER", attrs))

    if quake is not None:
        p = quake.payload
        attrs = {}
        if "magnitude" in p:
            attrs["magnitude"] = f"{p['magnitude']} mR"
        if "depth" in p:
            attrs["depth"] = f"{_fmt_num(p['depth'])}km"
        if attrs:
            intents.append(("EARTHQUAKE", attrs))

    vessels = records.get("vessels")
    if vessels is not None and "quantity" in vessels.payload:
        quantity = vessels.payload["quantity"]
        attrs = {"quantity": _fmt_num(quantity)}
        window = config.trend_window_days
        try:
            prior = store.query_window(
                city, "quantity", date - dt.timedelta(days=1), days=window - 1
            )
            if prior.points:
                trend = detect_trend(prior, float(quantity), window)
                if trend.direction != "none":
                    attrs["trend"] = trend.direction
                    attrs["days_max"] = str(window)
        except EmptySeriesError:
            pass
        intents.append(("VESSELS_IN_PORT", attrs))

    tides = records.get("tides")
    if tides is not None:
        p = tides.payload
        ocean_attrs = {}
        if "fishing_condition" in p:
            ocean_attrs["fishing_condition"] = str(p["fishing_condition"])
        if "sea_height" in p:
            ocean_attrs["sea_height"] = f"{_fmt_decimal_comma(p['sea_height'])}m"
        if ocean_attrs:
            intents.append(("OCEAN", ocean_attrs))
        tide_attrs = {}
        if "high_tide" in p:
            tide_attrs["high_tide"] = str(p["high_tide"])
        if "low_tide" in p:
            tide_attrs["low_tide"] = str(p["low_tide"])
        if tide_attrs:
            intents.append(("TIDES", tide_attrs))

    oil = records.get("oil")
    if oil is not None and "level" in oil.payload:
        intents.append(("OIL", {"level": _fmt_num(oil.payload["level"])}))

    return build_document(intents)


# ---------------------------------------------------------------------------
# criticality + routing

def classify_criticality(doc: IntentDocument, rules: CriticalityRules) -> str:
    return "critical" if rules.fired(doc) else "routine"


def route(criticality: str, neural_override: bool) -> RoutingDecision:
    """Total over {critical, routine} x {False, True}; critical row is constant."""
    if criticality == "critical":
        return RoutingDecision(
            criticality="critical",
            architecture="template",
            reason="critical content always uses the template architecture",
        )
    if neural_override:
        return RoutingDecision(
            criticality="routine",
            architecture="neural",
            reason="routine content with neural override enabled",
        )
    return RoutingDecision(
        criticality="routine",
        architecture="pipeline",
        reason="routine content defaults to the pipeline architecture",
    )
