#!/usr/bin/env python3
"""The template architecture: rule matching and slot filling.

Critical content (earthquakes, oil alerts) goes through fixed templates —
terse, fluent, and faithful by construction since filling is lookup-only.
"""

from tidewire.ir import parse_ir
from tidewire.templates import fill, load_templates, match_template

registry = load_templates()
print(f"shipped templates: {[t.id for t in registry.templates]}")

EXAMPLES = [
    # standalone earthquake alert carrying its own location + source entity
    'EARTHQUAKE(city="Arapiraca", uf="AL", magnitude="1.7mR", depth="10km", '
    'entity="Seismology Center at the University of São Paulo")',
    # daily report with weather context and a fresh quake
    'LOCALIZAÇÃO(cidade="Santos", uf="SP"); '
    'CLIMA(condição="nublado", temperatura="26ºC", vento="18km/h"); '
    'TERREMOTO(magnitude="1.3 mR", depth="10km")',
    # oil extraction at a critical level
    'LOCATION(city="Salvador", uf="BA"); OIL(level="98")',
]

for text in EXAMPLES:
    doc = parse_ir(text)
    template = match_template(doc, registry)
    print(f"\n== intents {sorted(set(doc.names()))} -> template {template.id!r} ==")
    print(fill(template, doc))
