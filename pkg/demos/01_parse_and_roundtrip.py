#!/usr/bin/env python3
"""Walk through the intent-attribute-value representation.

Parsing, name/key canonicalization (including the Portuguese alias table),
escape handling, schema validation and the serialize/parse round trip.
"""

from tidewire.ir import DEFAULT_REGISTRY, linearize, parse_ir, serialize_ir, validate

RAW = """
LOCALIZAÇÃO(cidade="Santos", uf="SP", data="Jan 15, 2022");
CLIMA(condição="nublado", temperatura="26ºC", vento="18km/h");
VESSELS IN PORT(quantity="350", trend="high", days max="30")
"""

print("== input (mixed Portuguese/English, messy spacing) ==")
print(RAW.strip())

doc = parse_ir(RAW)
print("\n== parsed intents ==")
for intent in doc:
    print(f"  [{intent.id}] {intent.name}: {intent.attributes}")

print("\n== canonical serialization ==")
print(serialize_ir(doc))

print("\n== single-line form for sequence models ==")
print(linearize(doc))

print("\n== round trip holds ==")
print(parse_ir(serialize_ir(doc)) == doc)

print("\n== validation against the shipped schema registry ==")
diagnostics = validate(doc, DEFAULT_REGISTRY)
print(diagnostics if diagnostics else "no diagnostics")

print("\n== escapes carry free text ==")
tricky = parse_ir(r'NOTE(body="ele disse \"calmaria\" ontem\nmar segue alto")')
print(repr(tricky.intents[0].attributes["body"]))
print(serialize_ir(tricky))
