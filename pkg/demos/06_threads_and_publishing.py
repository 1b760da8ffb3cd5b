#!/usr/bin/env python3
"""Thread composition and delivery.

Splits a long report at sentence boundaries under the 280-code-point
limit, shows the exact-reconstruction property, and publishes to a dry-run
file sink.
"""

import tempfile

from tidewire.publish import compose_thread, publish

REPORT = (
    "Hoje, dia 15 de Janeiro de 2022, o clima é ensolarado no Rio de Janeiro (RJ). "
    "A temperatura média esperada é de 32ºC, e esta é a maior temperatura dos últimos 30 dias. "
    "Atualmente, 280 navios pesqueiros estão no porto, e este é o maior número de navios "
    "registrado nos últimos 30 dias. Segundo o site Marine Traffic, este fenômeno pode ter "
    "sido causado devido às excelentes condições para pesca hoje. "
    "A maré alta será às 04:12 e a maré baixa às 10:43."
)

print(f"report length: {len(REPORT)} code points")
thread = compose_thread(REPORT, limit=280)
print(f"thread id: {thread.report_id}\n")
for i, chunk in enumerate(thread.chunks, start=1):
    print(f"-- chunk {i} ({len(chunk)} cp) --")
    print(chunk)
    print()

print("reconstruction equals the original:", thread.reconstruct() == REPORT)

with tempfile.TemporaryDirectory() as tmp:
    receipt = publish(thread, f"dry-run:{tmp}", date="2022-01-15")
    print(f"\npublished to {receipt.location}")
    print(f"per-chunk states: {receipt.states()}")
