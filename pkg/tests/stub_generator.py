"""Test stand-ins for the external neural generator protocol.

Run as: python stub_generator.py [echo|hallucinate]
Speaks one JSON object per line on stdin/stdout.
"""

import json
import sys


def main() -> None:
    mode = sys.argv[1] if len(sys.argv) > 1 else "echo"
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError:
            response = {"error": {"code": "bad_request", "message": "not JSON"}}
            print(json.dumps(response), flush=True)
            continue
        text = request.get("input", "")
        if not text:
            response = {"error": {"code": "bad_request", "message": "empty input"}}
        elif mode == "hallucinate":
            response = {
                "output": "Hoje em Lugar Nenhum (XX) foram detectados 9999 navios no porto.",
                "model_id": "stub-hallucinate",
                "latency_ms": 0.1,
            }
        else:
            response = {"output": text, "model_id": "stub-echo", "latency_ms": 0.1}
        print(json.dumps(response, ensure_ascii=False), flush=True)


if __name__ == "__main__":
    main()
