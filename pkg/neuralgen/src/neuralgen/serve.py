"""Protocol server: line-delimited JSON on stdio, optional single-route HTTP.

    request:  {"input": str, "max_length": int, "seed": int}
    response: {"output": str, "model_id": str, "latency_ms": number}
    error:    {"error": {"code": str, "message": str}}

Requests are handled one at a time.  Identical (input, seed) requests get
identical output: decoding is greedy and the model is frozen while
serving.  The reserved model name ``echo`` answers every request with its
own input, which is the protocol-conformance fixture.
"""

from __future__ import annotations

import http.server
import json
import os
import sys
import time

import torch

from .data import Vocab, detokenize, tokenize
from .model import Seq2Seq


class ServeError(Exception):
    pass


class EchoModel:
    model_id = "echo"

    def generate(self, text: str, max_length: int, seed: int) -> str:
        del max_length, seed
        return text


class TrainedModel:
    def __init__(self, artifact_dir: str):
        config_path = os.path.join(artifact_dir, "config.json")
        if not os.path.exists(config_path):
            raise ServeError(f"no model artifact at {artifact_dir}")
        with open(config_path, encoding="utf-8") as fh:
            config = json.load(fh)
        with open(os.path.join(artifact_dir, "vocab.json"), encoding="utf-8") as fh:
            self.vocab = Vocab.from_json(fh.read())
        self.model = Seq2Seq(
            config["vocab_size"],
            embed_dim=config["embed_dim"],
            hidden_dim=config["hidden_dim"],
        )
        state = torch.load(os.path.join(artifact_dir, "model.pt"), map_location="cpu",
                           weights_only=True)
        self.model.load_state_dict(state)
        self.model.eval()
        self.model_id = config.get("model_id", "seq2seq")

    def generate(self, text: str, max_length: int, seed: int) -> str:
        del seed  # greedy decoding; the seed is part of the contract, not the math
        src = self.vocab.encode(tokenize(text))
        ids = self.model.greedy_decode(src, max_length=max_length)
        return detokenize(self.vocab.decode(ids))


def load_model(spec: str):
    if spec == "echo":
        return EchoModel()
    return TrainedModel(spec)


def _error(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


def handle_request(model, raw: str) -> dict:
    try:
        request = json.loads(raw)
    except json.JSONDecodeError as err:
        return _error("bad_request", f"not JSON: {err}")
    if not isinstance(request, dict):
        return _error("bad_request", "request must be an object")
    text = request.get("input", "")
    if not isinstance(text, str) or not text.strip():
        return _error("bad_request", "input must be a non-empty string")
    if "\n" in text:
        return _error("bad_request", "input must be a single line")
    try:
        max_length = int(request.get("max_length", 256))
        seed = int(request.get("seed", 0))
    except (TypeError, ValueError):
        return _error("bad_request", "max_length and seed must be integers")
    max_length = max(1, min(max_length, 2048))
    started = time.monotonic()
    try:
        output = model.generate(text, max_length=max_length, seed=seed)
    except Exception as err:  # surface model crashes as protocol errors
        return _error("model_failure", f"{type(err).__name__}: {err}")
    latency_ms = (time.monotonic() - started) * 1000.0
    return {"output": output, "model_id": model.model_id, "latency_ms": round(latency_ms, 3)}


def serve_stdio(model, stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        response = handle_request(model, line)
        stdout.write(json.dumps(response, ensure_ascii=False) + "\n")
        stdout.flush()


def serve_http(model, host: str = "127.0.0.1", port: int = 8757):
    class Handler(http.server.BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length).decode("utf-8")
            response = handle_request(model, raw)
            body = json.dumps(response, ensure_ascii=False).encode("utf-8")
            self.send_response(400 if "error" in response else 200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, *args):
            pass

    server = http.server.HTTPServer((host, port), Handler)
    return server
