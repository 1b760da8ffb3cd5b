"""Client for the external neural generator.

The generator is an external service speaking a small wire protocol:
one JSON object per line over the child process's stdin/stdout, or the
same payload POSTed to an HTTP endpoint.

    request:  {"input": str, "max_length": int, "seed": int}
    response: {"output": str, "model_id": str, "latency_ms": number}
    error:    {"error": {"code": str, "message": str}}

Endpoints: ``cmd:<shell command>`` spawns (and keeps) a subprocess;
``http://...`` posts to a single generate route.  The daily runner treats
:class:`GeneratorUnavailable` as the signal to fall back to the pipeline.
"""

from __future__ import annotations

import json
import shlex
import subprocess
from dataclasses import dataclass

import requests


class GeneratorError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class GeneratorUnavailable(GeneratorError):
    def __init__(self, message: str):
        super().__init__("unavailable", message)


@dataclass
class GenResult:
    output: str
    model_id: str
    latency_ms: float


DEFAULT_MAX_LENGTH = 256


class GeneratorClient:
    """Talks to one generator endpoint; not itself thread-safe (queue externally)."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout
        self._process: subprocess.Popen | None = None

    # --- subprocess transport ---

    def _ensure_process(self) -> subprocess.Popen:
        if self._process is not None and self._process.poll() is None:
            return self._process
        command = self.endpoint.split(":", 1)[1]
        try:
            self._process = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                encoding="utf-8",
            )
        except OSError as err:
            raise GeneratorUnavailable(f"cannot spawn generator: {err}") from err
        return self._process

    def _generate_subprocess(self, payload: dict) -> dict:
        process = self._ensure_process()
        try:
            process.stdin.write(json.dumps(payload, ensure_ascii=False) + "\n")
            process.stdin.flush()
            line = process.stdout.readline()
        except (BrokenPipeError, OSError) as err:
            raise GeneratorUnavailable(f"generator pipe broke: {err}") from err
        if not line:
            raise GeneratorUnavailable("generator closed its output stream")
        try:
            return json.loads(line)
        except json.JSONDecodeError as err:
            raise GeneratorError("bad_response", f"unparseable response line: {err}")

    # --- http transport ---

    def _generate_http(self, payload: dict) -> dict:
        try:
            response = requests.post(self.endpoint, json=payload, timeout=self.timeout)
        except requests.RequestException as err:
            raise GeneratorUnavailable(f"generator endpoint unreachable: {err}") from err
        try:
            return response.json()
        except ValueError as err:
            raise GeneratorError("bad_response", f"non-JSON response: {err}")

    # --- public API ---

    def generate(self, input_line: str, max_length: int = DEFAULT_MAX_LENGTH, seed: int = 0) -> GenResult:
        if not input_line or "\n" in input_line:
            raise ValueError("input must be a non-empty single line")
        payload = {"input": input_line, "max_length": max_length, "seed": seed}
        if self.endpoint.startswith("cmd:"):
            obj = self._generate_subprocess(payload)
        elif self.endpoint.startswith(("http://", "https://")):
            obj = self._generate_http(payload)
        else:
            raise ValueError(f"unknown endpoint scheme in {self.endpoint!r}")
        if "error" in obj:
            error = obj["error"] or {}
            raise GeneratorError(str(error.get("code", "unknown")), str(error.get("message", "")))
        if "output" not in obj:
            raise GeneratorError("bad_response", f"missing output field in {obj!r}")
        return GenResult(
            output=str(obj["output"]),
            model_id=str(obj.get("model_id", "unknown")),
            latency_ms=float(obj.get("latency_ms", 0.0)),
        )

    def close(self) -> None:
        if self._process is not None and self._process.poll() is None:
            self._process.terminate()
            try:
                self._process.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._process.kill()
        self._process = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
