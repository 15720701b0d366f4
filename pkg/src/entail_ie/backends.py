"""Entailment scoring backends.

Both backends answer the same question: given one premise and a batch of
hypotheses, return a probability triple (entail, neutral, contradict) per
hypothesis, in input order.

* :class:`MockEntailmentBackend` is table-driven and fully deterministic; any
  (premise, hypothesis) pair absent from its table scores as the default,
  fully-neutral triple, so unscripted hypotheses always fall below a positive
  threshold.
* :class:`HttpEntailmentBackend` talks to a scoring service over the wire
  protocol POST <base>/entail with ``{"premise": str, "hypotheses": [str,...]}``
  returning ``{"scores": [{"entail","neutral","contradict"}, ...]}``. Requests
  are chunked to ``max_batch`` hypotheses and retried with exponential backoff
  on retryable transport failures.

Oracle file format: JSON list of
``{"premise","hypothesis","entail","neutral","contradict"}`` records.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import requests

SCORE_SUM_TOLERANCE = 1e-6


class BackendError(RuntimeError):
    pass


class TransportError(BackendError):
    def __init__(self, message: str, retryable: bool):
        self.retryable = retryable
        super().__init__(message)


class ProtocolError(BackendError):
    """The service answered, but not in the shape the protocol promises."""


class OracleFormatError(ValueError):
    pass


@dataclass(frozen=True)
class EntailmentScore:
    entail: float
    neutral: float
    contradict: float

    def __post_init__(self):
        for name, p in (("entail", self.entail), ("neutral", self.neutral), ("contradict", self.contradict)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} probability {p} outside [0, 1]")
        total = self.entail + self.neutral + self.contradict
        if abs(total - 1.0) > SCORE_SUM_TOLERANCE:
            raise ValueError(f"probabilities sum to {total}, expected 1.0")

    def to_dict(self) -> dict:
        return {"entail": self.entail, "neutral": self.neutral, "contradict": self.contradict}


NEUTRAL_SCORE = EntailmentScore(entail=0.0, neutral=1.0, contradict=0.0)


class EntailmentBackend(Protocol):
    def entail_batch(self, premise: str, hypotheses: Sequence[str]) -> list[EntailmentScore]:
        """Score each hypothesis against the premise; output parallels input order."""
        ...


@dataclass(frozen=True)
class OracleTable:
    entries: Mapping[tuple[str, str], EntailmentScore] = field(default_factory=dict)
    default: EntailmentScore = NEUTRAL_SCORE

    def lookup(self, premise: str, hypothesis: str) -> EntailmentScore:
        return self.entries.get((premise, hypothesis), self.default)


class MockEntailmentBackend:
    """In-process, deterministic backend backed by an :class:`OracleTable`."""

    def __init__(self, table: OracleTable | None = None):
        self.table = table or OracleTable()

    def entail_batch(self, premise: str, hypotheses: Sequence[str]) -> list[EntailmentScore]:
        return [self.table.lookup(premise, h) for h in hypotheses]


def load_oracle(source: bytes | str) -> OracleTable:
    """Parse an oracle file; every stored triple must be a valid probability simplex."""
    text = source.decode("utf-8") if isinstance(source, bytes) else source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OracleFormatError(f"oracle file is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(data, list):
        raise OracleFormatError("oracle file must be a JSON list of entries")
    entries: dict[tuple[str, str], EntailmentScore] = {}
    for i, raw in enumerate(data):
        if not isinstance(raw, dict):
            raise OracleFormatError(f"entry {i} must be an object")
        try:
            key = (str(raw["premise"]), str(raw["hypothesis"]))
            score = EntailmentScore(
                entail=float(raw["entail"]),
                neutral=float(raw["neutral"]),
                contradict=float(raw["contradict"]),
            )
        except KeyError as exc:
            raise OracleFormatError(f"entry {i} missing key {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise OracleFormatError(f"entry {i}: {exc}") from None
        entries[key] = score
    return OracleTable(entries=entries)


def dump_oracle(table: OracleTable) -> bytes:
    records = [
        {"premise": premise, "hypothesis": hypothesis, **score.to_dict()}
        for (premise, hypothesis), score in table.entries.items()
    ]
    return (json.dumps(records, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


class HttpEntailmentBackend:
    """Remote scoring client with bounded retry and per-request batching.

    Thread-safe: concurrent entail_batch calls are allowed and the request
    counter is lock-protected. A batch of n hypotheses always results in
    ceil(n / max_batch) protocol requests (not counting retries).
    """

    def __init__(
        self,
        base_url: str,
        max_batch: int = 32,
        max_attempts: int = 3,
        backoff_base: float = 0.1,
        timeout: float = 60.0,
        session=None,
    ):
        if max_batch < 1:
            raise ValueError("max_batch must be >= 1")
        self.base_url = base_url.rstrip("/")
        self.max_batch = max_batch
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.timeout = timeout
        self._session = session or requests.Session()
        self._lock = threading.Lock()
        self.request_count = 0

    def entail_batch(self, premise: str, hypotheses: Sequence[str]) -> list[EntailmentScore]:
        out: list[EntailmentScore] = []
        for start in range(0, len(hypotheses), self.max_batch):
            chunk = list(hypotheses[start : start + self.max_batch])
            out.extend(self._score_chunk(premise, chunk))
        return out

    def _score_chunk(self, premise: str, chunk: list[str]) -> list[EntailmentScore]:
        last_error: TransportError | None = None
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.backoff_base * (2 ** (attempt - 1)))
            try:
                return self._post(premise, chunk)
            except TransportError as exc:
                if not exc.retryable:
                    raise
                last_error = exc
        assert last_error is not None
        raise last_error

    def _post(self, premise: str, chunk: list[str]) -> list[EntailmentScore]:
        with self._lock:
            self.request_count += 1
        try:
            resp = self._session.post(
                f"{self.base_url}/entail",
                json={"premise": premise, "hypotheses": chunk},
                timeout=self.timeout,
            )
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise TransportError(f"entailment service unreachable: {exc}", retryable=True) from exc
        if resp.status_code >= 500:
            raise TransportError(f"entailment service error {resp.status_code}", retryable=True)
        if resp.status_code != 200:
            raise TransportError(
                f"entailment service rejected request: {resp.status_code}", retryable=False
            )
        try:
            scores = resp.json()["scores"]
            parsed = [
                EntailmentScore(
                    entail=float(s["entail"]),
                    neutral=float(s["neutral"]),
                    contradict=float(s["contradict"]),
                )
                for s in scores
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed entailment response: {exc}") from exc
        if len(parsed) != len(chunk):
            raise ProtocolError(
                f"entailment response has {len(parsed)} scores for {len(chunk)} hypotheses"
            )
        return parsed


def make_backend(
    spec: str, base_dir: str | Path | None = None, max_batch: int = 32
) -> EntailmentBackend:
    """Build a backend from a config string: ``mock:<oracle-path>`` or ``http:<url>``.

    ``mock:`` with an empty path yields an empty table (everything neutral).
    Relative oracle paths resolve against ``base_dir`` when given.
    """
    if spec.startswith("mock:"):
        path = spec[len("mock:"):]
        if not path:
            return MockEntailmentBackend()
        resolved = Path(path)
        if base_dir is not None and not resolved.is_absolute():
            resolved = Path(base_dir) / resolved
        return MockEntailmentBackend(load_oracle(resolved.read_bytes()))
    if spec.startswith("http:"):
        url = spec[len("http:"):]
        return HttpEntailmentBackend(
            url if url.startswith("http") else f"http:{url}", max_batch=max_batch
        )
    raise ValueError(f"unknown backend spec {spec!r}")
