from __future__ import annotations

import json
import random
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from entail_ie.backends import (
    EntailmentScore,
    HttpEntailmentBackend,
    MockEntailmentBackend,
    OracleFormatError,
    OracleTable,
    ProtocolError,
    TransportError,
    dump_oracle,
    load_oracle,
    make_backend,
)

PREMISE = "John Smith died."
HYPOTHESIS = "John Smith is a person"


def one_entry_table():
    return OracleTable(
        entries={(PREMISE, HYPOTHESIS): EntailmentScore(entail=0.98, neutral=0.01, contradict=0.01)}
    )


def test_mock_table_hit():
    backend = MockEntailmentBackend(one_entry_table())
    [score] = backend.entail_batch(PREMISE, [HYPOTHESIS])
    assert (score.entail, score.neutral, score.contradict) == (0.98, 0.01, 0.01)


def test_mock_unknown_pair_is_fully_neutral():
    backend = MockEntailmentBackend(one_entry_table())
    [score] = backend.entail_batch(PREMISE, ["John Smith is an organization"])
    assert (score.entail, score.neutral, score.contradict) == (0.0, 1.0, 0.0)


def test_mock_preserves_batch_order():
    entries = {
        (PREMISE, f"h{i}"): EntailmentScore(entail=i / 10, neutral=1 - i / 10, contradict=0.0)
        for i in range(3)
    }
    backend = MockEntailmentBackend(OracleTable(entries=entries))
    scores = backend.entail_batch(PREMISE, ["h0", "h1", "h2"])
    assert [s.entail for s in scores] == [0.0, 0.1, 0.2]


def test_mock_is_deterministic_across_instances():
    table = one_entry_table()
    a = MockEntailmentBackend(table).entail_batch(PREMISE, [HYPOTHESIS, "x"])
    b = MockEntailmentBackend(table).entail_batch(PREMISE, [HYPOTHESIS, "x"])
    assert a == b


def test_score_invariants_enforced():
    with pytest.raises(ValueError):
        EntailmentScore(entail=0.5, neutral=0.2, contradict=0.1)
    with pytest.raises(ValueError):
        EntailmentScore(entail=1.5, neutral=-0.5, contradict=0.0)


def test_load_oracle_single_entry():
    raw = json.dumps(
        [{"premise": PREMISE, "hypothesis": HYPOTHESIS, "entail": 0.98, "neutral": 0.01, "contradict": 0.01}]
    )
    table = load_oracle(raw)
    assert len(table.entries) == 1
    assert table.lookup(PREMISE, HYPOTHESIS).entail == 0.98


def test_load_oracle_bad_simplex_rejected():
    raw = json.dumps(
        [{"premise": "p", "hypothesis": "h", "entail": 0.3, "neutral": 0.1, "contradict": 0.1}]
    )
    with pytest.raises(OracleFormatError):
        load_oracle(raw)


def test_load_oracle_missing_key_rejected():
    with pytest.raises(OracleFormatError):
        load_oracle(json.dumps([{"premise": "p", "entail": 1.0, "neutral": 0.0, "contradict": 0.0}]))


def test_oracle_round_trip_ten_thousand_entries():
    rng = random.Random(42)
    entries = {}
    for i in range(10_000):
        p = round(rng.random(), 6)
        rest = round(1.0 - p, 6)
        entries[(f"premise {i}", f"hypothesis {i}")] = EntailmentScore(
            entail=p, neutral=rest, contradict=0.0
        )
    table = OracleTable(entries=entries)
    loaded = load_oracle(dump_oracle(table))
    assert loaded.entries == table.entries


# --- HTTP backend ------------------------------------------------------------------


class _ScriptedNli(BaseHTTPRequestHandler):
    fail_first = 0
    failures = {"count": 0}
    malformed = False
    requests_seen = []

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        type(self).requests_seen.append(len(body["hypotheses"]))
        if type(self).failures["count"] < type(self).fail_first:
            type(self).failures["count"] += 1
            self.send_error(503)
            return
        if type(self).malformed:
            payload = b'{"scores": "nope"}'
        else:
            scores = [
                {"entail": 0.25, "neutral": 0.75, "contradict": 0.0} for _ in body["hypotheses"]
            ]
            payload = json.dumps({"scores": scores}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture()
def nli_server():
    _ScriptedNli.fail_first = 0
    _ScriptedNli.failures = {"count": 0}
    _ScriptedNli.malformed = False
    _ScriptedNli.requests_seen = []
    server = HTTPServer(("127.0.0.1", 0), _ScriptedNli)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


def test_http_backend_batches_by_max_batch(nli_server):
    backend = HttpEntailmentBackend(nli_server, max_batch=4)
    scores = backend.entail_batch("p", [f"h{i}" for i in range(10)])
    assert len(scores) == 10
    assert backend.request_count == 3  # ceil(10 / 4)
    assert _ScriptedNli.requests_seen == [4, 4, 2]


def test_http_backend_retries_retryable_failures(nli_server):
    _ScriptedNli.fail_first = 2
    backend = HttpEntailmentBackend(nli_server, max_batch=8, backoff_base=0.01)
    scores = backend.entail_batch("p", ["h"])
    assert len(scores) == 1
    assert backend.request_count == 3  # two 503s then success


def test_http_backend_gives_up_after_max_attempts(nli_server):
    _ScriptedNli.fail_first = 99
    backend = HttpEntailmentBackend(nli_server, max_attempts=3, backoff_base=0.01)
    with pytest.raises(TransportError) as err:
        backend.entail_batch("p", ["h"])
    assert err.value.retryable
    assert backend.request_count == 3


def test_http_backend_malformed_response_is_protocol_error(nli_server):
    _ScriptedNli.malformed = True
    backend = HttpEntailmentBackend(nli_server, backoff_base=0.01)
    with pytest.raises(ProtocolError):
        backend.entail_batch("p", ["h"])
    assert backend.request_count == 1  # not retried


def test_http_backend_connection_refused_is_retryable():
    backend = HttpEntailmentBackend("http://127.0.0.1:9", max_attempts=2, backoff_base=0.01, timeout=0.2)
    with pytest.raises(TransportError) as err:
        backend.entail_batch("p", ["h"])
    assert err.value.retryable


def test_make_backend_specs(tmp_path, samples_dir):
    assert isinstance(make_backend("mock:"), MockEntailmentBackend)
    mock = make_backend(f"mock:{samples_dir / 'oracle.json'}")
    assert isinstance(mock, MockEntailmentBackend)
    assert len(mock.table.entries) == 9
    http = make_backend("http://example.test", max_batch=7)
    assert isinstance(http, HttpEntailmentBackend)
    assert http.max_batch == 7
    with pytest.raises(ValueError):
        make_backend("carrier-pigeon:")
