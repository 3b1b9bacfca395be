from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from qasynth.answers import AnswerSpan
from qasynth.predictor import (
    MockPredictor,
    Prediction,
    PredictorTransportError,
    RemotePredictor,
)
from qasynth.refine import refine_part

from conftest import make_example

CONTEXT = "Elena Vargas founded Helios Motors in Lisbon in 2014 ."
EXAMPLES = [
    make_example("e1", CONTEXT, "Who founded Helios Motors", "Elena Vargas"),
    make_example("e2", CONTEXT, "Where was it founded", "Lisbon"),
]


class TestMockPredictor:
    def test_echo_original(self):
        mock = MockPredictor("echo-original", EXAMPLES)
        pred = mock.predict(EXAMPLES[0].context, EXAMPLES[0].question)
        assert pred == Prediction(EXAMPLES[0].answer, 1.0)

    def test_fixed_table_missing_id_gives_no_prediction(self):
        table = {"e1": (EXAMPLES[0].answer, 0.10)}
        mock = MockPredictor("fixed-table", EXAMPLES, table)
        assert mock.predict(EXAMPLES[0].context, EXAMPLES[0].question).probability == 0.10
        assert mock.predict(EXAMPLES[1].context, EXAMPLES[1].question) is None

    def test_first_entity_script(self):
        mock = MockPredictor("first-entity")
        pred = mock.predict("the Atlas Rail report arrived late", "irrelevant")
        assert pred.span.text == "Atlas Rail"
        assert pred.probability == 0.5
        assert mock.predict("no capitals here", "q") is None

    def test_train_log_grows_by_batch_ids(self):
        mock = MockPredictor("echo-original", EXAMPLES)
        ack = mock.train(EXAMPLES)
        assert ack["status"] == "ok"
        assert mock.train_log == ["e1", "e2"]
        mock.train(EXAMPLES)
        assert len(mock.train_log) == 4

    def test_unknown_script_rejected(self):
        with pytest.raises(ValueError, match="unknown mock script"):
            MockPredictor("bogus")


# ---------------------------------------------------------------------------
# Remote client against a scripted stub server

class _StubHandler(BaseHTTPRequestHandler):
    responses: dict = {}

    def log_message(self, *args):  # quiet
        pass

    def do_GET(self):
        if self.path == "/health":
            self._reply(200, {"status": "ok"})
        else:
            self._reply(404, {})

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        if self.path == "/predict":
            key = body["question"]
            status, payload = self.responses.get(key, (200, {"no_answer": True}))
            self._reply(status, payload)
        elif self.path == "/train":
            self._reply(200, {"status": "ok", "steps": len(body["examples"])})
        else:
            self._reply(404, {})

    def _reply(self, status, payload):
        data = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


@pytest.fixture
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}", _StubHandler
    server.shutdown()
    _StubHandler.responses = {}


class TestRemotePredictor:
    def test_health_check(self, stub_server):
        endpoint, _ = stub_server
        assert RemotePredictor(endpoint).health()
        assert not RemotePredictor("http://127.0.0.1:1").health()

    def test_accepts_bit_exact_span(self, stub_server):
        endpoint, handler = stub_server
        start = CONTEXT.index("Lisbon")
        handler.responses["q-good"] = (
            200,
            {"text": "Lisbon", "char_start": start, "char_end": start + 6, "prob": 0.9},
        )
        pred = RemotePredictor(endpoint).predict(CONTEXT, "q-good")
        assert pred.span == AnswerSpan(start, start + 6, "Lisbon")
        assert pred.probability == 0.9

    def test_rejects_corrupt_span(self, stub_server):
        endpoint, handler = stub_server
        handler.responses["q-bad"] = (
            200, {"text": "Lisbon", "char_start": 0, "char_end": 6, "prob": 0.9},
        )
        with pytest.raises(PredictorTransportError, match="corrupt"):
            RemotePredictor(endpoint).predict(CONTEXT, "q-bad")

    def test_no_answer_gives_none(self, stub_server):
        endpoint, _ = stub_server
        assert RemotePredictor(endpoint).predict(CONTEXT, "q-missing") is None

    def test_non_2xx_is_transport_error(self, stub_server):
        endpoint, handler = stub_server
        handler.responses["q-500"] = (500, {"error": "boom"})
        with pytest.raises(PredictorTransportError, match="HTTP 500"):
            RemotePredictor(endpoint).predict(CONTEXT, "q-500")

    def test_out_of_range_probability_clamped(self, stub_server):
        endpoint, handler = stub_server
        start = CONTEXT.index("Lisbon")
        handler.responses["q-clamp"] = (
            200,
            {"text": "Lisbon", "char_start": start, "char_end": start + 6,
             "prob": 1.0000001},
        )
        pred = RemotePredictor(endpoint).predict(CONTEXT, "q-clamp")
        assert pred.probability == 1.0

    def test_train_round_trip(self, stub_server):
        endpoint, _ = stub_server
        ack = RemotePredictor(endpoint).train(EXAMPLES)
        assert ack == {"status": "ok", "steps": 2}


class TestContractConformance:
    """Both implementations feed refine_part without breaking conservation."""

    def _run(self, predictor, examples):
        refined, filtered, outcomes = refine_part(examples, predictor, tau=0.15)
        assert len(refined) + len(filtered) + sum(
            1 for o in outcomes if o.verdict.value == "Dropped"
        ) == len(examples)
        for outcome in outcomes:
            if outcome.probability is not None:
                assert 0.0 <= outcome.probability <= 1.0
        return outcomes

    def test_mock_conforms(self):
        self._run(MockPredictor("echo-original", EXAMPLES), EXAMPLES)

    def test_remote_conforms(self, stub_server):
        endpoint, handler = stub_server
        start = CONTEXT.index("Elena Vargas")
        handler.responses[EXAMPLES[0].question] = (
            200,
            {"text": "Elena Vargas", "char_start": start, "char_end": start + 12,
             "prob": 0.8},
        )
        self._run(RemotePredictor(endpoint), EXAMPLES)
