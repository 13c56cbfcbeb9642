"""In-process mock of the comment-analysis service.

Answers the wire contract bit-for-bit: fixture texts get their recorded
TOXICITY, anything else falls back to a lexicon config. Failure injection
lets tests exercise the client's retry path.
"""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from . import LexiconScorerConfig, lexicon_score
from .http import ANALYZE_PATH, build_response_body


class MockScorerServer:
    def __init__(
        self,
        fixtures: dict[str, float] | None = None,
        lexicon: LexiconScorerConfig | None = None,
        api_key: str | None = None,
    ):
        self.fixtures = dict(fixtures or {})
        self.lexicon = lexicon or LexiconScorerConfig()
        self.api_key = api_key
        self.requests: list[bytes] = []
        self.responses: list[bytes] = []
        self._fail_budget = 0
        self._lock = threading.Lock()
        self._httpd: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    # Test knob: the next `count` requests answer 503 before recovering.
    def fail_next(self, count: int) -> None:
        with self._lock:
            self._fail_budget = count

    def _take_failure(self) -> bool:
        with self._lock:
            if self._fail_budget > 0:
                self._fail_budget -= 1
                return True
            return False

    def _toxicity_for(self, text: str) -> float:
        if text in self.fixtures:
            return self.fixtures[text]
        return lexicon_score(text, self.lexicon).toxicity

    @property
    def url(self) -> str:
        assert self._httpd is not None, "server not started"
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "MockScorerServer":
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):
                pass

            def _send(self, status: int, body: bytes):
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_POST(self):
                parsed = urlparse(self.path)
                if parsed.path != ANALYZE_PATH:
                    self._send(404, b'{"error":"unknown path"}')
                    return
                if outer._take_failure():
                    self._send(503, b'{"error":"injected failure"}')
                    return
                query = parse_qs(parsed.query)
                if outer.api_key is not None and query.get("key", [""])[0] != outer.api_key:
                    self._send(403, b'{"error":"bad api key"}')
                    return
                length = int(self.headers.get("Content-Length", "0"))
                raw = self.rfile.read(length)
                outer.requests.append(raw)
                try:
                    payload = json.loads(raw)
                    text = payload["comment"]["text"]
                    requested = list(payload["requestedAttributes"].keys())
                except (ValueError, KeyError, TypeError):
                    self._send(400, b'{"error":"malformed request"}')
                    return
                toxicity = outer._toxicity_for(text)
                body = build_response_body({name: toxicity for name in requested})
                outer.responses.append(body)
                self._send(200, body)

        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
            self._httpd = None
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self) -> "MockScorerServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
