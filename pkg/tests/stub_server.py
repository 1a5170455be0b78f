"""In-process chat-completion endpoint stub for gateway tests.

Tracks request counts and the maximum number of simultaneous requests so
tests can assert the gateway's concurrency bound.
"""
from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class StubState:
    def __init__(self):
        self.lock = threading.Lock()
        self.requests = 0
        self.current = 0
        self.max_concurrent = 0
        self.behavior = "echo"      # echo | empty | fail500 | flaky
        self.flaky_failures = 2
        self.delay = 0.0
        self.reply = "canned translation"


class _Handler(BaseHTTPRequestHandler):
    state: StubState  # set by make_server

    def log_message(self, *args):
        pass

    def do_POST(self):
        st = self.state
        with st.lock:
            st.requests += 1
            st.current += 1
            st.max_concurrent = max(st.max_concurrent, st.current)
            behavior = st.behavior
            if behavior == "flaky":
                if st.flaky_failures > 0:
                    st.flaky_failures -= 1
                    behavior = "fail500"
                else:
                    behavior = "echo"
        try:
            if st.delay:
                time.sleep(st.delay)
            length = int(self.headers.get("Content-Length", 0))
            body = json.loads(self.rfile.read(length)) if length else {}
            if behavior == "fail500":
                self._send(500, {"error": "boom"})
                return
            if behavior == "empty":
                text = ""
            else:
                text = st.reply
            if "messages" in body:
                payload = {"choices": [{"message": {"role": "assistant", "content": text}}]}
            else:
                payload = [{"generated_text": text}]
            self._send(200, payload)
        finally:
            with st.lock:
                st.current -= 1

    def _send(self, code: int, payload) -> None:
        data = json.dumps(payload).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def make_server() -> tuple[ThreadingHTTPServer, StubState, str]:
    state = StubState()
    handler = type("BoundHandler", (_Handler,), {"state": state})
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    url = f"http://127.0.0.1:{server.server_address[1]}/v1/chat/completions"
    return server, state, url
