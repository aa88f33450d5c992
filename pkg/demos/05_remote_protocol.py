"""
Talking to a chat-completions endpoint
======================================

A local HTTP server stands in for a hosted model. The first request gets a
503 to show the retry with backoff; later requests get a canned answer.
Real endpoints are configured the same way, with the API key read from an
environment variable.
"""
import json
import logging
import os
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from agentic_deflation import SyntheticSpec, generate, top_singular_triplet
from agentic_deflation.agents import (
    RemoteEndpointConfig,
    RemoteRank1Evaluator,
    RemoteSolver,
    build_icl_examples,
    serialize_triplet,
)

logging.basicConfig(level=logging.INFO)
m = generate(SyntheticSpec(seed=2), 0).matrix
answer = serialize_triplet(top_singular_triplet(m))
seen = []


class Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        seen.append(body)
        if len(seen) == 1:
            self.send_response(503)
            self.end_headers()
            return
        parts = body["messages"][-1]["content"]
        text = "Accept" if any(p["type"] == "image" for p in parts) else answer
        out = json.dumps({"choices": [{"message": {"content": text}}]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(out)

    def log_message(self, *args):
        pass


server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
threading.Thread(target=server.serve_forever, daemon=True).start()

os.environ["DEMO_KEY"] = "not-a-secret"
cfg = RemoteEndpointConfig(base_url=f"http://127.0.0.1:{server.server_port}/v1/chat/completions",
                           model_name="stub", api_key_env="DEMO_KEY", backoff=0.1)

solver = RemoteSolver(cfg, build_icl_examples(2, m.shape))
proposal = solver.propose(m)
print("parsed proposal s =", proposal.s)

verdict = RemoteRank1Evaluator(cfg).evaluate(m, proposal)
print("verdict:", verdict.kind.value)
print("requests seen:", len(seen))
print("solver prompt starts:", seen[1]["messages"][-1]["content"][0]["text"][:200])
server.shutdown()
