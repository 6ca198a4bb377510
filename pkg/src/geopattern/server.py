"""HTTP JSON API backing the interactive explorer.

Runs on the standard-library threading HTTP server; extraction results are
cached on disk keyed by their content-hash run id, and at most one
extraction per (dataset, rank, clusters, seed) key runs at a time, with
duplicate requests waiting on the in-flight computation.

Endpoints (all JSON, UTF-8):
    GET  /api/datasets
    POST /api/extract        {"dataset": name, "rank": J, "clusters": M,
                              "seed": S?}
    GET  /api/runs/{run_id}
    GET  /api/patterns?run={run_id}     (persisted report, byte-for-byte)
    GET  /api/sites?run={run_id}&pattern={index}
    GET  /api/bench/latest
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .pipeline import PipelineConfig, PipelineError, run_pipeline

__all__ = ["AppState", "make_server", "serve_forever"]

SCHEMA_VERSION = 1


class AppState:
    """Dataset registry, extraction locks, and run lookup for the API."""

    def __init__(self, output_dir, datasets: dict[str, str] | None = None):
        self.output_dir = Path(output_dir)
        self.datasets = dict(datasets or {})
        self._locks: dict[tuple, threading.Lock] = {}
        self._master = threading.Lock()

    def lock_for(self, key: tuple) -> threading.Lock:
        with self._master:
            return self._locks.setdefault(key, threading.Lock())

    def run_file(self, run_id: str) -> Path | None:
        if not run_id or "/" in run_id or "\\" in run_id or ".." in run_id:
            return None
        path = self.output_dir / "runs" / run_id / "report.json"
        return path if path.exists() else None

    def extract(self, dataset: str, rank: int, clusters: int, seed: int) -> dict:
        manifest = self.datasets[dataset]
        config = PipelineConfig(
            manifest=manifest,
            rank=rank,
            clusters=clusters,
            seed=seed,
            output_dir=str(self.output_dir),
        )
        key = (dataset, rank, clusters, seed)
        with self.lock_for(key):
            return run_pipeline(config, use_cache=True)


class _Handler(BaseHTTPRequestHandler):
    server_version = "geopattern"
    state: AppState  # attached by make_server

    # --- plumbing -----------------------------------------------------

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, status: int, body: bytes, content_type="application/json"):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, payload: dict):
        payload.setdefault("schema_version", SCHEMA_VERSION)
        self._send(status, json.dumps(payload, sort_keys=True).encode("utf-8"))

    def _send_error(self, status: int, code: str, message: str, **extra):
        self._send_json(
            status, {"error": {"code": code, "message": message, **extra}}
        )

    # --- routes ---------------------------------------------------------

    def do_GET(self):
        url = urlparse(self.path)
        query = {k: v[0] for k, v in parse_qs(url.query).items()}
        route = url.path.rstrip("/")
        try:
            if route == "/api/datasets":
                self._send_json(
                    200, {"datasets": sorted(self.state.datasets)}
                )
            elif route.startswith("/api/runs/"):
                self._get_run(route.removeprefix("/api/runs/"))
            elif route == "/api/patterns":
                self._get_patterns(query)
            elif route == "/api/sites":
                self._get_sites(query)
            elif route == "/api/bench/latest":
                self._get_bench()
            else:
                self._send_error(404, "not-found", f"no route {url.path}")
        except Exception as exc:  # pragma: no cover - defensive
            self._send_error(500, "internal", str(exc))

    def do_POST(self):
        url = urlparse(self.path)
        if url.path.rstrip("/") != "/api/extract":
            self._send_error(404, "not-found", f"no route {url.path}")
            return
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            body = json.loads(raw.decode("utf-8")) if raw else {}
        except (json.JSONDecodeError, UnicodeDecodeError):
            self._send_error(400, "bad-request", "body is not valid JSON")
            return
        dataset = body.get("dataset")
        if dataset not in self.state.datasets:
            self._send_error(
                400, "unknown-dataset", f"dataset {dataset!r} is not registered",
                known=sorted(self.state.datasets),
            )
            return
        try:
            rank = int(body.get("rank", 3))
            clusters = int(body.get("clusters", 3))
            seed = int(body.get("seed", 0))
            if rank < 1 or clusters < 1:
                raise ValueError("rank and clusters must be >= 1")
        except (TypeError, ValueError) as exc:
            self._send_error(400, "bad-request", str(exc))
            return
        try:
            report = self.state.extract(dataset, rank, clusters, seed)
        except PipelineError as exc:
            self._send_error(500, "pipeline-failure", str(exc), stage=exc.stage)
            return
        self._send_json(
            200,
            {"run_id": report["run_id"], "status": "done", "report": report},
        )

    # --- route bodies ---------------------------------------------------

    def _get_run(self, run_id: str):
        path = self.state.run_file(run_id)
        if path is None:
            self._send_error(404, "unknown-run", f"no run {run_id!r}")
            return
        report = json.loads(path.read_text(encoding="utf-8"))
        self._send_json(
            200, {"run_id": run_id, "status": "done", "report": report}
        )

    def _get_patterns(self, query: dict):
        run_id = query.get("run", "")
        path = self.state.run_file(run_id)
        if path is None:
            self._send_error(404, "unknown-run", f"no run {run_id!r}")
            return
        # exact bytes of the persisted report
        self._send(200, path.read_bytes())

    def _get_sites(self, query: dict):
        run_id = query.get("run", "")
        path = self.state.run_file(run_id)
        if path is None:
            self._send_error(404, "unknown-run", f"no run {run_id!r}")
            return
        report = json.loads(path.read_text(encoding="utf-8"))
        sites = report["sites"]
        if "pattern" in query:
            try:
                wanted = int(query["pattern"])
            except ValueError:
                self._send_error(400, "bad-request", "pattern must be an integer")
                return
            sites = [s for s in sites if s["pattern"] == wanted]
        self._send_json(200, {"run_id": run_id, "sites": sites})

    def _get_bench(self):
        path = self.state.output_dir / "bench_latest.json"
        if not path.exists():
            self._send_error(404, "no-bench", "no benchmark results yet")
            return
        self._send(200, path.read_bytes())


def make_server(host: str, port: int, state: AppState) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"state": state})
    return ThreadingHTTPServer((host, port), handler)


def serve_forever(host: str, port: int, state: AppState) -> None:
    server = make_server(host, port, state)
    print(f"serving on http://{host}:{port} "
          f"(datasets: {', '.join(sorted(state.datasets)) or 'none'})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
