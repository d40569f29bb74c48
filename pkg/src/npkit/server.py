"""Minimal nanopublication registry node.

Stores one TriG file per artifact code under a data directory, with an
append-only journal for insertion order. Content is re-verified on every
read, so a corrupted store yields a 500, never silently bad data.

HTTP routes:
  GET  /<code>[.trig|.nq]   nanopub content
  GET  /                    server info (JSON)
  GET  /nanopubs.txt?page=N stored codes, newline-separated, paged
  POST /                    publish one trusty nanopub
"""

from __future__ import annotations

import argparse
import json
import os
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import urlparse, parse_qs

from . import nanopub as npmod
from . import trusty
from .rdf import parse, serialize

PROTOCOL_VERSION = "1.0"


class StoreError(Exception):
    pass


@dataclass
class NodeConfig:
    host: str = "127.0.0.1"
    port: int = 0
    data_dir: str = "np-data"
    admits_publish: bool = True
    page_size: int = 1000
    description: str = "npkit nanopub server"

    def __post_init__(self):
        if self.page_size <= 0:
            raise ValueError("page_size must be positive")


class Store:
    """Append-only content store keyed by artifact code."""

    def __init__(self, data_dir: str | Path):
        self.dir = Path(data_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.journal_path = self.dir / "journal.txt"
        self._lock = threading.Lock()
        self._codes: list[str] = []
        self._index: set[str] = set()
        if self.journal_path.exists():
            for line in self.journal_path.read_text().splitlines():
                code = line.strip()
                if code and code not in self._index:
                    self._codes.append(code)
                    self._index.add(code)

    def __len__(self) -> int:
        with self._lock:
            return len(self._codes)

    def __contains__(self, code: str) -> bool:
        with self._lock:
            return code in self._index

    def codes(self, page: int, page_size: int) -> list[str]:
        with self._lock:
            start = (page - 1) * page_size
            return self._codes[start:start + page_size]

    def _path(self, code: str) -> Path:
        return self.dir / f"{code}.trig"

    def get(self, code: str) -> str | None:
        """Stored TriG for `code`, re-verified against the code."""
        with self._lock:
            if code not in self._index:
                return None
        text = self._path(code).read_text(encoding="utf-8")
        ds = parse(text, "trig")
        nps = npmod.extract_nanopubs(ds)
        if len(nps) != 1 or not isinstance(nps[0], npmod.Nanopub):
            raise StoreError(f"store entry {code} is not a single nanopub")
        np = nps[0]
        if trusty.extract_code(np.uri) != code \
                or trusty.verify_trusty(np) != trusty.VALID:
            raise StoreError(f"store entry {code} fails verification")
        return text

    def put(self, code: str, text: str) -> bool:
        """Durably store content; returns False when already present."""
        with self._lock:
            if code in self._index:
                return False
            tmp = self._path(code).with_suffix(".tmp")
            tmp.write_text(text, encoding="utf-8")
            os.replace(tmp, self._path(code))
            with open(self.journal_path, "a", encoding="utf-8") as f:
                f.write(code + "\n")
                f.flush()
                os.fsync(f.fileno())
            self._codes.append(code)
            self._index.add(code)
            return True


class _Handler(BaseHTTPRequestHandler):
    server_version = "npkit-server/1.0"
    protocol_version = "HTTP/1.1"
    # buffer the response and skip Nagle so keep-alive connections do not
    # hit the small-write/delayed-ACK stall
    wbufsize = -1
    disable_nagle_algorithm = True

    # Set by make_server:
    store: Store
    config: NodeConfig

    def log_message(self, *args):  # tests stay quiet
        pass

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_text(self, status: int, text: str,
                   content_type: str = "text/plain; charset=utf-8") -> None:
        self._send(status, text.encode("utf-8"), content_type)

    def do_GET(self):
        url = urlparse(self.path)
        path = url.path
        if path == "/":
            info = {
                "protocolVersion": PROTOCOL_VERSION,
                "description": self.config.description,
                "admitsPublish": self.config.admits_publish,
                "pageSize": self.config.page_size,
                "nanopubCount": len(self.store),
            }
            self._send_text(200, json.dumps(info) + "\n", "application/json")
            return
        if path == "/nanopubs.txt":
            qs = parse_qs(url.query)
            raw = qs.get("page", ["1"])[0]
            if not raw.isdigit() or int(raw) < 1:
                self._send_text(400, "bad page number\n")
                return
            codes = self.store.codes(int(raw), self.config.page_size)
            self._send_text(200, "".join(c + "\n" for c in codes))
            return

        name = path.lstrip("/")
        fmt = "trig"
        if name.endswith(".trig"):
            name = name[:-5]
        elif name.endswith(".nq"):
            name = name[:-3]
            fmt = "nquads"
        elif "application/n-quads" in self.headers.get("Accept", ""):
            fmt = "nquads"
        if not trusty.is_artifact_code(name):
            self._send_text(400, f"malformed artifact code: {name}\n")
            return
        try:
            text = self.store.get(name)
        except Exception as e:
            self._send_text(500, f"store corruption: {e}\n")
            return
        if text is None:
            self._send_text(404, f"unknown artifact code: {name}\n")
            return
        if fmt == "nquads":
            body = serialize(parse(text, "trig"), "nquads")
            self._send_text(200, body, "application/n-quads")
        else:
            self._send_text(200, text, "application/trig")

    def do_POST(self):
        if self.path != "/":
            self._send_text(404, "publish at /\n")
            return
        if not self.config.admits_publish:
            self._send_text(405, "this server does not admit publishing\n")
            return
        length = int(self.headers.get("Content-Length", "0"))
        body = self.rfile.read(length).decode("utf-8", errors="replace")
        fmt = "nquads" if "n-quads" in self.headers.get("Content-Type", "") \
            else "trig"
        try:
            ds = parse(body, fmt)
        except Exception as e:
            self._send_text(400, f"unparseable body: {e}\n")
            return
        nps = npmod.extract_nanopubs(ds)
        if len(nps) != 1:
            self._send_text(400, "body must contain exactly one nanopub\n")
            return
        np = nps[0]
        if not isinstance(np, npmod.Nanopub):
            self._send_text(400, f"malformed nanopub: {np}\n")
            return
        code = trusty.extract_code(np.uri)
        if code is None or trusty.verify_trusty(np) != trusty.VALID:
            self._send_text(400, "nanopub has no valid trusty URI\n")
            return
        stored_text = body if fmt == "trig" else serialize(ds, "trig")
        if self.store.put(code, stored_text):
            self._send_text(201, code + "\n")
        else:
            self._send_text(200, code + "\n")


def make_server(config: NodeConfig) -> ThreadingHTTPServer:
    store = Store(config.data_dir)
    handler = type("BoundHandler", (_Handler,),
                   {"store": store, "config": config})
    server = ThreadingHTTPServer((config.host, config.port), handler)
    return server


def serve_forever(config: NodeConfig) -> None:
    server = make_server(config)
    host, port = server.server_address[:2]
    print(f"nanopub server listening on http://{host}:{port}/ "
          f"(data: {config.data_dir})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="np-server", description="Run a nanopublication registry node.")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--data", default="np-data", help="data directory")
    parser.add_argument("--no-publish", action="store_true",
                        help="refuse POSTed nanopubs")
    parser.add_argument("--page-size", type=int, default=1000)
    args = parser.parse_args(argv)
    serve_forever(NodeConfig(
        host=args.host, port=args.port, data_dir=args.data,
        admits_publish=not args.no_publish, page_size=args.page_size))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
