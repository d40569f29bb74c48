"""HTTP API behind the web validator: check, transform, publish, fetch.

Stateless JSON endpoints over the library; the compiled validator UI is
served from `/` when a static directory is available.
"""

from __future__ import annotations

import argparse
import os
from pathlib import Path
from typing import Literal, Optional

import requests
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import client as clientmod
from . import signing, trusty
from . import nanopub as npmod
from .nanopub import Nanopub
from .rdf import parse, serialize

DEFAULT_SIZE_LIMIT = 1_000_000

Format = Literal["trig", "nquads"]


class CheckRequest(BaseModel):
    content: str
    format: Format = "trig"


class Issue(BaseModel):
    rule: str
    message: str
    graph: Optional[str] = None


class CheckResponse(BaseModel):
    wellFormed: bool
    trusty: Literal["valid", "invalid", "none"]
    signed: Literal["valid", "invalid", "none"]
    issues: list[Issue] = []


class TransformRequest(BaseModel):
    content: str
    from_format: Format = Field(alias="from", default="trig")
    to_format: Format = Field(alias="to", default="nquads")

    model_config = {"populate_by_name": True}


class PublishRequest(BaseModel):
    content: str


class PublishResponse(BaseModel):
    publishedCount: int
    server: str


def _single_nanopub(content: str, format: str, size_limit: int) -> Nanopub:
    if len(content.encode("utf-8")) > size_limit:
        raise HTTPException(413, "content exceeds the size limit")
    try:
        ds = parse(content, format)
    except Exception as e:
        raise HTTPException(400, f"unparseable content: {e}")
    items = npmod.extract_nanopubs(ds)
    errors = [x for x in items if isinstance(x, npmod.MalformedNanopubError)]
    if errors:
        raise _MalformedSentinel(errors)
    if len(items) != 1:
        raise HTTPException(
            400, f"expected exactly one nanopublication, found {len(items)}")
    return items[0]


class _MalformedSentinel(Exception):
    def __init__(self, errors: list[npmod.MalformedNanopubError]):
        self.errors = errors


def create_app(servers: clientmod.ServerList | None = None,
               size_limit: int = DEFAULT_SIZE_LIMIT,
               static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="nanopub validator API")

    def get_client() -> clientmod.Client:
        return clientmod.Client(servers or clientmod.resolve_servers())

    @app.post("/api/check", response_model=CheckResponse)
    def api_check(req: CheckRequest) -> CheckResponse:
        try:
            np = _single_nanopub(req.content, req.format, size_limit)
        except _MalformedSentinel as s:
            return CheckResponse(
                wellFormed=False, trusty="none", signed="none",
                issues=[Issue(rule=e.rule, message=e.reason, graph=e.uri)
                        for e in s.errors])
        t = trusty.verify_trusty(np)
        s = signing.verify_signature(np)
        return CheckResponse(
            wellFormed=True,
            trusty="none" if t == trusty.NO_TRUSTY_URI else t,
            signed="none" if s == signing.UNSIGNED else s,
            issues=[],
        )

    @app.post("/api/transform", response_class=PlainTextResponse)
    def api_transform(req: TransformRequest) -> str:
        if len(req.content.encode("utf-8")) > size_limit:
            raise HTTPException(413, "content exceeds the size limit")
        try:
            ds = parse(req.content, req.from_format)
            return serialize(ds, req.to_format)
        except HTTPException:
            raise
        except Exception as e:
            raise HTTPException(400, f"cannot transform: {e}")

    @app.post("/api/publish", response_model=PublishResponse)
    def api_publish(req: PublishRequest) -> PublishResponse:
        try:
            np = _single_nanopub(req.content, "trig", size_limit)
        except _MalformedSentinel as s:
            raise HTTPException(400, f"malformed nanopub: {s.errors[0]}")
        if trusty.verify_trusty(np) != trusty.VALID:
            raise HTTPException(400, "nanopub has no valid trusty URI")
        try:
            report = get_client().publish([np])
        except clientmod.ClientError as e:
            raise HTTPException(502, f"no server accepted the nanopub: {e}")
        return PublishResponse(publishedCount=report.published_count,
                               server=report.server)

    @app.get("/api/fetch", response_class=PlainTextResponse)
    def api_fetch(ref: str) -> str:
        if trusty.is_artifact_code(ref) or trusty.extract_code(ref):
            try:
                np = get_client().get(ref)
            except clientmod.CorruptContentError as e:
                raise HTTPException(409, str(e))
            except clientmod.ClientError as e:
                raise HTTPException(404, str(e))
            return serialize(np.to_dataset(), "trig")
        # Plain URL: fetch and parse directly, no verification possible.
        if not (ref.startswith("http://") or ref.startswith("https://")):
            raise HTTPException(400, f"not a URL or artifact code: {ref!r}")
        try:
            r = requests.get(ref, timeout=(10, 30))
        except requests.RequestException as e:
            raise HTTPException(404, f"cannot fetch {ref}: {e}")
        if r.status_code != 200:
            raise HTTPException(404, f"{ref} answered {r.status_code}")
        try:
            parse(r.text, "trig")
        except Exception as e:
            raise HTTPException(400, f"fetched content does not parse: {e}")
        return r.text

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="ui")
    return app


def default_static_dir() -> Path | None:
    env = os.environ.get("NP_VALIDATOR_STATIC")
    if env:
        return Path(env)
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def main(argv=None) -> int:
    import uvicorn

    parser = argparse.ArgumentParser(
        prog="np-validator", description="Run the nanopub validator service.")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--servers", help="file with one server URL per line")
    parser.add_argument("--static", help="directory with the built web UI")
    args = parser.parse_args(argv)
    servers = clientmod.resolve_servers(args.servers)
    static = Path(args.static) if args.static else default_static_dir()
    app = create_app(servers=servers, static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
