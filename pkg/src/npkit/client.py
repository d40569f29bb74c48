"""Client for the decentralized nanopub server network.

Retrieval tries servers in randomized order with a bounded concurrent
fan-out and verifies every response locally, so a corrupt or lying node
can never win as long as one honest copy exists.
"""

from __future__ import annotations

import os
import random
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import requests

from . import indexes, trusty
from . import nanopub as npmod
from .nanopub import Nanopub
from .rdf import Dataset, parse, serialize

DEFAULT_SERVERS = (
    "http://np.inn.ac/",
    "http://ristretto.med.yale.edu:8080/nanopub-server/",
    "http://nanopub-server.ops.labs.vu.nl/",
    "http://nanopubs.stanford.edu/nanopub-server/",
    "http://nanopubs.semanticscience.org/",
)

MAX_IN_FLIGHT = 4
CONNECT_TIMEOUT = 10.0
READ_TIMEOUT = 30.0
RETRIES = 2


class ClientError(Exception):
    pass


class NotTrustyError(ClientError):
    pass


class NotFoundError(ClientError):
    pass


class CorruptContentError(ClientError):
    """Content was found, but no copy passed verification."""


@dataclass
class ServerList:
    entries: list[str]
    source: str = "built-in default"

    def __post_init__(self):
        if not self.entries:
            raise ClientError("server list is empty")
        self.entries = [e if e.endswith("/") else e + "/"
                        for e in self.entries]
        for e in self.entries:
            if not (e.startswith("http://") or e.startswith("https://")):
                raise ClientError(f"not an http(s) URL: {e}")

    @classmethod
    def default(cls) -> "ServerList":
        return cls(list(DEFAULT_SERVERS), source="built-in default")

    @classmethod
    def from_file(cls, path: str | Path) -> "ServerList":
        entries = []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                entries.append(line)
        return cls(entries, source=f"config file {path}")

    @classmethod
    def from_env(cls) -> Optional["ServerList"]:
        raw = os.environ.get("NP_SERVERS", "").strip()
        if not raw:
            return None
        if os.path.exists(raw):
            return cls.from_file(raw)
        entries = [e for e in raw.replace(",", " ").split() if e]
        return cls(entries, source="NP_SERVERS")


def resolve_servers(servers_file: str | None = None) -> ServerList:
    if servers_file:
        return ServerList.from_file(servers_file)
    return ServerList.from_env() or ServerList.default()


@dataclass
class ServerInfo:
    url: str
    protocol_version: str
    description: str
    admits_publish: bool
    page_size: int
    nanopub_count: int


@dataclass
class StatusReport:
    code: str
    found_at: list[str] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.found_at)

    def render(self, list_all: bool = False) -> str:
        lines = []
        if list_all:
            lines.extend(f"URL: {url}" for url in self.found_at)
        lines.append(f"Found on {self.count} nanopub servers.")
        return "\n".join(lines)


@dataclass
class PublishReport:
    published_count: int
    server: str

    def render(self) -> str:
        noun = "nanopub" if self.published_count == 1 else "nanopubs"
        return f"{self.published_count} {noun} published at {self.server}"


@dataclass
class Client:
    servers: ServerList
    connect_timeout: float = CONNECT_TIMEOUT
    read_timeout: float = READ_TIMEOUT
    retries: int = RETRIES
    max_in_flight: int = MAX_IN_FLIGHT
    rng: random.Random = field(default_factory=random.Random)
    _local: threading.local = field(default_factory=threading.local,
                                    repr=False, compare=False)

    @property
    def _timeout(self):
        return (self.connect_timeout, self.read_timeout)

    def _session(self) -> requests.Session:
        # one session per thread so keep-alive connections are reused
        if not hasattr(self._local, "session"):
            self._local.session = requests.Session()
        return self._local.session

    def _request(self, method: str, url: str, **kwargs):
        last = None
        for _ in range(self.retries + 1):
            try:
                return self._session().request(method, url,
                                               timeout=self._timeout, **kwargs)
            except requests.RequestException as e:
                last = e
        raise last

    # -- publish

    def publish(self, nps: Sequence[Nanopub],
                prefixes: dict[str, str] | None = None) -> PublishReport:
        """Upload every nanopub to one admitting server; the network is
        responsible for replication."""
        for np in nps:
            if trusty.verify_trusty(np) != trusty.VALID:
                raise NotTrustyError(
                    f"refusing to publish non-trusty nanopub {np.uri}")
        errors = []
        for server in self.servers.entries:
            try:
                for np in nps:
                    body = serialize(np.to_dataset(prefixes), "trig")
                    r = self._request("POST", server, data=body.encode("utf-8"),
                                      headers={"Content-Type": "application/trig"})
                    if r.status_code not in (200, 201):
                        raise ClientError(
                            f"{server} answered {r.status_code}: {r.text.strip()}")
                return PublishReport(len(nps), server)
            except (requests.RequestException, ClientError) as e:
                errors.append(f"{server}: {e}")
        raise ClientError(
            "no server accepted the nanopubs:\n  " + "\n  ".join(errors))

    # -- retrieval

    def get(self, ref: str) -> Nanopub:
        """Reliably retrieve one verified nanopub by trusty URI or code."""
        code = ref_to_code(ref)
        order = list(self.servers.entries)
        self.rng.shuffle(order)
        corrupt: list[str] = []
        result: list[Nanopub] = []
        lock = threading.Lock()

        def try_server(server: str) -> Optional[Nanopub]:
            with lock:
                if result:
                    return None
            try:
                r = self._request("GET", server + code)
            except requests.RequestException:
                return None
            if r.status_code != 200:
                return None
            try:
                np = self._parse_single(r.text)
            except Exception:
                with lock:
                    corrupt.append(server)
                return None
            if trusty.extract_code(np.uri) != code \
                    or trusty.verify_trusty(np) != trusty.VALID:
                with lock:
                    corrupt.append(server)
                return None
            return np

        if len(order) == 1:
            np = try_server(order[0])
            if np is not None:
                result.append(np)
        else:
            with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
                futures = [pool.submit(try_server, s) for s in order]
                for f in as_completed(futures):
                    np = f.result()
                    if np is not None:
                        with lock:
                            result.append(np)
                        break
        if result:
            return result[0]
        if corrupt:
            raise CorruptContentError(
                f"{code}: only corrupt copies found "
                f"(at {', '.join(sorted(corrupt))})")
        raise NotFoundError(f"{code}: not found on any server")

    def _parse_single(self, text: str) -> Nanopub:
        nps = npmod.extract_nanopubs(parse(text, "trig"))
        if len(nps) != 1 or not isinstance(nps[0], Nanopub):
            raise ClientError("response is not a single well-formed nanopub")
        return nps[0]

    def get_content(self, ref: str) -> Dataset:
        """An index nanopub plus its whole chain and every element."""
        top = self.get(ref)
        if not indexes.is_index(top):
            raise ClientError(f"not an index: {top.uri}")

        cache: dict[str, Nanopub] = {top.uri: top}
        missing: list[str] = []

        def fetch(uri: str) -> Nanopub:
            if uri not in cache:
                cache[uri] = self.get(uri)
            return cache[uri]

        chain = indexes.chain_nanopubs(top, fetch)
        elements = indexes.resolve_elements(
            indexes.NanopubIndex.from_nanopub(top), fetch)

        ds = Dataset()
        for np in chain:
            for q in np.quads:
                ds.add(q)

        def fetch_element(uri: str) -> Optional[Nanopub]:
            if uri in cache:
                return cache[uri]
            try:
                return self.get(uri)
            except ClientError:
                return None

        with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
            fetched = pool.map(fetch_element, elements)
        for uri, element in zip(elements, fetched):
            if element is None:
                missing.append(ref_to_code(uri))
                continue
            for q in element.quads:
                ds.add(q)
        if missing:
            raise NotFoundError(
                "unresolvable index elements: " + ", ".join(missing))
        return ds

    # -- census

    def status(self, ref: str) -> StatusReport:
        """Ask every server whether it holds a verifying copy."""
        code = ref_to_code(ref)
        report = StatusReport(code)

        def probe(server: str) -> Optional[str]:
            try:
                r = self._request("GET", server + code)
            except requests.RequestException:
                return None
            if r.status_code != 200:
                return None
            try:
                np = self._parse_single(r.text)
            except Exception:
                return None
            if trusty.extract_code(np.uri) != code \
                    or trusty.verify_trusty(np) != trusty.VALID:
                return None
            return server + code

        with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
            hits = list(pool.map(probe, self.servers.entries))
        report.found_at = [h for h in hits if h is not None]
        return report

    def server_info(self, url: str) -> ServerInfo:
        if not url.endswith("/"):
            url += "/"
        try:
            r = self._request("GET", url)
        except requests.RequestException as e:
            raise ClientError(f"server unreachable: {e}")
        if r.status_code != 200:
            raise ClientError(f"server answered {r.status_code}")
        try:
            doc = r.json()
            return ServerInfo(
                url=url,
                protocol_version=str(doc["protocolVersion"]),
                description=str(doc["description"]),
                admits_publish=bool(doc["admitsPublish"]),
                page_size=int(doc["pageSize"]),
                nanopub_count=int(doc["nanopubCount"]),
            )
        except (ValueError, KeyError, TypeError) as e:
            raise ClientError(f"malformed server info document: {e}")


def ref_to_code(ref: str) -> str:
    """Accept a bare artifact code or any URI ending in one."""
    if trusty.is_artifact_code(ref):
        return ref
    code = trusty.extract_code(ref)
    if code is None:
        raise ClientError(
            f"not a trusty URI or artifact code: {ref!r}")
    return code
