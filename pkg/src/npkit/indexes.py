"""Nanopublication indexes: nanopubs whose assertions enumerate members.

Large sets chain through append relations (each chunk appends the
previous one; the last chunk is the top index) and can nest through
sub-indexes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Optional, Sequence

from . import trusty
from .nanopub import Nanopub, RDF_TYPE, NANOPUBLICATION, HAS_ASSERTION, \
    HAS_PROVENANCE, HAS_PUBINFO
from .rdf import Quad, iri, literal

NS = "http://purl.org/nanopub/x/"
NANOPUB_INDEX = iri(NS + "NanopubIndex")
INCLUDES_ELEMENT = iri(NS + "includesElement")
INCLUDES_SUBINDEX = iri(NS + "includesSubindex")
APPENDS_INDEX = iri(NS + "appendsIndex")

PROV_GENERATED_AT = iri("http://www.w3.org/ns/prov#generatedAtTime")
DC_CREATED = iri("http://purl.org/dc/terms/created")
DC_TITLE = iri("http://purl.org/dc/terms/title")
PAV_CREATED_BY = iri("http://purl.org/pav/createdBy")
XSD_DATETIME = "http://www.w3.org/2001/XMLSchema#dateTime"

DEFAULT_CAPACITY = 1000
DEFAULT_BASE = "http://np.inn.ac/"


class IndexError_(Exception):
    pass


@dataclass
class IndexMeta:
    title: Optional[str] = None
    creator: Optional[str] = None
    timestamp: Optional[str] = None  # xsd:dateTime lexical form
    base_uri: str = DEFAULT_BASE

    def resolved_timestamp(self) -> str:
        if self.timestamp:
            return self.timestamp
        return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class NanopubIndex:
    """A structural view over an index nanopub."""

    as_nanopub: Nanopub
    elements: list[str] = field(default_factory=list)
    sub_indexes: list[str] = field(default_factory=list)
    appended_index: Optional[str] = None

    @classmethod
    def from_nanopub(cls, np: Nanopub) -> "NanopubIndex":
        if not is_index(np):
            raise IndexError_(f"not an index nanopub: {np.uri}")
        idx = cls(as_nanopub=np)
        appended = []
        for q in np.assertion:
            if not (q.subject.is_iri and q.subject.value == np.uri):
                continue
            if q.predicate == INCLUDES_ELEMENT and q.object.is_iri:
                idx.elements.append(q.object.value)
            elif q.predicate == INCLUDES_SUBINDEX and q.object.is_iri:
                idx.sub_indexes.append(q.object.value)
            elif q.predicate == APPENDS_INDEX and q.object.is_iri:
                appended.append(q.object.value)
        if len(appended) > 1:
            raise IndexError_(f"index {np.uri} appends more than one index")
        idx.appended_index = appended[0] if appended else None
        return idx


def is_index(np: Nanopub) -> bool:
    return any(
        q.subject.is_iri and q.subject.value == np.uri
        and q.predicate == RDF_TYPE and q.object == NANOPUB_INDEX
        for q in np.pubinfo
    )


def _index_nanopub(members: Sequence[str], sub_indexes: Sequence[str],
                   appends: Optional[str], meta: IndexMeta,
                   timestamp: str) -> Nanopub:
    base = meta.base_uri
    uri = iri(base)
    head = iri(base + "Head")
    assertion = iri(base + "assertion")
    provenance = iri(base + "provenance")
    pubinfo = iri(base + "pubinfo")
    quads = [
        Quad(uri, RDF_TYPE, NANOPUBLICATION, head),
        Quad(uri, HAS_ASSERTION, assertion, head),
        Quad(uri, HAS_PROVENANCE, provenance, head),
        Quad(uri, HAS_PUBINFO, pubinfo, head),
    ]
    if appends:
        quads.append(Quad(uri, APPENDS_INDEX, iri(appends), assertion))
    for sub in sub_indexes:
        quads.append(Quad(uri, INCLUDES_SUBINDEX, iri(sub), assertion))
    for member in members:
        quads.append(Quad(uri, INCLUDES_ELEMENT, iri(member), assertion))
    quads.append(Quad(assertion, PROV_GENERATED_AT,
                      literal(timestamp, datatype=XSD_DATETIME), provenance))
    quads.append(Quad(uri, RDF_TYPE, NANOPUB_INDEX, pubinfo))
    quads.append(Quad(uri, DC_CREATED,
                      literal(timestamp, datatype=XSD_DATETIME), pubinfo))
    if meta.title:
        quads.append(Quad(uri, DC_TITLE, literal(meta.title), pubinfo))
    if meta.creator:
        quads.append(Quad(uri, PAV_CREATED_BY, iri(meta.creator), pubinfo))
    plain = Nanopub(base, head.value, assertion.value, provenance.value,
                    pubinfo.value, tuple(quads))
    return trusty.make_trusty(plain)


def make_index(members: Sequence[str], meta: IndexMeta | None = None,
               capacity: int = DEFAULT_CAPACITY,
               sub_indexes: Sequence[str] = ()) -> list[Nanopub]:
    """Build index nanopubs over trusty member URIs; one per chunk of at
    most `capacity` elements, chained via the append relation. The last
    returned nanopub is the top index."""
    if not members and not sub_indexes:
        raise IndexError_("cannot build an index over an empty member list")
    for m in members:
        if trusty.extract_code(m) is None:
            raise IndexError_(f"member has no trusty URI: {m}")
    for s in sub_indexes:
        if trusty.extract_code(s) is None:
            raise IndexError_(f"sub-index has no trusty URI: {s}")
    if capacity < 1:
        raise IndexError_("capacity must be positive")
    meta = meta or IndexMeta()
    timestamp = meta.resolved_timestamp()
    chunks = [list(members[i:i + capacity])
              for i in range(0, len(members), capacity)] or [[]]
    out: list[Nanopub] = []
    previous: Optional[str] = None
    for pos, chunk in enumerate(chunks):
        last = pos == len(chunks) - 1
        np = _index_nanopub(chunk, sub_indexes if last else (),
                            previous, meta, timestamp)
        out.append(np)
        previous = np.uri
    return out


def resolve_elements(top: Nanopub | NanopubIndex,
                     fetch: Callable[[str], Nanopub]) -> list[str]:
    """All element references reachable from `top` through append and
    sub-index links: chain document order, then listing order, deduplicated."""
    if isinstance(top, Nanopub):
        top = NanopubIndex.from_nanopub(top)

    seen_indexes: set[str] = set()
    ordered: list[str] = []
    seen_elements: set[str] = set()

    def chain_of(idx: NanopubIndex) -> list[NanopubIndex]:
        chain = [idx]
        while chain[-1].appended_index is not None:
            ref = chain[-1].appended_index
            if ref in {c.as_nanopub.uri for c in chain} \
                    or ref == idx.as_nanopub.uri:
                raise IndexError_(f"cycle in append chain at {ref}")
            chain.append(NanopubIndex.from_nanopub(fetch(ref)))
        return list(reversed(chain))

    def walk(idx: NanopubIndex) -> None:
        for part in chain_of(idx):
            uri = part.as_nanopub.uri
            if uri in seen_indexes:
                raise IndexError_(f"cycle through index {uri}")
            seen_indexes.add(uri)
            for sub in part.sub_indexes:
                if sub in seen_indexes:
                    raise IndexError_(f"cycle through index {sub}")
                walk(NanopubIndex.from_nanopub(fetch(sub)))
            for element in part.elements:
                if element not in seen_elements:
                    seen_elements.add(element)
                    ordered.append(element)

    walk(top)
    return ordered


def chain_nanopubs(top: Nanopub, fetch: Callable[[str], Nanopub]) -> list[Nanopub]:
    """Every index nanopub reachable from `top` (chain + sub-indexes),
    in the same traversal order as resolve_elements."""
    result: list[Nanopub] = []
    seen: set[str] = set()

    def walk(np: Nanopub) -> None:
        idx = NanopubIndex.from_nanopub(np)
        chain = [idx]
        while chain[-1].appended_index is not None:
            ref = chain[-1].appended_index
            if ref in seen or ref in {c.as_nanopub.uri for c in chain}:
                raise IndexError_(f"cycle in append chain at {ref}")
            chain.append(NanopubIndex.from_nanopub(fetch(ref)))
        for part in reversed(chain):
            if part.as_nanopub.uri in seen:
                raise IndexError_(f"cycle through index {part.as_nanopub.uri}")
            seen.add(part.as_nanopub.uri)
            result.append(part.as_nanopub)
            for sub in part.sub_indexes:
                walk(fetch(sub))

    walk(top)
    return result
