"""Nanopublication abstraction: structure rules, extraction, and checking."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .rdf import Dataset, Quad, Term, iri

NS = "http://www.nanopub.org/nschema#"
RDF_TYPE = iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
NANOPUBLICATION = iri(NS + "Nanopublication")
HAS_ASSERTION = iri(NS + "hasAssertion")
HAS_PROVENANCE = iri(NS + "hasProvenance")
HAS_PUBINFO = iri(NS + "hasPublicationInfo")


class MalformedNanopubError(Exception):
    """A structure rule is violated; `rule` names the first broken rule."""

    def __init__(self, rule: str, message: str, uri: str | None = None):
        super().__init__(f"{rule}: {message}")
        self.rule = rule
        self.reason = message
        self.uri = uri


@dataclass(frozen=True)
class Nanopub:
    """A well-formed nanopublication; construction validates the rules."""

    uri: str
    head_graph: str
    assertion_graph: str
    provenance_graph: str
    pubinfo_graph: str
    quads: tuple[Quad, ...]

    def __post_init__(self):
        _validate(self)

    @property
    def graphs(self) -> tuple[str, str, str, str]:
        return (self.head_graph, self.assertion_graph,
                self.provenance_graph, self.pubinfo_graph)

    def graph_quads(self, graph: str) -> tuple[Quad, ...]:
        return tuple(q for q in self.quads if q.graph and q.graph.value == graph)

    @property
    def assertion(self) -> tuple[Quad, ...]:
        return self.graph_quads(self.assertion_graph)

    @property
    def provenance(self) -> tuple[Quad, ...]:
        return self.graph_quads(self.provenance_graph)

    @property
    def pubinfo(self) -> tuple[Quad, ...]:
        return self.graph_quads(self.pubinfo_graph)

    @classmethod
    def from_quads(cls, quads: Iterable[Quad]) -> "Nanopub":
        quads = tuple(quads)
        heads = [
            q for q in quads
            if q.predicate == RDF_TYPE and q.object == NANOPUBLICATION
        ]
        if not heads:
            raise MalformedNanopubError(
                "R1", "no quad declares a np:Nanopublication")
        uris = {q.subject.value for q in heads if q.subject.is_iri}
        graphs = {q.graph.value for q in heads if q.graph is not None}
        if len(uris) != 1 or len(graphs) != 1:
            raise MalformedNanopubError(
                "R1", "expected exactly one nanopublication declaration")
        uri = uris.pop()
        head = graphs.pop()
        links = {}
        for pred, name in ((HAS_ASSERTION, "assertion"),
                           (HAS_PROVENANCE, "provenance"),
                           (HAS_PUBINFO, "pubinfo")):
            targets = {
                q.object.value for q in quads
                if q.graph and q.graph.value == head
                and q.subject.is_iri and q.subject.value == uri
                and q.predicate == pred and q.object.is_iri
            }
            if len(targets) != 1:
                raise MalformedNanopubError(
                    "R2", f"head lacks exactly one {pred.value.split('#')[1]}",
                    uri=uri)
            links[name] = targets.pop()
        return cls(uri, head, links["assertion"], links["provenance"],
                   links["pubinfo"], quads)

    def to_dataset(self, prefixes: dict[str, str] | None = None) -> Dataset:
        return Dataset(list(self.quads), dict(prefixes or {}))

    def replace_terms(self, mapping) -> "Nanopub":
        """Rebuild with every term passed through `mapping` (a callable)."""
        new_quads = tuple(
            Quad(mapping(q.subject), mapping(q.predicate), mapping(q.object),
                 mapping(q.graph) if q.graph is not None else None)
            for q in self.quads
        )
        return Nanopub(
            mapping(iri(self.uri)).value,
            mapping(iri(self.head_graph)).value,
            mapping(iri(self.assertion_graph)).value,
            mapping(iri(self.provenance_graph)).value,
            mapping(iri(self.pubinfo_graph)).value,
            new_quads,
        )


def _mentions(quad: Quad, target: str) -> bool:
    # Subject-or-object occurrence; predicate position does not count.
    for t in (quad.subject, quad.object):
        if t.is_iri and t.value == target:
            return True
    return False


def _validate(np: Nanopub) -> None:
    uri, head = np.uri, np.head_graph
    a, p, i = np.assertion_graph, np.provenance_graph, np.pubinfo_graph

    names = [uri, head, a, p, i]
    if len(set(names)) != 5:
        raise MalformedNanopubError(
            "R3", "nanopub URI and the four graph names must be pairwise distinct",
            uri=uri)

    head_quads = np.graph_quads(head)
    decls = [q for q in head_quads
             if q.subject.is_iri and q.subject.value == uri
             and q.predicate == RDF_TYPE and q.object == NANOPUBLICATION]
    if len(decls) != 1:
        raise MalformedNanopubError(
            "R1", "head must contain exactly one np:Nanopublication declaration",
            uri=uri)
    for pred, target, label in ((HAS_ASSERTION, a, "np:hasAssertion"),
                                (HAS_PROVENANCE, p, "np:hasProvenance"),
                                (HAS_PUBINFO, i, "np:hasPublicationInfo")):
        matches = [q for q in head_quads
                   if q.subject.is_iri and q.subject.value == uri
                   and q.predicate == pred]
        if len(matches) != 1 or not matches[0].object.is_iri \
                or matches[0].object.value != target:
            raise MalformedNanopubError(
                "R2", f"head lacks exactly one {label} link", uri=uri)

    for graph, label in ((a, "assertion"), (p, "provenance"), (i, "pubinfo")):
        if not np.graph_quads(graph):
            raise MalformedNanopubError(
                "R4", f"{label} graph is empty", uri=uri)

    if not any(_mentions(q, a) for q in np.graph_quads(p)):
        raise MalformedNanopubError(
            "R5", "provenance graph does not mention the assertion graph",
            uri=uri)
    if not any(_mentions(q, uri) for q in np.graph_quads(i)):
        raise MalformedNanopubError(
            "R6", "publication info graph does not mention the nanopub URI",
            uri=uri)

    allowed = {head, a, p, i}
    for q in np.quads:
        if q.graph is None or q.graph.value not in allowed:
            where = q.graph.value if q.graph else "the default graph"
            raise MalformedNanopubError(
                "R7", f"quad outside the four nanopub graphs (in {where})",
                uri=uri)


# ---------------------------------------------------------------------------
# Extraction

ExtractionResult = Union[Nanopub, MalformedNanopubError]


def extract_nanopubs(ds: Dataset) -> list[ExtractionResult]:
    """Partition a dataset into nanopubs discovered via their head graphs.

    Returns one entry per discovered nanopub (or per failure); a rule
    violation in one nanopub does not abort the remaining ones.
    """
    decls: dict[str, list[str]] = {}  # head graph -> declared nanopub URIs
    for q in ds.quads:
        if q.predicate == RDF_TYPE and q.object == NANOPUBLICATION \
                and q.graph is not None and q.subject.is_iri:
            decls.setdefault(q.graph.value, []).append(q.subject.value)

    results: list[ExtractionResult] = []
    claimed: dict[str, str] = {}  # graph name -> claiming head graph
    ok_heads = []
    for head in sorted(decls):
        uris = sorted(set(decls[head]))
        if len(uris) != 1:
            results.append(MalformedNanopubError(
                "R1", f"head graph {head} declares {len(uris)} nanopublications"))
            continue
        uri = uris[0]
        links = {}
        broken = None
        for pred, name in ((HAS_ASSERTION, "assertion"),
                           (HAS_PROVENANCE, "provenance"),
                           (HAS_PUBINFO, "pubinfo")):
            targets = sorted({
                q.object.value for q in ds.quads
                if q.graph and q.graph.value == head
                and q.subject.is_iri and q.subject.value == uri
                and q.predicate == pred and q.object.is_iri
            })
            if len(targets) != 1:
                label = pred.value.split("#")[1]
                broken = MalformedNanopubError(
                    "R2", f"head lacks np:{label}" if not targets
                    else f"head has multiple np:{label}", uri=uri)
                break
            links[name] = targets[0]
        if broken is not None:
            results.append(broken)
            continue
        ok_heads.append((uri, head, links))

    conflict_graphs = set()
    for uri, head, links in ok_heads:
        for g in (head, links["assertion"], links["provenance"], links["pubinfo"]):
            if g in claimed and claimed[g] != head:
                conflict_graphs.add(g)
            claimed[g] = head

    final: list[ExtractionResult] = []
    used_graphs = set()
    for uri, head, links in sorted(ok_heads):
        graphs = (head, links["assertion"], links["provenance"], links["pubinfo"])
        if any(g in conflict_graphs for g in graphs):
            final.append(MalformedNanopubError(
                "R3", "graph claimed by two nanopublication heads", uri=uri))
            used_graphs.update(graphs)
            continue
        used_graphs.update(graphs)
        quads = tuple(q for q in ds.quads
                      if q.graph is not None and q.graph.value in graphs)
        try:
            final.append(Nanopub(uri, head, links["assertion"],
                                 links["provenance"], links["pubinfo"], quads))
        except MalformedNanopubError as e:
            final.append(e)

    orphans = [q for q in ds.quads
               if q.graph is None or q.graph.value not in used_graphs]
    if orphans:
        where = sorted({q.graph.value if q.graph else "default graph"
                        for q in orphans})
        final.extend(results)
        final.append(MalformedNanopubError(
            "R7", f"{len(orphans)} quad(s) belong to no nanopublication "
                  f"(graphs: {', '.join(where)})"))
        return final
    return sorted(
        final + results,
        key=lambda x: x.uri if isinstance(x, Nanopub) else (x.uri or "￿"),
    )


# ---------------------------------------------------------------------------
# Checking

VALID_PLAIN = "valid-plain"
VALID_TRUSTY = "valid-trusty"
VALID_SIGNED = "valid-signed"
INVALID = "invalid"


@dataclass
class CheckReport:
    classifications: list[tuple[str, list[str]]] = field(default_factory=list)

    def count(self, cls: str) -> int:
        return sum(1 for c, _ in self.classifications if c == cls)

    @property
    def all_valid(self) -> bool:
        return self.count(INVALID) == 0

    def summary(self) -> str:
        parts = []
        for cls, text in ((VALID_PLAIN, "valid (not trusty)"),
                          (VALID_TRUSTY, "valid (trusty)"),
                          (VALID_SIGNED, "signed"),
                          (INVALID, "invalid")):
            n = self.count(cls)
            if n:
                parts.append(f"{n} {text};")
        return "Summary: " + " ".join(parts)


def classify(item: ExtractionResult) -> tuple[str, list[str]]:
    from . import signing, trusty  # deferred: those modules build on this one

    if isinstance(item, MalformedNanopubError):
        return (INVALID, [str(item)])
    t = trusty.verify_trusty(item)
    s = signing.verify_signature(item)
    reasons = []
    if t == trusty.INVALID:
        reasons.append("trusty URI does not match content")
    if s == signing.INVALID:
        reasons.append("signature does not verify")
    if reasons:
        return (INVALID, reasons)
    if s == signing.VALID and t == trusty.VALID:
        return (VALID_SIGNED, [])
    if t == trusty.VALID:
        return (VALID_TRUSTY, [])
    return (VALID_PLAIN, [])


def check(inputs: Sequence[ExtractionResult]) -> CheckReport:
    report = CheckReport()
    for item in inputs:
        report.classifications.append(classify(item))
    return report


# ---------------------------------------------------------------------------
# Informal assertions

_AIDA_RE = re.compile(r"^[A-Z][^\n\r]*\.$", re.DOTALL)


def is_aida_sentence(s: str) -> bool:
    """Syntactic test: one line, starts upper-case, ends with a period."""
    return bool(_AIDA_RE.match(s))
