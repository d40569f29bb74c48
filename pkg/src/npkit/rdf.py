"""Minimal RDF quad model with TriG and N-Quads support.

The serializers are deliberately hand-rolled: content hashing needs full
control over the bytes that represent a quad, so no third-party RDF stack
sits between the model and the wire.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from collections import Counter
from typing import Iterable, Iterator, Mapping, Optional

XSD_STRING = "http://www.w3.org/2001/XMLSchema#string"

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_LANG_RE = re.compile(r"^[A-Za-z]{1,8}(-[A-Za-z0-9]{1,8})*$")


class RdfError(Exception):
    """Base class for model and syntax errors."""


class SyntaxError_(RdfError):
    """Parse failure with position information."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SerializationError(RdfError):
    """A quad cannot be written in the requested format."""


@dataclass(frozen=True)
class Term:
    """An RDF node: IRI, blank node, or literal."""

    kind: str  # "iri" | "blank" | "literal"
    value: str
    datatype: Optional[str] = None
    language: Optional[str] = None

    def __post_init__(self):
        if self.kind == "iri":
            if not _SCHEME_RE.match(self.value):
                raise RdfError(f"not an absolute IRI: {self.value!r}")
            if self.datatype or self.language:
                raise RdfError("IRI term cannot carry datatype or language")
        elif self.kind == "blank":
            if not self.value:
                raise RdfError("blank node label must be non-empty")
            if self.datatype or self.language:
                raise RdfError("blank node cannot carry datatype or language")
        elif self.kind == "literal":
            if self.datatype and self.language:
                raise RdfError("literal has both datatype and language")
            if self.language and not _LANG_RE.match(self.language):
                raise RdfError(f"malformed language tag: {self.language!r}")
            if self.datatype and not _SCHEME_RE.match(self.datatype):
                raise RdfError(f"datatype is not an absolute IRI: {self.datatype!r}")
        else:
            raise RdfError(f"unknown term kind: {self.kind!r}")

    @property
    def is_iri(self) -> bool:
        return self.kind == "iri"

    @property
    def is_blank(self) -> bool:
        return self.kind == "blank"

    @property
    def is_literal(self) -> bool:
        return self.kind == "literal"


def iri(value: str) -> Term:
    return Term("iri", value)


def blank(label: str) -> Term:
    return Term("blank", label)


def literal(value: str, datatype: str | None = None, language: str | None = None) -> Term:
    return Term("literal", value, datatype=datatype, language=language)


@dataclass(frozen=True)
class Quad:
    """One RDF statement with its graph label (None = default graph)."""

    subject: Term
    predicate: Term
    object: Term
    graph: Optional[Term] = None

    def __post_init__(self):
        if self.subject.kind not in ("iri", "blank"):
            raise RdfError("subject must be an IRI or blank node")
        if not self.predicate.is_iri:
            raise RdfError("predicate must be an IRI")
        if self.graph is not None and not self.graph.is_iri:
            raise RdfError("graph label must be an IRI")

    @property
    def terms(self) -> tuple:
        return (self.subject, self.predicate, self.object, self.graph)


@dataclass
class Dataset:
    """An ordered collection of quads plus a prefix map."""

    quads: list[Quad] = field(default_factory=list)
    prefixes: dict[str, str] = field(default_factory=dict)

    def __iter__(self) -> Iterator[Quad]:
        return iter(self.quads)

    def __len__(self) -> int:
        return len(self.quads)

    def add(self, quad: Quad) -> None:
        self.quads.append(quad)

    def multiset(self) -> Counter:
        return Counter(self.quads)

    def same_quads(self, other: "Dataset") -> bool:
        return self.multiset() == other.multiset()


# ---------------------------------------------------------------------------
# Parsing

_PN_LOCAL_CHARS = re.compile(r"[A-Za-z0-9_\-.%:]")
_PN_PREFIX_RE = re.compile(r"^[A-Za-z0-9_\-.]*$")

_ESCAPES = {
    "t": "\t",
    "n": "\n",
    "r": "\r",
    "b": "\b",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


class _Reader:
    """Character reader with line/column tracking."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.text[i] if i < len(self.text) else ""

    def next(self) -> str:
        c = self.peek()
        if c:
            self.pos += 1
            if c == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        return c

    def error(self, message: str):
        raise SyntaxError_(message, self.line, self.col)

    def skip_ws(self) -> None:
        while True:
            c = self.peek()
            if c and c in " \t\r\n":
                self.next()
            elif c == "#":
                while self.peek() and self.peek() != "\n":
                    self.next()
            else:
                return

    @property
    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


class _TrigParser:
    def __init__(self, text: str):
        self.r = _Reader(text)
        self.prefixes: dict[str, str] = {}
        self.base: Optional[str] = None
        self.dataset = Dataset()

    def parse(self) -> Dataset:
        while not self.r.at_end:
            self._statement()
        self.dataset.prefixes = dict(self.prefixes)
        return self.dataset

    # -- statements

    def _statement(self) -> None:
        r = self.r
        r.skip_ws()
        if r.peek() == "@":
            self._directive()
            return
        word = self._peek_word()
        if word.upper() == "PREFIX":
            self._consume_word()
            self._prefix_decl(require_dot=False)
            return
        if word.upper() == "BASE":
            self._consume_word()
            self._base_decl(require_dot=False)
            return
        if word.upper() == "GRAPH":
            self._consume_word()
            label = self._term(as_graph=True)
            self._graph_block(label)
            return
        # Either "<label> { ... }" or default-graph triples.
        node = self._term(as_graph=True)
        r.skip_ws()
        if r.peek() == "{":
            self._graph_block(node)
        else:
            self._triples(graph=None, first_subject=node)

    def _directive(self) -> None:
        r = self.r
        r.next()  # "@"
        word = self._consume_word()
        if word == "prefix":
            self._prefix_decl(require_dot=True)
        elif word == "base":
            self._base_decl(require_dot=True)
        else:
            r.error(f"unknown directive @{word}")

    def _prefix_decl(self, require_dot: bool) -> None:
        r = self.r
        r.skip_ws()
        name = ""
        while r.peek() != ":":
            c = r.next()
            if not c or c in " \t\r\n":
                r.error("malformed prefix name")
            name += c
        r.next()  # ":"
        if not _PN_PREFIX_RE.match(name):
            r.error(f"malformed prefix name {name!r}")
        r.skip_ws()
        value = self._iriref()
        self.prefixes[name] = value
        if require_dot:
            self._expect_dot()
        else:
            r.skip_ws()
            if r.peek() == ".":
                r.next()

    def _base_decl(self, require_dot: bool) -> None:
        self.r.skip_ws()
        self.base = self._iriref()
        if require_dot:
            self._expect_dot()

    def _graph_block(self, label: Term) -> None:
        r = self.r
        if not label.is_iri:
            r.error("graph label must be an IRI")
        r.skip_ws()
        if r.peek() != "{":
            r.error("expected '{'")
        r.next()
        r.skip_ws()
        while r.peek() != "}":
            if not r.peek():
                r.error("unterminated graph block")
            self._triples(graph=label)
            r.skip_ws()
        r.next()  # "}"
        r.skip_ws()
        if r.peek() == ".":
            r.next()

    def _triples(self, graph: Optional[Term], first_subject: Optional[Term] = None) -> None:
        r = self.r
        subject = first_subject if first_subject is not None else self._term()
        if subject.is_literal:
            r.error("literal cannot be a subject")
        while True:
            predicate = self._predicate()
            while True:
                obj = self._term()
                self.dataset.add(Quad(subject, predicate, obj, graph))
                r.skip_ws()
                if r.peek() == ",":
                    r.next()
                    continue
                break
            r.skip_ws()
            if r.peek() == ";":
                r.next()
                r.skip_ws()
                # Allow trailing ";" before "." or "}".
                if r.peek() in (".", "}", ""):
                    break
                continue
            break
        r.skip_ws()
        if r.peek() == ".":
            r.next()
        elif graph is not None and r.peek() == "}":
            pass  # final triple in a block may omit the dot
        else:
            r.error("expected '.'")

    def _predicate(self) -> Term:
        if self._peek_word() == "a" :
            self._consume_word()
            return iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
        t = self._term()
        if not t.is_iri:
            self.r.error("predicate must be an IRI")
        return t

    # -- terms

    def _term(self, as_graph: bool = False) -> Term:
        r = self.r
        r.skip_ws()
        c = r.peek()
        if c == "<":
            return iri(self._iriref())
        if c == '"' or c == "'":
            return self._literal()
        if c == "_" and r.peek(1) == ":":
            return self._bnode()
        if c == "[":
            r.error("anonymous blank nodes are not supported")
        if c == "(":
            r.error("RDF collections are not supported")
        return self._pname()

    def _iriref(self) -> str:
        r = self.r
        r.skip_ws()
        if r.peek() != "<":
            r.error("expected IRI")
        r.next()
        out = []
        while True:
            c = r.next()
            if c == ">":
                break
            if not c or c in " \n\t\r\"{}|^`":
                r.error("invalid character in IRI")
            if c == "\\":
                e = r.next()
                if e == "u":
                    out.append(chr(int("".join(r.next() for _ in range(4)), 16)))
                elif e == "U":
                    out.append(chr(int("".join(r.next() for _ in range(8)), 16)))
                else:
                    r.error(f"invalid IRI escape \\{e}")
                continue
            out.append(c)
        value = "".join(out)
        if not _SCHEME_RE.match(value):
            if self.base is None:
                r.error(f"relative IRI {value!r} without a base")
            value = self.base + value
        return value

    def _literal(self) -> Term:
        r = self.r
        quote = r.next()
        out = []
        while True:
            c = r.next()
            if not c:
                r.error("unterminated string literal")
            if c == quote:
                break
            if c == "\n":
                r.error("line break inside string literal")
            if c == "\\":
                e = r.next()
                if e in _ESCAPES:
                    out.append(_ESCAPES[e])
                elif e == "u":
                    out.append(chr(int("".join(r.next() for _ in range(4)), 16)))
                elif e == "U":
                    out.append(chr(int("".join(r.next() for _ in range(8)), 16)))
                else:
                    r.error(f"invalid string escape \\{e}")
                continue
            out.append(c)
        value = "".join(out)
        if r.peek() == "@":
            r.next()
            tag = ""
            while r.peek() and (r.peek().isalnum() or r.peek() == "-"):
                tag += r.next()
            return literal(value, language=tag)
        if r.peek() == "^" and r.peek(1) == "^":
            r.next()
            r.next()
            dt = self._term()
            if not dt.is_iri:
                r.error("datatype must be an IRI")
            return literal(value, datatype=dt.value)
        return literal(value)

    def _bnode(self) -> Term:
        r = self.r
        r.next()  # "_"
        r.next()  # ":"
        label = ""
        while r.peek() and _PN_LOCAL_CHARS.match(r.peek()) and r.peek() != ":":
            label += r.next()
        label = self._strip_trailing_dots(label)
        if not label:
            r.error("empty blank node label")
        return blank(label)

    def _pname(self) -> Term:
        r = self.r
        start = ""
        while r.peek() and _PN_LOCAL_CHARS.match(r.peek()) and r.peek() != ":":
            start += r.next()
        if r.peek() != ":":
            r.error(f"expected a term, found {start!r}" if start else "expected a term")
        r.next()
        local = ""
        while r.peek() and _PN_LOCAL_CHARS.match(r.peek()) and r.peek() != ":":
            local += r.next()
        local = self._strip_trailing_dots(local)
        if start not in self.prefixes:
            r.error(f"undefined prefix {start!r}")
        return iri(self.prefixes[start] + local)

    def _strip_trailing_dots(self, s: str) -> str:
        # A trailing "." is statement punctuation, not part of the name.
        n = len(s)
        while n and s[n - 1] == ".":
            n -= 1
        self.r.pos -= len(s) - n
        self.r.col -= len(s) - n
        return s[:n]

    # -- small helpers

    def _peek_word(self) -> str:
        r = self.r
        r.skip_ws()
        word = ""
        i = 0
        while True:
            c = r.peek(i)
            if c.isalpha():
                word += c
                i += 1
            else:
                break
        # Only a bare word: "ex:foo" must not look like the word "ex".
        if r.peek(i) == ":":
            return ""
        return word

    def _consume_word(self) -> str:
        r = self.r
        r.skip_ws()
        word = ""
        while r.peek().isalpha():
            word += r.next()
        return word

    def _expect_dot(self) -> None:
        self.r.skip_ws()
        if self.r.peek() != ".":
            self.r.error("expected '.'")
        self.r.next()


class _NQuadsParser:
    def __init__(self, text: str):
        self.text = text

    def parse(self) -> Dataset:
        ds = Dataset()
        for lineno, raw in enumerate(self.text.split("\n"), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            p = _TrigParser(line)
            p.r.line = lineno
            terms = []
            while True:
                p.r.skip_ws()
                if p.r.peek() == ".":
                    p.r.next()
                    break
                if not p.r.peek():
                    p.r.error("expected '.' at end of statement")
                if len(terms) == 4:
                    p.r.error("too many terms in statement")
                terms.append(p._term())
            p.r.skip_ws()
            if p.r.peek():
                p.r.error("trailing content after '.'")
            if len(terms) < 3:
                p.r.error("incomplete statement")
            graph = terms[3] if len(terms) == 4 else None
            if graph is not None and not graph.is_iri:
                p.r.error("graph label must be an IRI")
            ds.add(Quad(terms[0], terms[1], terms[2], graph))
        return ds


def parse(text: str, format: str) -> Dataset:
    """Parse TriG or N-Quads text into a Dataset."""
    if format == "trig":
        return _TrigParser(text).parse()
    if format == "nquads":
        return _NQuadsParser(text).parse()
    raise ValueError(f"unknown format: {format!r}")


# ---------------------------------------------------------------------------
# Serialization

_IRI_BAD = re.compile(r'[\x00-\x20<>"{}|^`\\]')
_LOCAL_SAFE = re.compile(r"^[A-Za-z0-9_\-]*$")


def _escape_literal(value: str) -> str:
    out = value.replace("\\", "\\\\").replace('"', '\\"')
    return out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")


def _iri_token(value: str) -> str:
    if _IRI_BAD.search(value):
        bad = _IRI_BAD.search(value).group(0)
        raise SerializationError(f"IRI contains forbidden character {bad!r}: {value!r}")
    return f"<{value}>"


def _term_token(term: Term, prefixes: Mapping[str, str] | None = None) -> str:
    if term.is_iri:
        if prefixes:
            for name, ns in prefixes.items():
                if term.value.startswith(ns):
                    local = term.value[len(ns):]
                    if _LOCAL_SAFE.match(local):
                        return f"{name}:{local}"
        return _iri_token(term.value)
    if term.is_blank:
        return f"_:{term.value}"
    lit = f'"{_escape_literal(term.value)}"'
    if term.language:
        return f"{lit}@{term.language}"
    if term.datatype:
        dt = _term_token(Term("iri", term.datatype), prefixes)
        return f"{lit}^^{dt}"
    return lit


def serialize(ds: Dataset, format: str) -> str:
    """Serialize a Dataset to TriG or N-Quads text."""
    if format == "nquads":
        return _serialize_nquads(ds)
    if format == "trig":
        return _serialize_trig(ds)
    raise ValueError(f"unknown format: {format!r}")


def _serialize_nquads(ds: Dataset) -> str:
    lines = []
    for q in ds.quads:
        parts = [
            _term_token(q.subject),
            _term_token(q.predicate),
            _term_token(q.object),
        ]
        if q.graph is not None:
            parts.append(_term_token(q.graph))
        lines.append(" ".join(parts) + " .")
    return "".join(line + "\n" for line in lines)


def _used_prefixes(ds: Dataset) -> dict[str, str]:
    # Longest namespace first so the most specific prefix wins.
    return dict(
        sorted(ds.prefixes.items(), key=lambda kv: len(kv[1]), reverse=True)
    )


def _serialize_trig(ds: Dataset) -> str:
    prefixes = _used_prefixes(ds)
    out = []
    for name, ns in ds.prefixes.items():
        out.append(f"@prefix {name}: {_iri_token(ns)} .")
    if ds.prefixes:
        out.append("")
    # Group quads by graph, first-appearance order; default graph first.
    groups: dict[Optional[Term], list[Quad]] = {}
    for q in ds.quads:
        groups.setdefault(q.graph, []).append(q)
    if None in groups:
        for q in groups.pop(None):
            out.append(
                f"{_term_token(q.subject, prefixes)} "
                f"{_term_token(q.predicate, prefixes)} "
                f"{_term_token(q.object, prefixes)} ."
            )
        out.append("")
    for graph, quads in groups.items():
        out.append(f"{_term_token(graph, prefixes)} {{")
        for q in quads:
            out.append(
                f"  {_term_token(q.subject, prefixes)} "
                f"{_term_token(q.predicate, prefixes)} "
                f"{_term_token(q.object, prefixes)} ."
            )
        out.append("}")
        out.append("")
    while out and out[-1] == "":
        out.pop()
    return "".join(line + "\n" for line in out) if out else ""


def guess_format(filename: str) -> str:
    if filename.endswith(".nq") or filename.endswith(".nquads"):
        return "nquads"
    return "trig"
