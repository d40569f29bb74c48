"""Content addressing for nanopublications.

A nanopub is normalized to a canonical byte stream, hashed with SHA-256,
and the base64url-encoded digest (43 chars, no padding) is embedded into
its identifier behind the fixed module id "RA". The canonical form was
frozen against known-good artifact codes and must not change:

  - quads are sorted as (graph, subject, predicate, object) string tuples,
  - each term is rendered on its own line (LF-terminated),
  - IRIs are rendered verbatim; literals as "@<lang> <lexical>" or
    "^<datatype> <lexical>" with backslash/newline escaping,
  - every IRI of the nanopub's own identifier family is rendered with a
    single space at the position where the artifact code sits (or will
    sit), sub-identifiers keep their suffix behind a "." separator.
"""

from __future__ import annotations

import base64
import hashlib
import re

from .nanopub import Nanopub
from .rdf import Quad, Term, iri, literal, XSD_STRING

CODE_LENGTH = 45
CODE_RE = re.compile(r"^RA[A-Za-z0-9\-_]{43}$")
CODE_SEARCH_RE = re.compile(r"RA[A-Za-z0-9\-_]{43}")
_CODE_ALPHABET = set(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_")

VALID = "valid"
INVALID = "invalid"
NO_TRUSTY_URI = "no-trusty-uri"

PLACEHOLDER = " "
SUFFIX_SEPARATOR = "."


class TrustyError(Exception):
    pass


class BlankNodeError(TrustyError):
    """Raised when hashing meets a blank node; skolemize first."""


def is_artifact_code(s: str) -> bool:
    return bool(CODE_RE.match(s))


def extract_code(uri: str) -> str | None:
    """Return the artifact code if `uri` ends in one, cleanly delimited."""
    if len(uri) < CODE_LENGTH:
        return None
    tail = uri[-CODE_LENGTH:]
    if not CODE_RE.match(tail):
        return None
    if len(uri) > CODE_LENGTH and uri[-CODE_LENGTH - 1] in _CODE_ALPHABET:
        return None
    return tail


def contains_code(value: str) -> bool:
    """True when the string holds a cleanly delimited artifact code
    anywhere (so it refers to some already-minted artifact)."""
    for m in CODE_SEARCH_RE.finditer(value):
        before = value[m.start() - 1] if m.start() > 0 else ""
        after = value[m.end()] if m.end() < len(value) else ""
        if (not before or before not in _CODE_ALPHABET) \
                and (not after or after not in _CODE_ALPHABET):
            return True
    return False


def expand_base(uri: str) -> str:
    """Append "." when the URI ends in a code-alphabet character, so the
    code's start stays parseable."""
    if uri and uri[-1] in _CODE_ALPHABET:
        return uri + SUFFIX_SEPARATOR
    return uri


def _family_splitter(np: Nanopub):
    """Return (effective_base, split) where split(iri_value) yields the
    suffix of a family member ("" for the nanopub URI itself), or None."""
    code = extract_code(np.uri)
    if code is not None:
        base = np.uri[:-CODE_LENGTH]
        prefix = np.uri + SUFFIX_SEPARATOR

        def split(value: str):
            if value == np.uri:
                return ""
            if value.startswith(prefix):
                return value[len(prefix):]
            return None

        return base, split

    base = expand_base(np.uri)

    def split(value: str):
        if value == np.uri:
            return ""
        if contains_code(value):
            return None  # a reference to some other minted artifact
        if value.startswith(np.uri):
            suffix = value[len(np.uri):]
            if suffix.startswith(SUFFIX_SEPARATOR):
                suffix = suffix[len(SUFFIX_SEPARATOR):]
            return suffix
        return None

    return base, split


def normalize(np: Nanopub, quads: tuple[Quad, ...] | None = None) -> bytes:
    """Canonical byte stream of a nanopub with its code position blanked."""
    base, split = _family_splitter(np)

    def render_iri(value: str) -> str:
        suffix = split(value)
        if suffix is None:
            return value
        if suffix == "":
            return base + PLACEHOLDER
        return base + PLACEHOLDER + SUFFIX_SEPARATOR + suffix

    def render(term: Term | None) -> str:
        if term is None:
            return ""
        if term.is_blank:
            raise BlankNodeError(
                f"blank node _:{term.value} cannot be hashed; skolemize first")
        if term.is_iri:
            return render_iri(term.value)
        lex = term.value.replace("\\", "\\\\").replace("\n", "\\n")
        if term.language:
            return "@" + term.language + " " + lex
        return "^" + (term.datatype or XSD_STRING) + " " + lex

    rows = [
        (render(q.graph), render(q.subject), render(q.predicate),
         render(q.object))
        for q in (quads if quads is not None else np.quads)
    ]
    rows.sort()
    text = "".join(t + "\n" for row in rows for t in row)
    return text.encode("utf-8")


def _digest_to_code(data: bytes) -> str:
    digest = hashlib.sha256(data).digest()
    return "RA" + base64.b64encode(digest, b"-_").decode("ascii").rstrip("=")


def compute_artifact_code(np: Nanopub) -> str:
    """'RA' + base64url(SHA-256(normalize(np)))."""
    return _digest_to_code(normalize(np))


def skolemize(np: Nanopub) -> Nanopub:
    """Replace blank nodes with fresh identifier-family IRIs, numbered in
    first-occurrence order over the nanopub's quads."""
    labels: list[str] = []
    for q in np.quads:
        for t in (q.subject, q.object):
            if t.is_blank and t.value not in labels:
                labels.append(t.value)
    if not labels:
        return np
    existing = {t.value for q in np.quads for t in q.terms
                if t is not None and t.is_iri}
    stem = np.uri if extract_code(np.uri) is None \
        else np.uri + SUFFIX_SEPARATOR
    mapping = {}
    n = 1
    for label in labels:
        while True:
            candidate = stem + f"_{n}"
            n += 1
            if candidate not in existing:
                break
        mapping[label] = candidate

    def rewrite(term: Term) -> Term:
        if term.is_blank:
            return iri(mapping[term.value])
        return term

    return np.replace_terms(rewrite)


def _rewrite_family(np: Nanopub, new_uri_of) -> Nanopub:
    def rewrite(term: Term) -> Term:
        if term.is_iri:
            new = new_uri_of(term.value)
            if new is not None:
                return iri(new)
        return term

    return np.replace_terms(rewrite)


def make_trusty(np: Nanopub) -> Nanopub:
    """Mint a trusty URI for a plain nanopub and rewrite its identifiers."""
    if extract_code(np.uri) is not None:
        raise TrustyError(
            "nanopub already has a trusty URI; use fix to re-mint it")
    np = skolemize(np)
    code = compute_artifact_code(np)
    base, split = _family_splitter(np)

    def new_uri_of(value: str):
        suffix = split(value)
        if suffix is None:
            return None
        if suffix == "":
            return base + code
        return base + code + SUFFIX_SEPARATOR + suffix

    return _rewrite_family(np, new_uri_of)


def verify_trusty(np: Nanopub) -> str:
    """Tri-state check: recompute the code with the embedded one blanked."""
    code = extract_code(np.uri)
    if code is None:
        return NO_TRUSTY_URI
    try:
        recomputed = compute_artifact_code(np)
    except BlankNodeError:
        return INVALID
    return VALID if recomputed == code else INVALID


def fix(np: Nanopub) -> Nanopub:
    """Re-mint a nanopub whose trusty URI no longer matches its content."""
    code = extract_code(np.uri)
    if code is None:
        raise TrustyError("nanopub has no trusty URI; use mktrusty instead")
    status = verify_trusty(np)
    if status == VALID:
        raise TrustyError("nothing to fix: the trusty URI verifies")
    np = skolemize(np)
    new_code = compute_artifact_code(np)
    base, split = _family_splitter(np)

    def new_uri_of(value: str):
        suffix = split(value)
        if suffix is None:
            return None
        if suffix == "":
            return base + new_code
        return base + new_code + SUFFIX_SEPARATOR + suffix

    return _rewrite_family(np, new_uri_of)
