"""Experimental digital signing of nanopublications.

The signature lives in the pubinfo graph as four triples sharing one
subject. It is computed over the canonical byte stream of the nanopub
*including* the signature triples, with the signature value blanked, and
the nanopub is trusty-minted afterwards, so published artifacts carry the
signature inside the hashed content.
"""

from __future__ import annotations

import base64
import os
from dataclasses import dataclass
from pathlib import Path

from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import padding, rsa
from cryptography.exceptions import InvalidSignature

from . import trusty
from .nanopub import Nanopub
from .rdf import Quad, Term, iri, literal

NS = "http://purl.org/nanopub/x/"
HAS_SIGNATURE = iri(NS + "hasSignature")
HAS_PUBLIC_KEY = iri(NS + "hasPublicKey")
HAS_ALGORITHM = iri(NS + "hasAlgorithm")
HAS_SIGNATURE_TARGET = iri(NS + "hasSignatureTarget")

VALID = "valid"
INVALID = "invalid"
UNSIGNED = "unsigned"

DEFAULT_KEY_PATH = "~/.nanopub/id_rsa"


class SigningError(Exception):
    pass


@dataclass
class KeyPair:
    """RSA-2048 pair stored as base64-encoded DER."""

    private: rsa.RSAPrivateKey | None
    public: rsa.RSAPublicKey

    @classmethod
    def generate(cls) -> "KeyPair":
        key = rsa.generate_private_key(public_exponent=65537, key_size=2048)
        return cls(private=key, public=key.public_key())

    @property
    def public_base64(self) -> str:
        der = self.public.public_bytes(
            serialization.Encoding.DER,
            serialization.PublicFormat.SubjectPublicKeyInfo)
        return base64.b64encode(der).decode("ascii")

    @property
    def private_base64(self) -> str:
        if self.private is None:
            raise SigningError("no private key loaded")
        der = self.private.private_bytes(
            serialization.Encoding.DER,
            serialization.PrivateFormat.PKCS8,
            serialization.NoEncryption())
        return base64.b64encode(der).decode("ascii")

    def sign_bytes(self, data: bytes) -> bytes:
        if self.private is None:
            raise SigningError("no private key loaded")
        return self.private.sign(data, padding.PKCS1v15(), hashes.SHA256())

    def verify_bytes(self, signature: bytes, data: bytes) -> bool:
        return _verify_with(self.public, signature, data)


def _verify_with(public: rsa.RSAPublicKey, signature: bytes,
                 data: bytes) -> bool:
    try:
        public.verify(signature, data, padding.PKCS1v15(), hashes.SHA256())
        return True
    except InvalidSignature:
        return False


def make_keys(path: str | Path = DEFAULT_KEY_PATH) -> tuple[Path, Path]:
    """Generate a key pair and write `path` / `path`.pub; refuses to
    overwrite existing files."""
    private_path = Path(os.path.expanduser(str(path)))
    public_path = Path(str(private_path) + ".pub")
    for p in (private_path, public_path):
        if p.exists():
            raise SigningError(f"refusing to overwrite existing key file {p}")
    private_path.parent.mkdir(parents=True, exist_ok=True)
    pair = KeyPair.generate()
    private_path.touch(mode=0o600)
    private_path.write_text(pair.private_base64 + "\n")
    os.chmod(private_path, 0o600)
    public_path.write_text(pair.public_base64 + "\n")
    return private_path, public_path


def load_keys(path: str | Path = DEFAULT_KEY_PATH) -> KeyPair:
    private_path = Path(os.path.expanduser(str(path)))
    der = base64.b64decode(private_path.read_text().strip())
    key = serialization.load_der_private_key(der, password=None)
    if not isinstance(key, rsa.RSAPrivateKey):
        raise SigningError(f"{private_path} does not hold an RSA private key")
    return KeyPair(private=key, public=key.public_key())


def _load_public(b64: str) -> rsa.RSAPublicKey:
    key = serialization.load_der_public_key(base64.b64decode(b64))
    if not isinstance(key, rsa.RSAPublicKey):
        raise SigningError("embedded key is not an RSA public key")
    return key


def _signature_quads(np: Nanopub) -> list[Quad]:
    return [q for q in np.graph_quads(np.pubinfo_graph)
            if q.predicate == HAS_SIGNATURE]


def _blank_signature(np: Nanopub, quads: tuple[Quad, ...]) -> tuple[Quad, ...]:
    return tuple(
        Quad(q.subject, q.predicate, literal(""), q.graph)
        if q.predicate == HAS_SIGNATURE else q
        for q in quads
    )


def sign(np: Nanopub, keys: KeyPair) -> Nanopub:
    """Embed a signature element and mint the trusty URI (sign-then-mint)."""
    if trusty.extract_code(np.uri) is not None:
        raise SigningError("nanopub is already trusty; signing must precede "
                           "trusty minting")
    if _signature_quads(np):
        raise SigningError("nanopub is already signed")
    np = trusty.skolemize(np)
    subject = iri(np.uri + "sig" if not np.uri[-1].isalnum() else np.uri + ".sig")
    graph = iri(np.pubinfo_graph)
    sig_quads = [
        Quad(subject, HAS_SIGNATURE_TARGET, iri(np.uri), graph),
        Quad(subject, HAS_ALGORITHM, literal("RSA"), graph),
        Quad(subject, HAS_PUBLIC_KEY, literal(keys.public_base64), graph),
        Quad(subject, HAS_SIGNATURE, literal(""), graph),
    ]
    quads = np.quads + tuple(sig_quads)
    unsigned = Nanopub(np.uri, np.head_graph, np.assertion_graph,
                       np.provenance_graph, np.pubinfo_graph, quads)
    payload = trusty.normalize(unsigned, _blank_signature(unsigned, quads))
    signature = base64.b64encode(keys.sign_bytes(payload)).decode("ascii")
    signed_quads = tuple(
        Quad(q.subject, q.predicate, literal(signature), q.graph)
        if q.predicate == HAS_SIGNATURE else q
        for q in quads
    )
    signed = Nanopub(np.uri, np.head_graph, np.assertion_graph,
                     np.provenance_graph, np.pubinfo_graph, signed_quads)
    return trusty.make_trusty(signed)


def verify_signature(np: Nanopub) -> str:
    """Tri-state: unsigned / valid / invalid."""
    sig_quads = _signature_quads(np)
    if not sig_quads:
        return UNSIGNED
    if len(sig_quads) != 1 or not sig_quads[0].object.is_literal:
        return INVALID
    subject = sig_quads[0].subject
    element = {}
    for q in np.graph_quads(np.pubinfo_graph):
        if q.subject == subject:
            element[q.predicate.value] = q.object
    for pred in (HAS_PUBLIC_KEY, HAS_ALGORITHM, HAS_SIGNATURE_TARGET):
        if pred.value not in element:
            return INVALID
    if not element[HAS_SIGNATURE_TARGET.value].is_iri \
            or element[HAS_SIGNATURE_TARGET.value].value != np.uri:
        return INVALID
    if element[HAS_ALGORITHM.value] != Term("literal", "RSA"):
        return INVALID
    try:
        public = _load_public(element[HAS_PUBLIC_KEY.value].value)
        signature = base64.b64decode(sig_quads[0].object.value)
        payload = trusty.normalize(np, _blank_signature(np, np.quads))
    except Exception:
        return INVALID
    return VALID if _verify_with(public, signature, payload) else INVALID
