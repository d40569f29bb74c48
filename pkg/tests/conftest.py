import random
import threading
from pathlib import Path

import pytest

from npkit import nanopub as npmod
from npkit import rdf
from npkit.nanopub import Nanopub, RDF_TYPE, NANOPUBLICATION, HAS_ASSERTION, \
    HAS_PROVENANCE, HAS_PUBINFO
from npkit.rdf import Quad, iri, literal, blank
from npkit.server import NodeConfig, make_server

DATA = Path(__file__).parent / "data"
FIXTURE_PATH = DATA / "nanopubfile.trig"

GOLDEN_CODES = {
    "http://example.org/np1#": "RAHGB0WzgQijR88g_rIwtPCmzYgyO4wRMT7M91ouhojsQ",
    "http://example.org/np2#": "RA4xTdhe2gPctqvAwdgTU4eRiR1aTQlTYJcF3Sohe5Cus",
    "http://example.org/np3#": "RAEjvXP0xTkeIa2mKmYT66i_PAJ-u-k0uRBd6_sMe9qG0",
}


@pytest.fixture(scope="session")
def fixture_text() -> str:
    return FIXTURE_PATH.read_text(encoding="utf-8")


@pytest.fixture()
def fixture_dataset(fixture_text):
    return rdf.parse(fixture_text, "trig")


@pytest.fixture()
def fixture_nanopubs(fixture_dataset) -> list[Nanopub]:
    items = npmod.extract_nanopubs(fixture_dataset)
    assert all(isinstance(x, Nanopub) for x in items)
    return items


PROV_DERIVED = iri("http://www.w3.org/ns/prov#wasDerivedFrom")
DC_CREATED = iri("http://purl.org/dc/terms/created")


def random_nanopub(rng: random.Random, with_blanks: bool = False) -> Nanopub:
    """A random plain well-formed nanopub for property tests."""
    n = rng.randrange(10 ** 9)
    base = f"http://example.org/gen{n}#"
    uri, head = iri(base), iri(base + "Head")
    a, p, i = iri(base + "assertion"), iri(base + "provenance"), iri(base + "pubinfo")

    def rnd_iri():
        return iri("http://example.org/r" + str(rng.randrange(1000)))

    def rnd_object():
        k = rng.random()
        if with_blanks and k < 0.2:
            return blank("b" + str(rng.randrange(5)))
        if k < 0.5:
            return rnd_iri()
        if k < 0.7:
            return literal("v" + str(rng.randrange(1000)))
        if k < 0.85:
            return literal(str(rng.randrange(1000)),
                           datatype="http://www.w3.org/2001/XMLSchema#integer")
        return literal("w" + str(rng.randrange(1000)), language="en")

    quads = [
        Quad(uri, RDF_TYPE, NANOPUBLICATION, head),
        Quad(uri, HAS_ASSERTION, a, head),
        Quad(uri, HAS_PROVENANCE, p, head),
        Quad(uri, HAS_PUBINFO, i, head),
    ]
    for _ in range(rng.randrange(1, 4)):
        subj = blank("s" + str(rng.randrange(3))) \
            if with_blanks and rng.random() < 0.3 else rnd_iri()
        quads.append(Quad(subj, rnd_iri(), rnd_object(), a))
    quads.append(Quad(a, PROV_DERIVED, rnd_iri(), p))
    quads.append(Quad(uri, DC_CREATED,
                      literal(f"2020-01-01T00:00:{rng.randrange(60):02d}Z",
                              datatype="http://www.w3.org/2001/XMLSchema#dateTime"),
                      i))
    return Nanopub(uri.value, head.value, a.value, p.value, i.value,
                   tuple(quads))


@pytest.fixture()
def local_network(tmp_path):
    """Factory for a local registry network; shuts everything down after."""
    running = []

    def start(n=1, admits_publish=True, page_size=1000):
        nodes = []
        for k in range(n):
            cfg = NodeConfig(port=0,
                             data_dir=str(tmp_path / f"node{len(running)}-{k}"),
                             admits_publish=admits_publish,
                             page_size=page_size)
            srv = make_server(cfg)
            threading.Thread(target=srv.serve_forever, daemon=True).start()
            nodes.append(srv)
        running.extend(nodes)
        urls = [f"http://127.0.0.1:{s.server_address[1]}/" for s in nodes]
        return urls, nodes

    yield start
    for srv in running:
        srv.shutdown()
        srv.server_close()
