"""Acceptance suite: one pass/fail line per criterion.

Each test exercises one end-to-end guarantee at its stated tolerance and
time bound, and prints a single ``PASS``/``FAIL`` line to the terminal.
"""

import contextlib
import io
import random
import shutil
import threading
import time
from dataclasses import replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from npkit import cli, indexes, rdf, signing, trusty
from npkit import nanopub as npmod
from npkit.client import Client, ServerList

from conftest import FIXTURE_PATH, GOLDEN_CODES, random_nanopub


@contextlib.contextmanager
def criterion(capsys, name, limit_s):
    start = time.monotonic()
    try:
        yield
        elapsed = time.monotonic() - start
        assert elapsed < limit_s, f"took {elapsed:.1f}s, limit {limit_s}s"
    except BaseException:
        with capsys.disabled():
            print(f"FAIL: {name}")
        raise
    with capsys.disabled():
        print(f"PASS: {name} ({elapsed:.1f}s)")


def run_cli(argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = cli.main(argv)
    return code, out.getvalue()


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    shutil.copy(FIXTURE_PATH, tmp_path / "nanopubfile.trig")
    return tmp_path


def servers_file(tmp_path, urls, name="servers.list"):
    f = tmp_path / name
    f.write_text("".join(u + "\n" for u in urls))
    return str(f)


def test_golden_vectors(workdir, capsys):
    with criterion(capsys, "golden vectors: check summary and minted "
                   "artifact codes match byte for byte", limit_s=5):
        code, out = run_cli(["check", "nanopubfile.trig"])
        assert code == 0
        assert out == "Summary: 3 valid (not trusty);\n"

        code, out = run_cli(["mktrusty", "-v", "nanopubfile.trig"])
        assert code == 0
        assert out.splitlines() == [
            f"Nanopub URI: {base}{artifact}"
            for base, artifact in GOLDEN_CODES.items()
        ]
        assert (workdir / "trusty.nanopubfile.trig").exists()


def test_property_suite(fixture_nanopubs, capsys):
    with criterion(capsys, "properties: 500 random nanopubs mint+verify, "
                   "every single-quad mutation flips to invalid, "
                   "round-trips preserve quads", limit_s=60):
        rng = random.Random(20150818)
        for _ in range(500):
            np = random_nanopub(rng)
            minted = trusty.make_trusty(np)
            assert trusty.verify_trusty(minted) == trusty.VALID

        # exhaustive single-quad mutations of each minted fixture
        poison = rdf.iri("http://example.org/poison")
        for np in fixture_nanopubs:
            minted = trusty.make_trusty(np)
            for k, q in enumerate(minted.quads):
                mutated = list(minted.quads)
                mutated[k] = replace(q, object=poison)
                # a mutation may break well-formedness outright (head
                # quads) or just the hash; both must be caught
                try:
                    broken = replace(minted, quads=tuple(mutated))
                except npmod.MalformedNanopubError:
                    continue
                assert trusty.verify_trusty(broken) == trusty.INVALID

        # parse/serialize round-trips preserve the quad multiset
        text = FIXTURE_PATH.read_text()
        ds = rdf.parse(text, "trig")
        for fmt in ("trig", "nquads"):
            again = rdf.parse(rdf.serialize(ds, fmt), fmt)
            assert again.same_quads(ds)


class _CorruptHandler(BaseHTTPRequestHandler):
    body = b""

    def log_message(self, *args):
        pass

    def do_GET(self):
        self.send_response(200)
        self.send_header("Content-Type", "application/trig")
        self.send_header("Content-Length", str(len(self.body)))
        self.end_headers()
        self.wfile.write(self.body)


def test_network_reliability(workdir, capsys, local_network):
    with criterion(capsys, "network: replicated to 5 nodes; get verifies "
                   "100/100 with 2 nodes down and 1 corrupt", limit_s=120):
        urls, nodes = local_network(5)
        run_cli(["mktrusty", "nanopubfile.trig"])
        for k, url in enumerate(urls):
            one = servers_file(workdir, [url], f"one{k}.list")
            code, _ = run_cli(["publish", "--servers", one,
                               "trusty.nanopubfile.trig"])
            assert code == 0

        all_servers = servers_file(workdir, urls)
        np1 = next(iter(GOLDEN_CODES))
        artifact = GOLDEN_CODES[np1]
        code, out = run_cli(["status", "-a", "--servers", all_servers,
                             np1 + artifact])
        assert code == 0
        lines = out.splitlines()
        assert sum(1 for l in lines if l.startswith("URL: ")) == 5
        assert lines[-1] == "Found on 5 nanopub servers."

        # degrade: stop two nodes, add one node serving tampered bytes
        for node in nodes[:2]:
            node.shutdown()
            node.server_close()
        tampered = (workdir / "trusty.nanopubfile.trig").read_text() \
            .replace("drugA", "drugZ")
        handler = type("H", (_CorruptHandler,), {"body": tampered.encode()})
        corrupt = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        threading.Thread(target=corrupt.serve_forever, daemon=True).start()
        degraded = servers_file(
            workdir,
            [f"http://127.0.0.1:{corrupt.server_address[1]}/"] + urls,
            "degraded.list")
        try:
            for _ in range(100):
                code, out = run_cli(["get", "--servers", degraded, artifact])
                assert code == 0
                got = npmod.extract_nanopubs(rdf.parse(out, "trig"))
                assert len(got) == 1
                assert trusty.verify_trusty(got[0]) == trusty.VALID
        finally:
            corrupt.shutdown()
            corrupt.server_close()


def test_index_roundtrip(workdir, capsys, local_network):
    with criterion(capsys, "index: 2500 members chunk into 3 chained "
                   "indexes and get -c retrieves each exactly once",
                   limit_s=120):
        urls, _ = local_network(1)
        client = Client(ServerList(urls, source="test"))

        rng = random.Random(42)
        members = [trusty.make_trusty(random_nanopub(rng))
                   for _ in range(2500)]
        client.publish(members)

        idx = indexes.make_index([np.uri for np in members])
        assert len(idx) == 3
        assert all(indexes.is_index(np) for np in idx)
        client.publish(idx)

        servers = servers_file(workdir, urls)
        code, _ = run_cli(["get", "-c", "-o", "content.trig",
                           "--servers", servers, idx[-1].uri])
        assert code == 0
        got = npmod.extract_nanopubs(
            rdf.parse((workdir / "content.trig").read_text(), "trig"))
        uris = [np.uri for np in got if not indexes.is_index(np)]
        assert sorted(uris) == sorted(np.uri for np in members)
        assert len(set(uris)) == len(uris) == 2500


def test_signing(workdir, capsys):
    with criterion(capsys, "signing: sign/verify round-trip; tamper-then-"
                   "fix is trusty-valid but signature-invalid", limit_s=10):
        code, _ = run_cli(["mkkeys", "-k", "id_rsa"])
        assert code == 0
        code, _ = run_cli(["sign", "-k", "id_rsa", "nanopubfile.trig"])
        assert code == 0
        signed = npmod.extract_nanopubs(
            rdf.parse((workdir / "signed.nanopubfile.trig").read_text(),
                      "trig"))
        assert all(trusty.verify_trusty(np) == trusty.VALID for np in signed)
        assert all(signing.verify_signature(np) == signing.VALID
                   for np in signed)

        (workdir / "tampered.trig").write_text(
            (workdir / "signed.nanopubfile.trig").read_text()
            .replace("drugA", "drugZ"))
        code, _ = run_cli(["fix", "tampered.trig"])
        assert code == 0
        fixed = npmod.extract_nanopubs(
            rdf.parse((workdir / "fixed.tampered.trig").read_text(), "trig"))
        statuses = {(trusty.verify_trusty(np), signing.verify_signature(np))
                    for np in fixed}
        # the tampered one re-mints cleanly but its signature stays broken
        assert (trusty.VALID, signing.INVALID) in statuses
        assert all(t == trusty.VALID for t, _ in statuses)


SESSION_COMMANDS = [
    ["check", "nanopubfile.trig"],
    ["mktrusty", "nanopubfile.trig"],
    ["mktrusty", "-v", "nanopubfile.trig"],
    ["mkindex", "trusty.nanopubfile.trig"],
    ["publish", "trusty.nanopubfile.trig"],
    ["status", "-a",
     "http://example.org/np1#RAHGB0WzgQijR88g_rIwtPCmzYgyO4wRMT7M91ouhojsQ"],
    ["get", "http://www.tkuhn.ch/bel2nanopub/"
     "RAhV9IpiUEjbentzGivp1Lbx0BVegp5sgE3BwS0S2RAYM"],
    ["get", "RAhV9IpiUEjbentzGivp1Lbx0BVegp5sgE3BwS0S2RAYM"],
    ["get", "-c", "-o", "content.trig",
     "RAtF0ivB9B8cb-u3K_zElgmRBxiDwfym1yVBRY6VAyWvE"],
]


def test_cli_contract(capsys):
    with criterion(capsys, "cli: bare np exits 2 listing ten subcommands; "
                   "every documented command line parses", limit_s=10):
        code, out = run_cli([])
        assert code == 2
        assert len(cli.SUBCOMMANDS) == 10
        for sub in cli.SUBCOMMANDS:
            assert sub in out

        parser = cli.build_parser()
        for argv in SESSION_COMMANDS:
            args = parser.parse_args(argv)  # SystemExit(2) would fail this
            assert args.subcommand == argv[0]
