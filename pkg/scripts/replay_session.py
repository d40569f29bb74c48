#!/usr/bin/env python3
"""Replay the full documented CLI session against a throwaway network.

Spins up five local registry nodes, copies the bundled example file into
a scratch directory, and walks through the whole check → mktrusty →
mkindex → publish → status → get workflow, echoing every command and its
output.  Everything is hermetic; nothing touches the real network.
"""

import shutil
import sys
import tempfile
import threading
from contextlib import redirect_stdout
from io import StringIO
from pathlib import Path

from npkit import cli
from npkit.server import NodeConfig, make_server

FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "data" \
    / "nanopubfile.trig"


def run(argv: list[str]) -> str:
    print(f"$ np {' '.join(argv)}")
    buf = StringIO()
    with redirect_stdout(buf):
        code = cli.main(argv)
    out = buf.getvalue()
    sys.stdout.write(out)
    if code != 0:
        print(f"(exit {code})")
    print()
    return out


def main() -> int:
    base = Path(tempfile.mkdtemp(prefix="np-session-"))
    shutil.copy(FIXTURE, base / "nanopubfile.trig")

    servers = []
    for k in range(5):
        cfg = NodeConfig(port=0, data_dir=str(base / f"node{k}"))
        srv = make_server(cfg)
        threading.Thread(target=srv.serve_forever, daemon=True).start()
        servers.append(srv)
    urls = [f"http://127.0.0.1:{s.server_address[1]}/" for s in servers]
    servers_file = base / "servers.list"
    servers_file.write_text("".join(u + "\n" for u in urls))

    import os
    os.chdir(base)
    try:
        run(["check", "nanopubfile.trig"])
        out = run(["mktrusty", "-v", "nanopubfile.trig"])
        first_uri = out.splitlines()[0].split(": ", 1)[1]

        run(["check", "trusty.nanopubfile.trig"])
        out = run(["mkindex", "trusty.nanopubfile.trig"])
        index_uri = [l for l in out.splitlines()
                     if l.startswith("Index URI:")][0].split(": ", 1)[1]

        # mirror to all five nodes so status reports full replication
        for k, url in enumerate(urls):
            one = base / f"one{k}.list"
            one.write_text(url + "\n")
            run(["publish", "--servers", str(one),
                 "trusty.nanopubfile.trig"])
            run(["publish", "--servers", str(one), "index.trig"])

        run(["status", "-a", "--servers", str(servers_file), first_uri])
        run(["get", "--servers", str(servers_file), first_uri])
        run(["get", "-c", "-o", "content.trig", "--servers",
             str(servers_file), index_uri])
        print(f"scratch directory kept at {base}")
    finally:
        for srv in servers:
            srv.shutdown()
            srv.server_close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
