#!/usr/bin/env python3
"""Start a local network of registry nodes for experiments.

Prints one URL per node and a ready-to-use servers file, then serves
until interrupted.  Example:

    python scripts/run_local_network.py -n 5 --data /tmp/npnet
"""

import argparse
import signal
import tempfile
import threading
from pathlib import Path

from npkit.server import NodeConfig, make_server


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("-n", "--nodes", type=int, default=5,
                        help="number of nodes (default: 5)")
    parser.add_argument("--port", type=int, default=0,
                        help="first port; 0 picks free ports (default)")
    parser.add_argument("--data", help="base data directory "
                        "(default: a fresh temporary directory)")
    parser.add_argument("--no-publish", action="store_true",
                        help="nodes refuse POST requests")
    args = parser.parse_args()

    base = Path(args.data) if args.data else Path(tempfile.mkdtemp())
    servers = []
    for k in range(args.nodes):
        port = args.port + k if args.port else 0
        cfg = NodeConfig(port=port, data_dir=str(base / f"node{k}"),
                         admits_publish=not args.no_publish)
        srv = make_server(cfg)
        threading.Thread(target=srv.serve_forever, daemon=True).start()
        servers.append(srv)

    urls = [f"http://127.0.0.1:{s.server_address[1]}/" for s in servers]
    servers_file = base / "servers.list"
    servers_file.write_text("".join(u + "\n" for u in urls))
    for url in urls:
        print(url)
    print(f"\nservers file: {servers_file}")
    print("use it with:  np publish --servers", servers_file, "<file>")
    print("press Ctrl-C to stop")

    try:
        signal.pause()
    except KeyboardInterrupt:
        pass
    finally:
        for srv in servers:
            srv.shutdown()
            srv.server_close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
