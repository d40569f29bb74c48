"""The `np` command line tool."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import client as clientmod
from . import indexes, signing, trusty
from . import nanopub as npmod
from .nanopub import Nanopub
from .rdf import Dataset, guess_format, parse, serialize

SUBCOMMANDS = ("check", "mktrusty", "fix", "mkindex", "publish", "get",
               "status", "server", "mkkeys", "sign")


class CliError(Exception):
    pass


def _read_dataset(path: str, format: str | None) -> Dataset:
    fmt = format or guess_format(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(str(e))
    try:
        return parse(text, fmt)
    except Exception as e:
        raise CliError(f"{path}: {e}")


def _read_nanopubs(path: str, format: str | None) -> tuple[list, Dataset]:
    ds = _read_dataset(path, format)
    return npmod.extract_nanopubs(ds), ds


def _require_wellformed(items) -> list[Nanopub]:
    nps = []
    for item in items:
        if isinstance(item, npmod.MalformedNanopubError):
            raise CliError(f"malformed nanopub: {item}")
        nps.append(item)
    if not nps:
        raise CliError("input contains no nanopublications")
    return nps


def _write_output(nps: list[Nanopub], prefixes: dict[str, str],
                  out_path: str) -> None:
    ds = Dataset(prefixes=dict(prefixes))
    for np in nps:
        for q in np.quads:
            ds.add(q)
    Path(out_path).write_text(serialize(ds, guess_format(out_path)),
                              encoding="utf-8")


def _default_output(input_path: str, prefix: str) -> str:
    p = Path(input_path)
    return str(p.with_name(prefix + p.name))


def _client(args) -> clientmod.Client:
    servers = clientmod.resolve_servers(getattr(args, "servers", None))
    return clientmod.Client(servers)


# -- subcommand implementations


def cmd_check(args) -> int:
    items, _ = _read_nanopubs(args.file, args.format)
    report = npmod.check(items)
    if args.verbose:
        for item, (cls, reasons) in zip(items, report.classifications):
            uri = item.uri if isinstance(item, Nanopub) else item.uri or "?"
            detail = f" ({'; '.join(reasons)})" if reasons else ""
            print(f"{uri}: {cls}{detail}")
    print(report.summary())
    return 0 if report.all_valid else 1


def cmd_mktrusty(args) -> int:
    items, ds = _read_nanopubs(args.file, args.format)
    nps = _require_wellformed(items)
    out = []
    for np in nps:
        try:
            out.append(trusty.make_trusty(np))
        except trusty.TrustyError as e:
            raise CliError(f"{np.uri}: {e}")
    out_path = args.output or _default_output(args.file, "trusty.")
    _write_output(out, ds.prefixes, out_path)
    if args.verbose:
        for np in out:
            print(f"Nanopub URI: {np.uri}")
    return 0


def cmd_fix(args) -> int:
    items, ds = _read_nanopubs(args.file, args.format)
    nps = _require_wellformed(items)
    out = []
    fixed_any = False
    for np in nps:
        if trusty.verify_trusty(np) == trusty.VALID:
            out.append(np)  # intact nanopubs pass through unchanged
            continue
        try:
            out.append(trusty.fix(np))
            fixed_any = True
        except trusty.TrustyError as e:
            raise CliError(f"{np.uri}: {e}")
    if not fixed_any:
        raise CliError("nothing to fix: every trusty URI verifies")
    out_path = args.output or _default_output(args.file, "fixed.")
    _write_output(out, ds.prefixes, out_path)
    if args.verbose:
        for np in out:
            print(f"Nanopub URI: {np.uri}")
    return 0


def cmd_mkindex(args) -> int:
    members: list[str] = []
    prefixes: dict[str, str] = {}
    for path in args.files:
        items, ds = _read_nanopubs(path, args.format)
        prefixes.update(ds.prefixes)
        for np in _require_wellformed(items):
            if trusty.extract_code(np.uri) is None:
                raise CliError(
                    f"{np.uri}: only trusty nanopubs can be indexed")
            members.append(np.uri)
    meta = indexes.IndexMeta(title=args.title)
    try:
        out = indexes.make_index(members, meta, capacity=args.capacity)
    except indexes.IndexError_ as e:
        raise CliError(str(e))
    out_path = args.output or "index.trig"
    _write_output(out, prefixes, out_path)
    if args.verbose:
        for np in out:
            print(f"Nanopub URI: {np.uri}")
    print(f"Index URI: {out[-1].uri}")
    return 0


def cmd_publish(args) -> int:
    items, ds = _read_nanopubs(args.file, args.format)
    nps = _require_wellformed(items)
    for np in nps:
        if trusty.verify_trusty(np) != trusty.VALID:
            raise CliError(
                f"{np.uri}: only verified trusty nanopubs can be published")
    try:
        report = _client(args).publish(nps, ds.prefixes)
    except clientmod.ClientError as e:
        raise CliError(str(e))
    print(report.render())
    return 0


def cmd_get(args) -> int:
    c = _client(args)
    try:
        if args.content:
            ds = c.get_content(args.ref)
            text = serialize(ds, "trig" if not args.output
                             else guess_format(args.output))
        else:
            np = c.get(args.ref)
            fmt = guess_format(args.output) if args.output else "trig"
            text = serialize(np.to_dataset(), fmt)
    except clientmod.ClientError as e:
        raise CliError(str(e))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_status(args) -> int:
    try:
        report = _client(args).status(args.ref)
    except clientmod.ClientError as e:
        raise CliError(str(e))
    print(report.render(list_all=args.all))
    return 0


def cmd_server(args) -> int:
    try:
        info = _client(args).server_info(args.url)
    except clientmod.ClientError as e:
        raise CliError(str(e))
    print(f"URL: {info.url}")
    print(f"Protocol version: {info.protocol_version}")
    print(f"Description: {info.description}")
    print(f"Admits publish: {'yes' if info.admits_publish else 'no'}")
    print(f"Page size: {info.page_size}")
    print(f"Nanopub count: {info.nanopub_count}")
    return 0


def cmd_mkkeys(args) -> int:
    try:
        private_path, public_path = signing.make_keys(args.key)
    except signing.SigningError as e:
        raise CliError(str(e))
    print(f"Private key: {private_path}")
    print(f"Public key: {public_path}")
    return 0


def cmd_sign(args) -> int:
    items, ds = _read_nanopubs(args.file, args.format)
    nps = _require_wellformed(items)
    try:
        keys = signing.load_keys(args.key)
    except (OSError, ValueError, signing.SigningError) as e:
        raise CliError(f"cannot load key {args.key}: {e}")
    out = []
    for np in nps:
        try:
            out.append(signing.sign(np, keys))
        except signing.SigningError as e:
            raise CliError(f"{np.uri}: {e}")
    out_path = args.output or _default_output(args.file, "signed.")
    _write_output(out, ds.prefixes, out_path)
    if args.verbose:
        for np in out:
            print(f"Nanopub URI: {np.uri}")
    return 0


# -- parser wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="np",
        description="Nanopublication toolkit: check, transform, group, "
                    "sign, publish, and retrieve nanopublications.")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("-v", "--verbose", action="store_true",
                       help="print one 'Nanopub URI:' line per nanopub")
        p.add_argument("--format", choices=("trig", "nquads"),
                       help="input format (default: from file extension)")
        return p

    p = add("check", cmd_check, "validate nanopublications in a file")
    p.add_argument("file")

    p = add("mktrusty", cmd_mktrusty, "mint trusty URIs for nanopubs")
    p.add_argument("file")
    p.add_argument("-o", "--output", help="output file "
                   "(default: trusty.<input>)")

    p = add("fix", cmd_fix, "re-mint broken trusty URIs")
    p.add_argument("file")
    p.add_argument("-o", "--output", help="output file (default: fixed.<input>)")

    p = add("mkindex", cmd_mkindex, "build an index over trusty nanopubs")
    p.add_argument("files", nargs="+")
    p.add_argument("-o", "--output", help="output file (default: index.trig)")
    p.add_argument("--title", help="index title")
    p.add_argument("--capacity", type=int, default=indexes.DEFAULT_CAPACITY,
                   help="max elements per index nanopub")

    p = add("publish", cmd_publish, "upload trusty nanopubs to the network")
    p.add_argument("file")
    p.add_argument("--servers", help="file with one server URL per line")

    p = add("get", cmd_get, "retrieve a verified nanopub from the network")
    p.add_argument("ref", help="trusty URI or bare artifact code")
    p.add_argument("-c", "--content", action="store_true",
                   help="fetch the whole content of an index")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.add_argument("--servers", help="file with one server URL per line")

    p = add("status", cmd_status, "replication census for a nanopub")
    p.add_argument("ref")
    p.add_argument("-a", "--all", action="store_true",
                   help="list every URL where the nanopub was found")
    p.add_argument("--servers", help="file with one server URL per line")

    p = add("server", cmd_server, "show information about a registry node")
    p.add_argument("url")

    p = add("mkkeys", cmd_mkkeys, "generate a signing key pair")
    p.add_argument("-k", "--key", default=signing.DEFAULT_KEY_PATH,
                   help="private key path (public key gets '.pub' appended)")

    p = add("sign", cmd_sign, "sign nanopubs and mint their trusty URIs")
    p.add_argument("file")
    p.add_argument("-k", "--key", default=signing.DEFAULT_KEY_PATH,
                   help="private key file")
    p.add_argument("-o", "--output", help="output file (default: signed.<input>)")

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    if not argv:
        parser.print_help()
        return 2
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except CliError as e:
        print(f"np {args.subcommand}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
