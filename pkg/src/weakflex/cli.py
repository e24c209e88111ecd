"""Command-line front end. Reports go to stdout as JSON, summaries to stderr."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .catalog import catalog_names, gained_forb_sets, verify_catalog
from .configurations import classify, config_from_dict
from .detection import detect_configurations
from .discharging import apply_rules, audit, initial_charges, transfer_json
from .errors import MalformedInputError, StuckError, WeakflexError
from .forbidden import book_bound, format_family, parse_family
from .generator import figure1_chain, random_free_plane_graph
from .graph import PlaneGraph, graph_to_dict, load_json, plain, read_graph
from .resolution import (RequestInstance, build_resolution, epsilon_parameters, max_satisfied,
                         satisfaction_ratio, verify_resolution)

DEFAULT_FAMILY = {"C": "K4,C5,C6,C7,B5", "D": "K4,C5,C6,C7,B8"}


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in (sorted(x) if isinstance(x, (set, frozenset)) else x)]
    return x


def _hash(path: str) -> dict:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from None
    return {"path": path, "sha256": hashlib.sha256(data).hexdigest()}


def _family(args, which: str = "C"):
    return parse_family(args.family or DEFAULT_FAMILY[which.upper()])


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


# --- commands: each returns (ok, payload, inputs) -------------------------------------------

def cmd_verify_catalog(args):
    which = args.which.upper()
    family = _family(args, which)
    rows = verify_catalog(which, family, jobs=args.jobs)
    entries = []
    for name, rep, fails in rows:
        item = rep.to_json()
        item["failures"] = fails
        entries.append(item)
        kinds = ",".join(k for k, v in (("full", rep.full), ("enhanced-weak", rep.enhanced_weak),
                                        ("weak", rep.weak)) if v) or "none"
        _say(f"{name:6s} {kinds:24s} {'ok' if not fails else 'MISMATCH: ' + '; '.join(fails)}")
    payload = {"catalog": which, "family": format_family(family), "entries": entries}
    if book_bound(family) is None:
        payload["gained_without_book"] = {
            n: [{"set": s, "result": "skipped" if p is None else ("pass" if p else "fail")}
                for s, p in gained_forb_sets(n, family)]
            for n in catalog_names(which)
        }
    return all(not f for _, _, f in rows), payload, []


def cmd_check(args):
    cfg = config_from_dict(load_json(args.config), Path(args.config).stem)
    rep = classify(cfg, _family(args))
    _say(f"{cfg.name}: {rep.classification}")
    ok = rep.classification != "none" and rep.declared_fix_ok is not False
    return ok, rep.to_json(), [_hash(args.config)]


def cmd_detect(args):
    g = read_graph(args.graph)
    found = detect_configurations(g, args.catalog)
    _say(f"{len(found)} embedding(s) from catalog {args.catalog.upper()}")
    return bool(found), {"catalog": args.catalog.upper(), "embeddings": [e.to_json() for e in found]}, [_hash(args.graph)]


def cmd_discharge(args):
    pg = read_graph(args.graph)
    if not isinstance(pg, PlaneGraph):
        raise MalformedInputError("discharging needs a rotation system")
    st = apply_rules(pg, initial_charges(pg, args.scheme), check=False)
    rep = audit(pg, st)
    if args.trace:
        lines = "".join(json.dumps(transfer_json(pg, t)) + "\n" for t in st.ledger)
        if args.trace == "-":
            sys.stderr.write(lines)
        else:
            Path(args.trace).write_text(lines)
    _say(f"scheme {args.scheme.upper()}: total {rep.total}, {len(rep.negatives)} negative element(s)")
    payload = {"scheme": args.scheme.upper(), "transfers": len(st.ledger), **rep.to_json()}
    return rep.conserved, payload, [_hash(args.graph)]


def cmd_resolve(args):
    g = plain(read_graph(args.graph))
    family = _family(args, args.catalog)
    try:
        res = build_resolution(g, family, args.k, args.catalog, beta=args.beta)
    except StuckError as exc:
        _say(f"STUCK: {exc}")
        return False, {"stuck": True, "message": str(exc), "residual": graph_to_dict(exc.residual),
                       "steps": [s.to_json(g) for s in exc.steps]}, [_hash(args.graph)]
    ver = verify_resolution(g, res)
    eps = epsilon_parameters(args.k, res.b, res.beta)
    _say(f"{len(res.steps)} step(s), b = {res.b}, beta = {res.beta}, valid = {ver.valid}")
    payload = {"stuck": False, "resolution": res.to_json(g), "verification": ver.to_json(), "epsilon": eps}
    return ver.valid, payload, [_hash(args.graph)]


def _request_instance(args, g) -> RequestInstance:
    raw = load_json(args.lists)
    lists = raw["lists"] if isinstance(raw, dict) else raw
    if not isinstance(lists, list) or len(lists) != g.n:
        raise MalformedInputError("lists file must give one list per vertex")
    if args.requests:
        data = load_json(args.requests)
        req = data.get("request", data) if isinstance(data, dict) else dict(enumerate(data))
        return RequestInstance(lists, {g.index_of(v): c for v, c in req.items()})
    if args.weights:
        data = load_json(args.weights)
        rows = data.get("weights", []) if isinstance(data, dict) else data
        return RequestInstance(lists, {(g.index_of(v), c): w for v, c, w in rows})
    return RequestInstance.widespread(lists)


def cmd_flex(args):
    g = plain(read_graph(args.graph))
    inst = _request_instance(args, g)
    value, coloring = max_satisfied(g, inst)
    ratio = satisfaction_ratio(value, inst)
    _say(f"optimum {value} of {inst.total()} (ratio {ratio})")
    inputs = [_hash(p) for p in (args.graph, args.lists, args.requests, args.weights) if p]
    return True, {"optimum": value, "total": inst.total(), "ratio": ratio, "coloring": coloring}, inputs


def cmd_gen(args):
    if args.kind == "figure1":
        pg = figure1_chain(args.blocks)
    else:
        pg = random_free_plane_graph(args.n, _family(args), args.seed)
    _say(f"generated {args.kind}: {pg.graph.n} vertices, {pg.graph.m} edges")
    return True, graph_to_dict(pg), []


COMMANDS = {
    "verify-catalog": cmd_verify_catalog, "check": cmd_check, "detect": cmd_detect,
    "discharge": cmd_discharge, "resolve": cmd_resolve, "flex": cmd_flex, "gen": cmd_gen,
}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--family", help="forbidden family, e.g. K4,C5,C6,C7,B5")
    shared.add_argument("--k", type=int, default=4, help="list size (default 4)")
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--jobs", type=int, default=1, help="worker processes for parallel checks")
    shared.add_argument("--output", help="write the JSON report here instead of stdout")

    ap = argparse.ArgumentParser(prog="weakflex", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-catalog", parents=[shared], help="classify a built-in catalog")
    p.add_argument("which", nargs="?", default="C", choices=["C", "D", "c", "d"])
    p = sub.add_parser("check", parents=[shared], help="classify a configuration JSON")
    p.add_argument("config")
    p = sub.add_parser("detect", parents=[shared], help="find catalog configurations in a graph")
    p.add_argument("graph")
    p.add_argument("--catalog", default="C", choices=["C", "D", "c", "d"])
    p = sub.add_parser("discharge", parents=[shared], help="run a discharging scheme")
    p.add_argument("graph")
    p.add_argument("--scheme", default="A", choices=["A", "B", "a", "b"])
    p.add_argument("--trace", nargs="?", const="-", metavar="PATH",
                   help="write every transfer as a JSON line to PATH (default: stderr)")
    p = sub.add_parser("resolve", parents=[shared], help="build and verify a resolution")
    p.add_argument("graph")
    p.add_argument("--catalog", default="D", choices=["C", "D", "c", "d"])
    p.add_argument("--beta", type=int, help="tightness bound (default 10 x book size)")
    p = sub.add_parser("flex", parents=[shared], help="exact request satisfaction")
    p.add_argument("graph")
    p.add_argument("lists")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--requests")
    g.add_argument("--weights")
    p = sub.add_parser("gen", parents=[shared], help="generate instances")
    p.add_argument("kind", choices=["figure1", "random"])
    p.add_argument("--blocks", type=int, default=5)
    p.add_argument("--n", type=int, default=10)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        ok, payload, inputs = COMMANDS[args.command](args)
        code = 0 if ok else 1
    except WeakflexError as exc:
        _say(f"error: {exc}")
        ok, payload, inputs, code = False, {"error": type(exc).__name__, "message": str(exc)}, [], exc.exit_code
    if args.command == "gen" and code == 0:
        text = json.dumps(payload, indent=1)
    else:
        report = {"command": args.command, "version": __version__, "inputs": inputs, "seed": args.seed,
                  "outcome": "pass" if ok else "fail", "payload": _jsonable(payload)}
        text = json.dumps(report, indent=1)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    _say(f"done in {time.perf_counter() - start:.2f}s (exit {code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
