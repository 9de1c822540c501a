"""Command-line front end.

Exit codes: 0 verified, 1 verified negative (with witness or certificate),
2 bad input (I/O or parse error), 3 inconclusive (map not verified).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path as FsPath

from . import __version__
from .cstar import (
    build_full_groupoid,
    circle_samples,
    fixed_point_intersection,
    full_indicator_family,
    induced_star_iso,
)
from .errors import DrsysError, GraphSyntaxError, NotAcyclic, NotConjugacy, WitnessError
from .funcspace import check_prop_sigma, format_function, parse_function
from .graph import format_point, parse_graph
from .groupoid import intertwine_check
from .homcheck import Homeomorphism, check_conjugacy, parse_transducer, verify_homeomorphism
from .system import DRSystem

SCHEMA_VERSION = 1
EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3

log = logging.getLogger("drsys")


class InputError(Exception):
    pass


def _read(path: str) -> tuple[str, str]:
    try:
        data = FsPath(path).read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    return data.decode("utf-8"), hashlib.sha256(data).hexdigest()


def _load_graph(path: str, digests: dict):
    text, digest = _read(path)
    digests[path] = digest
    try:
        return parse_graph(text, FsPath(path).stem)
    except (GraphSyntaxError, DrsysError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_map(path: str, source, target, digests: dict):
    text, digest = _read(path)
    digests[path] = digest
    try:
        return parse_transducer(text, source, target, FsPath(path).stem)
    except DrsysError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_weights(path: str, graph, digests: dict):
    text, digest = _read(path)
    digests[path] = digest
    chunks, cur = [], []
    for line in text.splitlines():
        if line.strip() == "---":
            chunks.append("\n".join(cur))
            cur = []
        else:
            cur.append(line)
    chunks.append("\n".join(cur))
    try:
        return [parse_function(c, graph) for c in chunks if c.strip()]
    except DrsysError as exc:
        raise InputError(f"{path}: {exc}") from exc


# commands ------------------------------------------------------------------------------


def cmd_invariants(args, report: dict) -> int:
    g = _load_graph(args.graph, report["inputs"])
    sysg = DRSystem(g)
    report["result"] = _invariants(sysg, args.max_period)
    r = report["result"]
    _say(args, f"graph {g.name}: {r['vertices']} vertices, {r['edges']} edges, {r['sinks']} sinks")
    _say(args, f"condition L: {r['condition_L']}")
    _say(args, f"periodic counts p=1..{args.max_period}: {r['periodic_counts']}")
    return EXIT_OK


def _invariants(sysg: DRSystem, max_period: int) -> dict:
    g = sysg.graph
    return {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "sinks": len(g.sinks),
        "condition_L": sysg.is_topologically_free(),
        "cycles_without_exit": sysg.cycles_without_exit(),
        "periodic_counts": [sysg.periodic_count(p) for p in range(1, max_period + 1)],
        "max_period": max_period,
        "domain": sysg.domain_description(),
    }


def _invariant_certificate(E, F, max_period: int) -> dict | None:
    ie, jf = _invariants(DRSystem(E), max_period), _invariants(DRSystem(F), max_period)
    for p, (a, b) in enumerate(zip(ie["periodic_counts"], jf["periodic_counts"]), start=1):
        if a != b:
            return {"invariant": "periodic_count", "p": p, "E": a, "F": b}
    if ie["sinks"] != jf["sinks"]:
        return {"invariant": "sink_count", "E": ie["sinks"], "F": jf["sinks"]}
    if ie["condition_L"] != jf["condition_L"]:
        return {"invariant": "condition_L", "E": ie["condition_L"], "F": jf["condition_L"]}
    return None


def _verified_pair(args, E, F, report):
    if not args.map or not args.inverse:
        return None, "a candidate map needs both --map and --inverse to be verified"
    T = _load_map(args.map, E, F, report["inputs"])
    U = _load_map(args.inverse, F, E, report["inputs"])
    cert = verify_homeomorphism(T, U)
    report["homeomorphism"] = {"verified": cert.ok, "product_states": cert.product_states}
    if not cert.ok:
        report["homeomorphism"]["offending"] = cert.offending
        return None, f"map is not a verified homeomorphism: {cert.offending}"
    return Homeomorphism(T, U), None


def cmd_check_conjugacy(args, report: dict) -> int:
    E = _load_graph(args.graphE, report["inputs"])
    F = _load_graph(args.graphF, report["inputs"])
    report["depth"] = args.depth
    report["sample_length"] = args.sample_length
    if not args.map:
        cert = _invariant_certificate(E, F, args.max_period)
        report["bound"] = {"max_period": args.max_period}
        if cert is not None:
            report["verdict"] = "not_conjugate"
            report["certificate"] = cert
            _say(args, f"not conjugate: {cert}")
            return EXIT_NEGATIVE
        report["verdict"] = "inconclusive"
        _say(args, "inconclusive: invariants agree and no candidate map was given")
        return EXIT_INCONCLUSIVE
    h, why = _verified_pair(args, E, F, report)
    if h is None:
        report["verdict"] = "inconclusive"
        report["reason"] = why
        _say(args, "inconclusive: " + why)
        return EXIT_INCONCLUSIVE
    v = check_conjugacy(h.forward, h.inverse, args.sample_length)
    prop = check_prop_sigma(DRSystem(E), DRSystem(F), h, args.depth)
    report["conjugacy"] = {
        "is_homeomorphism": v.is_homeomorphism,
        "is_conjugacy": v.is_conjugacy,
        "failing_condition": v.failing_condition,
        "witness": v.witness,
        "eventual_k_bound": v.eventual_k_bound,
        "domain_route": v.domain_route,
        "preimage_route": v.preimage_route,
        "routes_agree": v.routes_agree,
    }
    report["function_algebra"] = {
        "cond_upper": prop.cond_upper,
        "cond_lower": prop.cond_lower,
        "depth": prop.depth,
        "family_size": prop.family_size,
        "witness_upper": _fn_witness(prop.witness_upper),
        "witness_lower": _fn_witness(prop.witness_lower),
    }
    consistent = v.routes_agree and prop.cond_upper == prop.cond_lower == v.is_conjugacy
    report["consistent"] = consistent
    if not consistent:
        report["verdict"] = "inconclusive"
        _say(args, "inconclusive: decision routes disagree (internal consistency failure)")
        return EXIT_INCONCLUSIVE
    if v.is_conjugacy:
        report["verdict"] = "conjugate"
        _say(args, f"conjugacy verified (depth {args.depth})")
        return EXIT_OK
    report["verdict"] = "not_conjugate"
    _say(args, f"not a conjugacy: {v.failing_condition} fails; witness {v.witness}")
    return EXIT_NEGATIVE


def _fn_witness(w):
    if w is None:
        return None
    f, g, x = w
    return {
        "f": format_function(f).strip(),
        "g": None if g is None else format_function(g).strip(),
        "point": format_point(x),
    }


def cmd_cocycle_intertwine(args, report: dict) -> int:
    E = _load_graph(args.graphE, report["inputs"])
    F = _load_graph(args.graphF, report["inputs"])
    report["depth"] = args.depth
    report["reduction"] = "generators (x, 1, shift x) and units"
    h, why = _verified_pair(args, E, F, report)
    if h is None:
        report["verdict"] = "inconclusive"
        report["reason"] = why
        _say(args, "inconclusive: " + why)
        return EXIT_INCONCLUSIVE
    try:
        r = intertwine_check(h, args.depth)
    except WitnessError as exc:
        report["verdict"] = "inconclusive"
        report["reason"] = f"leg map does not preserve degrees: {exc}"
        _say(args, "inconclusive: " + report["reason"])
        return EXIT_INCONCLUSIVE
    report["checked"] = r.checked
    if r.ok:
        report["verdict"] = "ok"
        _say(args, f"cocycles intertwine on {r.checked} checks (depth {args.depth})")
        return EXIT_OK
    report["verdict"] = "violated"
    report["witness"] = r.witness
    report["witness_point"] = format_point(r.witness_x)
    report["values"] = [r.lhs, r.rhs]
    _say(args, f"violated: witness {r.witness} at x = {format_point(r.witness_x)}")
    return EXIT_NEGATIVE


def cmd_cstar(args, report: dict) -> int:
    E = _load_graph(args.graph, report["inputs"])
    report["verify"] = args.verify
    try:
        if args.verify == "fixed-points":
            return _cstar_fixed_points(args, E, report)
        return _cstar_star_iso(args, E, report)
    except NotAcyclic as exc:
        report["verdict"] = "not_acyclic"
        report["reason"] = str(exc)
        _say(args, f"NotAcyclic: {exc}")
        return EXIT_NEGATIVE


def _cstar_fixed_points(args, E, report) -> int:
    G = build_full_groupoid(DRSystem(E))
    depth = args.depth if args.depth is not None else E.longest_path_length()
    if args.weights:
        weights = _load_weights(args.weights, E, report["inputs"])
        report["weights"] = {"source": "file", "count": len(weights)}
    else:
        weights = full_indicator_family(E, depth)
        report["weights"] = {"source": "indicator_family", "depth": depth, "count": len(weights)}
    r = fixed_point_intersection(G, weights, seed=args.seed)
    report["dimension"] = len(G)
    report["units"] = len(G.units)
    report["samples"] = r.samples
    report["fixed_dimension"] = len(r.basis)
    report["is_diagonal"] = r.is_diagonal
    report["max_residual"] = r.residual
    report["verdict"] = "diagonal" if r.is_diagonal else "not_diagonal"
    _say(args, f"fixed-point space has dimension {len(r.basis)} of {len(G)}; diagonal: {r.is_diagonal}")
    return EXIT_OK if r.is_diagonal else EXIT_NEGATIVE


def _cstar_star_iso(args, E, report) -> int:
    if not args.graphF:
        raise InputError("--verify star-iso needs --graphF, --map and --inverse")
    F = _load_graph(args.graphF, report["inputs"])
    for g in (E, F):
        if not g.is_acyclic:
            raise NotAcyclic(f"graph {g.name} has a cycle")
    h, why = _verified_pair(args, E, F, report)
    if h is None:
        report["verdict"] = "inconclusive"
        report["reason"] = why
        _say(args, "inconclusive: " + why)
        return EXIT_INCONCLUSIVE
    depth = args.depth if args.depth is not None else 3
    try:
        phi = induced_star_iso(h)
    except NotConjugacy as exc:
        report["verdict"] = "not_conjugacy"
        report["reason"] = str(exc)
        _say(args, f"map is not a conjugacy: {exc}")
        return EXIT_NEGATIVE
    fam = full_indicator_family(F, depth)
    zs = circle_samples(depth, seed=args.seed)
    structure = phi.structure_residual(seed=args.seed)
    resid, where = phi.intertwining_residual(fam, zs)
    ok = structure < 1e-9 and resid < 1e-9 and phi.maps_diagonal()
    report["dimension"] = len(phi.GE)
    report["depth"] = depth
    report["samples"] = len(zs)
    report["structure_residual"] = structure
    report["max_residual"] = resid
    report["maps_diagonal"] = phi.maps_diagonal()
    report["verdict"] = "intertwining" if ok else "violated"
    _say(args, f"induced *-isomorphism: intertwining {ok} (residual {resid:.3g})")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_corpus(args, report: dict) -> int:
    from .corpus import write_corpus

    paths = write_corpus(args.directory)
    report["written"] = sorted(p.name for p in paths)
    _say(args, f"wrote {len(paths)} files to {args.directory}")
    return EXIT_OK


# plumbing --------------------------------------------------------------------------------


def _say(args, msg: str):
    if not args.quiet:
        print(msg)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for sampled circle points")
    common.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    common.add_argument("--quiet", action="store_true", help="suppress the human-readable summary")

    # the shared flags live on each subcommand so their defaults cannot shadow each other
    p = argparse.ArgumentParser(prog="drsys", description="Deaconu-Renault systems of finite graphs.")
    p.add_argument("--version", action="version", version=f"drsys {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("invariants", parents=[common], help="graph invariants of the shift")
    s.add_argument("graph")
    s.add_argument("--max-period", type=int, default=6)
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("check-conjugacy", parents=[common], help="decide whether a map is a conjugacy")
    s.add_argument("graphE")
    s.add_argument("graphF")
    s.add_argument("--map")
    s.add_argument("--inverse")
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--sample-length", type=int, default=4)
    s.add_argument("--max-period", type=int, default=6)
    s.set_defaults(func=cmd_check_conjugacy)

    s = sub.add_parser("cocycle-intertwine", parents=[common], help="cocycle intertwining on generators")
    s.add_argument("graphE")
    s.add_argument("graphF")
    s.add_argument("--map")
    s.add_argument("--inverse")
    s.add_argument("--depth", type=int, default=3)
    s.set_defaults(func=cmd_cocycle_intertwine)

    s = sub.add_parser("cstar", parents=[common], help="finite groupoid algebra checks (acyclic graphs)")
    s.add_argument("graph")
    s.add_argument("--verify", choices=["fixed-points", "star-iso"], default="fixed-points")
    s.add_argument("--weights", help="weight functions separated by lines '---'")
    s.add_argument("--depth", type=int)
    s.add_argument("--map")
    s.add_argument("--inverse")
    s.add_argument("--graphF")
    s.set_defaults(func=cmd_cstar)

    s = sub.add_parser("corpus", parents=[common], help="write the bundled example files")
    s.add_argument("directory")
    s.set_defaults(func=cmd_corpus)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    report: dict = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "argv": list(argv) if argv is not None else sys.argv[1:],
        "seed": args.seed,
        "inputs": {},
    }
    start = time.perf_counter()
    try:
        code = args.func(args, report)
    except InputError as exc:
        print(f"drsys: error: {exc}", file=sys.stderr)
        report["error"] = str(exc)
        code = EXIT_INPUT
    report["exit_code"] = code
    report["timing_seconds"] = round(time.perf_counter() - start, 6)
    if args.json:
        text = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
        if args.json == "-":
            sys.stdout.write(text)
        else:
            FsPath(args.json).write_text(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
