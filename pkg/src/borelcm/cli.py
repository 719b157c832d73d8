"""Command-line front end: ``borelcm {betti,cm,model,join,suspension,catalog}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Dict, List, Optional, Sequence

from . import __version__
from .algebra import MONOMIAL_ORDER, AlgebraError
from .diagrams import (
    Catalog,
    DiagramError,
    GroupDiagram,
    HomogeneousPair,
    JoinRefused,
    cm_decide,
    fiber_bound,
    fiber_type,
    join_diagram,
    load_catalog,
    noncm_join_generator,
    suspension_diagram,
)
from .invariants import DEFAULT_SEED, UNKNOWN
from .models import borel_model, homogeneous_model, ring_truncation

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2


class InputError(Exception):
    pass


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def _load(path: str, kind):
    raw = _read_json(path)
    try:
        return kind.from_json(raw)
    except DiagramError as exc:
        raise InputError(f"{path}: {exc}") from None


def _resolve_pair(ref: str, catalog: Catalog) -> HomogeneousPair:
    """A pair file, or a catalog fiber name."""
    if ref.endswith(".json") or os.path.exists(ref):
        return _load(ref, HomogeneousPair)
    try:
        e = catalog.fiber(ref)
    except DiagramError as exc:
        raise InputError(str(exc)) from None
    return HomogeneousPair(e.G, e.H, e.iota, name=e.name)


def _bound(args, options: Dict, fallback: int) -> int:
    if args.max_degree is not None:
        d = args.max_degree
    elif options.get("max_degree") is not None:
        d = int(options["max_degree"])
    else:
        d = fallback
    if d < 2:
        raise InputError("max degree must be at least 2")
    return d


def _report(command: str, bound: Optional[int], seed: int, **body) -> dict:
    out = {"tool": "borelcm", "version": __version__, "monomial_order": MONOMIAL_ORDER,
           "command": command, "max_degree": bound, "seed": seed}
    out.update(body)
    return out


def _emit(args, report: dict, table_lines: Sequence[str]) -> None:
    if args.format == "json":
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write("\n".join(table_lines) + "\n")


def _header(report: dict) -> str:
    return (f"# borelcm {report['version']}  order={report['monomial_order']}  "
            f"D={report['max_degree']}  seed={report['seed']}")


# --- commands ------------------------------------------------------------------

def cmd_betti(args) -> int:
    if args.homogeneous:
        pair = _load(args.input, HomogeneousPair)
        model = homogeneous_model(pair.iota)
        D = _bound(args, pair.options, fiber_bound(pair.G, pair.H))
        source = "homogeneous"
    else:
        diagram = _load(args.input, GroupDiagram)
        D = _bound(args, diagram.options, diagram.max_degree)
        model = borel_model(diagram, D)
        source = "borel"
    betti = model.betti(D)
    report = _report("betti", D, args.seed, input=args.input, model=source, betti=betti)
    lines = [_header(report), "degree  betti"] + [f"{n:6d}  {b}" for n, b in enumerate(betti)]
    _emit(args, report, lines)
    return EXIT_OK


def _verdict_output(args, diagram: GroupDiagram, D: int, extra: Optional[dict] = None) -> int:
    verdict = cm_decide(diagram, D, args.seed)
    body = {"verdict": verdict.to_json()}
    if extra:
        body.update(extra)
    report = _report("cm", D, args.seed, **body)
    lines = [_header(report), str(verdict), f"basis: {verdict.basis}" + ("" if verdict.exact else " (bounded)")]
    lines += [f"assumes: {h}" for h in verdict.hypotheses]
    _emit(args, report, lines)
    return EXIT_UNKNOWN if verdict.decision == UNKNOWN else EXIT_OK


def cmd_cm(args) -> int:
    diagram = _load(args.input, GroupDiagram)
    D = _bound(args, diagram.options, diagram.max_degree)
    return _verdict_output(args, diagram, D, {"input": args.input})


def cmd_model(args) -> int:
    diagram = _load(args.input, GroupDiagram)
    D = _bound(args, diagram.options, diagram.max_degree)
    model = borel_model(diagram, D)
    ring = ring_truncation(model, D)
    ext = model.extension
    report = _report("model", D, args.seed, input=args.input, ring=ring.to_json(),
                     contractible_pairs=[{"u": u.name, "degree": u.degree, "image": str(ext.added[u.name])}
                                         for u, _ in ext.pairs])
    lines = [_header(report), f"contractible pairs added: {len(ext)}"]
    for n in range(D + 1):
        if ring.betti[n]:
            lines.append(f"H^{n}: " + ", ".join(ring.labels[n]))
    _emit(args, report, lines)
    return EXIT_OK


def _write_diagram(diagram: GroupDiagram, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(diagram.to_json(), sort_keys=True, indent=2) + "\n")


def _diagram_output(args, diagram: GroupDiagram) -> int:
    if args.output:
        _write_diagram(diagram, args.output)
    if args.classify:
        D = _bound(args, diagram.options, diagram.max_degree)
        return _verdict_output(args, diagram, D, {"diagram": diagram.to_json()})
    if not args.output:
        sys.stdout.write(json.dumps(diagram.to_json(), sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def cmd_join(args) -> int:
    catalog = load_catalog()
    options = {"max_degree": args.max_degree} if args.max_degree is not None else {}
    if args.require_noncm:
        try:
            diagram = noncm_join_generator(args.left, args.right, catalog, options)
        except JoinRefused as exc:
            raise InputError(f"join refused: {exc}") from None
        except DiagramError as exc:
            raise InputError(str(exc)) from None
    else:
        left, right = _resolve_pair(args.left, catalog), _resolve_pair(args.right, catalog)
        diagram = join_diagram((left.G, left.H, left.iota), (right.G, right.H, right.iota), options)
    return _diagram_output(args, diagram)


def cmd_suspension(args) -> int:
    pair = _resolve_pair(args.input, load_catalog())
    options = {"max_degree": args.max_degree} if args.max_degree is not None else {}
    return _diagram_output(args, suspension_diagram(pair.G, pair.H, pair.iota, options))


def cmd_catalog(args) -> int:
    catalog = load_catalog()
    if args.diagram:
        catalog.diagram(args.diagram)
        sys.stdout.write(json.dumps(catalog.diagrams[args.diagram], sort_keys=True, indent=2) + "\n")
        return EXIT_OK
    fibers = {}
    for name, f in catalog.fibers.items():
        fibers[name] = {"G": f.G.name, "H": f.H.name, "type": str(fiber_type(*f.pair)),
                        "iota": f.iota.image_strings()}
    groups = {n: g.to_json() for n, g in catalog.groups.items()}
    report = _report("catalog", None, args.seed, groups=groups, fibers=fibers,
                     diagrams=sorted(catalog.diagrams))
    lines = [_header(report), "fibers:"]
    lines += [f"  {n:8s} {v['G']}/{v['H']}  {v['type']}" for n, v in fibers.items()]
    lines += ["groups: " + ", ".join(groups), "diagrams: " + ", ".join(sorted(catalog.diagrams))]
    _emit(args, report, lines)
    return EXIT_OK


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-degree", type=int, default=None, metavar="N",
                        help="truncation degree (default: file option, else twice the BH generator degrees)")
    common.add_argument("--format", choices=("json", "table"), default=None,
                        help="output format (default: table on a terminal, json otherwise)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for the depth search")

    p = argparse.ArgumentParser(prog="borelcm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"borelcm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("betti", parents=[common], help="betti numbers of the Borel or homogeneous model")
    s.add_argument("input")
    s.add_argument("--homogeneous", action="store_true", help="input is a G/H pair file")
    s.set_defaults(func=cmd_betti)

    s = sub.add_parser("cm", parents=[common], help="decide the Cohen-Macaulay property")
    s.add_argument("input")
    s.set_defaults(func=cmd_cm)

    s = sub.add_parser("model", parents=[common], help="truncated cohomology ring of the Borel model")
    s.add_argument("input")
    s.set_defaults(func=cmd_model)

    for name, func, helptext in (("join", cmd_join, "spherical join of two fibers"),
                                 ("suspension", cmd_suspension, "suspension of a fiber")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        if name == "join":
            s.add_argument("left", help="catalog fiber name, fiber type, or pair file")
            s.add_argument("right")
            s.add_argument("--require-noncm", action="store_true",
                           help="only build joins whose action is not Cohen-Macaulay")
        else:
            s.add_argument("input", help="catalog fiber name or pair file")
        s.add_argument("-o", "--output", help="write the diagram JSON here")
        s.add_argument("--classify", action="store_true", help="run the CM decision on the result")
        s.set_defaults(func=func)

    s = sub.add_parser("catalog", parents=[common], help="list catalog groups and fibers")
    s.add_argument("--diagram", help="print one catalog diagram as JSON")
    s.set_defaults(func=cmd_catalog)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "table" if sys.stdout.isatty() else "json"
    try:
        return args.func(args)
    except InputError as exc:
        print(f"borelcm: error: {exc}", file=sys.stderr)
    except (DiagramError, AlgebraError) as exc:
        print(f"borelcm: error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
