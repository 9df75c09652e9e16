import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional

from bridgefold.agraph import build_initial, format_trace, graph_dump, parse_paths, run_folds
from bridgefold.config import Settings, load_settings
from bridgefold.errors import BridgefoldError, InputError
from bridgefold.freegroup import PeripheralBasis, PeripheralConjugate, format_word, parse_word, peripheral_basis
from bridgefold.graph_of_groups import build_tree_of_groups, export_presentation
from bridgefold.knot_tree import format_tree, report
from bridgefold.models import (
    BridgeReport,
    FoldReport,
    FoldVerdict,
    StallingsReport,
    TorusCheckReport,
    to_jsonable,
)
from bridgefold.toruskit import certify_torus_knot, format_chain, orbifold_euler
from bridgefold.tree_dsl import parse_tree


logger = logging.getLogger("bridgefold.cli")

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_INPUT = 2


def _parse_args(argv: list[str]) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="bridgefold")
    parser.add_argument("--config", default=None, help="Path to config yaml (optional)")
    parser.add_argument("--format", choices=("text", "json"), default=None)
    sub = parser.add_subparsers(dest="cmd", required=True)

    bridge = sub.add_parser("bridge", help="Bridge number of a knot tree, closed form and recursion")
    bridge.add_argument("tree")

    presentation = sub.add_parser("presentation", help="Vertex groups and edge maps of the tree of groups")
    presentation.add_argument("tree")
    presentation.add_argument("--exact-torus", action="store_true", default=None)

    stallings = sub.add_parser("stallings", help="Peripheral basis of a set of conjugates in F_n")
    stallings.add_argument("generators")

    fold = sub.add_parser("fold", help="Fold the A-graph of a set of meridian paths")
    fold.add_argument("tree")
    fold.add_argument("paths")
    fold.add_argument("--trace-out", default=None)
    fold.add_argument("--exact-torus", action="store_true", default=None)
    fold.add_argument("--max-steps", type=int, default=None)

    torus = sub.add_parser("torus-check", help="Tameness arithmetic for the torus knot T(p,q)")
    torus.add_argument("p", type=int)
    torus.add_argument("q", type=int)

    return parser.parse_args(argv)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _emit(fmt: str, payload: Any, text_lines: list[str]) -> None:
    if fmt == "json":
        print(json.dumps(to_jsonable(payload), indent=2, ensure_ascii=False, sort_keys=True))
    else:
        print("\n".join(text_lines))


def _parse_generators(text: str) -> tuple[int, list[PeripheralConjugate]]:
    """`n <rank>` on the first line, then `<j> [conjugator letters...]` per line."""
    n: Optional[int] = None
    conjugates: list[PeripheralConjugate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split("#", 1)[0].split()
        if not fields:
            continue
        try:
            if n is None:
                if len(fields) != 2 or fields[0] != "n":
                    raise InputError("first line must read 'n <rank>'")
                n = int(fields[1])
                if n < 1:
                    raise InputError(f"rank must be positive, got {n}")
                continue
            index = int(fields[0])
            if index < 1 or index > n + 1:
                raise InputError(f"index {index} outside 1..{n + 1}")
            conjugates.append(PeripheralConjugate(parse_word(" ".join(fields[1:]), n), index))
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from exc
    if n is None:
        raise InputError("generators file is empty")
    return n, conjugates


def cmd_bridge(settings: Settings, args: argparse.Namespace) -> int:
    tree = parse_tree(_read(args.tree))
    data = report(tree)
    out = BridgeReport(tree=format_tree(tree), **data)
    lines = [
        f"tree: {out.tree}",
        f"bridge number: {out.bridge} (recursion: {out.recursive}, "
        f"{'agree' if out.agreement else 'MISMATCH'})",
        "heights: " + ", ".join(f"{v}={h}" for v, h in out.heights.items()),
    ]
    lines.extend(f"{kind}: {' '.join(vs) or '-'}" for kind, vs in out.partition.items())
    _emit(settings.output.format, out, lines)
    return EXIT_OK if out.agreement else EXIT_ASSERTION


def cmd_presentation(settings: Settings, args: argparse.Namespace) -> int:
    exact = settings.fold.exact_torus if args.exact_torus is None else args.exact_torus
    tog = build_tree_of_groups(parse_tree(_read(args.tree)), exact_torus=exact)
    text = export_presentation(tog)
    _emit(settings.output.format, {"presentation": text.splitlines()}, [text])
    return EXIT_OK


def cmd_stallings(settings: Settings, args: argparse.Namespace) -> int:
    n, conjugates = _parse_generators(_read(args.generators))
    result = peripheral_basis(conjugates, n)
    given = sorted({p.index for p in conjugates})
    if not isinstance(result, PeripheralBasis):
        out = StallingsReport(rank=n, whole_group=True, index_sets={"given": given})
        _emit(settings.output.format, out, [f"whole group F_{n}"])
        return EXIT_OK
    out = StallingsReport(
        rank=n,
        whole_group=False,
        basis=[
            {"conjugator": format_word(p.conjugator), "index": p.index, "source": src}
            for p, src in zip(result.basis, result.sources)
        ],
        basis_rank=result.rank,
        index_sets={"given": given, "basis": sorted(result.indices)},
    )
    lines = [f"proper subgroup of F_{n}, rank {result.rank}"]
    lines.extend(
        f"  ({format_word(p.conjugator)}) x{p.index} ({format_word(p.conjugator)})^-1"
        + (f"   <- generator {src + 1}" if src is not None else "")
        for p, src in zip(result.basis, result.sources)
    )
    lines.append(f"indices: given {given}, basis {sorted(result.indices)}")
    _emit(settings.output.format, out, lines)
    return EXIT_OK


def cmd_fold(settings: Settings, args: argparse.Namespace) -> int:
    exact = settings.fold.exact_torus if args.exact_torus is None else args.exact_torus
    max_steps = args.max_steps if args.max_steps is not None else settings.fold.max_steps
    if max_steps is not None and max_steps <= 0:
        raise InputError(f"--max-steps must be positive, got {max_steps}")
    trace_out = Path(args.trace_out) if args.trace_out else settings.output.trace_path

    tog = build_tree_of_groups(parse_tree(_read(args.tree)), exact_torus=exact)
    paths = parse_paths(_read(args.paths), tog)
    trace = run_folds(build_initial(tog, paths), max_steps=max_steps)
    trace_text = format_trace(trace)
    if trace_out is not None:
        trace_out.parent.mkdir(parents=True, exist_ok=True)
        trace_out.write_text(trace_text + ("\n" if trace_text else ""), encoding="utf-8")

    final = graph_dump(trace.final)
    verdict = FoldVerdict(
        folded=trace.folded,
        complete=trace.complete,
        monotone=trace.monotone,
        tame_throughout=trace.tame_throughout,
        stopped_early=trace.stopped_early,
        error=trace.error,
    )
    out = FoldReport(
        paths=len(paths),
        initial=[trace.initial.c1, trace.initial.c2],
        final=final["complexity"],
        steps=len(trace.steps),
        verdict=verdict,
        trace=None if trace_out is not None else trace_text.splitlines(),
        graph=final,
    )
    lines = [
        f"paths: {out.paths}, steps: {out.steps}",
        f"complexity: ({out.initial[0]}, {out.initial[1]}) -> ({out.final[0]}, {out.final[1]})",
        f"folded: {verdict.folded}, complete: {verdict.complete}, "
        f"monotone: {verdict.monotone}, tame: {verdict.tame_throughout}",
    ]
    if verdict.error:
        lines.append(f"error: {verdict.error}")
    if trace_out is None and trace_text:
        lines.append(trace_text)
    _emit(settings.output.format, out, lines)
    return EXIT_OK if trace.ok else EXIT_ASSERTION


def cmd_torus_check(settings: Settings, args: argparse.Namespace) -> int:
    certs = certify_torus_knot(args.p, args.q)
    out = TorusCheckReport(
        p=args.p,
        q=args.q,
        orbifold_euler=orbifold_euler(args.p, args.q),
        certificates=[
            {"r": c.r, "cover": c.cover_chi, "lower": c.lower, "bound": c.bound,
             "chain": c.chain_bound, "holds": c.holds}
            for c in certs
        ],
        holds=all(c.holds for c in certs),
    )
    lines = [f"T({args.p},{args.q}): chi = {out.orbifold_euler}"]
    lines.extend(format_chain(c) for c in certs)
    lines.append("meridionally tame" if out.holds else "CERTIFICATE FAILED")
    _emit(settings.output.format, out, lines)
    return EXIT_OK if out.holds else EXIT_ASSERTION


_COMMANDS = {
    "bridge": cmd_bridge,
    "presentation": cmd_presentation,
    "stallings": cmd_stallings,
    "fold": cmd_fold,
    "torus-check": cmd_torus_check,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = _parse_args(sys.argv[1:] if argv is None else argv)
    try:
        settings = load_settings(config_path=args.config)
    except ValueError as exc:
        print(f"bridgefold: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=getattr(logging, settings.log_level, logging.INFO))
    if args.format:
        settings = replace(settings, output=replace(settings.output, format=args.format))
    try:
        return _COMMANDS[args.cmd](settings, args)
    except InputError as exc:
        print(f"bridgefold: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BridgefoldError as exc:
        print(f"bridgefold: {exc}", file=sys.stderr)
        return EXIT_ASSERTION


if __name__ == "__main__":
    raise SystemExit(main())
