"""Reader for meridian path files.

One path per line, `#` starts a comment:

    a:1 e:v0>v1 a:u e:v1>v0 a:1

Elements are written in the syntax of the vertex group they live in.
"""

from __future__ import annotations

from typing import Any

from bridgefold.agraph.graph import APath, check_path
from bridgefold.errors import InputError, PathFormatError
from bridgefold.graph_of_groups import TreeOfGroups


def _parse_line(tokens: list[str], tog: TreeOfGroups, lineno: int) -> APath:
    elements: list[Any] = []
    steps: list[tuple[str, str]] = []
    at = tog.root
    for i, token in enumerate(tokens):
        kind, sep, body = token.partition(":")
        expected = "a" if i % 2 == 0 else "e"
        if not sep or kind != expected:
            raise PathFormatError(f"token {i + 1} should be '{expected}:...', got {token!r}", lineno)
        if kind == "a":
            try:
                elements.append(tog.group(at).parse(body))
            except InputError as exc:
                raise PathFormatError(f"element {body!r} at {at}: {exc}", lineno) from exc
            continue
        src, arrow, dst = body.partition(">")
        if not arrow or not src or not dst:
            raise PathFormatError(f"edge token must read e:<from>><to>, got {token!r}", lineno)
        if src != at:
            raise PathFormatError(f"edge {src}>{dst} does not start at {at}", lineno)
        steps.append((src, dst))
        at = dst
    if len(tokens) % 2 == 0:
        raise PathFormatError("a path must end with an element", lineno)
    path = APath(tuple(elements), tuple(steps))
    try:
        check_path(tog, path)
    except PathFormatError as exc:
        raise PathFormatError(str(exc), lineno) from exc
    return path


def parse_paths(text: str, tog: TreeOfGroups) -> list[APath]:
    paths = []
    for lineno, raw in enumerate((text or "").splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            paths.append(_parse_line(tokens, tog, lineno))
    return paths


def format_path(path: APath, tog: TreeOfGroups) -> str:
    tokens = [f"a:{tog.group(tog.root).format(path.elements[0])}"]
    for (src, dst), element in zip(path.steps, path.elements[1:]):
        tokens.append(f"e:{src}>{dst}")
        tokens.append(f"a:{tog.group(dst).format(element)}")
    return " ".join(tokens)
