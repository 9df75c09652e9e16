from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from math import gcd, prod
from typing import Any, Union

import networkx as nx

from bridgefold.braid import BraidWord, format_braid, is_knot_pattern
from bridgefold.errors import InputError, TreeValidationError


logger = logging.getLogger("bridgefold.knot_tree")


@dataclass(frozen=True)
class TorusLeaf:
    p: int
    q: int

    @property
    def bridge_number(self) -> int:
        return min(self.p, self.q)


@dataclass(frozen=True)
class OpaqueLeaf:
    name: str
    bridge_number: int
    meridionally_tame: bool = False


LeafLabel = Union[TorusLeaf, OpaqueLeaf]


@dataclass(frozen=True)
class KnotTree:
    """Labelled rooted tree; vertex ids are strings, children in the order that fixes j(e)."""

    root: str
    children: dict[str, tuple[str, ...]]
    leaves: dict[str, LeafLabel]
    braids: dict[str, BraidWord]

    @cached_property
    def parents(self) -> dict[str, str]:
        return {c: v for v, kids in self.children.items() for c in kids}

    @cached_property
    def vertices(self) -> tuple[str, ...]:
        order: list[str] = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children.get(v, ())))
        return tuple(order)

    def kids(self, v: str) -> tuple[str, ...]:
        return self.children.get(v, ())

    def kind(self, v: str) -> str:
        k = len(self.kids(v))
        return "V0" if k == 0 else "V1" if k == 1 else "V2"

    def edges(self) -> list[tuple[str, str]]:
        """Edges oriented away from the root, in preorder."""
        return [(v, c) for v in self.vertices for c in self.kids(v)]


def _require_vertex(tree: KnotTree, v: str) -> None:
    if v not in tree.vertices:
        raise InputError(f"unknown vertex: {v}")


def _leaf_violation(v: str, label: LeafLabel) -> list[str]:
    if isinstance(label, TorusLeaf):
        p, q = label.p, label.q
        if not (p > q >= 2 and gcd(p, q) == 1):
            return [f"{v}: torus({p},{q}) needs p > q >= 2 and gcd(p, q) = 1"]
        return []
    if label.bridge_number < 2:
        return [f"{v}: opaque leaf {label.name} needs bridge number >= 2"]
    return []


def validate(tree: KnotTree) -> list[str]:
    violations: list[str] = []
    graph = nx.DiGraph()
    graph.add_node(tree.root)
    for v, kids in tree.children.items():
        graph.add_node(v)
        for c in kids:
            graph.add_edge(v, c)
    if not nx.is_arborescence(graph) or graph.in_degree(tree.root) != 0:
        return ["not a rooted tree"]
    if any(len(set(kids)) != len(kids) for kids in tree.children.values()):
        return ["repeated child"]

    for v in tree.vertices:
        kids = tree.kids(v)
        label = tree.leaves.get(v)
        braid = tree.braids.get(v)
        if not kids:
            if label is None:
                violations.append(f"{v}: leaf without knot label")
            else:
                violations.extend(_leaf_violation(v, label))
            if braid is not None:
                violations.append(f"{v}: braid label on a leaf")
            continue
        if label is not None:
            violations.append(f"{v}: knot label on a vertex with children")
        if len(kids) == 1:
            if braid is None:
                violations.append(f"{v}: one child but no braid label")
            elif braid.strands < 2:
                violations.append(f"{v}: braid needs at least 2 strands")
            elif not is_knot_pattern(braid):
                violations.append(f"{v}: closed braid {format_braid(braid)} is not a knot")
        elif braid is not None:
            violations.append(f"{v}: braid label on a vertex with {len(kids)} children")

    for v in set(tree.leaves) | set(tree.braids):
        if v not in graph:
            violations.append(f"{v}: label on an unknown vertex")
    return violations


def require_valid(tree: KnotTree) -> KnotTree:
    violations = validate(tree)
    if violations:
        raise TreeValidationError(violations)
    return tree


def n_of(tree: KnotTree, v: str) -> int:
    _require_vertex(tree, v)
    if tree.kind(v) == "V1":
        return tree.braids[v].strands
    return 1


def _root_path(tree: KnotTree, v: str) -> list[str]:
    path = []
    while v != tree.root:
        v = tree.parents[v]
        path.append(v)
    return path


def height(tree: KnotTree, v: str) -> int:
    _require_vertex(tree, v)
    return prod(n_of(tree, a) for a in _root_path(tree, v))


def height_plus(tree: KnotTree, v: str) -> int:
    return height(tree, v) * n_of(tree, v)


def max_height(tree: KnotTree) -> int:
    return max(height(tree, v) for v in tree.vertices)


def leaf_bridge_number(label: LeafLabel) -> int:
    return label.bridge_number


def bridge_number(tree: KnotTree) -> int:
    require_valid(tree)
    total = 0
    for v in tree.vertices:
        kind = tree.kind(v)
        if kind == "V0":
            total += height(tree, v) * leaf_bridge_number(tree.leaves[v])
        elif kind == "V2":
            total -= height(tree, v) * (len(tree.kids(v)) - 1)
    return total


def bridge_number_recursive(tree: KnotTree) -> int:
    require_valid(tree)

    def value(v: str) -> int:
        kids = tree.kids(v)
        if not kids:
            return leaf_bridge_number(tree.leaves[v])
        if len(kids) == 1:
            return tree.braids[v].strands * value(kids[0])
        return sum(value(c) for c in kids) - (len(kids) - 1)

    return value(tree.root)


def subtree(tree: KnotTree, w: str) -> KnotTree:
    _require_vertex(tree, w)
    keep: list[str] = []
    stack = [w]
    while stack:
        v = stack.pop()
        keep.append(v)
        stack.extend(tree.kids(v))
    kept = set(keep)
    return KnotTree(
        root=w,
        children={v: kids for v, kids in tree.children.items() if v in kept},
        leaves={v: lab for v, lab in tree.leaves.items() if v in kept},
        braids={v: b for v, b in tree.braids.items() if v in kept},
    )


def partition(tree: KnotTree) -> dict[str, list[str]]:
    parts: dict[str, list[str]] = {"V0": [], "V1": [], "V2": []}
    for v in tree.vertices:
        parts[tree.kind(v)].append(v)
    return parts


def report(tree: KnotTree) -> dict[str, Any]:
    closed = bridge_number(tree)
    recursive = bridge_number_recursive(tree)
    return {
        "bridge": closed,
        "recursive": recursive,
        "agreement": closed == recursive,
        "heights": {v: height(tree, v) for v in tree.vertices},
        "partition": partition(tree),
    }


def format_tree(tree: KnotTree, v: str | None = None) -> str:
    v = tree.root if v is None else v
    kids = tree.kids(v)
    if not kids:
        label = tree.leaves[v]
        if isinstance(label, TorusLeaf):
            return f"torus({label.p},{label.q})"
        tame = ", tame" if label.meridionally_tame else ""
        return f"opaque({label.name}, {label.bridge_number}{tame})"
    if len(kids) == 1 and v in tree.braids:
        braid = tree.braids[v]
        return f'sat(braid {braid.strands} "{format_braid(braid)}", {format_tree(tree, kids[0])})'
    return "sum(" + ", ".join(format_tree(tree, c) for c in kids) + ")"
