"""A-graphs over a tree of groups: the underlying tree B, its morphism to A, labels and groups.

Every geometric edge is stored once, oriented like its image in A: `top` maps to the
parent vertex, `bottom` to the child, and the label (top_label, e, bottom_label) reads
top_label·e·bottom_label.  The reverse edge carries (bottom_label^-1, e^-1, top_label^-1).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from functools import total_ordering
from typing import Any, Optional, Sequence

import networkx as nx

from bridgefold.agraph.states import (
    ALLOWED_STATES,
    EDGE_RANK,
    EdgeState,
    FreeMeridional,
    LeafFull,
    MeridionalCount,
    Product,
    TrivialGroup,
    VertexState,
    full_state,
    is_full_state,
    meridian_state,
    state_payload,
    state_tag,
    trivial_state,
)
from bridgefold.braid import NormalClosure
from bridgefold.errors import InputError, PathFormatError
from bridgefold.graph_of_groups import Edge, TreeOfGroups
from bridgefold.knot_tree import bridge_number, subtree


logger = logging.getLogger("bridgefold.agraph")


@dataclass(frozen=True)
class BVertex:
    id: int
    image: str
    state: VertexState


@dataclass(frozen=True)
class BEdge:
    id: int
    top: int
    bottom: int
    image: Edge
    top_label: Any
    bottom_label: Any
    state: EdgeState = "trivial"


@dataclass(frozen=True)
class Half:
    """An edge read from one of its endpoints: label (near, direction, far)."""

    edge: int
    origin: int
    terminus: int
    downward: bool
    near: Any
    far: Any


@dataclass(frozen=True)
class APath:
    """a_0, e_1, a_1, ..., e_q, a_q; steps are A-edges in the direction travelled."""

    elements: tuple[Any, ...]
    steps: tuple[Edge, ...]


@total_ordering
@dataclass(frozen=True)
class Complexity:
    c1: int
    c2: int

    def __lt__(self, other: "Complexity") -> bool:
        return (self.c1, self.c2) < (other.c1, other.c2)

    def __str__(self) -> str:
        return f"({self.c1}, {self.c2})"


@dataclass(frozen=True)
class AGraph:
    tog: TreeOfGroups
    vertices: dict[int, BVertex]
    edges: dict[int, BEdge]
    base: int

    def group(self, u: int) -> Any:
        return self.tog.group(self.vertex(u).image)

    def vertex(self, u: int) -> BVertex:
        try:
            return self.vertices[u]
        except KeyError:
            raise InputError(f"unknown graph vertex: {u}") from None

    def edge(self, f: int) -> BEdge:
        try:
            return self.edges[f]
        except KeyError:
            raise InputError(f"unknown graph edge: {f}") from None

    def state(self, u: int) -> VertexState:
        return self.vertex(u).state

    def out_edges(self, u: int) -> list[BEdge]:
        """St_+(u, B): positively oriented edges starting at u."""
        return sorted((f for f in self.edges.values() if f.top == u), key=lambda f: f.id)

    def incident(self, u: int) -> list[BEdge]:
        return sorted((f for f in self.edges.values() if u in (f.top, f.bottom)), key=lambda f: f.id)

    def half(self, f: int, origin: int) -> Half:
        edge = self.edge(f)
        if origin == edge.top:
            return Half(f, edge.top, edge.bottom, True, edge.top_label, edge.bottom_label)
        if origin == edge.bottom:
            top_group = self.tog.group(edge.image[0])
            bottom_group = self.tog.group(edge.image[1])
            return Half(
                f, edge.bottom, edge.top, False,
                bottom_group.inv(edge.bottom_label), top_group.inv(edge.top_label),
            )
        raise InputError(f"edge {f} does not start at vertex {origin}")

    def halves(self, u: int) -> list[Half]:
        return [self.half(f.id, u) for f in self.incident(u)]

    def with_changes(
        self,
        vertices: Optional[dict[int, Optional[BVertex]]] = None,
        edges: Optional[dict[int, Optional[BEdge]]] = None,
        base: Optional[int] = None,
    ) -> "AGraph":
        new_vertices = dict(self.vertices)
        for key, value in (vertices or {}).items():
            if value is None:
                new_vertices.pop(key, None)
            else:
                new_vertices[key] = value
        new_edges = dict(self.edges)
        for key, value in (edges or {}).items():
            if value is None:
                new_edges.pop(key, None)
            else:
                new_edges[key] = value
        return replace(
            self,
            vertices=new_vertices,
            edges=new_edges,
            base=self.base if base is None else base,
        )


def _make_graph(tog: TreeOfGroups, vertices: Sequence[BVertex], edges: Sequence[BEdge], base: int) -> AGraph:
    return AGraph(tog, {v.id: v for v in vertices}, {f.id: f for f in edges}, base)


def _step_edge(tog: TreeOfGroups, step: Edge) -> tuple[Edge, bool]:
    src, dst = step
    if tog.tree.parents.get(dst) == src:
        return (src, dst), True
    if tog.tree.parents.get(src) == dst:
        return (dst, src), False
    raise PathFormatError(f"{src}>{dst} is not an edge of the tree")


def check_path(tog: TreeOfGroups, path: APath) -> None:
    if not path.steps:
        raise PathFormatError("a meridian path needs at least one edge")
    if len(path.elements) != len(path.steps) + 1:
        raise PathFormatError("elements and edges must alternate, starting and ending with an element")
    if path.steps[0][0] != tog.root or path.steps[-1][1] != tog.root:
        raise PathFormatError(f"path must start and end at the root {tog.root}")
    for prev, nxt in zip(path.steps, path.steps[1:]):
        if prev[1] != nxt[0]:
            raise PathFormatError(f"edges {prev[0]}>{prev[1]} and {nxt[0]}>{nxt[1]} do not meet")
    for step in path.steps:
        _step_edge(tog, step)


def build_initial(tog: TreeOfGroups, paths: Sequence[APath]) -> AGraph:
    root_group = tog.group(tog.root)
    vertices = [BVertex(0, tog.root, trivial_state(root_group))]
    edges: list[BEdge] = []
    for path in paths:
        check_path(tog, path)
        prev = 0
        q = len(path.steps)
        for j, step in enumerate(path.steps, start=1):
            src, dst = step
            image, downward = _step_edge(tog, step)
            group = tog.group(dst)
            terminal = j == q
            uid = len(vertices)
            vertices.append(BVertex(uid, dst, meridian_state(group) if terminal else trivial_state(group)))
            alpha_label = path.elements[j - 1]
            omega_label = path.elements[q] if terminal else group.identity()
            if downward:
                edges.append(BEdge(len(edges), prev, uid, image, alpha_label, omega_label))
            else:
                edges.append(BEdge(
                    len(edges), uid, prev, image,
                    group.inv(omega_label), tog.group(src).inv(alpha_label),
                ))
            prev = uid
    graph = _make_graph(tog, vertices, edges, 0)
    logger.debug("initial graph: %d paths, %d vertices, %d edges", len(paths), len(vertices), len(edges))
    return graph


def complete_graph(tog: TreeOfGroups) -> AGraph:
    ids = {v: i for i, v in enumerate(tog.tree.vertices)}
    vertices = [BVertex(ids[v], v, full_state(tog.group(v))) for v in tog.tree.vertices]
    edges = []
    for k, (parent, child) in enumerate(tog.edges()):
        edges.append(BEdge(
            k, ids[parent], ids[child], (parent, child),
            tog.group(parent).identity(), tog.group(child).identity(), "full",
        ))
    return _make_graph(tog, vertices, edges, ids[tog.root])


def is_isolated(G: AGraph, u: int) -> bool:
    G.vertex(u)
    return all(f.state == "trivial" for f in G.out_edges(u))


def is_full(G: AGraph, u: int, _memo: Optional[dict[int, bool]] = None) -> bool:
    memo = {} if _memo is None else _memo
    if u in memo:
        return memo[u]
    vertex = G.vertex(u)
    result = is_full_state(vertex.state)
    if result:
        for child in G.tog.tree.kids(vertex.image):
            image = (vertex.image, child)
            if not any(
                f.image == image and f.state == "full" and is_full(G, f.bottom, memo)
                for f in G.out_edges(u)
            ):
                result = False
                break
    memo[u] = result
    return result


def weight(G: AGraph, u: int) -> int:
    """w(B_u): the number of meridians the state is generated by."""
    vertex = G.vertex(u)
    state = vertex.state
    if isinstance(state, MeridionalCount):
        return state.count
    if isinstance(state, FreeMeridional):
        return len(state.basis)
    if isinstance(state, NormalClosure):
        return state.ambient_rank
    if isinstance(state, TrivialGroup):
        return 0
    if isinstance(state, Product):
        return len(state.members) + 1
    if isinstance(state, LeafFull):
        return G.group(u).bridge_number
    return bridge_number(subtree(G.tog.tree, vertex.image))


def c1(G: AGraph) -> int:
    total = 0
    for u in sorted(G.vertices):
        image = G.vertex(u).image
        nontrivial = sum(1 for f in G.out_edges(u) if f.state != "trivial")
        if nontrivial == 0:
            total += G.tog.height(image) * weight(G, u)
        else:
            total -= G.tog.height_plus(image) * (nontrivial - 1)
    return total


def c2(G: AGraph) -> int:
    # each geometric edge is two oriented edges sharing one group
    return sum(4 - EDGE_RANK[f.state] for f in G.edges.values())


def complexity(G: AGraph) -> Complexity:
    return Complexity(c1(G), c2(G))


def is_tame(G: AGraph) -> list[str]:
    violations: list[str] = []
    tree = nx.MultiGraph()
    tree.add_nodes_from(G.vertices)
    tree.add_edges_from((f.top, f.bottom) for f in G.edges.values())
    if G.vertices and not nx.is_tree(tree):
        violations.append("underlying graph is not a tree")
    if G.base not in G.vertices or G.vertex(G.base).image != G.tog.root:
        violations.append("base vertex does not map to the root")

    memo: dict[int, bool] = {}
    for f in sorted(G.edges.values(), key=lambda f: f.id):
        if G.vertex(f.top).image != f.image[0] or G.vertex(f.bottom).image != f.image[1]:
            violations.append(f"edge {f.id}: endpoints do not map onto {f.image[0]}>{f.image[1]}")
        if f.state == "full" and not is_full(G, f.bottom, memo):
            violations.append(f"edge {f.id}: full edge group but vertex {f.bottom} is not full")

    for u in sorted(G.vertices):
        vertex = G.vertex(u)
        group = G.group(u)
        state = vertex.state
        if not isinstance(state, ALLOWED_STATES[group.kind]):
            violations.append(f"vertex {u}: state {state_tag(state)} not allowed at a {group.kind} vertex")
            continue
        if isinstance(state, MeridionalCount) and state.count >= group.bridge_number:
            violations.append(
                f"vertex {u}: {state.count} meridians but the leaf has bridge number {group.bridge_number}"
            )
        if is_full_state(state) and not is_full(G, u, memo):
            violations.append(f"vertex {u}: whole vertex group but the vertex is not full")
        if isinstance(state, Product):
            for m in state.members:
                f = G.edges.get(m.edge)
                if f is None or f.top != u:
                    violations.append(f"vertex {u}: member edge {m.edge} does not start here")
                elif f.state != "full":
                    violations.append(f"vertex {u}: member edge {m.edge} has no full edge group")
                elif G.tog.edge_index(f.image) != m.index:
                    violations.append(f"vertex {u}: member edge {m.edge} carries the wrong index")
    return violations


def is_complete(G: AGraph) -> bool:
    images = [v.image for v in G.vertices.values()]
    if sorted(images) != sorted(G.tog.tree.vertices):
        return False
    edge_images = [f.image for f in G.edges.values()]
    if sorted(edge_images) != sorted(G.tog.edges()):
        return False
    if any(f.state != "full" for f in G.edges.values()):
        return False
    return all(is_full_state(v.state) for v in G.vertices.values())


def graph_dump(G: AGraph) -> dict[str, Any]:
    comp = complexity(G)
    return {
        "base": G.base,
        "complexity": [comp.c1, comp.c2],
        "vertices": [
            {
                "id": u,
                "image": G.vertex(u).image,
                "state": state_tag(G.vertex(u).state),
                "payload": state_payload(G.vertex(u).state, G.group(u)),
            }
            for u in sorted(G.vertices)
        ],
        "edges": [
            {
                "id": f.id,
                "image": f"{f.image[0]}>{f.image[1]}",
                "top": f.top,
                "bottom": f.bottom,
                "labels": [
                    G.tog.group(f.image[0]).format(f.top_label),
                    G.tog.group(f.image[1]).format(f.bottom_label),
                ],
                "state": f.state,
            }
            for f in sorted(G.edges.values(), key=lambda f: f.id)
        ],
    }
