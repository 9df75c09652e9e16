"""Elementary folds of type IA and IIA, the auxiliary moves that prepare them, and
the preimage computations deciding when a fold applies."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Any, Optional

from bridgefold.agraph.graph import AGraph, Half
from bridgefold.agraph.states import (
    EDGE_RANK,
    BraidFull,
    EdgeState,
    MeridionalCount,
    Product,
    ProductMember,
    TrivialGroup,
    add_meridian,
    add_member,
    conjugate_state,
    free_generators,
    is_full_state,
    join_edge_states,
    join_states,
    rename_edge,
)
from bridgefold.braid import NormalClosure, rewrite_meridian_conjugate
from bridgefold.errors import (
    GuardViolationError,
    InconsistencyError,
    LabelMismatchError,
    UndecidableAtLeafError,
)
from bridgefold.freegroup import (
    build_subgroup_graph,
    decompose_conjugate,
    double_coset_exponent,
    generator_word,
    invert,
    meets_peripheral,
    multiply,
    product_word,
)
from bridgefold.graph_of_groups import alpha_map, omega_map


logger = logging.getLogger("bridgefold.agraph.folds")


@dataclass(frozen=True)
class Auxiliary:
    """near_2 = h·near_1·alpha(c) with h in the origin's group and c = m_e^z1 l_e^z2."""

    h: Any
    c: tuple[int, int]


@dataclass(frozen=True)
class FoldWitness:
    move: str  # "IA", "IIA+" (edge read downwards) or "IIA-" (edge read upwards)
    edges: tuple[int, ...]
    origin: int


def _near_map(G: AGraph, half: Half, z1: int, z2: int) -> Any:
    e = G.edge(half.edge).image
    return alpha_map(G.tog, e, z1, z2) if half.downward else omega_map(G.tog, e, z1, z2)


def _far_map(G: AGraph, half: Half, z1: int, z2: int) -> Any:
    e = G.edge(half.edge).image
    return omega_map(G.tog, e, z1, z2) if half.downward else alpha_map(G.tog, e, z1, z2)


# ---------------------------------------------------------------------------
# preimages of vertex groups in edge groups

def forward_preimage(G: AGraph, f: int) -> EdgeState:
    """alpha_e^-1(a^-1·B_x·a) for the edge read from its top vertex x."""
    edge = G.edge(f)
    group, state = G.group(edge.top), G.state(edge.top)
    if is_full_state(state):
        return "full"
    a = edge.top_label
    if group.kind == "braid":
        if isinstance(state, NormalClosure):
            return "meridian"
        graph = build_subgroup_graph(free_generators(state), group.n)
        # a·(x1...xn)·a^-1 = wa·(x1...xn)·wa^-1 since the action fixes the product
        return "meridian" if meets_peripheral(graph, a.w, group.n + 1) else "trivial"
    if isinstance(state, TrivialGroup):
        return "trivial"
    graph = build_subgroup_graph(free_generators(state), group.n)
    return "full" if meets_peripheral(graph, a.w, G.tog.edge_index(edge.image)) else "meridian"


def backward_preimage(G: AGraph, f: int) -> EdgeState:
    """omega_e^-1(b·B_y·b^-1) for the edge read from its bottom vertex y."""
    edge = G.edge(f)
    group, state = G.group(edge.bottom), G.state(edge.bottom)
    if is_full_state(state):
        return "full"
    b = edge.bottom_label
    if isinstance(state, MeridionalCount):
        # b^-1·m·b = c·m·c^-1 exactly when b·c centralizes m
        for c in state.conjugators:
            if group.peripheral_coordinates(group.mul(b, c)) is not None:
                return "meridian"
        return "trivial"
    if group.kind == "braid":
        if isinstance(state, NormalClosure):
            return "meridian"
        graph = build_subgroup_graph(free_generators(state), group.n)
        p = rewrite_meridian_conjugate(group.inv(b), group.space)
        return "meridian" if meets_peripheral(graph, p.conjugator, p.index) else "trivial"
    if isinstance(state, TrivialGroup):
        return "trivial"
    graph = build_subgroup_graph(free_generators(state), group.n)
    return "full" if meets_peripheral(graph, invert(b.w), group.n + 1) else "meridian"


# ---------------------------------------------------------------------------
# double cosets B_x · near_1 · alpha(A_e)

def _solve_leaf(G: AGraph, x: int, near1: Any, near2: Any) -> Optional[tuple[int, int]]:
    group, state = G.group(x), G.state(x)
    conjugators = state.conjugators

    def normalizes(ref: Any) -> bool:
        ref_inv = group.inv(ref)
        return all(group.peripheral_coordinates(group.mul(ref_inv, c)) is not None for c in conjugators)

    if normalizes(near1):
        return group.peripheral_coordinates(group.mul(group.inv(near1), near2))
    if normalizes(near2):
        coords = group.peripheral_coordinates(group.mul(group.inv(near2), near1))
        return None if coords is None else (-coords[0], -coords[1])
    raise UndecidableAtLeafError(
        G.vertex(x).image, f"double coset of {state.count} meridians through {group.format(near1)}"
    )


def solve_pair(G: AGraph, x: int, f1: int, f2: int) -> Optional[Auxiliary]:
    """Find (h, c) with near_2 = h·near_1·alpha(c), or None when the labels are not equivalent."""
    h1, h2 = G.half(f1, x), G.half(f2, x)
    if G.edge(f1).image != G.edge(f2).image or h1.downward != h2.downward:
        return None
    group, state = G.group(x), G.state(x)
    near1, near2 = h1.near, h2.near

    def finish(c: Optional[tuple[int, int]]) -> Optional[Auxiliary]:
        if c is None:
            return None
        h = group.mul(near2, group.inv(group.mul(near1, _near_map(G, h1, *c))))
        return Auxiliary(h, c)

    if is_full_state(state):
        return finish((0, 0))
    if group.kind == "leaf":
        return finish(_solve_leaf(G, x, near1, near2))

    n = group.n
    gens = free_generators(state)
    if group.kind == "braid" and h1.downward:
        z2 = near2.r - near1.r
        if isinstance(state, NormalClosure):
            return finish((0, z2))
        k = double_coset_exponent(gens, near1.w, product_word(n), near2.w)
        return finish(None if k is None else (k, z2))
    if group.kind == "braid":
        shift = near2.r - near1.r
        if shift % n:
            return None
        z2 = shift // n
        if isinstance(state, NormalClosure):
            return finish((0, z2))
        moved = group.mul(near1, group.space.power(group.longitude(), z2))
        conj, i = decompose_conjugate(group.space.act(generator_word(1, n), moved.r))
        k = double_coset_exponent(
            gens, multiply(moved.w, conj), generator_word(i, n), multiply(near2.w, conj)
        )
        return finish(None if k is None else (k, z2))

    z1 = near2.z - near1.z
    cyclic = generator_word(G.tog.edge_index(G.edge(f1).image), n) if h1.downward else product_word(n)
    k = double_coset_exponent(gens, near1.w, cyclic, near2.w)
    return finish(None if k is None else (z1, k))


# ---------------------------------------------------------------------------
# auxiliary moves

def _set_half_labels(G: AGraph, f: int, origin: int, near: Any, far: Any) -> AGraph:
    edge = G.edge(f)
    if origin == edge.top:
        new = replace(edge, top_label=near, bottom_label=far)
    else:
        top_group, bottom_group = G.tog.group(edge.image[0]), G.tog.group(edge.image[1])
        new = replace(edge, top_label=top_group.inv(far), bottom_label=bottom_group.inv(near))
    return G.with_changes(edges={f: new})


def conjugate_vertex(G: AGraph, y: int, g: Any) -> AGraph:
    """Move A0: B_y becomes g^-1·B_y·g and every label at y absorbs g."""
    group = G.group(y)
    vertex = G.vertex(y)
    edges = {}
    for f in G.incident(y):
        if f.bottom == y:
            f = replace(f, bottom_label=group.mul(f.bottom_label, g))
        if f.top == y:
            f = replace(f, top_label=group.mul(group.inv(g), f.top_label))
        edges[f.id] = f
    new_vertex = replace(vertex, state=conjugate_state(vertex.state, g, group))
    return G.with_changes(vertices={y: new_vertex}, edges=edges)


def apply_auxiliary(G: AGraph, x: int, f1: int, f2: int, aux: Auxiliary) -> AGraph:
    """Rewrite the labels of f2 (read from x) to those of f1."""
    h1, h2 = G.half(f1, x), G.half(f2, x)
    gx, gy = G.group(x), G.group(h2.terminus)
    new_near = gx.mul(gx.inv(aux.h), gx.mul(h2.near, gx.inv(_near_map(G, h2, *aux.c))))
    if not gx.equal(new_near, h1.near):
        raise InconsistencyError(f"auxiliary move on edges {f1},{f2} did not match the labels")
    new_far = gy.mul(_far_map(G, h2, *aux.c), h2.far)
    G = _set_half_labels(G, f2, x, h1.near, new_far)
    logger.debug("auxiliary move on edge %d: c = %s", f2, aux.c)
    return conjugate_vertex(G, h2.terminus, gy.mul(gy.inv(new_far), h1.far))


# ---------------------------------------------------------------------------
# folds

def _shared_origin(G: AGraph, f1: int, f2: int) -> int:
    e1, e2 = G.edge(f1), G.edge(f2)
    if e1.image != e2.image:
        raise GuardViolationError("IA", f"edges {f1} and {f2} map to different edges of the tree")
    if e1.top == e2.top:
        return e1.top
    if e1.bottom == e2.bottom:
        return e1.bottom
    raise GuardViolationError("IA", f"edges {f1} and {f2} do not start at the same vertex")


def without_edge_meridian(G: AGraph, f: int) -> MeridionalCount:
    """The leaf state at the bottom of f with the generator carrying f's meridian removed."""
    edge = G.edge(f)
    group, state = G.group(edge.bottom), G.state(edge.bottom)
    if not isinstance(state, MeridionalCount):
        raise InconsistencyError(f"edge {f} does not end at a leaf generated by meridians")
    b = edge.bottom_label
    for i, c in enumerate(state.conjugators):
        if group.peripheral_coordinates(group.mul(b, c)) is not None:
            return MeridionalCount(state.conjugators[:i] + state.conjugators[i + 1:])
    raise InconsistencyError(f"the meridian of edge {f} is not among the generators at vertex {edge.bottom}")


def fold_IA(G: AGraph, f1: int, f2: int) -> AGraph:
    if f1 == f2:
        raise GuardViolationError("IA", "cannot fold an edge with itself")
    x = _shared_origin(G, f1, f2)
    h1, h2 = G.half(f1, x), G.half(f2, x)
    gx, gy = G.group(x), G.group(h1.terminus)
    if not (gx.equal(h1.near, h2.near) and gy.equal(h1.far, h2.far)):
        raise LabelMismatchError(f1, f2)

    y1, y2 = h1.terminus, h2.terminus
    e1, e2 = G.edge(f1), G.edge(f2)
    s2 = G.state(y2)
    if (
        isinstance(s2, MeridionalCount)
        and isinstance(G.state(y1), MeridionalCount)
        and e1.state != "trivial"
        and e2.state != "trivial"
    ):
        # both heads contain the one edge meridian the equal labels pin down
        s2 = without_edge_meridian(G, f2)
    merged_state = join_states(rename_edge(G.state(y1), f2, f1), rename_edge(s2, f2, f1), gy)
    edges: dict[int, Any] = {f2: None, f1: replace(e1, state=join_edge_states(e1.state, e2.state))}
    for f in G.incident(y2):
        if f.id == f2:
            continue
        edges[f.id] = replace(
            f,
            top=y1 if f.top == y2 else f.top,
            bottom=y1 if f.bottom == y2 else f.bottom,
        )
    vertices: dict[int, Any] = {y2: None, y1: replace(G.vertex(y1), state=merged_state)}
    origin_state = G.state(x)
    if isinstance(origin_state, Product) and any(m.edge == f2 for m in origin_state.members):
        vertices[x] = replace(
            G.vertex(x), state=join_states(rename_edge(origin_state, f2, f1), Product(), gx)
        )
    base = y1 if G.base == y2 else G.base
    logger.debug("fold IA: edge %d into %d, vertex %d into %d", f2, f1, y2, y1)
    return G.with_changes(vertices=vertices, edges=edges, base=base)


def fold_IIA_forward(G: AGraph, f: int) -> AGraph:
    edge = G.edge(f)
    target = forward_preimage(G, f)
    if EDGE_RANK[target] <= EDGE_RANK[edge.state]:
        raise GuardViolationError("IIA", f"edge {f} already carries its preimage")
    if target != "meridian" or edge.state != "trivial":
        raise GuardViolationError("IIA", f"edge {f}: forward fold to {target} from {edge.state}")
    y = edge.bottom
    gy = G.group(y)
    state = add_meridian(G.state(y), gy.inv(edge.bottom_label), gy)
    logger.debug("fold IIA forward on edge %d", f)
    return G.with_changes(
        vertices={y: replace(G.vertex(y), state=state)},
        edges={f: replace(edge, state="meridian")},
    )


def fold_IIA_backward(G: AGraph, f: int) -> AGraph:
    edge = G.edge(f)
    target = backward_preimage(G, f)
    if EDGE_RANK[target] <= EDGE_RANK[edge.state]:
        raise GuardViolationError("IIA", f"edge {f} already carries its preimage")
    y = edge.top
    gy = G.group(y)
    state = G.state(y)
    if gy.kind == "braid":
        if target == "full":
            state = BraidFull()
        elif not is_full_state(state):
            state = NormalClosure(gy.n)
    elif target == "meridian":
        state = add_meridian(state, None, gy)
    else:
        member = ProductMember(f, edge.top_label.w, G.tog.edge_index(edge.image))
        state = add_member(state, member, gy)
    logger.debug("fold IIA backward on edge %d: %s", f, target)
    return G.with_changes(
        vertices={y: replace(G.vertex(y), state=state)},
        edges={f: replace(edge, state=target)},
    )


# ---------------------------------------------------------------------------
# finding fold sites

def forced_fold_pair(G: AGraph, u: int) -> Optional[tuple[int, int]]:
    """Two edges at u that a fold IA identifies, when u's group already forces one."""
    group, state = G.group(u), G.state(u)
    outs = G.out_edges(u)
    if group.kind == "braid":
        if isinstance(state, NormalClosure) and len(outs) >= 2:
            return outs[0].id, outs[1].id
        return None
    if group.kind != "composing" or not isinstance(state, Product):
        return None
    graph = build_subgroup_graph(free_generators(state), group.n)
    for f in outs:
        if f.state == "full":
            continue
        if not meets_peripheral(graph, f.top_label.w, G.tog.edge_index(f.image)):
            continue
        for m in state.members:
            if m.edge == f.id or G.edge(m.edge).image != f.image:
                continue
            if solve_pair(G, u, m.edge, f.id) is not None:
                return min(m.edge, f.id), max(m.edge, f.id)
    return None


def _with_context(exc: UndecidableAtLeafError, move: str, edges: tuple[int, ...]) -> UndecidableAtLeafError:
    return UndecidableAtLeafError(exc.vertex, exc.detail, move, edges)


def find_IA(G: AGraph) -> Optional[FoldWitness]:
    for u in sorted(G.vertices):
        pair = forced_fold_pair(G, u)
        if pair is not None:
            return FoldWitness("IA", pair, u)
    for u in sorted(G.vertices):
        halves = G.halves(u)
        for i, h1 in enumerate(halves):
            for h2 in halves[i + 1:]:
                if h1.downward != h2.downward or G.edge(h1.edge).image != G.edge(h2.edge).image:
                    continue
                try:
                    aux = solve_pair(G, u, h1.edge, h2.edge)
                except UndecidableAtLeafError as exc:
                    raise _with_context(exc, "IA", (h1.edge, h2.edge)) from exc
                if aux is not None:
                    return FoldWitness("IA", (h1.edge, h2.edge), u)
    return None


def find_IIA(G: AGraph) -> Optional[FoldWitness]:
    for f in sorted(G.edges):
        edge = G.edge(f)
        if edge.state == "full":
            continue
        try:
            if EDGE_RANK[forward_preimage(G, f)] > EDGE_RANK[edge.state]:
                return FoldWitness("IIA+", (f,), edge.top)
            if EDGE_RANK[backward_preimage(G, f)] > EDGE_RANK[edge.state]:
                return FoldWitness("IIA-", (f,), edge.bottom)
        except UndecidableAtLeafError as exc:
            raise _with_context(exc, "IIA", (f,)) from exc
    return None


def find_fold(G: AGraph) -> Optional[FoldWitness]:
    """IA sites first, lowest edge ids first; IIA only when no IA applies."""
    return find_IA(G) or find_IIA(G)


def is_folded(G: AGraph) -> tuple[bool, Optional[FoldWitness]]:
    witness = find_fold(G)
    return witness is None, witness


def apply_fold(G: AGraph, witness: FoldWitness) -> AGraph:
    if witness.move == "IA":
        f1, f2 = sorted(witness.edges)
        aux = solve_pair(G, witness.origin, f1, f2)
        if aux is None:
            raise GuardViolationError("IA", f"labels of edges {f1},{f2} are not equivalent")
        G = apply_auxiliary(G, witness.origin, f1, f2, aux)
        return fold_IA(G, f1, f2)
    if witness.move == "IIA+":
        return fold_IIA_forward(G, witness.edges[0])
    if witness.move == "IIA-":
        return fold_IIA_backward(G, witness.edges[0])
    raise GuardViolationError(witness.move, "unknown fold")
