from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Literal, Union

from bridgefold.braid import (
    BraidSpaceElement,
    NormalClosure,
    classify_conjugates,
    rewrite_meridian_conjugate,
)
from bridgefold.errors import InconsistencyError
from bridgefold.freegroup import (
    PeripheralConjugate,
    WholeGroup,
    decompose_conjugate,
    identity,
    invert,
    multiply,
)
from bridgefold.graph_of_groups import (
    BraidSpaceGroup,
    ComposingElement,
    ComposingSpaceGroup,
    VertexGroup,
    cs_classify,
)


EdgeState = Literal["trivial", "meridian", "full"]

EDGE_RANK: dict[str, int] = {"trivial": 0, "meridian": 1, "full": 2}


@dataclass(frozen=True)
class MeridionalCount:
    """Leaf subgroup generated by the meridians c·m·c^-1, one per conjugator."""

    conjugators: tuple[Any, ...] = ()

    @property
    def count(self) -> int:
        return len(self.conjugators)


@dataclass(frozen=True)
class LeafFull:
    pass


@dataclass(frozen=True)
class FreeMeridional:
    """Braid-space subgroup freely generated by the conjugates w·x_i·w^-1."""

    basis: tuple[PeripheralConjugate, ...] = ()


@dataclass(frozen=True)
class BraidFull:
    pass


@dataclass(frozen=True)
class TrivialGroup:
    pass


@dataclass(frozen=True)
class ProductMember:
    edge: int
    conjugator: Any  # Word in F_n; the member generates conjugator·x_index·conjugator^-1
    index: int


@dataclass(frozen=True)
class Product:
    """F_u x <t>, F_u freely generated by the members' conjugates of l_e."""

    members: tuple[ProductMember, ...] = ()


@dataclass(frozen=True)
class ComposingFull:
    pass


VertexState = Union[
    MeridionalCount, LeafFull,
    FreeMeridional, NormalClosure, BraidFull,
    TrivialGroup, Product, ComposingFull,
]

FULL_STATES = (LeafFull, BraidFull, ComposingFull)

ALLOWED_STATES: dict[str, tuple[type, ...]] = {
    "leaf": (MeridionalCount, LeafFull),
    "braid": (FreeMeridional, NormalClosure, BraidFull),
    "composing": (TrivialGroup, Product, ComposingFull),
}


def is_full_state(state: VertexState) -> bool:
    return isinstance(state, FULL_STATES)


def full_state(group: VertexGroup) -> VertexState:
    return {"leaf": LeafFull(), "braid": BraidFull(), "composing": ComposingFull()}[group.kind]


def trivial_state(group: VertexGroup) -> VertexState:
    return {"leaf": MeridionalCount(), "braid": FreeMeridional(), "composing": TrivialGroup()}[group.kind]


def meridian_state(group: VertexGroup) -> VertexState:
    """The subgroup <m_v> of a terminal vertex of the initial graph."""
    if group.kind == "leaf":
        return MeridionalCount((group.identity(),))
    if group.kind == "braid":
        return FreeMeridional((PeripheralConjugate(identity(group.n), 1),))
    return Product()


def state_tag(state: VertexState) -> str:
    return type(state).__name__


def state_payload(state: VertexState, group: VertexGroup) -> Any:
    if isinstance(state, MeridionalCount):
        return [group.format(c) for c in state.conjugators]
    if isinstance(state, FreeMeridional):
        return [f"{p.conjugator} | x{p.index}" for p in state.basis]
    if isinstance(state, Product):
        return [
            {"edge": m.edge, "conjugator": str(m.conjugator), "index": m.index}
            for m in state.members
        ]
    if isinstance(state, NormalClosure):
        return {"rank": state.ambient_rank}
    return None


def free_generators(state: VertexState) -> list:
    """F_n words generating the free part of a braid or composing state."""
    if isinstance(state, FreeMeridional):
        return [p.element() for p in state.basis]
    if isinstance(state, Product):
        return [PeripheralConjugate(m.conjugator, m.index).element() for m in state.members]
    return []


def conjugate_state(state: VertexState, g: Any, group: VertexGroup) -> VertexState:
    """The state of g^-1·B·g."""
    if isinstance(state, MeridionalCount):
        ginv = group.inv(g)
        return MeridionalCount(tuple(group.mul(ginv, c) for c in state.conjugators))
    if isinstance(state, FreeMeridional):
        assert isinstance(group, BraidSpaceGroup)
        ginv = group.inv(g)
        basis = []
        for p in state.basis:
            moved = group.mul(group.mul(ginv, BraidSpaceElement(p.element(), 0)), g)
            if moved.r:
                raise InconsistencyError(f"conjugate of {p.element()} left F_n")
            conj, index = decompose_conjugate(moved.w)
            basis.append(PeripheralConjugate(conj, index))
        return FreeMeridional(tuple(basis))
    if isinstance(state, Product):
        ginv = invert(g.w)
        return Product(tuple(
            ProductMember(m.edge, multiply(ginv, m.conjugator), m.index) for m in state.members
        ))
    return state


def _saturate_leaf(conjugators: tuple[Any, ...], group: VertexGroup) -> VertexState:
    if len(conjugators) >= group.bridge_number:
        return LeafFull()
    return MeridionalCount(conjugators)


def _classify_braid(basis: tuple[PeripheralConjugate, ...], group: BraidSpaceGroup) -> VertexState:
    result = classify_conjugates(basis, group.space)
    if isinstance(result, NormalClosure):
        return result
    return FreeMeridional(result.basis)


def _classify_product(members: tuple[ProductMember, ...], group: ComposingSpaceGroup) -> VertexState:
    result = cs_classify([(ComposingElement(m.conjugator), m.index) for m in members], group.n)
    if isinstance(result, WholeGroup):
        return ComposingFull()
    kept = []
    for source in result.basis.sources:
        if source is None:
            raise InconsistencyError("a generator of the free factor is not one of the members")
        kept.append(members[source])
    return Product(tuple(kept))


def join_states(s1: VertexState, s2: VertexState, group: VertexGroup) -> VertexState:
    """State of <B_1, B_2> for two vertices being identified by a fold."""
    if is_full_state(s1) or is_full_state(s2):
        return full_state(group)
    if isinstance(s1, MeridionalCount) and isinstance(s2, MeridionalCount):
        return _saturate_leaf(s1.conjugators + s2.conjugators, group)
    if isinstance(s1, NormalClosure) or isinstance(s2, NormalClosure):
        return NormalClosure(group.n)
    if isinstance(s1, FreeMeridional) and isinstance(s2, FreeMeridional):
        return _classify_braid(s1.basis + s2.basis, group)
    if isinstance(s1, TrivialGroup):
        return s2
    if isinstance(s2, TrivialGroup):
        return s1
    if isinstance(s1, Product) and isinstance(s2, Product):
        return _classify_product(s1.members + s2.members, group)
    raise InconsistencyError(f"cannot join {state_tag(s1)} with {state_tag(s2)}")


def add_meridian(state: VertexState, conjugator: Any, group: VertexGroup) -> VertexState:
    """State of <B, c·m_v·c^-1>."""
    if is_full_state(state) or isinstance(state, NormalClosure):
        return state
    if isinstance(state, MeridionalCount):
        return _saturate_leaf(state.conjugators + (conjugator,), group)
    if isinstance(state, FreeMeridional):
        extra = rewrite_meridian_conjugate(conjugator, group.space)
        return _classify_braid(state.basis + (extra,), group)
    if isinstance(state, TrivialGroup):
        return Product()
    return state


def add_member(state: VertexState, member: ProductMember, group: ComposingSpaceGroup) -> VertexState:
    """State of <B, g·l_e·g^-1, t> at a composing vertex."""
    if isinstance(state, ComposingFull):
        return state
    members = state.members if isinstance(state, Product) else ()
    return _classify_product(members + (member,), group)


def rename_edge(state: VertexState, old: int, new: int) -> VertexState:
    if not isinstance(state, Product):
        return state
    return Product(tuple(
        ProductMember(new if m.edge == old else m.edge, m.conjugator, m.index) for m in state.members
    ))


def join_edge_states(a: EdgeState, b: EdgeState) -> EdgeState:
    return a if EDGE_RANK[a] >= EDGE_RANK[b] else b
