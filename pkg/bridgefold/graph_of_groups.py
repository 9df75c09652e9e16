"""The tree of groups of a knot tree.

Vertex groups: knot groups at leaves, braid spaces F_n x| <t> at V1 vertices and
composing spaces F_n x <t> at V2 vertices.  Every oriented edge e = (v, w) carries
Z^2 = <m_e, l_e>, mapped into the parent by alpha_map and into the child by omega_map.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence, Union

from bridgefold.braid import (
    BraidSpace,
    BraidSpaceElement,
    braid_space,
    format_braid,
    peripheral_partner,
)
from bridgefold.errors import (
    EdgeOrientationError,
    InconsistencyError,
    InputError,
    UndecidableAtLeafError,
)
from bridgefold.freegroup import (
    PeripheralBasis,
    PeripheralConjugate,
    Word,
    WholeGroup,
    build_subgroup_graph,
    format_word,
    generator_word,
    identity,
    invert,
    meets_peripheral,
    multiply,
    peripheral_basis,
    peripheral_cycles,
    power,
    product_word,
    reduce,
)
from bridgefold.knot_tree import KnotTree, OpaqueLeaf, TorusLeaf, height, height_plus, require_valid
from bridgefold.torus import (
    TorusElement,
    edge_coordinates,
    format_torus,
    torus_identity,
    torus_invert,
    torus_longitude,
    torus_meridian,
    torus_multiply,
    torus_normal_form,
    torus_power,
)


logger = logging.getLogger("bridgefold.graph_of_groups")

Edge = tuple[str, str]

_FREE_TOKEN_RE = re.compile(r"^([xX])(\d+)(?:\^(-?\d+))?$")
_LETTER_TOKEN_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def _split_tokens(text: str) -> list[str]:
    return [tok for tok in (text or "").replace(".", " ").split() if tok != "1"]


def _power_suffix(name: str, exp: int) -> str:
    return name if exp == 1 else f"{name}^{exp}"


# ---------------------------------------------------------------------------
# composing spaces

@dataclass(frozen=True)
class ComposingElement:
    w: Word
    z: int = 0

    def __str__(self) -> str:
        return format_composing(self)


def cs_multiply(a: ComposingElement, b: ComposingElement) -> ComposingElement:
    return ComposingElement(multiply(a.w, b.w), a.z + b.z)


def cs_invert(a: ComposingElement) -> ComposingElement:
    return ComposingElement(invert(a.w), -a.z)


def format_composing(a: Union[ComposingElement, BraidSpaceElement]) -> str:
    parts = [] if a.w.is_identity else [format_word(a.w, sep=".")]
    r = a.z if isinstance(a, ComposingElement) else a.r
    if r:
        parts.append(_power_suffix("t", r))
    return ".".join(parts) or "1"


@dataclass(frozen=True)
class ComposingBasis:
    """Free factor F_u of a proper subgroup U together with, per index, how C_i meets U
    at the identity coset: with t in U, all of C_i ("3b") or only <t> ("3a"); without
    t, <x_i> ("cyclic") or nothing ("trivial")."""

    basis: PeripheralBasis
    include_t: bool
    peripheral_cases: dict[int, str] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.basis.rank


def _standard_basis(S: Sequence[tuple[ComposingElement, int]], n: int) -> PeripheralBasis:
    basis = tuple(PeripheralConjugate(identity(n), i) for i in range(1, n + 1))
    sources = tuple(
        next((k for k, (g, j) in enumerate(S) if j == i and g.w.is_identity), None)
        for i in range(1, n + 1)
    )
    return PeripheralBasis(basis, sources, build_subgroup_graph([p.element() for p in basis], n))


def cs_classify(
    S: Sequence[tuple[ComposingElement, int]],
    n: int,
    include_t: bool = True,
) -> Union[WholeGroup, ComposingBasis]:
    """Classify U = <S> x <t> (or <S> alone when include_t is off) inside F_n x <t>."""
    # conjugating by t is trivial, so only the F_n parts of the conjugators matter
    conjugates = [PeripheralConjugate(g.w, i) for g, i in S]
    result = peripheral_basis(conjugates, n)
    if isinstance(result, WholeGroup):
        if include_t:
            return result
        # F_n itself: every C_i meets it in <x_i>, and t is missing
        return ComposingBasis(_standard_basis(S, n), False, {i: "cyclic" for i in range(1, n + 1)})
    if peripheral_cycles(result.graph, n + 1):
        raise InconsistencyError("a subgroup of the composing space met the boundary class x_{n+1}")
    met, missed = ("3b", "3a") if include_t else ("cyclic", "trivial")
    cases = {
        i: met if meets_peripheral(result.graph, identity(n), i) else missed
        for i in range(1, n + 1)
    }
    return ComposingBasis(result, include_t, cases)


# ---------------------------------------------------------------------------
# leaf groups without an exact word problem

@dataclass(frozen=True)
class LeafWord:
    """Formal word over m, l and opaque tokens; m and l commute."""

    syllables: tuple[tuple[str, int], ...] = ()

    @property
    def tokens(self) -> set[str]:
        return {g for g, _ in self.syllables if g not in ("m", "l")}

    def __str__(self) -> str:
        return ".".join(_power_suffix(g, e) for g, e in self.syllables) or "1"


def leaf_reduce(syllables: Sequence[tuple[str, int]]) -> LeafWord:
    stack: list[list[Any]] = []  # ["per", a, b] or ["tok", name, exp]
    for gen, exp in syllables:
        if exp == 0:
            continue
        if gen in ("m", "l"):
            if stack and stack[-1][0] == "per":
                stack[-1][1 if gen == "m" else 2] += exp
                if stack[-1][1] == 0 and stack[-1][2] == 0:
                    stack.pop()
            else:
                stack.append(["per", exp if gen == "m" else 0, exp if gen == "l" else 0])
        elif stack and stack[-1][0] == "tok" and stack[-1][1] == gen:
            stack[-1][2] += exp
            if stack[-1][2] == 0:
                stack.pop()
        else:
            stack.append(["tok", gen, exp])
    out: list[tuple[str, int]] = []
    for item in stack:
        if item[0] == "per":
            out.extend((g, e) for g, e in (("m", item[1]), ("l", item[2])) if e)
        else:
            out.append((item[1], item[2]))
    return LeafWord(tuple(out))


# ---------------------------------------------------------------------------
# vertex group adapters

class LeafSymbolGroup:
    kind = "leaf"

    def __init__(self, vertex: str, label: Union[OpaqueLeaf, TorusLeaf]):
        self.vertex = vertex
        self.label = label

    @property
    def bridge_number(self) -> int:
        return self.label.bridge_number

    def describe(self) -> str:
        if isinstance(self.label, TorusLeaf):
            return f"torus({self.label.p},{self.label.q}) symbolic"
        return f"opaque {self.label.name}"

    def identity(self) -> LeafWord:
        return LeafWord()

    def mul(self, a: LeafWord, b: LeafWord) -> LeafWord:
        return leaf_reduce(a.syllables + b.syllables)

    def inv(self, a: LeafWord) -> LeafWord:
        return leaf_reduce([(g, -e) for g, e in reversed(a.syllables)])

    def meridian(self) -> LeafWord:
        return LeafWord((("m", 1),))

    def peripheral(self, z1: int, z2: int) -> LeafWord:
        return leaf_reduce([("m", z1), ("l", z2)])

    def peripheral_coordinates(self, g: LeafWord) -> Optional[tuple[int, int]]:
        if g.tokens:
            raise UndecidableAtLeafError(self.vertex, f"cannot decide whether {g} is peripheral")
        exps = dict(g.syllables)
        return exps.get("m", 0), exps.get("l", 0)

    def equal(self, a: LeafWord, b: LeafWord) -> bool:
        diff = self.mul(self.inv(a), b)
        if not diff.syllables:
            return True
        if not diff.tokens:
            return False
        raise UndecidableAtLeafError(self.vertex, f"cannot compare {a} with {b}")

    def parse(self, text: str) -> LeafWord:
        syllables = []
        for tok in _split_tokens(text):
            m = _LETTER_TOKEN_RE.match(tok)
            if not m:
                raise InputError(f"bad leaf token: {tok!r}")
            syllables.append((m.group(1), int(m.group(2)) if m.group(2) is not None else 1))
        return leaf_reduce(syllables)

    def format(self, a: LeafWord) -> str:
        return str(a)

    def presentation(self) -> str:
        name = self.label.name if isinstance(self.label, OpaqueLeaf) else f"T({self.label.p},{self.label.q})"
        return f"G({name}); m = m, l = l"


class TorusLeafGroup:
    kind = "leaf"

    def __init__(self, vertex: str, label: TorusLeaf):
        self.vertex = vertex
        self.label = label
        self.p, self.q = label.p, label.q
        self._m = torus_meridian(self.p, self.q)
        self._l = torus_longitude(self.p, self.q)

    @property
    def bridge_number(self) -> int:
        return self.label.bridge_number

    def describe(self) -> str:
        return f"torus({self.p},{self.q}) exact"

    def identity(self) -> TorusElement:
        return torus_identity(self.p, self.q)

    def mul(self, a: TorusElement, b: TorusElement) -> TorusElement:
        return torus_multiply(a, b)

    def inv(self, a: TorusElement) -> TorusElement:
        return torus_invert(a)

    def meridian(self) -> TorusElement:
        return self._m

    def peripheral(self, z1: int, z2: int) -> TorusElement:
        return torus_multiply(torus_power(self._m, z1), torus_power(self._l, z2))

    def peripheral_coordinates(self, g: TorusElement) -> Optional[tuple[int, int]]:
        return edge_coordinates(g)

    def equal(self, a: TorusElement, b: TorusElement) -> bool:
        return a == b

    def parse(self, text: str) -> TorusElement:
        acc = self.identity()
        for tok in _split_tokens(text):
            m = _LETTER_TOKEN_RE.match(tok)
            if not m or m.group(1) not in ("u", "v", "c", "m", "l"):
                raise InputError(f"bad torus token: {tok!r}")
            exp = int(m.group(2)) if m.group(2) is not None else 1
            gen = m.group(1)
            if gen == "m":
                factor = torus_power(self._m, exp)
            elif gen == "l":
                factor = torus_power(self._l, exp)
            else:
                factor = torus_normal_form([(gen, exp)], self.p, self.q)
            acc = torus_multiply(acc, factor)
        return acc

    def format(self, a: TorusElement) -> str:
        return format_torus(a)

    def presentation(self) -> str:
        return (
            f"<u, v | u^{self.p} = v^{self.q}>; m = {format_torus(self._m)}, "
            f"l = {format_torus(self._l)}"
        )


def _parse_free_tokens(text: str, n: int) -> list[tuple[str, int]]:
    """Tokens of `x1.X2.t^2` as ("x", signed index) / ("t", exponent) pairs."""
    out: list[tuple[str, int]] = []
    for tok in _split_tokens(text):
        m = _FREE_TOKEN_RE.match(tok)
        if m:
            index = int(m.group(2))
            if index < 1 or index > n:
                raise InputError(f"generator x{index} outside 1..{n}")
            exp = int(m.group(3)) if m.group(3) is not None else 1
            sign = 1 if m.group(1) == "x" else -1
            out.extend([("x", sign * index if exp > 0 else -sign * index)] * abs(exp))
            continue
        m = _LETTER_TOKEN_RE.match(tok)
        if m and m.group(1) == "t":
            out.append(("t", int(m.group(2)) if m.group(2) is not None else 1))
            continue
        raise InputError(f"bad token: {tok!r}")
    return out


class BraidSpaceGroup:
    kind = "braid"

    def __init__(self, vertex: str, space: BraidSpace):
        self.vertex = vertex
        self.space = space
        self.n = space.n
        self._partner = peripheral_partner(space)
        self._product = product_word(self.n)

    def describe(self) -> str:
        return f"braid space of {format_braid(self.space.braid)} ({self.n} strands)"

    def identity(self) -> BraidSpaceElement:
        return self.space.identity()

    def mul(self, a: BraidSpaceElement, b: BraidSpaceElement) -> BraidSpaceElement:
        return self.space.multiply(a, b)

    def inv(self, a: BraidSpaceElement) -> BraidSpaceElement:
        return self.space.invert(a)

    def meridian(self) -> BraidSpaceElement:
        return BraidSpaceElement(generator_word(1, self.n), 0)

    def longitude(self) -> BraidSpaceElement:
        return self._partner

    def peripheral(self, z1: int, z2: int) -> BraidSpaceElement:
        return self.mul(
            BraidSpaceElement(power(generator_word(1, self.n), z1), 0),
            self.space.power(self._partner, z2),
        )

    def peripheral_coordinates(self, g: BraidSpaceElement) -> Optional[tuple[int, int]]:
        if g.r % self.n:
            return None
        z2 = g.r // self.n
        rest = self.mul(g, self.space.power(self._partner, -z2))
        letters = set(rest.w.letters)
        if rest.r or not (letters <= {1} or letters <= {-1}):
            return None
        return sum(1 if x > 0 else -1 for x in rest.w.letters), z2

    def child_image(self, z1: int, z2: int) -> BraidSpaceElement:
        return BraidSpaceElement(power(self._product, z1), z2)

    def equal(self, a: BraidSpaceElement, b: BraidSpaceElement) -> bool:
        return a == b

    def parse(self, text: str) -> BraidSpaceElement:
        acc = self.identity()
        for kind, value in _parse_free_tokens(text, self.n):
            factor = (
                BraidSpaceElement(Word(self.n, (value,)), 0)
                if kind == "x"
                else BraidSpaceElement(identity(self.n), value)
            )
            acc = self.mul(acc, factor)
        return acc

    def format(self, a: BraidSpaceElement) -> str:
        return format_composing(a)

    def presentation(self) -> str:
        gens = ", ".join(f"x{i}" for i in range(1, self.n + 1))
        rels = ", ".join(
            f"t x{i} T = {format_word(self.space.action.image(i), sep='.')}"
            for i in range(1, self.n + 1)
        )
        return (
            f"<{gens}, t | {rels}>; m = x1, l = {format_composing(self._partner)} "
            "(up to a power of m)"
        )


class ComposingSpaceGroup:
    kind = "composing"

    def __init__(self, vertex: str, n: int):
        if n < 2:
            raise InputError(f"a composing space needs n >= 2, got {n}")
        self.vertex = vertex
        self.n = n
        self._product = product_word(n)

    def describe(self) -> str:
        return f"composing space W_{self.n}"

    def identity(self) -> ComposingElement:
        return ComposingElement(identity(self.n), 0)

    def mul(self, a: ComposingElement, b: ComposingElement) -> ComposingElement:
        return cs_multiply(a, b)

    def inv(self, a: ComposingElement) -> ComposingElement:
        return cs_invert(a)

    def meridian(self) -> ComposingElement:
        return ComposingElement(identity(self.n), 1)

    def peripheral(self, z1: int, z2: int) -> ComposingElement:
        return ComposingElement(power(self._product, z2), z1)

    def peripheral_coordinates(self, g: ComposingElement) -> Optional[tuple[int, int]]:
        length = len(g.w)
        if length % self.n:
            return None
        k = length // self.n
        if g.w.letters and g.w.letters[0] < 0:
            k = -k
        if power(self._product, k) != g.w:
            return None
        return g.z, k

    def child_image(self, j: int, z1: int, z2: int) -> ComposingElement:
        return ComposingElement(power(generator_word(j, self.n), z2), z1)

    def equal(self, a: ComposingElement, b: ComposingElement) -> bool:
        return a == b

    def parse(self, text: str) -> ComposingElement:
        letters: list[int] = []
        z = 0
        for kind, value in _parse_free_tokens(text, self.n):
            if kind == "x":
                letters.append(value)
            else:
                z += value
        return ComposingElement(reduce(letters, self.n), z)

    def format(self, a: ComposingElement) -> str:
        return format_composing(a)

    def presentation(self) -> str:
        gens = ", ".join(f"x{i}" for i in range(1, self.n + 1))
        rels = ", ".join(f"[t, x{i}]" for i in range(1, self.n + 1))
        return f"<{gens}, t | {rels}>; m = t, l = {format_word(self._product, sep='.')}"


VertexGroup = Union[LeafSymbolGroup, TorusLeafGroup, BraidSpaceGroup, ComposingSpaceGroup]


# ---------------------------------------------------------------------------
# the tree of groups

@dataclass
class TreeOfGroups:
    tree: KnotTree
    groups: dict[str, VertexGroup]
    exact_torus: bool = False

    @property
    def root(self) -> str:
        return self.tree.root

    def group(self, v: str) -> VertexGroup:
        try:
            return self.groups[v]
        except KeyError:
            raise InputError(f"unknown vertex: {v}") from None

    def edges(self) -> list[Edge]:
        return self.tree.edges()

    def check_edge(self, e: Edge) -> Edge:
        parent, child = e
        if self.tree.parents.get(child) != parent:
            raise EdgeOrientationError(e)
        return e

    def edge_index(self, e: Edge) -> int:
        """j(e): position of the child among the children of the parent, from 1."""
        parent, child = self.check_edge(e)
        return self.tree.kids(parent).index(child) + 1

    def height(self, v: str) -> int:
        return height(self.tree, v)

    def height_plus(self, v: str) -> int:
        return height_plus(self.tree, v)


def build_tree_of_groups(tree: KnotTree, exact_torus: bool = False) -> TreeOfGroups:
    require_valid(tree)
    groups: dict[str, VertexGroup] = {}
    for v in tree.vertices:
        kids = tree.kids(v)
        if not kids:
            label = tree.leaves[v]
            if isinstance(label, TorusLeaf) and exact_torus:
                groups[v] = TorusLeafGroup(v, label)
            else:
                if isinstance(label, OpaqueLeaf) and not label.meridionally_tame:
                    logger.warning("leaf %s (%s) is not marked tame; fold results assume it", v, label.name)
                groups[v] = LeafSymbolGroup(v, label)
        elif len(kids) == 1:
            groups[v] = BraidSpaceGroup(v, braid_space(tree.braids[v]))
        else:
            groups[v] = ComposingSpaceGroup(v, len(kids))
    logger.debug("built tree of groups with %d vertices", len(groups))
    return TreeOfGroups(tree, groups, exact_torus)


def alpha_map(tog: TreeOfGroups, e: Edge, z1: int, z2: int) -> Any:
    """Image of m_e^z1 l_e^z2 in the parent's group."""
    parent, _ = tog.check_edge(e)
    group = tog.group(parent)
    if isinstance(group, BraidSpaceGroup):
        return group.child_image(z1, z2)
    if isinstance(group, ComposingSpaceGroup):
        return group.child_image(tog.edge_index(e), z1, z2)
    raise EdgeOrientationError(e)


def omega_map(tog: TreeOfGroups, e: Edge, z1: int, z2: int) -> Any:
    """Image of m_e^z1 l_e^z2 in the child's group: m_w^z1 l_w^z2."""
    _, child = tog.check_edge(e)
    return tog.group(child).peripheral(z1, z2)


def export_presentation(tog: TreeOfGroups) -> str:
    lines = []
    for v in tog.tree.vertices:
        group = tog.group(v)
        lines.append(f"vertex {v} [{group.describe()}]: {group.presentation()}")
    for parent, child in tog.edges():
        e = (parent, child)
        top, bottom = tog.group(parent), tog.group(child)
        lines.append(
            f"edge {parent}>{child} j={tog.edge_index(e)}: "
            f"alpha(m) = {top.format(alpha_map(tog, e, 1, 0))}, "
            f"alpha(l) = {top.format(alpha_map(tog, e, 0, 1))}; "
            f"omega(m) = {bottom.format(omega_map(tog, e, 1, 0))}, "
            f"omega(l) = {bottom.format(omega_map(tog, e, 0, 1))}"
        )
    return "\n".join(lines)
