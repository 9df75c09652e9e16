from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import networkx as nx

from bridgefold.errors import (
    GeneratorRangeError,
    InconsistencyError,
    InputError,
    NotAConjugateError,
    RankMismatchError,
)


logger = logging.getLogger("bridgefold.freegroup")

RawLetter = Union[int, tuple[int, int]]

_TOKEN_RE = re.compile(r"^([xX])(\d+)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class Word:
    """Freely reduced word in F_n; letters are signed generator indices (x3 is 3, X3 is -3)."""

    ambient_rank: int
    letters: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, k: int) -> "Word":
        return power(self, k)

    def __str__(self) -> str:
        return format_word(self)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def pairs(self) -> list[tuple[int, int]]:
        return [(abs(x), 1 if x > 0 else -1) for x in self.letters]


@dataclass(frozen=True)
class PeripheralConjugate:
    conjugator: Word
    index: int  # 1..n+1

    def element(self) -> Word:
        n = self.conjugator.ambient_rank
        return conjugate(self.conjugator, generator_word(self.index, n))


@dataclass(frozen=True)
class WholeGroup:
    ambient_rank: int


@dataclass(frozen=True)
class PeripheralBasis:
    basis: tuple[PeripheralConjugate, ...]
    sources: tuple[Optional[int], ...]  # position in the input set, None if read off the graph
    graph: "SubgroupGraph"

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def indices(self) -> set[int]:
        return {p.index for p in self.basis}


PeripheralBasisResult = Union[WholeGroup, PeripheralBasis]


def _cancel(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def _signed(letter: RawLetter) -> int:
    if isinstance(letter, tuple):
        index, sign = letter
        if sign not in (1, -1):
            raise InputError(f"letter sign must be +1 or -1, got {sign}")
        return index * sign
    return int(letter)


def reduce(letters: Iterable[RawLetter], n: int) -> Word:
    signed = [_signed(x) for x in letters]
    for x in signed:
        if x == 0 or abs(x) > n:
            raise GeneratorRangeError(abs(x), n)
    return Word(n, _cancel(signed))


def identity(n: int) -> Word:
    return Word(n, ())


def _same_rank(a: Word, b: Word) -> None:
    if a.ambient_rank != b.ambient_rank:
        raise RankMismatchError(a.ambient_rank, b.ambient_rank)


def multiply(a: Word, b: Word) -> Word:
    _same_rank(a, b)
    return Word(a.ambient_rank, _cancel(a.letters + b.letters))


def invert(a: Word) -> Word:
    return Word(a.ambient_rank, tuple(-x for x in reversed(a.letters)))


def conjugate(g: Word, a: Word) -> Word:
    _same_rank(g, a)
    return Word(g.ambient_rank, _cancel(g.letters + a.letters + invert(g).letters))


def power(w: Word, k: int) -> Word:
    base = w if k >= 0 else invert(w)
    return Word(w.ambient_rank, _cancel(base.letters * abs(k)))


def generator_word(i: int, n: int) -> Word:
    if i < 1 or i > n + 1:
        raise GeneratorRangeError(i, n + 1)
    if i <= n:
        return Word(n, (i,))
    # x_{n+1} = (x_1 ... x_n)^-1 from the relator x_1 ... x_{n+1}
    return Word(n, tuple(-j for j in range(n, 0, -1)))


def product_word(n: int) -> Word:
    return Word(n, tuple(range(1, n + 1)))


def parse_word(text: str, n: int) -> Word:
    """Parse `x3 X1 x2` (also `x1.X2`, `x1^3`); `1` or an empty string is the identity."""
    raw = (text or "").replace(".", " ").split()
    letters: list[int] = []
    for token in raw:
        if token == "1":
            continue
        m = _TOKEN_RE.match(token)
        if not m:
            raise InputError(f"bad word token: {token!r}")
        index = int(m.group(2))
        exp = int(m.group(3)) if m.group(3) is not None else 1
        sign = 1 if m.group(1) == "x" else -1
        letters.extend([sign * index if exp > 0 else -sign * index] * abs(exp))
    return reduce(letters, n)


def format_word(w: Word, sep: str = " ") -> str:
    if not w.letters:
        return "1"
    return sep.join(f"x{x}" if x > 0 else f"X{-x}" for x in w.letters)


def decompose_conjugate(w: Word) -> tuple[Word, int]:
    """Split a reduced conjugate A·x_j·A^-1 into (A, j) with A as short as possible."""
    letters = w.letters
    k = 0
    while 2 * k + 1 < len(letters) and letters[k] == -letters[-1 - k]:
        k += 1
    if len(letters) != 2 * k + 1 or letters[k] < 0:
        raise NotAConjugateError(format_word(w))
    return Word(w.ambient_rank, letters[:k]), letters[k]


@dataclass(frozen=True)
class SubgroupGraph:
    ambient_rank: int
    base: int
    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int, int]]  # (src, label, dst)

    @cached_property
    def out_edges(self) -> dict[int, dict[int, int]]:
        table: dict[int, dict[int, int]] = {v: {} for v in self.vertices}
        for src, label, dst in self.edges:
            table[src][label] = dst
        return table

    @cached_property
    def in_edges(self) -> dict[int, dict[int, int]]:
        table: dict[int, dict[int, int]] = {v: {} for v in self.vertices}
        for src, label, dst in self.edges:
            table[dst][label] = src
        return table

    def step(self, vertex: int, letter: int) -> Optional[int]:
        if letter > 0:
            return self.out_edges[vertex].get(letter)
        return self.in_edges[vertex].get(-letter)

    def walk(self, start: int, letters: Sequence[int]) -> Optional[int]:
        cur: Optional[int] = start
        for x in letters:
            if cur is None:
                return None
            cur = self.step(cur, x)
        return cur


class _FoldingGraph:
    """Mutable labelled graph kept folded after every insertion."""

    def __init__(self, n: int):
        self.n = n
        self._next = 1
        self._classes = nx.utils.UnionFind([0])
        self.out: dict[int, dict[int, int]] = {0: {}}
        self.inc: dict[int, dict[int, int]] = {0: {}}

    @property
    def base(self) -> int:
        return self._classes[0]

    def find(self, v: int) -> int:
        return self._classes[v]

    def _new_vertex(self) -> int:
        v = self._next
        self._next += 1
        self.out[v] = {}
        self.inc[v] = {}
        return v

    def _merge(self, x: int, y: int, pending: list[tuple[int, int, int]]) -> None:
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        self._classes.union(x, y)
        keep = self.find(x)
        drop = y if keep == x else x
        for label, dst in self.out.pop(drop).items():
            self.inc[dst].pop(label, None)
            pending.append((keep, label, dst))
        for label, src in self.inc.pop(drop).items():
            if src in self.out:
                self.out[src].pop(label, None)
            pending.append((src, label, keep))

    def _drain(self, pending: list[tuple[int, int, int]]) -> None:
        while pending:
            src, label, dst = pending.pop()
            src, dst = self.find(src), self.find(dst)
            cur = self.out[src].get(label)
            if cur is not None:
                if cur != dst:
                    self._merge(cur, dst, pending)
                continue
            cur = self.inc[dst].get(label)
            if cur is not None:
                if cur != src:
                    self._merge(cur, src, pending)
                continue
            self.out[src][label] = dst
            self.inc[dst][label] = src

    def identify(self, x: int, y: int) -> None:
        pending: list[tuple[int, int, int]] = []
        self._merge(x, y, pending)
        self._drain(pending)

    def attach_path(self, start: int, letters: Sequence[int]) -> int:
        cur = self.find(start)
        for x in letters:
            table = self.out if x > 0 else self.inc
            nxt = table[cur].get(abs(x))
            if nxt is None:
                nxt = self._new_vertex()
                if x > 0:
                    self.out[cur][x] = nxt
                    self.inc[nxt][x] = cur
                else:
                    self.out[nxt][-x] = cur
                    self.inc[cur][-x] = nxt
            cur = nxt
        return cur

    def attach_loop(self, letters: Sequence[int]) -> None:
        end = self.attach_path(self.base, letters)
        self.identify(end, self.base)

    def step(self, vertex: int, letter: int) -> Optional[int]:
        table = self.out if letter > 0 else self.inc
        return table[vertex].get(abs(letter))

    def prune(self) -> None:
        changed = True
        while changed:
            changed = False
            for v in list(self.out):
                if v == self.base:
                    continue
                if len(self.out[v]) + len(self.inc[v]) <= 1:
                    for label, dst in self.out.pop(v).items():
                        self.inc[dst].pop(label, None)
                    for label, src in self.inc.pop(v).items():
                        self.out[src].pop(label, None)
                    changed = True

    def freeze(self) -> SubgroupGraph:
        # canonical numbering: breadth first from the base, out-labels then in-labels
        order = {self.base: 0}
        queue = deque([self.base])
        while queue:
            v = queue.popleft()
            nbrs = [self.out[v][k] for k in sorted(self.out[v])]
            nbrs += [self.inc[v][k] for k in sorted(self.inc[v])]
            for w in nbrs:
                if w not in order:
                    order[w] = len(order)
                    queue.append(w)
        edges = frozenset(
            (order[src], label, order[dst])
            for src, table in self.out.items()
            if src in order
            for label, dst in table.items()
        )
        return SubgroupGraph(self.n, 0, tuple(range(len(order))), edges)


def _check_words(words: Iterable[Word], n: int) -> list[Word]:
    result = list(words)
    for w in result:
        if w.ambient_rank != n:
            raise RankMismatchError(w.ambient_rank, n)
    return result


def build_subgroup_graph(S: Sequence[Word], n: int) -> SubgroupGraph:
    builder = _FoldingGraph(n)
    for w in _check_words(S, n):
        if w.letters:
            builder.attach_loop(w.letters)
    builder.prune()
    return builder.freeze()


def contains(G: SubgroupGraph, w: Word) -> bool:
    return G.walk(G.base, w.letters) == G.base


def rank(G: SubgroupGraph) -> int:
    return len(G.edges) - len(G.vertices) + 1


def is_whole_group(G: SubgroupGraph, n: int) -> bool:
    if len(G.vertices) != 1 or len(G.edges) != n:
        return False
    return {label for _, label, _ in G.edges} == set(range(1, n + 1))


def meets_peripheral(G: SubgroupGraph, g: Word, i: int) -> bool:
    """True iff g·x_i·g^-1 lies in the subgroup of G."""
    end = G.walk(G.base, g.letters)
    if end is None:
        return False
    return G.walk(end, generator_word(i, G.ambient_rank).letters) == end


def export_graph(G: SubgroupGraph) -> str:
    lines = [f"base {G.base}"]
    lines.extend(f"{src} {label} {dst}" for src, label, dst in sorted(G.edges))
    return "\n".join(lines)


def _spanning_paths(G: SubgroupGraph) -> dict[int, tuple[int, ...]]:
    paths: dict[int, tuple[int, ...]] = {G.base: ()}
    queue = deque([G.base])
    while queue:
        v = queue.popleft()
        steps = [(k, G.out_edges[v][k]) for k in sorted(G.out_edges[v])]
        steps += [(-k, G.in_edges[v][k]) for k in sorted(G.in_edges[v])]
        for letter, w in steps:
            if w not in paths:
                paths[w] = paths[v] + (letter,)
                queue.append(w)
    return paths


@dataclass(frozen=True)
class _Cycle:
    anchors: tuple[int, ...]  # vertices where the cyclic word starts over
    power: int


def _trace_cycles(G: SubgroupGraph, i: int) -> list[_Cycle]:
    word = generator_word(i, G.ambient_rank).letters
    seen: set[int] = set()
    cycles: list[_Cycle] = []
    for start in G.vertices:
        if start in seen:
            continue
        anchors = [start]
        cur: Optional[int] = start
        closed = False
        # states are vertex x position and reading is injective, so |V| rounds suffice
        for _ in range(len(G.vertices)):
            cur = G.walk(cur, word)
            if cur is None:
                break
            if cur == start:
                closed = True
                break
            anchors.append(cur)
        if closed:
            seen.update(anchors)
            cycles.append(_Cycle(tuple(anchors), len(anchors)))
    return cycles


def peripheral_cycles(G: SubgroupGraph, i: int) -> list[tuple[int, int]]:
    generator_word(i, G.ambient_rank)
    paths = _spanning_paths(G)
    result = []
    for cycle in _trace_cycles(G, i):
        rep = min(cycle.anchors, key=lambda v: (len(paths[v]), v))
        result.append((rep, cycle.power))
    return sorted(result)


def peripheral_basis(S: Sequence[PeripheralConjugate], n: int) -> PeripheralBasisResult:
    for p in S:
        if p.conjugator.ambient_rank != n:
            raise RankMismatchError(p.conjugator.ambient_rank, n)
        generator_word(p.index, n)
    G = build_subgroup_graph([p.element() for p in S], n)
    if is_whole_group(G, n):
        return WholeGroup(n)

    ends: list[int] = []
    for p in S:
        end = G.walk(G.base, p.conjugator.letters)
        if end is None:
            raise InconsistencyError(f"conjugator {p.conjugator} leaves the core graph")
        ends.append(end)

    paths = _spanning_paths(G)
    basis: list[PeripheralConjugate] = []
    sources: list[Optional[int]] = []
    for i in range(1, n + 2):
        for cycle in _trace_cycles(G, i):
            if cycle.power != 1:
                continue
            anchor = cycle.anchors[0]
            hit = next((k for k, p in enumerate(S) if p.index == i and ends[k] == anchor), None)
            if hit is not None:
                basis.append(PeripheralConjugate(S[hit].conjugator, i))
            else:
                basis.append(PeripheralConjugate(reduce(paths[anchor], n), i))
            sources.append(hit)

    if len(basis) != rank(G):
        raise InconsistencyError(
            f"found {len(basis)} peripheral cycles but the subgroup has rank {rank(G)}; "
            "the input is not a set of peripheral conjugates"
        )
    logger.debug("peripheral basis of %d conjugates has rank %d", len(S), len(basis))
    return PeripheralBasis(tuple(basis), tuple(sources), G)


def double_coset_exponent(
    subgroup: Sequence[Word],
    left: Word,
    cyclic: Word,
    target: Word,
) -> Optional[int]:
    """Return k with target in H·left·cyclic^k (smallest |k|, positive on ties), or None.

    `cyclic` must be cyclically reduced.
    """
    n = left.ambient_rank
    builder = _FoldingGraph(n)
    for w in _check_words(subgroup, n):
        if w.letters:
            builder.attach_loop(w.letters)
    start = builder.attach_path(builder.base, left.letters)
    goal = builder.attach_path(builder.base, target.letters)
    if start == goal:
        return 0
    if not cyclic.letters:
        return None

    size = len(builder.out)
    found: list[int] = []
    for sign, word in ((1, cyclic.letters), (-1, invert(cyclic).letters)):
        cur: Optional[int] = start
        for k in range(1, size + 1):
            for x in word:
                cur = builder.step(cur, x) if cur is not None else None
            if cur is None or cur == start:
                break
            if cur == goal:
                found.append(sign * k)
                break
    if not found:
        return None
    return min(found, key=lambda k: (abs(k), -k))
