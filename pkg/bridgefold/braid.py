from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

from sympy.combinatorics import Permutation as SymPermutation

from bridgefold.errors import GeneratorRangeError, InconsistencyError, InputError, RankMismatchError
from bridgefold.freegroup import (
    PeripheralBasis,
    PeripheralConjugate,
    Word,
    decompose_conjugate,
    generator_word,
    identity,
    invert,
    multiply,
    peripheral_basis,
    peripheral_cycles,
    reduce,
)


logger = logging.getLogger("bridgefold.braid")

_SIGMA_RE = re.compile(r"^([sS])(\d+)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[int, ...] = ()  # signed sigma indices, s1^-1 is -1

    def __post_init__(self) -> None:
        if self.strands < 1:
            raise InputError(f"a braid needs at least one strand, got {self.strands}")
        for x in self.letters:
            if x == 0 or abs(x) >= self.strands:
                raise GeneratorRangeError(abs(x), self.strands - 1)

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if other.strands != self.strands:
            raise RankMismatchError(self.strands, other.strands)
        return BraidWord(self.strands, self.letters + other.letters)

    def __str__(self) -> str:
        return format_braid(self)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-x for x in reversed(self.letters)))


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]  # images[i-1] is the image of i

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    @property
    def size(self) -> int:
        return len(self.images)

    def to_sympy(self) -> SymPermutation:
        return SymPermutation([x - 1 for x in self.images])

    def power(self, r: int) -> "Permutation":
        return _from_sympy(self.to_sympy() ** r)


@dataclass(frozen=True)
class FreeAutomorphism:
    n: int
    images: tuple[Word, ...]

    def image(self, i: int) -> Word:
        return self.images[i - 1]

    def __call__(self, w: Word) -> Word:
        if w.ambient_rank != self.n:
            raise RankMismatchError(w.ambient_rank, self.n)
        letters: list[int] = []
        for x in w.letters:
            img = self.images[abs(x) - 1]
            letters.extend(img.letters if x > 0 else invert(img).letters)
        return reduce(letters, self.n)


@dataclass(frozen=True)
class BraidSpaceElement:
    w: Word
    r: int = 0

    def __str__(self) -> str:
        word = "" if self.w.is_identity else str(self.w).replace(" ", ".")
        if self.r == 0:
            return word or "1"
        tpart = "t" if self.r == 1 else f"t^{self.r}"
        return f"{word}.{tpart}" if word else tpart


@dataclass(frozen=True)
class NormalClosure:
    ambient_rank: int


def _from_sympy(perm: SymPermutation) -> Permutation:
    return Permutation(tuple(x + 1 for x in perm.array_form))


def parse_braid(text: str, strands: int) -> BraidWord:
    letters: list[int] = []
    for token in (text or "").replace(".", " ").split():
        if token == "1":
            continue
        m = _SIGMA_RE.match(token)
        if not m:
            raise InputError(f"bad braid token: {token!r}")
        index = int(m.group(2))
        exp = int(m.group(3)) if m.group(3) is not None else 1
        sign = 1 if m.group(1) == "s" else -1
        letters.extend([sign * index if exp > 0 else -sign * index] * abs(exp))
    return BraidWord(strands, tuple(letters))


def format_braid(beta: BraidWord) -> str:
    if not beta.letters:
        return "1"
    return " ".join(f"s{x}" if x > 0 else f"s{-x}^-1" for x in beta.letters)


def permutation(beta: BraidWord) -> Permutation:
    n = beta.strands
    perm = SymPermutation(list(range(n)))
    # sympy multiplies left to right, so feeding the letters backwards gives s_i1 o ... o s_ik
    for x in reversed(beta.letters):
        i = abs(x)
        perm = perm * SymPermutation([[i - 1, i]], size=n)
    return _from_sympy(perm)


def is_knot_pattern(beta: BraidWord) -> bool:
    if beta.strands < 2:
        return False
    return permutation(beta).to_sympy().cycles == 1


def identity_automorphism(n: int) -> FreeAutomorphism:
    return FreeAutomorphism(n, tuple(generator_word(i, n) for i in range(1, n + 1)))


def _letter_action(x: int, n: int) -> FreeAutomorphism:
    i = abs(x)
    images = list(identity_automorphism(n).images)
    if x > 0:
        images[i - 1] = Word(n, (i, i + 1, -i))
        images[i] = Word(n, (i,))
    else:
        images[i - 1] = Word(n, (i + 1,))
        images[i] = Word(n, (-(i + 1), i, i + 1))
    return FreeAutomorphism(n, tuple(images))


def compose(first: FreeAutomorphism, second: FreeAutomorphism) -> FreeAutomorphism:
    """The automorphism that applies `first`, then `second`."""
    if first.n != second.n:
        raise RankMismatchError(first.n, second.n)
    return FreeAutomorphism(first.n, tuple(second(img) for img in first.images))


def artin(beta: BraidWord) -> FreeAutomorphism:
    n = beta.strands
    phi = identity_automorphism(n)
    for x in reversed(beta.letters):
        phi = compose(phi, _letter_action(x, n))
    return phi


def decompose_image(phi: FreeAutomorphism, i: int) -> tuple[Word, int]:
    if i < 1 or i > phi.n:
        raise GeneratorRangeError(i, phi.n)
    return decompose_conjugate(phi.image(i))


@dataclass(frozen=True)
class BraidSpace:
    """The group F_n x| <t> of a braid vertex, t acting by the Artin automorphism."""

    braid: BraidWord
    action: FreeAutomorphism
    inverse_action: FreeAutomorphism

    @property
    def n(self) -> int:
        return self.braid.strands

    def identity(self) -> BraidSpaceElement:
        return BraidSpaceElement(identity(self.n), 0)

    def act(self, w: Word, r: int) -> Word:
        phi = self.action if r >= 0 else self.inverse_action
        for _ in range(abs(r)):
            w = phi(w)
        return w

    def multiply(self, g: BraidSpaceElement, h: BraidSpaceElement) -> BraidSpaceElement:
        return BraidSpaceElement(multiply(g.w, self.act(h.w, g.r)), g.r + h.r)

    def invert(self, g: BraidSpaceElement) -> BraidSpaceElement:
        return BraidSpaceElement(self.act(invert(g.w), -g.r), -g.r)

    def power(self, g: BraidSpaceElement, k: int) -> BraidSpaceElement:
        base = g if k >= 0 else self.invert(g)
        acc = self.identity()
        for _ in range(abs(k)):
            acc = self.multiply(acc, base)
        return acc


@lru_cache(maxsize=256)
def braid_space(beta: BraidWord) -> BraidSpace:
    return BraidSpace(beta, artin(beta), artin(beta.inverse()))


def bs_multiply(g: BraidSpaceElement, h: BraidSpaceElement, space: BraidSpace) -> BraidSpaceElement:
    return space.multiply(g, h)


def bs_invert(g: BraidSpaceElement, space: BraidSpace) -> BraidSpaceElement:
    return space.invert(g)


def rewrite_meridian_conjugate(g: BraidSpaceElement, space: BraidSpace) -> PeripheralConjugate:
    """Write g·x1·g^-1 as w·x_i·w^-1 with w in F_n; i is tau^r(1)."""
    twisted = space.act(generator_word(1, space.n), g.r)
    conj, target = decompose_conjugate(twisted)
    return PeripheralConjugate(multiply(g.w, conj), target)


def classify_meridional(
    S: Sequence[BraidSpaceElement],
    space: BraidSpace,
) -> Union[NormalClosure, PeripheralBasis]:
    return classify_conjugates([rewrite_meridian_conjugate(g, space) for g in S], space)


def classify_conjugates(
    conjugates: Sequence[PeripheralConjugate],
    space: BraidSpace,
) -> Union[NormalClosure, PeripheralBasis]:
    """Same as classify_meridional for meridians already written as w·x_i·w^-1 in F_n."""
    result = peripheral_basis(conjugates, space.n)
    if not isinstance(result, PeripheralBasis):
        return NormalClosure(space.n)
    if peripheral_cycles(result.graph, space.n + 1):
        raise InconsistencyError("a proper meridional subgroup met the boundary class x_{n+1}")
    return result


def peripheral_partner(space: BraidSpace) -> BraidSpaceElement:
    """Second generator of the centralizer <x1, A^-1 t^n> of x1, where phi^n(x1) = A x1 A^-1."""
    n = space.n
    conj, target = decompose_conjugate(space.act(generator_word(1, n), n))
    if target != 1:
        raise InputError(f"braid {space.braid} does not close to a knot")
    return BraidSpaceElement(invert(conj), n)
