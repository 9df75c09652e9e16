"""Exact arithmetic in the torus knot group <u, v | u^p = v^q>.

Elements are kept in the amalgam normal form: a power of the central element
c = u^p = v^q followed by strictly alternating syllables u^a (0 < a < p) and
v^b (0 < b < q).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional

from bridgefold.errors import InputError


_SYLLABLE_RE = re.compile(r"^([uvc])(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class TorusElement:
    p: int
    q: int
    center: int = 0
    syllables: tuple[tuple[str, int], ...] = ()

    @property
    def is_identity(self) -> bool:
        return self.center == 0 and not self.syllables

    @property
    def is_central(self) -> bool:
        return not self.syllables

    def __mul__(self, other: "TorusElement") -> "TorusElement":
        return torus_multiply(self, other)

    def __invert__(self) -> "TorusElement":
        return torus_invert(self)

    def __pow__(self, k: int) -> "TorusElement":
        return torus_power(self, k)

    def __str__(self) -> str:
        return format_torus(self)


def check_torus_type(p: int, q: int) -> None:
    if not (p > q >= 2 and gcd(p, q) == 1):
        raise InputError(f"torus type ({p}, {q}) needs p > q >= 2 and gcd(p, q) = 1")


def _order(gen: str, p: int, q: int) -> int:
    return p if gen == "u" else q


def torus_normal_form(
    syllables: Iterable[tuple[str, int]],
    p: int,
    q: int,
    center: int = 0,
) -> TorusElement:
    check_torus_type(p, q)
    stack: list[tuple[str, int]] = []
    for gen, exp in syllables:
        if gen == "c":
            center += exp
            continue
        if gen not in ("u", "v"):
            raise InputError(f"unknown torus generator: {gen}")
        if stack and stack[-1][0] == gen:
            exp += stack.pop()[1]
        carry, rest = divmod(exp, _order(gen, p, q))
        center += carry
        if rest:
            stack.append((gen, rest))
    return TorusElement(p, q, center, tuple(stack))


def torus_identity(p: int, q: int) -> TorusElement:
    return TorusElement(p, q)


def _same_type(a: TorusElement, b: TorusElement) -> None:
    if (a.p, a.q) != (b.p, b.q):
        raise InputError(f"torus types differ: ({a.p},{a.q}) vs ({b.p},{b.q})")


def torus_multiply(a: TorusElement, b: TorusElement) -> TorusElement:
    _same_type(a, b)
    return torus_normal_form(a.syllables + b.syllables, a.p, a.q, a.center + b.center)


def torus_invert(a: TorusElement) -> TorusElement:
    return torus_normal_form(
        [(gen, -exp) for gen, exp in reversed(a.syllables)], a.p, a.q, -a.center
    )


def torus_power(a: TorusElement, k: int) -> TorusElement:
    base = a if k >= 0 else torus_invert(a)
    acc = torus_identity(a.p, a.q)
    for _ in range(abs(k)):
        acc = torus_multiply(acc, base)
    return acc


def torus_equal(a: TorusElement, b: TorusElement) -> bool:
    return (a.p, a.q, a.center, a.syllables) == (b.p, b.q, b.center, b.syllables)


def abelianize(a: TorusElement) -> int:
    """Image under u -> q, v -> p (so c -> pq)."""
    total = a.center * a.p * a.q
    for gen, exp in a.syllables:
        total += exp * (a.q if gen == "u" else a.p)
    return total


def meridian_exponents(p: int, q: int) -> tuple[int, int]:
    """(a, b) with a*q + b*p = 1 and |a| minimal, ties to positive a."""
    check_torus_type(p, q)
    a0 = pow(q, -1, p)
    a = min((a0, a0 - p), key=lambda x: (abs(x), -x))
    b = (1 - a * q) // p
    return a, b


def torus_meridian(p: int, q: int) -> TorusElement:
    a, b = meridian_exponents(p, q)
    return torus_normal_form([("u", a), ("v", b)], p, q)


def torus_longitude(p: int, q: int) -> TorusElement:
    m = torus_meridian(p, q)
    return torus_multiply(TorusElement(p, q, 1), torus_power(m, -p * q))


def peripheral_coordinates(g: TorusElement) -> Optional[tuple[int, int]]:
    """Return (j, k) with g = c^j * m^k, or None when g is not in <m, c>."""
    length = len(g.syllables)
    if length % 2:
        return None
    m = torus_meridian(g.p, g.q)
    for k in sorted({length // 2, -(length // 2)}, reverse=True):
        rest = torus_multiply(g, torus_power(m, -k))
        if rest.is_central:
            return rest.center, k
    return None


def edge_coordinates(g: TorusElement) -> Optional[tuple[int, int]]:
    """Return (z1, z2) with g = m^z1 * l^z2, or None outside the peripheral subgroup."""
    found = peripheral_coordinates(g)
    if found is None:
        return None
    j, k = found
    return k + g.p * g.q * j, j


def parse_torus(text: str, p: int, q: int) -> TorusElement:
    syllables: list[tuple[str, int]] = []
    for token in (text or "").replace(".", " ").split():
        if token == "1":
            continue
        m = _SYLLABLE_RE.match(token)
        if not m:
            raise InputError(f"bad torus token: {token!r}")
        syllables.append((m.group(1), int(m.group(2)) if m.group(2) is not None else 1))
    return torus_normal_form(syllables, p, q)


def format_torus(a: TorusElement) -> str:
    parts = []
    if a.center:
        parts.append("c" if a.center == 1 else f"c^{a.center}")
    parts.extend(gen if exp == 1 else f"{gen}^{exp}" for gen, exp in a.syllables)
    return ".".join(parts) or "1"
