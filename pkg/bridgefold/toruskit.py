"""Euler characteristic arithmetic behind the meridional tameness of torus knots.

A subgroup of the torus knot group generated by r + 1 < q + 1 elements maps onto a
finite-index subgroup of Z_p * Z_q; its cover of the orbifold S^2(oo, p, q) has
Euler characteristic 1 - r, while the index bound forces it to be at most
p·q·chi = -pq + p + q <= 1 - q.  The certificate evaluates that chain exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from bridgefold.errors import InputError


@dataclass(frozen=True)
class TorusCertificate:
    p: int
    q: int
    r: int
    chi: Fraction          # orbifold Euler characteristic -1 + 1/p + 1/q
    cover_chi: int         # 1 - r, the cover a rank r+1 subgroup would give
    lower: int             # 1 - q
    bound: int             # p·q·chi = -pq + p + q
    chain_bound: int       # 3 - 2q, bound evaluated at p = 3

    @property
    def holds(self) -> bool:
        return (
            self.cover_chi > self.lower
            and self.bound <= self.chain_bound <= self.lower
            and self.bound == self.p * self.q * self.chi
        )


def _check_pair(p: int, q: int) -> None:
    if q < 2 or p <= q:
        raise InputError(f"need p > q >= 2, got p={p}, q={q}")
    if gcd(p, q) != 1:
        raise InputError(f"p={p} and q={q} are not coprime")


def orbifold_euler(p: int, q: int) -> Fraction:
    _check_pair(p, q)
    return Fraction(-1) + Fraction(1, p) + Fraction(1, q)


def cover_euler(sheets: int, n: int) -> int:
    """Euler characteristic of a `sheets`-fold cover of a wedge of n circles."""
    if sheets < 1 or n < 1:
        raise InputError(f"need sheets >= 1 and n >= 1, got {sheets}, {n}")
    return sheets * (1 - n)


def tameness_certificate(p: int, q: int, r: int) -> TorusCertificate:
    _check_pair(p, q)
    if r < 0 or r >= q:
        raise InputError(f"r must satisfy 0 <= r < q = {q}, got {r}")
    chi = orbifold_euler(p, q)
    return TorusCertificate(
        p=p,
        q=q,
        r=r,
        chi=chi,
        cover_chi=1 - r,
        lower=1 - q,
        bound=-p * q + p + q,
        chain_bound=3 - 2 * q,
    )


def certify_torus_knot(p: int, q: int) -> list[TorusCertificate]:
    return [tameness_certificate(p, q, r) for r in range(q)]


def format_chain(cert: TorusCertificate) -> str:
    verdict = "contradiction" if cert.holds else "FAILS"
    return (
        f"r={cert.r:<3} 1-r = {cert.cover_chi:>5} > {cert.lower:>5} = 1-q   "
        f"pq*chi = {cert.bound:>6} <= {cert.chain_bound:>5} <= {cert.lower:>5}   {verdict}"
    )
