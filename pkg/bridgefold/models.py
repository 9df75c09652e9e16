from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Literal, Optional


Verdict = Literal["ok", "failed"]


@dataclass(frozen=True)
class BridgeReport:
    tree: str
    bridge: int
    recursive: int
    agreement: bool
    heights: dict[str, int]
    partition: dict[str, list[str]]


@dataclass(frozen=True)
class StallingsReport:
    rank: int  # ambient rank n
    whole_group: bool
    basis: list[dict[str, Any]] = field(default_factory=list)  # conjugator, index, source
    basis_rank: Optional[int] = None
    index_sets: dict[str, list[int]] = field(default_factory=dict)  # given / basis


@dataclass(frozen=True)
class FoldVerdict:
    folded: bool
    complete: bool
    monotone: bool
    tame_throughout: bool
    stopped_early: bool
    error: Optional[str] = None


@dataclass(frozen=True)
class FoldReport:
    paths: int
    initial: list[int]  # [c1, c2]
    final: list[int]
    steps: int
    verdict: FoldVerdict
    trace: Optional[list[str]] = None  # omitted when written to a trace file
    graph: Optional[dict[str, Any]] = None


@dataclass(frozen=True)
class TorusCheckReport:
    p: int
    q: int
    orbifold_euler: Fraction
    certificates: list[dict[str, Any]]
    holds: bool


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "__dataclass_fields__"):
        data = asdict(obj)
        return {k: to_jsonable(v) for k, v in data.items()}
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj
