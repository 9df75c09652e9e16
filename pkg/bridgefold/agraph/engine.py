from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from bridgefold.agraph.folds import FoldWitness, apply_fold, find_fold
from bridgefold.agraph.graph import AGraph, Complexity, complexity, is_complete, is_tame
from bridgefold.errors import GuardViolationError, InconsistencyError
from bridgefold.knot_tree import max_height


logger = logging.getLogger("bridgefold.agraph.engine")


@dataclass(frozen=True)
class FoldStep:
    move: str
    edges: tuple[int, ...]
    before: Complexity
    after: Complexity
    tame: bool
    violations: tuple[str, ...] = ()

    @property
    def decreased(self) -> bool:
        return self.after < self.before

    @property
    def flagged(self) -> bool:
        return not self.tame or not self.decreased or self.after.c1 < 0


@dataclass
class FoldTrace:
    initial: Complexity
    steps: list[FoldStep] = field(default_factory=list)
    final: Optional[AGraph] = None
    stopped_early: bool = False
    error: Optional[str] = None

    @property
    def folded(self) -> bool:
        return self.final is not None and not self.stopped_early and self.error is None

    @property
    def monotone(self) -> bool:
        return all(step.decreased for step in self.steps)

    @property
    def tame_throughout(self) -> bool:
        return all(step.tame for step in self.steps)

    @property
    def complete(self) -> bool:
        return self.folded and is_complete(self.final)

    @property
    def ok(self) -> bool:
        return self.folded and not any(step.flagged for step in self.steps)


def step_bound(G: AGraph) -> int:
    """Diagnostic cap: 4 per oriented edge plus c1 weighted by the tallest vertex."""
    c = complexity(G)
    return 4 * (2 * len(G.edges)) + max(c.c1, 0) * max_height(G.tog.tree)


def run_folds(G: AGraph, max_steps: Optional[int] = None) -> FoldTrace:
    """Fold until no IA or IIA applies, checking tameness and complexity after every move."""
    initial_violations = is_tame(G)
    if initial_violations:
        raise GuardViolationError("start", "; ".join(initial_violations))
    bound = step_bound(G) if max_steps is None else max_steps
    trace = FoldTrace(initial=complexity(G))
    current = G
    before = trace.initial
    while True:
        witness: Optional[FoldWitness] = find_fold(current)
        if witness is None:
            break
        if len(trace.steps) >= bound:
            trace.stopped_early = True
            logger.warning("step bound %d exceeded, stopping", bound)
            break
        try:
            current = apply_fold(current, witness)
        except (GuardViolationError, InconsistencyError) as exc:
            trace.error = str(exc)
            logger.error("%s on edges %s failed: %s", witness.move, witness.edges, exc)
            break
        after = complexity(current)
        violations = tuple(is_tame(current))
        step = FoldStep(witness.move, witness.edges, before, after, not violations, violations)
        trace.steps.append(step)
        logger.debug("%s %s: %s -> %s", step.move, step.edges, before, after)
        if step.flagged:
            logger.warning(
                "step %d (%s %s) flagged: tame=%s, %s -> %s%s",
                len(trace.steps), step.move, step.edges, step.tame, before, after,
                "; " + "; ".join(violations) if violations else "",
            )
        before = after
    trace.final = current
    logger.info(
        "fold run: %d steps, %s -> %s, complete=%s",
        len(trace.steps), trace.initial, before, trace.complete,
    )
    return trace


def format_trace(trace: FoldTrace) -> str:
    lines = []
    for step in trace.steps:
        lines.append("\t".join([
            step.move,
            ",".join(str(f) for f in step.edges),
            str(step.before.c1), str(step.after.c1),
            str(step.before.c2), str(step.after.c2),
            "tame" if step.tame else "NOT-TAME",
        ]))
    return "\n".join(lines)
