from __future__ import annotations

from typing import Optional, Sequence


class BridgefoldError(Exception):
    pass


class InputError(BridgefoldError, ValueError):
    """Raised for anything the caller supplied wrongly (exit code 2 in the CLI)."""


class RankMismatchError(InputError):
    def __init__(self, left: int, right: int):
        super().__init__(f"rank mismatch: {left} != {right}")
        self.left = left
        self.right = right


class GeneratorRangeError(InputError):
    def __init__(self, index: int, limit: int):
        super().__init__(f"generator index {index} outside 1..{limit}")
        self.index = index
        self.limit = limit


class TreeSyntaxError(InputError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class TreeValidationError(InputError):
    def __init__(self, violations: Sequence[str]):
        super().__init__("invalid knot tree: " + "; ".join(violations))
        self.violations = list(violations)


class PathFormatError(InputError):
    def __init__(self, message: str, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line = line


class NotAConjugateError(InputError):
    def __init__(self, word: str):
        super().__init__(f"not a conjugate of a generator: {word or '1'}")
        self.word = word


class EdgeOrientationError(InputError):
    def __init__(self, edge: object):
        super().__init__(f"not an oriented edge of the tree: {edge!r}")
        self.edge = edge


class LabelMismatchError(InputError):
    def __init__(self, first: int, second: int):
        super().__init__(f"edges {first} and {second} carry different labels")
        self.edges = (first, second)


class UndecidableAtLeafError(InputError):
    def __init__(self, vertex: object, detail: str, move: str = "", edges: Sequence[int] = ()):
        where = f" during {move} on edges {','.join(str(e) for e in edges)}" if move else ""
        super().__init__(f"undecidable at leaf vertex {vertex}{where}: {detail}")
        self.vertex = vertex
        self.detail = detail
        self.move = move
        self.edges = tuple(edges)


class InconsistencyError(BridgefoldError, RuntimeError):
    """An internal consistency check failed (exit code 1 in the CLI)."""


class GuardViolationError(BridgefoldError, RuntimeError):
    def __init__(self, move: str, reason: str):
        super().__init__(f"{move} refused: {reason}")
        self.move = move
        self.reason = reason
