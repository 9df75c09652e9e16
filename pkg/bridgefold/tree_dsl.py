"""Parser for the knot-tree DSL.

    tree := leaf | sat | sum
    leaf := "torus(" int "," int ")" | "opaque(" name "," int ["," "tame"] ")"
    sat  := "sat(" "braid" int quoted-braid "," tree ")"
    sum  := "sum(" tree { "," tree } ")"

Vertices are numbered v0, v1, ... in preorder; the child order of a sum fixes j(e).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from bridgefold.braid import BraidWord, parse_braid
from bridgefold.errors import InputError, TreeSyntaxError
from bridgefold.knot_tree import KnotTree, LeafLabel, OpaqueLeaf, TorusLeaf, require_valid


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<int>-?\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_\-]*)"
    r'|(?P<string>"[^"\n]*")|(?P<punct>[(),])'
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise TreeSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup or ""
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.children: dict[str, tuple[str, ...]] = {}
        self.leaves: dict[str, LeafLabel] = {}
        self.braids: dict[str, BraidWord] = {}
        self._next_id = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _fail(self, message: str, token: Optional[Token] = None) -> TreeSyntaxError:
        token = token or self.current
        found = token.text or "end of input"
        return TreeSyntaxError(f"{message}, found {found!r}", token.line, token.column)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        token = self.current
        if token.kind != kind or (text is not None and token.text != text):
            raise self._fail(f"expected {text or kind}")
        self.pos += 1
        return token

    def accept(self, kind: str, text: str) -> bool:
        if self.current.kind == kind and self.current.text == text:
            self.pos += 1
            return True
        return False

    def new_vertex(self) -> str:
        vid = f"v{self._next_id}"
        self._next_id += 1
        return vid

    def parse_tree(self) -> str:
        head = self.current
        if head.kind != "name" or head.text not in ("torus", "opaque", "sat", "sum"):
            raise self._fail("expected torus, opaque, sat or sum")
        self.pos += 1
        self.expect("punct", "(")
        vid = self.new_vertex()
        if head.text == "torus":
            p = int(self.expect("int").text)
            self.expect("punct", ",")
            q = int(self.expect("int").text)
            self.leaves[vid] = TorusLeaf(p, q)
        elif head.text == "opaque":
            name = self.expect("name").text
            self.expect("punct", ",")
            bridge = int(self.expect("int").text)
            tame = False
            if self.accept("punct", ","):
                self.expect("name", "tame")
                tame = True
            self.leaves[vid] = OpaqueLeaf(name, bridge, tame)
        elif head.text == "sat":
            self.expect("name", "braid")
            strands_tok = self.expect("int")
            braid_tok = self.expect("string")
            try:
                self.braids[vid] = parse_braid(braid_tok.text[1:-1], int(strands_tok.text))
            except InputError as exc:
                raise TreeSyntaxError(str(exc), braid_tok.line, braid_tok.column) from exc
            self.expect("punct", ",")
            self.children[vid] = (self.parse_tree(),)
        else:
            kids = [self.parse_tree()]
            while self.accept("punct", ","):
                kids.append(self.parse_tree())
            self.children[vid] = tuple(kids)
        self.expect("punct", ")")
        return vid


def parse_tree(text: str, validate: bool = True) -> KnotTree:
    parser = _Parser(tokenize(text))
    root = parser.parse_tree()
    parser.expect("eof")
    tree = KnotTree(root=root, children=parser.children, leaves=parser.leaves, braids=parser.braids)
    if validate:
        require_valid(tree)
    return tree
