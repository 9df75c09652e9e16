from __future__ import annotations

import random
from itertools import count

import pytest
from sympy.combinatorics import Permutation, PermutationGroup

from bridgefold.agraph import AGraph, BEdge, BVertex
from bridgefold.agraph.states import LeafFull, MeridionalCount, Product, ProductMember
from bridgefold.braid import BraidSpaceElement, BraidWord, NormalClosure
from bridgefold.freegroup import PeripheralConjugate, Word, identity, invert, multiply, parse_word, reduce
from bridgefold.graph_of_groups import ComposingElement, LeafWord, build_tree_of_groups
from bridgefold.knot_tree import KnotTree, OpaqueLeaf, TorusLeaf
from bridgefold.tree_dsl import parse_tree


TORUS_TYPES = [(3, 2), (5, 2), (4, 3), (5, 3), (7, 2), (7, 3)]

MAX_DEPTH = 5
MAX_FANOUT = 4
MAX_STRANDS = 5


def random_word(rng: random.Random, n: int, max_len: int) -> Word:
    letters = [rng.choice([1, -1]) * rng.randint(1, n) for _ in range(rng.randint(0, max_len))]
    return reduce(letters, n)


def random_conjugates(rng: random.Random, n: int, k: int, max_len: int) -> list[PeripheralConjugate]:
    return [PeripheralConjugate(random_word(rng, n, max_len), rng.randint(1, n + 1)) for _ in range(k)]


def products_up_to(gens: list[Word], n: int, factors: int) -> set[Word]:
    """Every product of at most `factors` elements of gens and their inverses."""
    letters = list(gens) + [invert(g) for g in gens]
    found = {identity(n)}
    frontier = {identity(n)}
    for _ in range(factors):
        frontier = {multiply(a, g) for a in frontier for g in letters} - found
        found |= frontier
    return found


def permutation_image(w: Word, images: list[Permutation], degree: int) -> Permutation:
    result = Permutation(list(range(degree)))
    for x in w.letters:
        p = images[abs(x) - 1]
        result = result * (p if x > 0 else ~p)
    return result


def separated_by_permutations(
    rng: random.Random, gens: list[Word], w: Word, n: int, trials: int = 8, degree: int = 5
) -> bool:
    """True when some map F_n -> S_degree sends w outside the image of <gens>, so w is not in <gens>."""
    for _ in range(trials):
        images = [Permutation(rng.sample(range(degree), degree)) for _ in range(n)]
        group = PermutationGroup([permutation_image(g, images, degree) for g in gens])
        if not group.contains(permutation_image(w, images, degree)):
            return True
    return False


def random_braid(rng: random.Random, n: int, max_len: int) -> BraidWord:
    letters = [rng.choice([1, -1]) * rng.randint(1, n - 1) for _ in range(rng.randint(0, max_len))]
    return BraidWord(n, tuple(letters))


def random_knot_braid(rng: random.Random, n: int, max_len: int = 4) -> BraidWord:
    # a conjugate of s1 s2 ... s_{n-1} always closes to a knot
    w = random_braid(rng, n, max_len)
    return w * BraidWord(n, tuple(range(1, n))) * w.inverse()


def random_tree(rng: random.Random, depth: int = MAX_DEPTH) -> KnotTree:
    ids = count()
    children: dict[str, tuple[str, ...]] = {}
    leaves: dict = {}
    braids: dict = {}

    def grow(level: int) -> str:
        vid = f"v{next(ids)}"
        kind = "leaf" if level >= depth else rng.choice(["leaf", "leaf", "sat", "sum"])
        if kind == "leaf":
            if rng.random() < 0.8:
                leaves[vid] = TorusLeaf(*rng.choice(TORUS_TYPES))
            else:
                leaves[vid] = OpaqueLeaf("k", rng.randint(2, 4), True)
        elif kind == "sat":
            braids[vid] = random_knot_braid(rng, rng.randint(2, MAX_STRANDS))
            children[vid] = (grow(level + 1),)
        else:
            children[vid] = tuple(grow(level + 1) for _ in range(rng.randint(2, MAX_FANOUT)))
        return vid

    root = grow(0)
    return KnotTree(root=root, children=children, leaves=leaves, braids=braids)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture
def trefoil_sum_exact():
    return build_tree_of_groups(parse_tree("sum(torus(3,2), torus(3,2))"), exact_torus=True)


@pytest.fixture
def satellite_tree():
    return parse_tree('sat(braid 3 "s1 s2", torus(3,2))')


@pytest.fixture
def normal_closure_graph() -> AGraph:
    """Two leaf vertices hanging off a braid vertex whose group is the whole normal closure."""
    tog = build_tree_of_groups(parse_tree('sat(braid 3 "s1 s2", torus(3,2))'))
    vertices = {
        0: BVertex(0, "v0", NormalClosure(3)),
        1: BVertex(1, "v1", MeridionalCount()),
        2: BVertex(2, "v1", MeridionalCount()),
    }
    edges = {
        0: BEdge(0, 0, 1, ("v0", "v1"), BraidSpaceElement(identity(3), 0), LeafWord()),
        1: BEdge(1, 0, 2, ("v0", "v1"), BraidSpaceElement(parse_word("x2", 3), 0), LeafWord()),
    }
    return AGraph(tog, vertices, edges, 0)


@pytest.fixture
def product_graph() -> AGraph:
    """A composing root with one full summand and a second, trivial edge to the same summand."""
    tog = build_tree_of_groups(parse_tree("sum(torus(3,2), torus(5,2))"))
    one = ComposingElement(identity(2))
    vertices = {
        0: BVertex(0, "v0", Product((ProductMember(0, identity(2), 1),))),
        1: BVertex(1, "v1", LeafFull()),
        2: BVertex(2, "v1", MeridionalCount()),
    }
    edges = {
        0: BEdge(0, 0, 1, ("v0", "v1"), one, LeafWord(), "full"),
        1: BEdge(1, 0, 2, ("v0", "v1"), one, LeafWord()),
    }
    return AGraph(tog, vertices, edges, 0)


@pytest.fixture
def twin_meridian_edges() -> AGraph:
    """A normal closure over two leaves, each reached by an edge carrying the leaf's meridian."""
    tog = build_tree_of_groups(parse_tree('sat(braid 2 "s1", torus(4,3))'))
    one = BraidSpaceElement(identity(2), 0)
    vertices = {
        0: BVertex(0, "v0", NormalClosure(2)),
        1: BVertex(1, "v1", MeridionalCount((LeafWord(),))),
        2: BVertex(2, "v1", MeridionalCount((LeafWord(),))),
    }
    edges = {
        0: BEdge(0, 0, 1, ("v0", "v1"), one, LeafWord(), "meridian"),
        1: BEdge(1, 0, 2, ("v0", "v1"), one, LeafWord(), "meridian"),
    }
    return AGraph(tog, vertices, edges, 0)
