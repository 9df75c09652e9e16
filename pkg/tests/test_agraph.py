from dataclasses import replace

import pytest

from bridgefold.agraph import (
    AGraph,
    BEdge,
    BVertex,
    Complexity,
    build_initial,
    c1,
    c2,
    complete_graph,
    complexity,
    format_path,
    graph_dump,
    is_complete,
    is_full,
    is_isolated,
    is_tame,
    parse_paths,
)
from bridgefold.agraph.graph import weight
from bridgefold.agraph.states import (
    BraidFull,
    ComposingFull,
    FreeMeridional,
    LeafFull,
    MeridionalCount,
    Product,
    ProductMember,
    TrivialGroup,
    add_meridian,
    add_member,
    join_edge_states,
    join_states,
    rename_edge,
)
from bridgefold.braid import NormalClosure
from bridgefold.errors import InputError, PathFormatError
from bridgefold.freegroup import PeripheralConjugate, identity, parse_word
from bridgefold.graph_of_groups import ComposingElement, LeafWord, build_tree_of_groups
from bridgefold.knot_tree import bridge_number
from bridgefold.torus import parse_torus
from bridgefold.tree_dsl import parse_tree

from tests.conftest import random_tree


SUM_PATHS = """\
# three bridge meridians of the sum of two trefoils
a:1 e:v0>v1 a:1 e:v1>v0 a:1
a:1 e:v0>v1 a:u e:v1>v0 a:1
a:1 e:v0>v2 a:u e:v2>v0 a:1
"""

TREES = [
    "torus(3,2)",
    'sat(braid 3 "s1 s2", torus(3,2))',
    "sum(torus(3,2), torus(5,2))",
    'sum(sat(braid 3 "s2 s1^-1 s2 s2", torus(3,2)), torus(3,2))',
    'sat(braid 2 "s1^3", sum(torus(5,3), opaque(k, 4, tame)))',
    "sum(torus(7,3), torus(4,3), torus(3,2))",
]


def tog_of(text: str, exact: bool = False):
    return build_tree_of_groups(parse_tree(text), exact_torus=exact)


# ---------------------------------------------------------------------------
# paths

def test_parse_paths(trefoil_sum_exact):
    paths = parse_paths(SUM_PATHS, trefoil_sum_exact)
    assert len(paths) == 3
    second = paths[1]
    assert second.steps == (("v0", "v1"), ("v1", "v0"))
    assert second.elements[1] == parse_torus("u", 3, 2)
    assert second.elements[0] == ComposingElement(identity(2), 0)
    assert format_path(second, trefoil_sum_exact) == "a:1 e:v0>v1 a:u e:v1>v0 a:1"


def test_parse_paths_skips_blank_lines_and_comments(trefoil_sum_exact):
    assert parse_paths("\n# nothing here\n   \n", trefoil_sum_exact) == []


@pytest.mark.parametrize(
    "text, line",
    [
        ("a:1 e:v0>v1", 1),
        ("a:1 e:v1>v0 a:1", 1),
        ("\na:1 e:v0>v1 a:1 e:v1>v2 a:1", 2),
        ("a:1", 1),
        ("a:1 a:1 e:v0>v1", 1),
        ("a:y e:v0>v1 a:1 e:v1>v0 a:1", 1),
        ("a:1 e:v0v1 a:1", 1),
        ("a:1 e:v0>v1 a:1 e:v1>v0 a:1\na:1 e:v0>v9 a:1 e:v9>v0 a:1", 2),
    ],
)
def test_parse_paths_reports_the_line(trefoil_sum_exact, text, line):
    with pytest.raises(PathFormatError) as exc:
        parse_paths(text, trefoil_sum_exact)
    assert exc.value.line == line


# ---------------------------------------------------------------------------
# initial graph

def test_initial_graph_is_a_star_of_paths(trefoil_sum_exact):
    G = build_initial(trefoil_sum_exact, parse_paths(SUM_PATHS, trefoil_sum_exact))
    assert len(G.vertices) == 7
    assert len(G.edges) == 6
    assert G.base == 0
    assert is_tame(G) == []
    assert complexity(G) == Complexity(3, 24)
    assert [G.vertex(u).image for u in sorted(G.vertices)] == ["v0", "v1", "v0", "v1", "v0", "v2", "v0"]
    # terminal vertices carry <m> = <t> at the composing root
    assert G.state(2) == Product()
    assert G.state(1) == MeridionalCount()
    # the return edge is stored top-down: top label a^-1, bottom label b^-1
    back = G.edge(3)
    assert (back.top, back.bottom, back.image) == (4, 3, ("v0", "v1"))
    assert back.bottom_label == parse_torus("u^-1", 3, 2)


def test_initial_graph_of_no_paths_is_a_point(trefoil_sum_exact):
    G = build_initial(trefoil_sum_exact, [])
    assert list(G.vertices) == [0]
    assert G.edges == {}
    assert complexity(G) == Complexity(0, 0)


def test_initial_c1_counts_paths():
    tog = tog_of('sat(braid 3 "s1 s2", torus(3,2))')
    line = "a:1 e:v0>v1 a:1 e:v1>v0 a:1\n"
    for k in range(4):
        G = build_initial(tog, parse_paths(line * k, tog))
        assert c1(G) == k
        assert c2(G) == 8 * k
        assert is_tame(G) == []


def test_single_path_through_a_braid_root():
    tog = tog_of('sat(braid 2 "s1", torus(3,2))')
    G = build_initial(tog, parse_paths("a:x2 e:v0>v1 a:m e:v1>v0 a:t", tog))
    assert G.state(2) == FreeMeridional((PeripheralConjugate(identity(2), 1),))
    top_edge, back_edge = G.edge(0), G.edge(1)
    assert top_edge.top_label == tog.group("v0").parse("x2")
    assert back_edge.top_label == tog.group("v0").parse("t^-1")
    assert back_edge.bottom_label == LeafWord((("m", -1),))


# ---------------------------------------------------------------------------
# vertex predicates and complexity

def test_is_isolated(trefoil_sum_exact):
    G = build_initial(trefoil_sum_exact, parse_paths(SUM_PATHS, trefoil_sum_exact))
    assert is_isolated(G, 1)
    assert is_isolated(G, 0)
    marked = G.with_changes(edges={0: replace(G.edge(0), state="meridian")})
    assert not is_isolated(marked, 0)
    with pytest.raises(InputError):
        is_isolated(G, 42)


def test_is_full():
    tog = tog_of("sum(torus(3,2), torus(5,2))")
    G = complete_graph(tog)
    assert all(is_full(G, u) for u in G.vertices)

    lonely = AGraph(tog_of('sat(braid 2 "s1", torus(3,2))'), {0: BVertex(0, "v0", BraidFull())}, {}, 0)
    assert not is_full(lonely, 0)
    assert "vertex 0: whole vertex group but the vertex is not full" in is_tame(lonely)

    leaf_only = AGraph(tog_of("torus(3,2)"), {0: BVertex(0, "v0", LeafFull())}, {}, 0)
    assert is_full(leaf_only, 0)
    assert is_complete(leaf_only)


@pytest.mark.parametrize("text", TREES)
def test_complete_graph_c1_is_the_bridge_number(text):
    tree = parse_tree(text)
    G = complete_graph(build_tree_of_groups(tree))
    assert is_tame(G) == []
    assert is_complete(G)
    assert c1(G) == bridge_number(tree)
    assert c2(G) == 2 * len(tree.edges())


def test_complete_graph_c1_on_random_trees(rng):
    for _ in range(15):
        tree = random_tree(rng, depth=3)
        G = complete_graph(build_tree_of_groups(tree))
        assert is_complete(G)
        assert c1(G) == bridge_number(tree)


def test_weights():
    tog = tog_of('sum(sat(braid 3 "s1 s2", torus(3,2)), torus(5,2))')
    vertices = {
        0: BVertex(0, "v0", Product((ProductMember(0, identity(2), 1),))),
        1: BVertex(1, "v1", NormalClosure(3)),
        2: BVertex(2, "v2", MeridionalCount((LeafWord(),))),
        3: BVertex(3, "v1", BraidFull()),
        4: BVertex(4, "v0", ComposingFull()),
        5: BVertex(5, "v1", FreeMeridional()),
    }
    G = AGraph(tog, vertices, {}, 0)
    assert [weight(G, u) for u in range(6)] == [2, 3, 1, 6, 7, 0]


def test_c2_counts_edge_ranks(trefoil_sum_exact):
    G = build_initial(trefoil_sum_exact, parse_paths(SUM_PATHS, trefoil_sum_exact))
    assert c2(G.with_changes(edges={0: replace(G.edge(0), state="meridian")})) == 23


# ---------------------------------------------------------------------------
# tameness

def test_tameness_flags_full_edges_into_non_full_vertices():
    tog = tog_of("sum(torus(3,2), torus(5,2))")
    G = complete_graph(tog)
    broken = G.with_changes(vertices={1: replace(G.vertex(1), state=MeridionalCount())})
    violations = is_tame(broken)
    assert "edge 0: full edge group but vertex 1 is not full" in violations
    assert "vertex 0: whole vertex group but the vertex is not full" in violations


def test_tameness_flags_saturated_counts():
    tog = tog_of("torus(3,2)")
    G = AGraph(tog, {0: BVertex(0, "v0", MeridionalCount((LeafWord(), LeafWord())))}, {}, 0)
    assert is_tame(G) == ["vertex 0: 2 meridians but the leaf has bridge number 2"]


def test_tameness_flags_wrong_state_kinds_and_structure():
    tog = tog_of("sum(torus(3,2), torus(5,2))")
    G = AGraph(tog, {0: BVertex(0, "v0", MeridionalCount())}, {}, 0)
    assert is_tame(G) == ["vertex 0: state MeridionalCount not allowed at a composing vertex"]

    G = AGraph(tog, {0: BVertex(0, "v1", MeridionalCount())}, {}, 0)
    assert is_tame(G) == ["base vertex does not map to the root"]

    vertices = {0: BVertex(0, "v0", TrivialGroup()), 1: BVertex(1, "v1", MeridionalCount())}
    edges = {
        0: BEdge(0, 0, 1, ("v0", "v1"), ComposingElement(identity(2)), LeafWord()),
        1: BEdge(1, 0, 1, ("v0", "v1"), ComposingElement(identity(2)), LeafWord()),
    }
    assert "underlying graph is not a tree" in is_tame(AGraph(tog, vertices, edges, 0))


def test_tameness_checks_product_members():
    tog = tog_of("sum(torus(3,2), torus(5,2))")
    vertices = {
        0: BVertex(0, "v0", Product((ProductMember(0, identity(2), 2),))),
        1: BVertex(1, "v1", LeafFull()),
    }
    edges = {0: BEdge(0, 0, 1, ("v0", "v1"), ComposingElement(identity(2)), LeafWord(), "full")}
    assert is_tame(AGraph(tog, vertices, edges, 0)) == ["vertex 0: member edge 0 carries the wrong index"]

    edges = {0: replace(edges[0], state="meridian")}
    assert "vertex 0: member edge 0 has no full edge group" in is_tame(AGraph(tog, vertices, edges, 0))


def test_initial_graph_is_not_complete(trefoil_sum_exact):
    G = build_initial(trefoil_sum_exact, parse_paths(SUM_PATHS, trefoil_sum_exact))
    assert not is_complete(G)


def test_graph_dump(trefoil_sum_exact):
    G = build_initial(trefoil_sum_exact, parse_paths(SUM_PATHS, trefoil_sum_exact))
    dump = graph_dump(G)
    assert dump["complexity"] == [3, 24]
    assert dump["base"] == 0
    assert dump["vertices"][2] == {"id": 2, "image": "v0", "state": "Product", "payload": []}
    assert dump["edges"][2]["labels"] == ["1", "1"]
    assert dump["edges"][3]["labels"] == ["1", "c^-1.u^2"]
    assert dump["edges"][0]["image"] == "v0>v1"
    assert dump["edges"][0]["state"] == "trivial"


# ---------------------------------------------------------------------------
# states

def test_leaf_counts_saturate():
    group = tog_of("torus(5,3)").group("v0")
    one = MeridionalCount((LeafWord(),))
    assert join_states(one, one, group) == MeridionalCount((LeafWord(), LeafWord()))
    assert join_states(one, MeridionalCount((LeafWord(), LeafWord())), group) == LeafFull()
    assert add_meridian(MeridionalCount((LeafWord(), LeafWord())), LeafWord(), group) == LeafFull()
    assert join_states(LeafFull(), MeridionalCount(), group) == LeafFull()


def test_braid_states_join_through_the_peripheral_basis():
    group = tog_of('sat(braid 2 "s1", torus(3,2))').group("v0")
    x1 = FreeMeridional((PeripheralConjugate(identity(2), 1),))
    x2 = FreeMeridional((PeripheralConjugate(identity(2), 2),))
    assert join_states(x1, x1, group) == x1
    assert join_states(x1, x2, group) == NormalClosure(2)
    assert join_states(NormalClosure(2), x1, group) == NormalClosure(2)
    assert add_meridian(FreeMeridional(), group.identity(), group) == x1
    assert add_meridian(x1, group.parse("t"), group) == NormalClosure(2)


def test_composing_states():
    group = tog_of("sum(torus(3,2), torus(5,2))").group("v0")
    first = ProductMember(0, identity(2), 1)
    second = ProductMember(3, identity(2), 2)
    assert join_states(TrivialGroup(), Product(), group) == Product()
    assert add_meridian(TrivialGroup(), None, group) == Product()
    assert add_member(Product(), first, group) == Product((first,))
    assert add_member(Product((first,)), second, group) == ComposingFull()
    assert add_member(TrivialGroup(), ProductMember(0, parse_word("x2", 2), 1), group) == Product(
        (ProductMember(0, parse_word("x2", 2), 1),)
    )
    assert rename_edge(Product((second,)), 3, 1) == Product((ProductMember(1, identity(2), 2),))


def test_join_edge_states():
    assert join_edge_states("trivial", "meridian") == "meridian"
    assert join_edge_states("full", "meridian") == "full"
    assert join_edge_states("trivial", "trivial") == "trivial"
