import pytest

from bridgefold.braid import BraidWord
from bridgefold.errors import InputError, TreeSyntaxError, TreeValidationError
from bridgefold.knot_tree import (
    KnotTree,
    OpaqueLeaf,
    TorusLeaf,
    bridge_number,
    bridge_number_recursive,
    format_tree,
    height,
    height_plus,
    max_height,
    n_of,
    partition,
    report,
    subtree,
    validate,
)
from bridgefold.tree_dsl import parse_tree, tokenize

from tests.conftest import random_tree


TREFOIL = "torus(3,2)"
SATELLITE = 'sat(braid 3 "s2 s1^-1 s2 s2", torus(3,2))'
TWO_SUMMANDS = "sum(torus(3,2), torus(5,2))"
MIXED = 'sum(sat(braid 3 "s2 s1^-1 s2 s2", torus(3,2)), torus(3,2))'


def test_parse_single_leaf():
    tree = parse_tree(TREFOIL)
    assert tree.root == "v0"
    assert tree.leaves == {"v0": TorusLeaf(3, 2)}
    assert tree.children == {}


def test_parse_satellite():
    tree = parse_tree(SATELLITE)
    assert tree.kids("v0") == ("v1",)
    assert tree.braids["v0"] == BraidWord(3, (2, -1, 2, 2))
    assert tree.kind("v0") == "V1"
    assert tree.kind("v1") == "V0"


def test_parse_sum_keeps_child_order():
    tree = parse_tree(TWO_SUMMANDS)
    assert tree.kids("v0") == ("v1", "v2")
    assert tree.leaves["v2"] == TorusLeaf(5, 2)
    assert tree.kind("v0") == "V2"
    assert tree.edges() == [("v0", "v1"), ("v0", "v2")]


def test_parse_opaque_leaf_and_comments():
    tree = parse_tree("# a connected sum\nsum(opaque(k8, 3, tame),\n    torus(5,3))")
    assert tree.leaves["v1"] == OpaqueLeaf("k8", 3, True)
    assert tree.leaves["v2"] == TorusLeaf(5, 3)


def test_vertices_are_numbered_in_preorder():
    tree = parse_tree(MIXED)
    assert tree.vertices == ("v0", "v1", "v2", "v3")
    assert tree.parents == {"v1": "v0", "v2": "v1", "v3": "v0"}


def test_syntax_errors_carry_positions():
    with pytest.raises(TreeSyntaxError) as exc:
        parse_tree("sum(torus(3,2) torus(5,2))")
    assert (exc.value.line, exc.value.column) == (1, 16)

    with pytest.raises(TreeSyntaxError) as exc:
        parse_tree("torus(3,2);")
    assert exc.value.column == 11

    with pytest.raises(TreeSyntaxError) as exc:
        parse_tree("sum(\n  knot(3,2))")
    assert (exc.value.line, exc.value.column) == (2, 3)

    with pytest.raises(TreeSyntaxError):
        parse_tree('sat(braid 2 "s2", torus(3,2))')
    with pytest.raises(TreeSyntaxError):
        parse_tree("torus(3,2) torus(5,2)")


def test_tokenize_skips_whitespace_and_comments():
    kinds = [t.kind for t in tokenize("torus(3, 2) # trefoil")]
    assert kinds == ["name", "punct", "int", "punct", "int", "punct", "eof"]


def test_validate_accepts_good_trees():
    for text in (TREFOIL, SATELLITE, TWO_SUMMANDS, MIXED):
        assert validate(parse_tree(text, validate=False)) == []


def test_validate_rejects_braids_that_close_to_links():
    tree = parse_tree('sat(braid 2 "s1 s1", torus(3,2))', validate=False)
    assert validate(tree) == ["v0: closed braid s1 s1 is not a knot"]
    with pytest.raises(TreeValidationError) as exc:
        parse_tree('sat(braid 2 "s1 s1", torus(3,2))')
    assert exc.value.violations == ["v0: closed braid s1 s1 is not a knot"]


def test_validate_rejects_a_sum_with_one_summand():
    tree = parse_tree("sum(torus(3,2))", validate=False)
    assert validate(tree) == ["v0: one child but no braid label"]


def test_validate_rejects_bad_leaves():
    assert validate(parse_tree("torus(4,2)", validate=False))
    assert validate(parse_tree("torus(2,3)", validate=False))
    assert validate(parse_tree("opaque(k, 1)", validate=False))


def test_validate_rejects_structural_problems():
    cyclic = KnotTree(root="a", children={"a": ("b",), "b": ("a",)}, leaves={}, braids={})
    assert validate(cyclic) == ["not a rooted tree"]

    mislabelled = KnotTree(
        root="a",
        children={"a": ("b", "c")},
        leaves={"a": TorusLeaf(3, 2), "b": TorusLeaf(3, 2), "c": TorusLeaf(3, 2)},
        braids={},
    )
    assert validate(mislabelled) == ["a: knot label on a vertex with children"]


def test_n_of_and_heights():
    tree = parse_tree(MIXED)
    assert n_of(tree, "v0") == 1
    assert n_of(tree, "v1") == 3
    assert n_of(tree, "v2") == 1
    assert height(tree, "v0") == 1
    assert height(tree, "v2") == 3
    assert height(tree, "v3") == 1
    assert height_plus(tree, "v1") == 3
    assert max_height(tree) == 3
    with pytest.raises(InputError):
        height(tree, "v9")


def test_bridge_numbers():
    assert bridge_number(parse_tree(TREFOIL)) == 2
    assert bridge_number(parse_tree('sat(braid 3 "s1 s2", torus(3,2))')) == 6
    assert bridge_number(parse_tree(TWO_SUMMANDS)) == 3
    assert bridge_number(parse_tree(MIXED)) == 7
    assert bridge_number(parse_tree("sum(opaque(k, 4), torus(7,3), torus(3,2))")) == 7


def test_recursion_matches_closed_form_on_examples():
    for text in (TREFOIL, SATELLITE, TWO_SUMMANDS, MIXED):
        tree = parse_tree(text)
        assert bridge_number_recursive(tree) == bridge_number(tree)


def test_recursion_matches_closed_form_on_random_trees(rng):
    for _ in range(1000):
        tree = random_tree(rng)
        assert validate(tree) == []
        assert bridge_number_recursive(tree) == bridge_number(tree)


def test_subtree_and_partition():
    tree = parse_tree(MIXED)
    sub = subtree(tree, "v1")
    assert sub.root == "v1"
    assert sub.vertices == ("v1", "v2")
    assert bridge_number(sub) == 6
    assert partition(tree) == {"V0": ["v2", "v3"], "V1": ["v1"], "V2": ["v0"]}


def test_report():
    data = report(parse_tree(TWO_SUMMANDS))
    assert data["bridge"] == 3
    assert data["recursive"] == 3
    assert data["agreement"] is True
    assert data["heights"] == {"v0": 1, "v1": 1, "v2": 1}


def test_format_tree_is_canonical():
    for text in (TREFOIL, SATELLITE, TWO_SUMMANDS, MIXED, "opaque(k, 3, tame)"):
        assert format_tree(parse_tree(text)) == text
