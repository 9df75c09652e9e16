import pytest

from bridgefold.errors import GeneratorRangeError, InputError, NotAConjugateError, RankMismatchError
from bridgefold.freegroup import (
    PeripheralBasis,
    PeripheralConjugate,
    WholeGroup,
    Word,
    build_subgroup_graph,
    conjugate,
    contains,
    decompose_conjugate,
    double_coset_exponent,
    export_graph,
    format_word,
    generator_word,
    identity,
    invert,
    is_whole_group,
    meets_peripheral,
    multiply,
    parse_word,
    peripheral_basis,
    peripheral_cycles,
    power,
    product_word,
    rank,
    reduce,
)

from tests.conftest import products_up_to, random_conjugates, random_word, separated_by_permutations


def w(text: str, n: int) -> Word:
    return parse_word(text, n)


def test_reduce_cancels_adjacent_inverses():
    assert reduce([1, -1], 2) == identity(2)
    assert reduce([1, 2, -2, 1], 2).letters == (1, 1)
    assert reduce([1, 2, -2, -1, 3], 3).letters == (3,)
    assert reduce([(1, 1), (2, -1)], 2).letters == (1, -2)


def test_reduce_rejects_out_of_range_letters():
    with pytest.raises(GeneratorRangeError):
        reduce([3], 2)
    with pytest.raises(GeneratorRangeError):
        reduce([0], 2)
    with pytest.raises(InputError):
        reduce([(1, 2)], 2)


def test_multiply_invert_conjugate():
    a = w("x1 x2 X3", 3)
    assert multiply(a, invert(a)) == identity(3)
    assert conjugate(identity(2), w("x1", 2)) == w("x1", 2)
    assert conjugate(w("x2", 2), w("x1", 2)).letters == (2, 1, -2)
    assert power(w("x1 x2", 2), -2).letters == (-2, -1, -2, -1)
    with pytest.raises(RankMismatchError):
        multiply(w("x1", 2), w("x1", 3))


def test_generator_word_closes_the_relator():
    assert generator_word(1, 3).letters == (1,)
    assert generator_word(4, 3).letters == (-3, -2, -1)
    assert generator_word(3, 2).letters == (-2, -1)
    assert multiply(product_word(3), generator_word(4, 3)) == identity(3)
    with pytest.raises(GeneratorRangeError):
        generator_word(5, 3)


def test_parse_and_format_word():
    assert w("x1^3 X2", 2).letters == (1, 1, 1, -2)
    assert w("x1^-2", 2).letters == (-1, -1)
    assert w("x1.X2", 2).letters == (1, -2)
    assert w("1", 2) == identity(2)
    assert format_word(w("x1 X2", 2)) == "x1 X2"
    assert format_word(identity(2)) == "1"
    assert format_word(w("x1 X2", 2), sep=".") == "x1.X2"
    with pytest.raises(InputError):
        w("y1", 2)
    with pytest.raises(GeneratorRangeError):
        w("x3", 2)


def test_decompose_conjugate():
    assert decompose_conjugate(w("x1 x2 X1", 2)) == (w("x1", 2), 2)
    assert decompose_conjugate(w("x3", 3)) == (identity(3), 3)
    with pytest.raises(NotAConjugateError):
        decompose_conjugate(w("x1 x2", 2))
    with pytest.raises(NotAConjugateError):
        decompose_conjugate(w("X2", 2))
    with pytest.raises(NotAConjugateError):
        decompose_conjugate(identity(2))


def test_subgroup_graph_of_single_generators():
    G = build_subgroup_graph([w("x1", 2)], 2)
    assert G.vertices == (0,)
    assert G.edges == frozenset({(0, 1, 0)})

    G = build_subgroup_graph([w("x1", 2), w("x2", 2)], 2)
    assert G.edges == frozenset({(0, 1, 0), (0, 2, 0)})
    assert is_whole_group(G, 2)


def test_subgroup_graph_of_a_conjugate_folds_to_a_lollipop():
    G = build_subgroup_graph([w("x2 x1 X2", 2)], 2)
    assert G.vertices == (0, 1)
    assert G.edges == frozenset({(0, 2, 1), (1, 1, 1)})
    assert export_graph(G) == "base 0\n0 2 1\n1 1 1"


def test_contains():
    G = build_subgroup_graph([w("x1", 2)], 2)
    assert contains(G, w("x1^3", 2))
    assert not contains(G, w("x2", 2))

    G = build_subgroup_graph([w("x2 x1 X2", 2), w("x2^2", 2)], 2)
    assert contains(G, w("x2 x1^2 X2", 2))
    assert contains(G, w("x2^-4", 2))
    assert not contains(G, w("x2", 2))


def test_rank():
    assert rank(build_subgroup_graph([], 2)) == 0
    assert rank(build_subgroup_graph([w("x1", 2), w("x2", 2)], 2)) == 2
    # folds down to the rose on x1, x2
    G = build_subgroup_graph([w("x2 x1 X2", 2), w("x2", 2)], 2)
    assert rank(G) == 2
    assert len(G.vertices) == 1


def test_is_whole_group():
    assert not is_whole_group(build_subgroup_graph([w("x1", 2)], 2), 2)
    assert not is_whole_group(build_subgroup_graph([w("x1", 2), w("x2 x1 X2", 2)], 2), 2)
    assert is_whole_group(build_subgroup_graph([w("x1", 2), w("X2 X1", 2)], 2), 2)


def test_peripheral_cycles():
    G = build_subgroup_graph([w("x1", 2)], 2)
    assert peripheral_cycles(G, 1) == [(0, 1)]
    assert peripheral_cycles(G, 2) == []

    # x3 = (x1 x2)^-1, read backwards around the loop
    G = build_subgroup_graph([w("x1 x2", 2)], 2)
    assert peripheral_cycles(G, 3) == [(0, 1)]

    G = build_subgroup_graph([w("x1^2", 2)], 2)
    assert peripheral_cycles(G, 1) == [(0, 2)]


def test_meets_peripheral():
    G = build_subgroup_graph([w("x2 x1 X2", 2)], 2)
    assert meets_peripheral(G, w("x2", 2), 1)
    assert not meets_peripheral(G, identity(2), 1)
    assert not meets_peripheral(G, w("x1", 2), 1)


def test_peripheral_basis_of_generating_set_is_whole_group():
    S = [PeripheralConjugate(identity(2), 1), PeripheralConjugate(identity(2), 2)]
    assert peripheral_basis(S, 2) == WholeGroup(2)


def test_peripheral_basis_single_generator():
    result = peripheral_basis([PeripheralConjugate(identity(2), 1)], 2)
    assert isinstance(result, PeripheralBasis)
    assert result.basis == (PeripheralConjugate(identity(2), 1),)
    assert result.sources == (0,)


def test_peripheral_basis_keeps_conjugators_from_the_input():
    S = [PeripheralConjugate(w("x2", 3), 1), PeripheralConjugate(identity(3), 2)]
    result = peripheral_basis(S, 3)
    assert isinstance(result, PeripheralBasis)
    assert result.rank == 2
    assert result.indices == {1, 2}
    assert set(result.basis) == set(S)


def test_peripheral_basis_drops_redundant_conjugates():
    S = [
        PeripheralConjugate(identity(3), 1),
        PeripheralConjugate(identity(3), 1),
        PeripheralConjugate(w("x1", 3), 1),
    ]
    result = peripheral_basis(S, 3)
    assert isinstance(result, PeripheralBasis)
    assert result.basis == (PeripheralConjugate(identity(3), 1),)


def test_peripheral_basis_rejects_bad_input():
    with pytest.raises(RankMismatchError):
        peripheral_basis([PeripheralConjugate(identity(2), 1)], 3)
    with pytest.raises(GeneratorRangeError):
        peripheral_basis([PeripheralConjugate(identity(2), 4)], 2)


def test_peripheral_basis_on_random_conjugates(rng):
    for _ in range(500):
        n = rng.randint(1, 5)
        S = random_conjugates(rng, n, rng.randint(1, 4), 6)
        result = peripheral_basis(S, n)
        source_graph = build_subgroup_graph([p.element() for p in S], n)
        if isinstance(result, WholeGroup):
            assert is_whole_group(source_graph, n)
            continue
        T = [p.element() for p in result.basis]
        basis_graph = build_subgroup_graph(T, n)
        assert basis_graph == source_graph
        assert rank(basis_graph) == result.rank <= len(S)
        assert result.indices == {p.index for p in S}
        assert all(contains(source_graph, t) for t in T)


def test_any_n_boundary_classes_generate(rng):
    for n in range(1, 5):
        for skip in range(1, n + 2):
            S = [PeripheralConjugate(identity(n), i) for i in range(1, n + 2) if i != skip]
            assert peripheral_basis(S, n) == WholeGroup(n)


def test_subgroup_graph_contains_products_of_generators(rng):
    for _ in range(50):
        n = rng.randint(1, 4)
        S = [random_word(rng, n, 6) for _ in range(rng.randint(1, 3))]
        G = build_subgroup_graph(S, n)
        product = identity(n)
        for _ in range(rng.randint(1, 5)):
            factor = rng.choice(S)
            product = multiply(product, factor if rng.random() < 0.5 else invert(factor))
        assert contains(G, product)
        assert rank(G) <= len(S)


def test_contains_agrees_with_brute_force(rng):
    rejected = 0
    for _ in range(60):
        n = rng.randint(1, 4)
        S = [random_word(rng, n, 4) for _ in range(rng.randint(1, 3))]
        G = build_subgroup_graph(S, n)
        products = products_up_to(S, n, 5)
        assert all(contains(G, p) for p in products)
        for _ in range(5):
            w = random_word(rng, n, 4)
            if separated_by_permutations(rng, S, w, n):
                assert not contains(G, w)
                rejected += 1
    assert rejected > 0


def test_double_coset_exponent():
    n = 2
    assert double_coset_exponent([], identity(n), w("x1", n), w("x1^3", n)) == 3
    assert double_coset_exponent([], identity(n), w("x1", n), w("x2", n)) is None
    assert double_coset_exponent([w("x1", n)], identity(n), w("x2", n), w("x1 X2 X2", n)) == -2
    assert double_coset_exponent([w("x1", n)], identity(n), w("x2", n), w("x1^5", n)) == 0
    assert double_coset_exponent([], identity(n), identity(n), w("x2", n)) is None
