import pytest

from src.algebra import jordan_product, multiply
from src.errors import LayoutError
from src.linmap import (
    DerivationTriple,
    LinearMap,
    column_index,
    inner_derivation,
    jordan_mult_operator,
    packed_length,
    triple_pack,
    triple_unpack,
)


def test_identity_and_zero(t3, rng):
    x = t3.random_element(rng)
    assert LinearMap.identity(t3)(x) == x
    assert LinearMap.zero(t3)(x).is_zero()


def test_map_arithmetic(t2, rng):
    a, b = LinearMap.random(t2, rng), LinearMap.random(t2, rng)
    x = t2.random_element(rng)
    assert (a + b)(x) == a(x) + b(x)
    assert (a - b)(x) == a(x) - b(x)
    assert (-a)(x) == -(a(x))
    assert a.scale(3)(x) == a(x).scale(3)
    assert (a - a).is_zero()


def test_entry_reads_image_columns(t2):
    a = t2.element({(1, 1): 1, (1, 2): 1, (2, 2): 1})
    g = jordan_mult_operator(a)
    # a o e11 = 2 e11 + e12
    assert g.image_of(0) == t2.element({(1, 1): 2, (1, 2): 1})
    assert g.entry(0, 0) == 2
    assert g.entry(1, 0) == 1
    assert g.entry(2, 0) == 0


def test_jordan_mult_operator_matches_product(m2, rng):
    a = m2.random_element(rng)
    op = jordan_mult_operator(a)
    for _ in range(10):
        x = m2.random_element(rng)
        assert op(x) == jordan_product(a, x)


def test_inner_derivation_satisfies_leibniz(t3, rng):
    d = inner_derivation(t3.random_element(rng))
    for _ in range(10):
        x, y = t3.random_element(rng), t3.random_element(rng)
        assert d(multiply(x, y)) == multiply(d(x), y) + multiply(x, d(y))


def test_column_index_layout(t2):
    dim = t2.dim
    assert packed_length(t2) == 27
    assert column_index(dim, 0, 0, 0) == 0
    assert column_index(dim, 0, 2, 0) == 2
    assert column_index(dim, 0, 0, 1) == 3
    assert column_index(dim, 1, 0, 0) == 9
    assert column_index(dim, 2, 2, 2) == 26


def test_pack_places_entries_by_layout(t2, rng):
    t = DerivationTriple.random(t2, rng)
    v = triple_pack(t)
    dim = t2.dim
    for number, m_ in enumerate(t.maps()):
        for k in range(dim):
            for m in range(dim):
                assert v[column_index(dim, number, m, k)] == m_.entry(m, k)
    assert triple_unpack(v, t2) == t


def test_unpack_rejects_wrong_length(t2):
    with pytest.raises(LayoutError):
        triple_unpack([0] * 26, t2)


def test_triple_json(t2):
    t = DerivationTriple.zero(t2)
    data = t.to_json()
    assert list(data) == ["f", "g", "h"]
    assert list(data["f"]) == ["image_of(1,1)", "image_of(1,2)", "image_of(2,2)"]
    assert data["g"]["image_of(1,2)"] == {}
