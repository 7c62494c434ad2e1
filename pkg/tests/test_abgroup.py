import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ksix.abgroup import (
    FgAbGroup,
    IntMatrix,
    abelian_group,
    cyclic,
    determinant,
    direct_sum,
    free,
    group_from_presentation,
    integer_kernel,
    smith_normal_form,
    solve_integer,
    trivial,
    xgcd,
)
from ksix.errors import DimensionMismatch, InfiniteGroup, ParentMismatch


def matrices(max_dim=6, max_entry=20):
    return st.integers(0, max_dim).flatmap(
        lambda r: st.integers(0, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(-max_entry, max_entry), min_size=c, max_size=c),
                               min_size=r, max_size=r).map(lambda rows: IntMatrix(rows, r, c))))


def assert_smith(m, sf):
    assert sf.U @ m @ sf.V == sf.D
    assert abs(determinant(sf.U)) == 1
    assert abs(determinant(sf.V)) == 1
    assert sf.V @ sf.V_inv == IntMatrix.identity(m.cols)
    rows, cols = m.shape
    for i in range(rows):
        for j in range(cols):
            if i != j:
                assert sf.D[i, j] == 0
    diag = sf.diagonal
    nonzero = [d for d in diag if d]
    assert all(d > 0 for d in nonzero)
    assert diag[:len(nonzero)] == tuple(nonzero)
    for a, b in zip(nonzero, nonzero[1:]):
        assert b % a == 0


class TestSmithForm:
    def test_two_by_two(self):
        m = IntMatrix([[2, 4], [6, 8]])
        sf = smith_normal_form(m)
        assert sf.diagonal == (2, 4)
        assert_smith(m, sf)

    def test_zero_matrix(self):
        m = IntMatrix.zeros(3, 2)
        sf = smith_normal_form(m)
        assert sf.D == m
        assert sf.U == IntMatrix.identity(3)
        assert sf.V == IntMatrix.identity(2)

    def test_identity(self):
        sf = smith_normal_form(IntMatrix.identity(3))
        assert sf.D == IntMatrix.identity(3)

    def test_empty(self):
        sf = smith_normal_form(IntMatrix((), 0, 3))
        assert sf.D.shape == (0, 3)
        assert_smith(IntMatrix((), 0, 3), sf)

    def test_large_entries_stay_exact(self):
        big = 10 ** 30
        m = IntMatrix([[big, big + 1], [big - 1, big]])
        sf = smith_normal_form(m)
        assert_smith(m, sf)
        assert sf.diagonal == (1, 1)

    @settings(max_examples=200, deadline=None)
    @given(matrices())
    def test_certificate(self, m):
        assert_smith(m, smith_normal_form(m))

    @settings(max_examples=100, deadline=None)
    @given(matrices())
    def test_idempotent(self, m):
        d = smith_normal_form(m).D
        assert smith_normal_form(d).D == d

    @settings(max_examples=100, deadline=None)
    @given(matrices(max_dim=4))
    def test_transpose_has_same_diagonal(self, m):
        assert smith_normal_form(m).diagonal == smith_normal_form(m.T).diagonal


@given(st.integers(-500, 500), st.integers(-500, 500))
def test_xgcd(a, b):
    g, x, y = xgcd(a, b)
    assert g >= 0 and a * x + b * y == g
    if a or b:
        assert a % g == 0 and b % g == 0


class TestLinearAlgebra:
    @settings(max_examples=100, deadline=None)
    @given(matrices(max_dim=5))
    def test_kernel_vectors_vanish(self, m):
        k = integer_kernel(m)
        for j in range(k.cols):
            assert not any(m.apply(k.column(j)))

    @settings(max_examples=100, deadline=None)
    @given(matrices(max_dim=5), st.data())
    def test_solve_round_trip(self, m, data):
        x = data.draw(st.lists(st.integers(-5, 5), min_size=m.cols, max_size=m.cols))
        b = m.apply(x)
        y = solve_integer(m, b)
        assert y is not None and m.apply(y) == b

    def test_unsolvable(self):
        assert solve_integer(IntMatrix([[2]]), [1]) is None


class TestPresentations:
    def test_single_relation(self):
        assert group_from_presentation(IntMatrix([[2]]), 1) == cyclic(2)

    def test_factors_merge(self):
        g = group_from_presentation(IntMatrix([[2, 0], [0, 3]]), 2)
        assert g == cyclic(6)
        # brute force: Z/2 + Z/3 has an element of order 6
        orders = {(a * 3 + b * 2) % 6 for a in range(2) for b in range(3)}
        assert len(orders) == 6

    def test_free(self):
        assert group_from_presentation(IntMatrix((), 0, 2), 2) == free(2)

    def test_column_mismatch(self):
        with pytest.raises(DimensionMismatch):
            group_from_presentation(IntMatrix([[1, 2]]), 3)

    def test_unimodular_change_of_basis(self):
        rel = IntMatrix([[4, 6], [2, 2]])
        u = IntMatrix([[1, 1], [0, 1]])
        assert group_from_presentation(rel, 2) == group_from_presentation(u @ rel, 2)

    def test_presentation_coordinates(self):
        g = group_from_presentation(IntMatrix([[2, 0], [0, 3]]), 2)
        x = g.from_presentation_coords([1, 0])
        y = g.from_presentation_coords([0, 1])
        assert x.order() == 2 and y.order() == 3
        assert (x + y).order() == 6

    @settings(max_examples=60, deadline=None)
    @given(matrices(max_dim=4, max_entry=9))
    def test_canonical_form_is_stable(self, m):
        g = group_from_presentation(m, m.cols)
        again = abelian_group(g.invariant_factors, g.free_rank)
        assert g == again
        assert g.free_rank == m.cols - smith_normal_form(m).rank


class TestElements:
    def test_modular_addition(self):
        z4 = cyclic(4)
        assert z4.element([3]) + z4.element([3]) == z4.element([2])

    def test_inverse(self):
        g = abelian_group([2, 6], 1)
        x = g.element([1, 5, -7])
        assert (x + (-x)).is_zero()

    def test_scalar(self):
        assert 2 * free(2).element([1, -1]) == free(2).element([2, -2])

    def test_order(self):
        g = abelian_group([2, 6], 1)
        assert g.element([1, 2, 0]).order() == 6
        assert g.element([0, 0, 1]).order() == 0

    def test_mixed_parents(self):
        with pytest.raises(ParentMismatch):
            cyclic(2).gen(0) + cyclic(3).gen(0)

    def test_wrong_length(self):
        with pytest.raises(DimensionMismatch):
            cyclic(2).element([1, 0])

    @pytest.mark.parametrize("g, count", [(cyclic(3), 3), (trivial(), 1), (abelian_group([2, 2]), 4)])
    def test_enumeration(self, g, count):
        elems = list(g.elements())
        assert len(elems) == count == g.order
        assert len({x.coords for x in elems}) == count

    def test_enumeration_of_infinite_group(self):
        with pytest.raises(InfiniteGroup):
            list(free(1).elements())


class TestDirectSum:
    def test_z_plus_z2(self):
        s, _, _ = direct_sum(free(1), cyclic(2))
        assert s.invariant_factors == (2,) and s.free_rank == 1

    def test_unit_law(self):
        g = abelian_group([3], 1)
        s, (i, _), (p, _) = direct_sum(g, trivial())
        assert s == g
        assert (p @ i).matrix == IntMatrix.identity(g.ngens)

    def test_z2_plus_z4(self):
        s, _, _ = direct_sum(cyclic(2), cyclic(4))
        assert s.invariant_factors == (2, 4)

    def test_biproduct_identities(self):
        a, b = abelian_group([2, 4]), abelian_group([3], 1)
        s, (ia, ib), (pa, pb) = direct_sum(a, b)
        assert (pa @ ia).matrix == IntMatrix.identity(a.ngens)
        assert (pb @ ib).matrix == IntMatrix.identity(b.ngens)
        assert (pa @ ib).is_zero() and (pb @ ia).is_zero()
        for x in itertools.islice(itertools.product(range(4), repeat=s.ngens), 50):
            v = s.element(x)
            assert ia(pa(v)) + ib(pb(v)) == v


def test_bad_invariant_factors():
    with pytest.raises(ValueError):
        FgAbGroup((4, 2), 0)
