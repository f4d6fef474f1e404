import itertools
from math import comb

import pytest
from hypothesis import given, strategies as st

from finitecomb.errors import BudgetExceeded, EmptyInput, NoCollisionInBudget, SizeOutOfRange, TooSmall
from finitecomb.field import make_field
from finitecomb.setops import dilate, sumset
from finitecomb.sumprod import (
    CSV_HEADER,
    boost_bound,
    boost_xi,
    btilde,
    build_surjection,
    find_collision,
    make_surjection,
    reduce_rank,
    reduce_to_rank_one,
    rows_to_csv,
    sumprod_min_search,
    surjection_guard,
)

import oracles


def subsets(q, lo=1):
    F = make_field(q)
    return st.lists(st.integers(0, q - 1), min_size=lo, max_size=q, unique=True).map(F.subset)


# --- boost -----------------------------------------------------------------


def test_boost_examples():
    F11 = make_field(11)
    assert boost_xi(F11.subset([0, 1]), F11.subset([0, 1])) == (2, 4)
    F7 = make_field(7)
    xi, size = boost_xi(F7.subset([3]), F7.subset([5]))
    assert size == 1 and size >= min(1 / 2, 7 / 10)
    assert boost_xi(F7.full(), F7.subset([1])) == (1, 7)
    with pytest.raises(EmptyInput):
        boost_xi(F7.empty(), F7.full())


@given(st.sampled_from([7, 11, 13, 29, 31]).flatmap(lambda q: st.tuples(subsets(q), subsets(q))))
def test_boost_is_exhaustive_maximum(AB):
    A, B = AB
    q = A.q
    sizes = [len(oracles.sumset(set(A), {x * b % q for b in B}, q)) for x in range(1, q)]
    xi, size = boost_xi(A, B)
    assert size == max(sizes) and xi == 1 + sizes.index(max(sizes))
    assert size >= min(len(A) * len(B) / 2, q / 10)
    assert size >= boost_bound(len(A), len(B), q)


# --- surjections -------------------------------------------------------------


def test_surjection_examples():
    F = make_field(7)
    S = build_surjection(F.full())
    assert S.coeffs == (1,) and S.surjective
    F3 = make_field(3)
    assert build_surjection(F3.subset([0, 1])).coeffs == (1, 1)
    F11 = make_field(11)
    S = build_surjection(F11.subset([0, 1]))
    assert S.k <= 8
    assert len(S.image()) == 11 == S.cover_size
    with pytest.raises(TooSmall):
        build_surjection(F11.subset([4]))


@given(st.sampled_from([5, 7, 11, 13, 31, 101]).flatmap(lambda q: subsets(q, lo=2)))
def test_surjection_covers_field(A):
    S = build_surjection(A)
    q = A.q
    image = {0}
    for xi in S.coeffs:
        image = oracles.sumset(image, {a * xi % q for a in A}, q)
    assert len(image) == q
    assert S.k <= surjection_guard(q, len(A))


def test_find_collision_examples():
    F3 = make_field(3)
    B = F3.subset([0, 1])
    col = find_collision(B, make_surjection(B, [1, 1]))
    assert (col.tuple_a, col.tuple_b) == ((0, 1), (1, 0))
    with pytest.raises(NoCollisionInBudget):
        find_collision(F3.subset([0]), make_surjection(F3.subset([0]), [1, 1]))
    F7 = make_field(7)
    B = F7.subset([0, 1, 2])
    S = make_surjection(B, [1, 1])
    col = find_collision(B, S)
    assert col.tuple_a != col.tuple_b and col.residual(S.coeffs, 7) == 0
    # lexicographically first: nothing earlier collides
    earlier = [t for t in itertools.product([0, 1, 2], repeat=2) if t < col.tuple_b]
    sums = [sum(x * c for x, c in zip(t, S.coeffs)) % 7 for t in earlier]
    assert len(set(sums)) == len(sums)


def test_btilde_example():
    F7 = make_field(7)
    assert btilde(F7.subset([0, 1])) == {0, 1, 2, 5, 6}
    assert btilde(F7.full()) == F7.full()


def test_reduce_rank_full_field():
    F = make_field(7)
    S = make_surjection(F.full(), [1, 3])
    Bt, S2, _ = reduce_rank(F.full(), S)
    assert Bt == F.full() and S2.k == 1 and S2.surjective


def test_reduce_rank_pipeline():
    F = make_field(11)
    B = F.subset([0, 1, 3])
    S = build_surjection(B)
    B2, S2, step = reduce_rank(B, S)
    assert S2.k == S.k - 1
    assert len(sumset_all(B2, S2.coeffs)) == 11
    assert B <= B2  # 0, 1 in B
    steps = reduce_to_rank_one(B)
    assert steps[-1].reduced.k == 1 and steps[-1].reduced.surjective


def sumset_all(B, coeffs):
    out = None
    for c in coeffs:
        t = dilate(B, c)
        out = t if out is None else sumset(out, t)
    return out


# --- extremal search -------------------------------------------------------


def test_min_search_examples():
    r = sumprod_min_search(13, 2)
    assert r.min_max == 3 and r.exact
    assert sumprod_min_search(7, 7).min_max == 7
    assert sumprod_min_search(17, 4).min_max == oracles.minmax(17, 4)


@pytest.mark.parametrize("q,n", [(5, 2), (5, 3), (7, 3), (11, 3), (11, 4), (13, 4)])
def test_min_search_matches_oracle(q, n):
    r = sumprod_min_search(q, n)
    assert r.min_max == oracles.minmax(q, n)
    A = set(r.argmin)
    assert max(len(oracles.sumset(A, A, q)), len(oracles.prodset(A, A, q))) == r.min_max
    assert r.min_max >= min(2 * n - 1, q)
    assert r.scanned == comb(q, n)


def test_min_search_argmin_is_lexicographically_first():
    q, n = 11, 3
    r = sumprod_min_search(q, n)
    for A in itertools.combinations(range(q), n):
        v = max(len(oracles.sumset(A, A, q)), len(oracles.prodset(A, A, q)))
        if v == r.min_max:
            assert A == r.argmin
            break


def test_min_search_symmetry_sum_statistic():
    full = sumprod_min_search(13, 4, statistic="sum")
    reduced = sumprod_min_search(13, 4, statistic="sum", symmetry=True)
    assert full.min_max == reduced.min_max == 7
    with pytest.raises(ValueError):
        sumprod_min_search(13, 4, symmetry=True)


def test_min_search_randomized_is_upper_bound_and_replays():
    exact = sumprod_min_search(17, 4).min_max
    a = sumprod_min_search(17, 4, mode="randomized", trials=400, seed=5)
    b = sumprod_min_search(17, 4, mode="randomized", trials=400, seed=5)
    assert a == b
    assert a.min_max >= exact


def test_min_search_errors():
    with pytest.raises(SizeOutOfRange):
        sumprod_min_search(7, 1)
    with pytest.raises(SizeOutOfRange):
        sumprod_min_search(7, 8)
    with pytest.raises(BudgetExceeded):
        sumprod_min_search(101, 10)
    with pytest.raises(ValueError):
        sumprod_min_search(7, 3, mode="randomized", trials=0)


def test_rows_to_csv():
    rows = [sumprod_min_search(13, 3), sumprod_min_search(13, 2)]
    text = rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1].startswith("13,2,3,exhaustive")
