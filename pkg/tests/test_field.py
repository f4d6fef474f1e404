import numpy as np
import pytest
from hypothesis import given, strategies as st

from finitecomb.errors import NotPrime, SizeOutOfRange, ZeroInverse
from finitecomb.field import FSet, is_prime, make_field

from oracles import mod_inverse


@pytest.mark.parametrize("q", [2, 3, 7, 101, 65537])
def test_make_field_accepts_primes(q):
    assert make_field(q).q == q


@pytest.mark.parametrize("q", [0, 1, 4, 9, 91, 561])
def test_make_field_rejects_composites(q):
    with pytest.raises((NotPrime, ValueError)):
        make_field(q)


def test_is_prime_matches_sieve():
    sieve = np.ones(2000, dtype=bool)
    sieve[:2] = False
    for i in range(2, 45):
        sieve[i * i::i] = False
    assert [n for n in range(2000) if is_prime(n)] == np.flatnonzero(sieve).tolist()


@pytest.mark.parametrize("q,x,expected", [(7, 3, 5), (7, 1, 1), (11, 2, 6)])
def test_inverse_examples(q, x, expected):
    assert make_field(q).inv(x) == expected


def test_inverse_of_zero():
    with pytest.raises(ZeroInverse):
        make_field(7).inv(0)
    with pytest.raises(ZeroDivisionError):
        make_field(7).inv(0)


@pytest.mark.parametrize("q", [p for p in range(2, 102) if is_prime(p)])
def test_inverse_exhaustive(q):
    F = make_field(q)
    for x in range(1, q):
        assert x * F.inv(x) % q == 1
        assert F.inv(x) == mod_inverse(x, q)
    assert (np.arange(1, q) * F.inverse_table[1:] % q == 1).all()


@pytest.mark.parametrize("q,x,expected", [(7, 6, -1), (5, 4, 1), (7, 0, 0), (13, 0, 0)])
def test_legendre_examples(q, x, expected):
    assert make_field(q).legendre(x) == expected


@pytest.mark.parametrize("q", [3, 5, 7, 11, 13, 17, 19, 23])
def test_legendre_multiplicative_and_minus_one(q):
    F = make_field(q)
    squares = {x * x % q for x in range(1, q)}
    for x in range(1, q):
        assert F.legendre(x) == (1 if x in squares else -1)
        for y in range(1, q):
            assert F.legendre(x) * F.legendre(y) == F.legendre(x * y % q)
    assert (F.legendre(q - 1) == -1) == (q % 4 == 3)


def test_rand_subset():
    F = make_field(7)
    assert len(F.rand_subset(0, seed=3)) == 0
    assert F.rand_subset(7, seed=3) == F.full()
    F13 = make_field(13)
    a = F13.rand_subset(4, seed=1)
    assert len(a) == 4 and a == F13.rand_subset(4, seed=1)
    with pytest.raises(SizeOutOfRange):
        F.rand_subset(8, seed=0)


def test_primitive_root_tables():
    F = make_field(31)
    g = F.primitive_root
    assert len({pow(g, k, 31) for k in range(30)}) == 30
    assert (F.exp_table[F.log_table[np.arange(1, 31)]] == np.arange(1, 31)).all()


sets = st.integers(0, (1 << 13) - 1)


@given(sets, sets)
def test_fset_algebra_matches_python_sets(m1, m2):
    F = make_field(13)
    A = F.subset([i for i in range(13) if m1 >> i & 1])
    B = F.subset([i for i in range(13) if m2 >> i & 1])
    a, b = set(A), set(B)
    assert set(A | B) == a | b
    assert set(A & B) == a & b
    assert set(A - B) == a - b
    assert (A <= B) == (a <= b)
    assert A.isdisjoint(B) == a.isdisjoint(b)
    assert len(A) == A.recount() == len(a)
    assert A.elements.tolist() == sorted(a)
    assert set(A.shift(5)) == {(x + 5) % 13 for x in a}


def test_fset_elements_reduced():
    F = make_field(7)
    A = F.subset([-1, 8, 15])
    assert A == {6, 1}
    assert all(0 <= x < 7 for x in A)
    assert 8 in A and 2 not in A


def test_fset_is_immutable_and_hashable():
    F = make_field(5)
    A = F.subset([1, 2])
    with pytest.raises(Exception):
        A.mask = 0
    assert {A: 1}[F.subset([2, 1])] == 1
    assert isinstance(A.with_element(3), FSet) and len(A) == 2
