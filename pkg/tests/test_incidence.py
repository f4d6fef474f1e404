import numpy as np
import pytest
from hypothesis import given, strategies as st

from finitecomb.errors import FieldMismatch, MassTooSmall, SingularMatrix
from finitecomb.field import make_field
from finitecomb.incidence import (
    PLine,
    PPoint,
    Relation,
    affine_point,
    apply_proj,
    count_incidences,
    cs_count,
    easy_bound_check,
    elekes_construct,
    incidence_relation,
    incident,
    line_at_infinity,
    normalize,
    popular_restrict,
    proj_map_sending,
    read_instance,
    slope_line,
    st_experiment,
    write_instance,
)
from finitecomb.setops import prodset, sumset

import oracles


def all_affine(q):
    P = [affine_point(q, x, y) for x in range(q) for y in range(q)]
    L = [slope_line(q, m, c) for m in range(q) for c in range(q)] + [PLine(q, 1, 0, -c) for c in range(q)]
    return P, L


def test_incident_examples():
    assert incident(PPoint(7, 0, 0, 1), PLine(7, 0, 1, 0))
    assert incident(PPoint(5, 1, 1, 1), PLine(5, 1, -1, 0))
    assert incident(PPoint(5, 1, 0, 0), line_at_infinity(5))
    with pytest.raises(FieldMismatch):
        incident(PPoint(5, 1, 0, 0), PLine(7, 0, 0, 1))


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_normalization_unique(q):
    for v in np.ndindex(q, q, q):
        if not any(v):
            continue
        n = normalize(v, q)
        assert normalize(n, q) == n
        for s in range(1, q):
            assert normalize([s * c for c in v], q) == n


def test_full_plane_count():
    P, L = all_affine(5)
    assert len(L) == 30
    assert count_incidences(P, L) == 150
    assert count_incidences([], L) == 0
    r = easy_bound_check(P, L)
    assert r.holds and r.incidences == 150
    assert easy_bound_check([affine_point(5, 0, 0)], [slope_line(5, 0, 0)]).incidences == 1


def _rand_points(q, rng, n):
    n = min(n, q * q + q + 1)
    out = set()
    while len(out) < n:
        v = rng.integers(0, q, 3)
        if v.any():
            out.add(PPoint(q, *v))
    return out


@pytest.mark.parametrize("seed", range(20))
def test_count_methods_agree(seed):
    rng = np.random.default_rng(seed)
    q = int(rng.choice([5, 7, 11, 13]))
    P = _rand_points(q, rng, int(rng.integers(1, 40)))
    L = {PLine(q, *p.coords) for p in _rand_points(q, rng, int(rng.integers(1, 40)))}
    naive = count_incidences(P, L, method="naive")
    assert naive == count_incidences(P, L, method="bucket")
    assert naive == oracles.incidences([p.coords for p in P], [l.coords for l in L], q)


@given(st.integers(0, 2**32 - 1))
def test_easy_bound_and_cs_on_random_instances(seed):
    rng = np.random.default_rng(seed)
    q = int(rng.choice([7, 11, 31]))
    P = _rand_points(q, rng, int(rng.integers(1, 50)))
    L = {PLine(q, *p.coords) for p in _rand_points(q, rng, int(rng.integers(1, 50)))}
    assert easy_bound_check(P, L).holds
    assert cs_count(incidence_relation(P, L)).holds


def test_elekes_examples():
    F7 = make_field(7)
    inst = elekes_construct(F7.subset([1, 2]))
    assert len(inst.points) == 9 and len(inst.lines) == 4
    assert inst.incidences >= 8
    inst = elekes_construct(F7.subset([1]))
    assert (len(inst.points), len(inst.lines), inst.incidences) == (1, 1, 1)
    F13 = make_field(13)
    A = F13.subset([1, 2, 3])
    inst = elekes_construct(A)
    assert inst.incidences >= 27
    assert len(inst.points) == len(sumset(A, A)) * len(prodset(A, A))


def test_elekes_degenerate_flag():
    assert elekes_construct(make_field(7).subset([0, 1])).degenerate


def test_apply_proj_identity_and_invariance():
    q = 5
    P, L = all_affine(q)
    P2, L2 = apply_proj(np.eye(3, dtype=np.int64), P, L)
    assert set(P2) == set(P) and set(L2) == set(L)
    swap = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    P3, L3 = apply_proj(swap, P[:12], L[:9])
    assert count_incidences(P3, L3) == count_incidences(P[:12], L[:9])
    with pytest.raises(SingularMatrix):
        apply_proj(np.zeros((3, 3), dtype=np.int64), P, L)


@given(st.integers(0, 2**32 - 1))
def test_projective_duality(seed):
    rng = np.random.default_rng(seed)
    q = int(rng.choice([5, 7, 13, 31]))
    while True:
        M = rng.integers(0, q, (3, 3))
        if round(np.linalg.det(M)) % q:
            break
    P = sorted(_rand_points(q, rng, 10))
    L = sorted({PLine(q, *p.coords) for p in _rand_points(q, rng, 10)})
    P2, L2 = apply_proj(M, P, L)
    for i, p in enumerate(P):
        for j, l in enumerate(L):
            assert incident(p, l) == incident(P2[i], L2[j])


def test_proj_map_sending():
    q = 7
    p1, p2 = affine_point(q, 2, 3), affine_point(q, 5, 1)
    M = proj_map_sending(p1, p2)
    (a, b), _ = apply_proj(M, [p1, p2], [])
    assert a == PPoint(q, 1, 0, 0) and b == PPoint(q, 0, 1, 0)


def test_popular_restrict_examples():
    r = popular_restrict([3, 1], 4)
    assert r.threshold == 1 and r.kept == (0, 1) and r.retained == 4
    r = popular_restrict([5, 5, 5], 15)
    assert r.kept == (0, 1, 2)
    r = popular_restrict([10, 0, 0, 0], 10)
    assert float(r.threshold) == 1.25 and r.kept == (0,) and r.retained == 10
    with pytest.raises(MassTooSmall):
        popular_restrict([1, 1], 3)


@given(st.lists(st.integers(0, 50), min_size=1, max_size=40), st.data())
def test_popular_restrict_mass(w, data):
    X = data.draw(st.integers(0, sum(w)))
    r = popular_restrict(w, X)
    assert 2 * r.retained >= X


def test_cs_count_examples():
    R = Relation.build(range(3), range(3), [(a, b) for a in range(3) for b in range(3)])
    r = cs_count(R)
    assert (r.pairs, r.paths) == (9, 18) and r.holds
    r = cs_count(Relation.build(range(3), range(3), []))
    assert (r.pairs, r.paths) == (0, 0)
    r = cs_count(Relation.build(range(4), range(4), [(i, i) for i in range(4)]))
    assert (r.pairs, r.paths) == (4, 0) and r.holds


@given(st.sets(st.tuples(st.integers(0, 7), st.integers(0, 5))))
def test_cs_count_property(edges):
    R = Relation.build(range(8), range(6), edges)
    mu = R.mu()
    assert sum(mu.values()) == len(edges)
    r = cs_count(R)
    assert r.holds and r.paths * 6 >= r.pairs ** 2 - r.pairs * 6


def test_st_experiment():
    r = st_experiment(5, 25, "grid", trials=1, seed=0)
    assert r.max_incidences == 25 * 5
    assert st_experiment(7, 1, "uniform", trials=3, seed=1).max_incidences <= 1
    a = st_experiment(31, 64, "uniform", trials=5, seed=3)
    assert a == st_experiment(31, 64, "uniform", trials=5, seed=3)
    e = st_experiment(13, 16, "elekes", trials=2, seed=0)
    assert e.max_incidences >= 16


def test_instance_roundtrip(tmp_path):
    q = 7
    P = [affine_point(q, 1, 2), PPoint(q, 0, 1, 0)]
    L = [slope_line(q, 2, 0), line_at_infinity(q)]
    f = tmp_path / "inst.txt"
    write_instance(f, P, L)
    P2, L2 = read_instance(f, q)
    assert set(P2) == set(P) and set(L2) == set(L)
