import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from finitecomb import kakeya as kk
from finitecomb.errors import (
    BadConfiguration,
    BudgetExceeded,
    DegenerateIntersection,
    DegenerateLine,
    ExcludedNotMeetingStem,
    MissingDirection,
    NotDisjoint,
    NotSkew,
)
from finitecomb.incidence import PLine, incident
from finitecomb.verify import random_line, random_skew_triple

import oracles


@pytest.mark.parametrize("q,n", [(3, 13), (5, 31), (7, 57)])
def test_direction_count(q, n):
    dirs = kk.enumerate_directions(q)
    assert len(dirs) == n
    V = np.array(dirs)
    assert not any(not np.cross(V[i], V[j]).__mod__(q).any()
                   for i, j in itertools.combinations(range(len(dirs)), 2))


@pytest.mark.parametrize("q", [2, 3, 5])
def test_line_canonical_form(q):
    lines = list(kk.all_lines(q))
    assert len(lines) == q * q * (q * q + q + 1) == len(set(lines))
    for l in lines:
        assert len(set(l.points())) == q
        assert kk.ALine3(q, l.direction, l.base) == l
        assert l.base == min(l.points())
        for t in (1, q - 1):
            assert kk.ALine3(q, [t * c for c in l.direction], l.point(t)) == l


@pytest.mark.parametrize("q", [2, 3])
def test_two_lines_share_at_most_one_point(q):
    lines = list(kk.all_lines(q))
    pts = [set(l.points()) for l in lines]
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            common = pts[i] & pts[j]
            assert len(common) <= 1
            m = kk.meet(lines[i], lines[j])
            assert (m is None) == (not common)


def test_besicovitch_cone():
    for q in (3, 5):
        B = kk.besicovitch_build(kk.cone_assignment(q), q)
        assert B.size == kk.cone_size(q) == (q * q + q + 1) * (q - 1) + 1
    assert kk.cone_size(3) == 27


def test_besicovitch_random_and_missing():
    q = 3
    rng = np.random.default_rng(0)
    asg = {d: tuple(int(x) for x in rng.integers(0, q, 3)) for d in kk.enumerate_directions(q)}
    B = kk.besicovitch_build(asg, q)
    assert B.contains_all_lines()
    assert B.size == oracles.union_size(asg.items(), q)
    asg.pop((0, 0, 1))
    with pytest.raises(MissingDirection):
        kk.besicovitch_build(asg, q)


def test_wolff_examples():
    q = 5
    pencil = [kk.ALine3(q, (1, m, 0), (0, 0, 0)) for m in range(q)] + [kk.ALine3(q, (0, 1, 0), (0, 0, 0))]
    r = kk.wolff_axiom_check(pencil)
    assert r.max_per_plane == q + 1 and r.argmax == kk.Plane3(q, (0, 0, 1), 0)
    cone = kk.besicovitch_build(kk.cone_assignment(q), q).lines
    r = kk.wolff_axiom_check(cone)
    assert r.max_per_plane == q + 1 and r.argmax.offset == 0
    assert kk.wolff_axiom_check([]).max_per_plane == 0


@given(st.integers(0, 2**32 - 1))
def test_wolff_matches_plane_scan(seed):
    q = 3
    rng = np.random.default_rng(seed)
    L = {random_line(q, rng) for _ in range(int(rng.integers(1, 25)))}
    best = 0
    for n in kk.enumerate_directions(q):
        for c in range(q):
            pl = kk.Plane3(q, n, c)
            best = max(best, sum(pl.contains_line(l) for l in L))
    assert kk.wolff_axiom_check(L).max_per_plane == best


def saddle_lines(q):
    return [kk.ALine3(q, (0, 1, x), (x, 0, 0)) for x in (0, 1, 2)]


def test_saddle_regulus():
    q = 5
    ls = saddle_lines(q)
    for x, l in zip((0, 1, 2), ls):
        assert set(l.points()) == {(x, y, x * y % q) for y in range(q)}
    T = kk.lines_meeting_three(*ls)
    assert T
    surface = {(x, y, x * y % q) for x in range(q) for y in range(q)}
    assert all(set(l.points()) <= surface for l in T)
    Q = kk.regulus_fit(*ls)
    xy, z = kk.MONOMIALS.index("xy"), kk.MONOMIALS.index("z")
    s = Q.coeffs[xy]
    assert [c for i, c in enumerate(Q.coeffs) if i not in (xy, z)] == [0] * 8
    assert (Q.coeffs[z] + s) % q == 0 and s


def test_meeting_three_parallel_in_plane():
    q = 5
    ls = [kk.ALine3(q, (1, 0, 0), (0, y, 0)) for y in (0, 1, 2)]
    T = kk.lines_meeting_three(*ls)
    assert T and all(p[2] == 0 for l in T for p in l.points())
    assert isinstance(kk.regulus_fit(ls[0], ls[1], kk.ALine3(q, (0, 1, 0), (0, 0, 1))), kk.Plane3)


def test_meeting_three_rejects_intersecting():
    q = 5
    l1 = kk.ALine3(q, (1, 0, 0), (0, 0, 0))
    l2 = kk.ALine3(q, (0, 1, 0), (0, 0, 0))
    l3 = kk.ALine3(q, (0, 0, 1), (1, 1, 0))
    with pytest.raises(NotDisjoint):
        kk.lines_meeting_three(l1, l2, l3)
    with pytest.raises(NotSkew):
        kk.regulus_fit(l1, l2, l3)


@pytest.mark.parametrize("q", [3, 5, 7])
def test_transversal_methods_agree(q):
    rng = np.random.default_rng(q)
    done = 0
    while done < 15:
        ls = [random_line(q, rng) for _ in range(3)]
        try:
            a = kk.lines_meeting_three(*ls)
        except NotDisjoint:
            continue
        assert a == kk.lines_meeting_three(*ls, method="brute")
        assert a == kk.lines_meeting_three(*ls, universe=kk.all_lines(q)) if q <= 5 else True
        done += 1


@pytest.mark.parametrize("q", [3, 5, 7])
def test_regulus_vanishes_on_transversals(q):
    rng = np.random.default_rng(100 + q)
    for _ in range(30):
        ls = random_skew_triple(q, rng)
        Q = kk.regulus_fit(*ls)
        assert any(Q.coeffs)
        for l in kk.lines_meeting_three(*ls):
            assert Q.vanishes_on(l)


def test_hairbrush():
    q = 5
    stem = kk.ALine3(q, (0, 0, 1), (0, 0, 0))
    l0 = kk.ALine3(q, (1, 0, 0), (0, 0, 0))
    l1 = kk.ALine3(q, (0, 1, 0), (0, 0, 1))
    far = [kk.ALine3(q, (1, 0, 0), (0, 1, 2))]
    assert kk.hairbrush(stem, far, (l0, l1)) == []
    p = (0, 0, 3)
    pencil = [kk.line_through(q, p, d) for d in kk.enumerate_directions(q)]
    got = kk.hairbrush(stem, pencil, (l0, l1))
    assert set(got) == set(pencil) - {stem}
    with pytest.raises(ExcludedNotMeetingStem):
        kk.hairbrush(stem, pencil, (l0, far[0]))
    rng = np.random.default_rng(4)
    L = [random_line(q, rng) for _ in range(200)]
    for l in kk.hairbrush(stem, L, (l0, l1)):
        common = set(l.points()) & set(stem.points())
        assert len(common) == 1 and common.isdisjoint({(0, 0, 0), (0, 0, 1)})


def test_normalize_frame():
    q = 7
    assert kk.normalize_frame(*kk.canonical_triple(q)).is_identity()
    rng = np.random.default_rng(1)
    built = 0
    while built < 10:
        l0, l1 = random_line(q, rng), random_line(q, rng)
        if kk.intersects(l0, l1) or l0.parallel(l1):
            continue
        a, b = rng.choice(q, 2)
        stem = kk.line_from_points(q, l0.point(int(a)), l1.point(int(b)))
        fm = kk.normalize_frame(l0, stem, l1)
        c0, cs, c1 = kk.canonical_triple(q)
        for src, dst in ((l0, c0), (stem, cs), (l1, c1)):
            assert {fm(p) for p in src.points()} == set(dst.points())
        inv = fm.inverse()
        assert all(inv(fm(p)) == p for p in l0.points())
        # hairbrush sizes survive the change of frame
        L = [random_line(q, rng) for _ in range(40)]
        hb = kk.hairbrush(stem, L, (l0, l1))
        hb2 = kk.hairbrush(cs, [fm.map_line(l) for l in L], (c0, c1))
        assert len(hb) == len(hb2)
        built += 1
    l0 = kk.ALine3(q, (1, 0, 0), (0, 0, 0))
    with pytest.raises(BadConfiguration):
        kk.normalize_frame(l0, kk.ALine3(q, (0, 0, 1), (0, 0, 0)), kk.ALine3(q, (0, 1, 0), (0, 0, 0)))


def test_pi_map_examples():
    q = 7
    assert kk.pi_map(kk.line_from_points(q, (2, 0, 0), (0, 3, 1))) == (4, 5)
    assert kk.pi_map(kk.line_from_points(q, (1, 0, 0), (0, 1, 1))) == (1, 1)
    with pytest.raises(DegenerateIntersection):
        kk.pi_map(kk.line_from_points(q, (0, 0, 0), (0, 3, 1)))


@pytest.mark.parametrize("q", [5, 7, 11])
def test_pi_map_injective(q):
    lines = kk.valid_pi_lines(q)
    imgs = [kk.pi_map(l) for l in lines]
    assert len(set(imgs)) == len(lines) == (q - 1) ** 2
    for l, (X, Y) in zip(lines, imgs):
        x = oracles.mod_inverse(X, q)
        y = oracles.mod_inverse(Y, q)
        assert l.contains((x, 0, 0)) and l.contains((0, y, 1))


def test_lambda_map_examples():
    q = 7
    l = kk.ALine3(q, (1, 1, 1), (0, 0, 2))
    assert kk.lambda_map(l) == PLine(q, 2, 1, 1)  # 1 + Y + 2X = 0
    with pytest.raises(DegenerateLine):
        kk.lambda_map(kk.ALine3(q, (1, 1, 1), (0, 0, 1)))
    with pytest.raises(DegenerateLine):
        kk.lambda_map(kk.ALine3(q, (1, 1, 1), (0, 0, 0)))
    rng = np.random.default_rng(0)
    L = kk.valid_lambda_lines(11)
    for i in rng.choice(len(L), 30, replace=False):
        p = kk.lambda_params(L[int(i)])
        assert p.alpha and p.beta


@pytest.mark.parametrize("q", [5, 7])
def test_forward_incidence_and_fibres(q):
    P = kk.valid_pi_lines(q)
    L = kk.valid_lambda_lines(q)
    for lp in P:
        pt = kk.pi_point(lp)
        for l in L:
            if lp != l and kk.meet(lp, l) is not None:
                assert incident(pt, kk.lambda_map(l))
    for l in L:
        p = kk.lambda_params(l)
        g = kk.lambda_fiber_guides(p.alpha, p.beta, q)
        assert all(kk.intersects(l, m) for m in g)
        assert not any(kk.intersects(g[i], g[j]) for i, j in ((0, 1), (0, 2), (1, 2)))


def test_kakeya_search():
    r = kk.kakeya_min_search(3, trials=2, seed=0)
    assert r.cone == 27
    assert r.trivial_bound <= r.min_size <= 27
    B = kk.besicovitch_build(r.best_assignment, 3)
    assert B.size == r.min_size == oracles.union_size(r.best_assignment.items(), 3)
    assert r == kk.kakeya_min_search(3, trials=2, seed=0)
    with pytest.raises(BudgetExceeded):
        kk.kakeya_min_search(17, 1, 0)


def test_line_file_roundtrip(tmp_path):
    q = 5
    rng = np.random.default_rng(2)
    L = sorted({random_line(q, rng) for _ in range(10)})
    f = tmp_path / "lines.txt"
    kk.write_lines(f, L)
    assert kk.read_lines(f, q) == L
    asg = kk.cone_assignment(q)
    kk.write_assignment(f, asg, q)
    assert kk.read_assignment(f, q) == asg
