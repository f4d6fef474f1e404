"""Invariant suites. Each returns a SuiteResult with the number of cases
checked and the number that failed; verify-all runs them at one small q."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kakeya as kk
from .distance import bisector, dist, distance_set, grid_identity_rhs
from .errors import NoCollisionInBudget, NotSkew
from .field import FSet, is_prime, make_field
from .incidence import (
    _all_affine_lines,
    affine_point,
    count_incidences,
    cs_count,
    easy_bound_check,
    elekes_construct,
    incidence_relation,
    popular_restrict,
)
from .setops import cauchy_davenport_batch, plunnecke_check, ruzsa_cover, sumset, prodset
from .sumprod import boost_bound, boost_xi, build_surjection, find_collision, reduce_rank


@dataclass(frozen=True)
class SuiteResult:
    name: str
    q: int
    checked: int
    violations: int
    skipped: int = 0
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def csv_row(self) -> list:
        return [self.name, self.q, self.checked, self.violations, self.skipped,
                "pass" if self.ok else "FAIL", self.detail]


SUITE_HEADER = ["suite", "q", "checked", "violations", "skipped", "status", "detail"]


def primes_between(lo: int, hi: int) -> list[int]:
    return [p for p in range(lo, hi + 1) if is_prime(p)]


def _all_masks(q: int) -> np.ndarray:
    return np.arange(1, 1 << q, dtype=np.uint64)


def _random_subset(F, rng, lo=1, hi=None) -> FSet:
    hi = F.q if hi is None else hi
    n = int(rng.integers(lo, hi + 1))
    return F.subset(rng.choice(F.q, size=n, replace=False).tolist())


# ---------------------------------------------------------------------------
# additive


def cauchy_davenport_suite(q: int, random_pairs: int = 0, seed: int = 0) -> SuiteResult:
    """All nonempty pairs when q <= 7, else seeded random mask pairs; plus
    equality on every pair of progressions with a common difference."""
    make_field(q)
    checked = bad = 0
    if q <= 7:
        m = _all_masks(q)
        a = np.repeat(m, m.shape[0])
        b = np.tile(m, m.shape[0])
        ok = cauchy_davenport_batch(q, a, b)
        checked += ok.size
        bad += int((~ok).sum())
    if random_pairs:
        rng = np.random.default_rng(seed)
        for lo in range(0, random_pairs, 1 << 16):
            n = min(1 << 16, random_pairs - lo)
            a = rng.integers(1, 1 << q, size=n, dtype=np.uint64)
            b = rng.integers(1, 1 << q, size=n, dtype=np.uint64)
            ok = cauchy_davenport_batch(q, a, b)
            checked += n
            bad += int((~ok).sum())
    F = make_field(q)
    eq_bad = 0
    for d in range(1, q):
        for m in range(1, q + 1):
            A = F.subset([i * d for i in range(m)])
            for n in range(1, q + 1):
                B = F.subset([1 + i * d for i in range(n)])
                checked += 1
                if len(sumset(A, B)) != min(m + n - 1, q):
                    eq_bad += 1
    return SuiteResult("cauchy_davenport", q, checked, bad + eq_bad,
                       detail=f"progression equality failures={eq_bad}")


def boost_suite(q: int, random_pairs: int = 0, seed: int = 0) -> SuiteResult:
    F = make_field(q)
    checked = bad = 0

    def check(A, B):
        xi, size = boost_xi(A, B)
        return size >= boost_bound(len(A), len(B), q) and len(sumset(A, F.subset((B.elements * xi) % q))) == size

    if q <= 7:
        sets = [F.from_bool(((m >> np.arange(q)) & 1).astype(bool)) for m in range(1, 1 << q)]
        for A in sets:
            for B in sets:
                checked += 1
                bad += not check(A, B)
    rng = np.random.default_rng(seed)
    for _ in range(random_pairs):
        checked += 1
        bad += not check(_random_subset(F, rng), _random_subset(F, rng))
    return SuiteResult("boost_xi", q, checked, bad)


def ruzsa_suite(q: int) -> SuiteResult:
    F = make_field(q)
    sets = [F.from_bool(((m >> np.arange(q)) & 1).astype(bool)) for m in range(1, 1 << q)]
    checked = bad = 0
    for A in sets:
        for B in sets:
            c = ruzsa_cover(A, B)
            checked += 1
            bad += not (c.covers() and c.greedy_bound_holds() and c.translates_disjoint())
    return SuiteResult("ruzsa_cover", q, checked, bad)


def plunnecke_suite(q: int, max_hk: int = 4) -> SuiteResult:
    F = make_field(q)
    hk = [(h, k) for h in range(max_hk + 1) for k in range(max_hk + 1) if 1 <= h + k <= max_hk]
    checked = bad = 0
    for m in range(1, 1 << q):
        A = F.from_bool(((m >> np.arange(q)) & 1).astype(bool))
        for h, k in hk:
            checked += 1
            bad += not plunnecke_check(A, h, k)[2]
    return SuiteResult("plunnecke", q, checked, bad)


def surjection_suite(q: int, n_sets: int = 1000, seed: int = 0) -> SuiteResult:
    """build_surjection covers F; rank reduction keeps covering down to rank 1."""
    F = make_field(q)
    rng = np.random.default_rng(seed)
    checked = bad = skipped = 0
    for _ in range(n_sets):
        A = _random_subset(F, rng, lo=2, hi=q - 1)
        checked += 1
        try:
            S = build_surjection(A)
        except AssertionError:
            bad += 1
            continue
        if S.image() != F.full() or S.cover_size != q:
            bad += 1
            continue
        B = A
        while S.k > 1:
            try:
                col = find_collision(B, S)
            except NoCollisionInBudget:
                skipped += 1
                break
            checked += 1
            if col.residual(S.coeffs, q) != 0:
                bad += 1
                break
            try:
                B, S, _ = reduce_rank(B, S)
            except AssertionError:
                bad += 1
                break
            if S.image() != F.full():
                bad += 1
                break
    return SuiteResult("surjection", q, checked, bad, skipped)


# ---------------------------------------------------------------------------
# incidence


def elekes_suite(q: int, max_size: int = 5) -> SuiteResult:
    F = make_field(q)
    checked = bad = 0
    for n in range(1, max_size + 1):
        for A in itertools.combinations(range(1, q), n):
            A = F.subset(A)
            inst = elekes_construct(A)
            checked += 1
            ok = (inst.incidences >= n ** 3
                  and len(inst.points) == len(sumset(A, A)) * len(prodset(A, A))
                  and len(inst.lines) == n * n)
            bad += not ok
    return SuiteResult("elekes", q, checked, bad)


def easy_bound_suite(q: int, n_instances: int = 1000, seed: int = 0) -> SuiteResult:
    """Random affine instances: exact incidence chain and the Cauchy-Schwarz count."""
    make_field(q)
    rng = np.random.default_rng(seed)
    lines = _all_affine_lines(q)
    checked = bad = 0
    for _ in range(n_instances):
        nP = int(rng.integers(1, min(q * q, 3 * q) + 1))
        nL = int(rng.integers(1, min(len(lines), 3 * q) + 1))
        P = [affine_point(q, i // q, i % q) for i in rng.choice(q * q, size=nP, replace=False).tolist()]
        L = [lines[i] for i in rng.choice(len(lines), size=nL, replace=False).tolist()]
        checked += 1
        bad += not (easy_bound_check(P, L).holds and cs_count(incidence_relation(P, L)).holds)
    return SuiteResult("easy_bound", q, checked, bad)


def full_plane_incidences(q: int) -> int:
    """Incidences between all q^2 affine points and all q^2 + q affine lines."""
    P = [affine_point(q, x, y) for x in range(q) for y in range(q)]
    return count_incidences(P, _all_affine_lines(q))


def popularity_suite(n_vectors: int = 10_000, seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(n_vectors):
        w = rng.integers(0, 20, size=int(rng.integers(1, 60))).tolist()
        total = sum(w)
        X = Fraction(int(rng.integers(0, total + 1)), int(rng.integers(1, 4)))
        rep = popular_restrict(w, X)
        thr = X / (2 * len(w))
        mass = sum(v for v in w if v >= thr)
        bad += not (2 * mass >= X and rep.retained == mass)
    return SuiteResult("popular_restrict", 0, n_vectors, bad)


# ---------------------------------------------------------------------------
# distances


def bisector_suite(q: int) -> SuiteResult:
    """p on bisector(p0, p1) iff d(p, p0) = d(p, p1), over all p0 != p1 and p;
    and d(p, p') = 0 only for p = p'."""
    pts = np.array([(x, y) for x in range(q) for y in range(q)], dtype=np.int64)
    X, Y = pts[:, 0], pts[:, 1]
    checked = bad = 0
    for i0, (a0, b0) in enumerate(pts.tolist()):
        coeffs = []
        for a1, b1 in pts.tolist():
            if (a1, b1) == (a0, b0):
                continue
            l = bisector((a0, b0), (a1, b1), q)
            coeffs.append((l.a, l.b, l.c, a1, b1))
        C = np.array(coeffs, dtype=np.int64)
        on = (C[:, 0:1] * X + C[:, 1:2] * Y + C[:, 2:3]) % q == 0
        d0 = ((X - a0) ** 2 + (Y - b0) ** 2) % q
        d1 = ((X[None, :] - C[:, 3:4]) ** 2 + (Y[None, :] - C[:, 4:5]) ** 2) % q
        checked += on.size
        bad += int((on != (d0[None, :] == d1)).sum())
    D = ((X[:, None] - X[None, :]) ** 2 + (Y[:, None] - Y[None, :]) ** 2) % q
    zero_bad = int(((D == 0) & ~np.eye(q * q, dtype=bool)).sum())
    assert dist((0, 0), (1, 0), q) == 1
    return SuiteResult("bisector", q, checked + D.size, bad + zero_bad,
                       detail=f"zero-distance pairs={zero_bad}")


def grid_identity_suite(q: int) -> SuiteResult:
    F = make_field(q)
    checked = bad = 0
    for m in range(1, 1 << q):
        A = F.from_bool(((m >> np.arange(q)) & 1).astype(bool))
        el = A.elements.tolist()
        checked += 1
        bad += distance_set([(x, y) for x in el for y in el], q) != grid_identity_rhs(A)
    return SuiteResult("grid_identity", q, checked, bad)


# ---------------------------------------------------------------------------
# kakeya


def directions_suite(q: int) -> SuiteResult:
    dirs = kk.enumerate_directions(q)
    V = np.array(dirs, dtype=np.int64)
    # pairwise proportional iff the cross product vanishes
    cr = np.cross(V[:, None, :], V[None, :, :]) % q
    prop = ~cr.any(axis=2)
    bad = int(len(dirs) != q * q + q + 1) + int(prop.sum() - len(dirs))
    return SuiteResult("directions", q, len(dirs) ** 2 + 1, bad)


def random_line(q: int, rng) -> kk.ALine3:
    while True:
        d = tuple(int(x) for x in rng.integers(0, q, 3))
        if any(d):
            return kk.ALine3(q, d, tuple(int(x) for x in rng.integers(0, q, 3)))


def random_skew_triple(q: int, rng):
    while True:
        ls = [random_line(q, rng) for _ in range(3)]
        try:
            kk._check_disjoint(ls, NotSkew)
        except NotSkew:
            continue
        if not any(ls[i].parallel(ls[j]) for i, j in ((0, 1), (0, 2), (1, 2))):
            return ls


def regulus_suite(q: int, n_triples: int = 100, seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng(seed)
    checked = bad = 0
    for _ in range(n_triples):
        ls = random_skew_triple(q, rng)
        Q = kk.regulus_fit(*ls)
        bad += not all(Q.vanishes_on(l) for l in ls)
        for l in kk.lines_meeting_three(*ls):
            checked += 1
            bad += not Q.vanishes_on(l)
    return SuiteResult("regulus", q, checked, bad)


def saddle_quadric(q: int) -> kk.Quadric:
    """Regulus through {(x_j, y, x_j y)} for x_j = 0, 1, 2."""
    return kk.regulus_fit(*[kk.ALine3(q, (0, 1, x), (x, 0, 0)) for x in (0, 1, 2)])


def saddle_suite(q: int) -> SuiteResult:
    Q = saddle_quadric(q)
    target = [0] * 10
    target[kk.MONOMIALS.index("xy")] = 1
    target[kk.MONOMIALS.index("z")] = q - 1
    s = Q.coeffs[kk.MONOMIALS.index("xy")]
    ok = s != 0 and tuple(c * s % q for c in target) == Q.coeffs
    return SuiteResult("saddle_regulus", q, 1, int(not ok), detail=str(Q))


def planar_reduction_suite(q: int) -> SuiteResult:
    """Pi injective; Pi(l') on Lambda(l) whenever l meets l'; fibre lines meet the guides."""
    from .incidence import incident

    P = kk.valid_pi_lines(q)
    L = kk.valid_lambda_lines(q)
    bad = int(len({kk.pi_map(l) for l in P}) != len(P))
    checked = len(P)
    lam = {l: kk.lambda_map(l) for l in L}
    for lp in P:
        pt = kk.pi_point(lp)
        for l in L:
            if lp != l and kk.meet(lp, l) is not None:
                checked += 1
                bad += not incident(pt, lam[l])
    for l in L:
        p = kk.lambda_params(l)
        for g in kk.lambda_fiber_guides(p.alpha, p.beta, q):
            checked += 1
            bad += not kk.intersects(l, g)
    return SuiteResult("planar_reduction", q, checked, bad)


# ---------------------------------------------------------------------------


def verify_all(q: int, seed: int = 0) -> list[SuiteResult]:
    """Every exhaustive suite at one small prime q (3 <= q <= 13)."""
    make_field(q)
    if not 3 <= q <= 13:
        raise ValueError("verify-all runs at desk scale, 3 <= q <= 13")
    out = [
        cauchy_davenport_suite(q, random_pairs=0 if q <= 7 else 10_000, seed=seed),
        boost_suite(q, random_pairs=0 if q <= 7 else 1_000, seed=seed),
        plunnecke_suite(q),
        surjection_suite(q, n_sets=100, seed=seed) if q >= 5 else None,
        elekes_suite(q, max_size=min(5, q - 1)),
        easy_bound_suite(q, n_instances=100, seed=seed),
        popularity_suite(1000, seed=seed),
        grid_identity_suite(q),
        directions_suite(q),
        regulus_suite(q, n_triples=20, seed=seed),
        saddle_suite(q),
        planar_reduction_suite(q),
    ]
    if q <= 7:
        out.append(ruzsa_suite(q))
    if q % 4 == 3:
        out.append(bisector_suite(q))
    if q == 5:
        n = full_plane_incidences(q)
        out.append(SuiteResult("full_plane", q, 1, int(n != q * (q * q + q)), detail=f"I={n}"))
    return [r for r in out if r is not None]
