"""Dilation boosts, linear surjections A^k -> F, rank reduction, and extremal search."""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import asdict, dataclass
from math import ceil, comb, log

import numpy as np

from . import kernels
from .errors import BudgetExceeded, EmptyInput, NoCollisionInBudget, SizeOutOfRange, TooSmall
from .field import FSet, PrimeField, make_field
from .setops import dilate, diffset, prodset, sumset

EXHAUSTIVE_LIMIT = 10**8


def boost_xi(A: FSet, B: FSet) -> tuple[int, int]:
    """Smallest xi in F* maximising |A + xi*B|, and that maximum.

    The scan stops early once the trivial ceiling min(|A||B|, q) is hit.
    """
    if not len(A) or not len(B):
        raise EmptyInput("boost_xi needs nonempty sets")
    q = A.q
    ceiling = min(len(A) * len(B), q)
    sizes = kernels.dilate_sum_sizes(A.elements, B.elements, q, ceiling)
    xi = int(np.argmax(sizes))  # first maximum; sizes[0] == -1
    return xi, int(sizes[xi])


def boost_bound(nA: int, nB: int, q: int) -> int:
    """ceil(min(|A||B|/2, q/10))."""
    return min(-(-nA * nB // 2), -(-q // 10))


def sumset_of_dilates(A: FSet, coeffs) -> FSet:
    out = None
    for xi in coeffs:
        term = dilate(A, xi)
        out = term if out is None else sumset(out, term)
    return out


@dataclass(frozen=True)
class Surjection:
    coeffs: tuple[int, ...]
    source: FSet
    cover_size: int

    @property
    def k(self) -> int:
        return len(self.coeffs)

    @property
    def surjective(self) -> bool:
        return self.cover_size == self.source.q

    def image(self) -> FSet:
        return sumset_of_dilates(self.source, self.coeffs)


def make_surjection(source: FSet, coeffs) -> Surjection:
    coeffs = tuple(int(c) % source.q for c in coeffs)
    return Surjection(coeffs, source, len(sumset_of_dilates(source, coeffs)))


def surjection_guard(q: int, n: int) -> int:
    return 2 * ceil(log(q) / log(n)) + 12


def build_surjection(A: FSet) -> Surjection:
    """Coefficients xi_1 = 1, xi_2, ... with A*xi_1 + ... + A*xi_k = F.

    Each step appends the smallest xi maximising the size of the running sum.
    Until the sum reaches q/10 this is the dilation boost; afterwards the same
    maximiser is at least as large as the xi = 1 Cauchy-Davenport step.
    """
    q = A.q
    if A.is_full():
        return Surjection((1,), A, q)
    if len(A) <= 1:
        raise TooSmall("build_surjection needs |A| >= 2")
    guard = surjection_guard(q, len(A))
    coeffs = [1]
    running = A
    while len(running) < q:
        if len(coeffs) >= guard:
            raise AssertionError(f"surjection exceeded guard k <= {guard} (q={q}, |A|={len(A)})")
        xi, size = boost_xi(running, A)
        coeffs.append(xi)
        running = sumset(running, dilate(A, xi))
        assert len(running) == size
    return Surjection(tuple(coeffs), A, len(running))


@dataclass(frozen=True)
class Collision:
    tuple_a: tuple[int, ...]
    tuple_b: tuple[int, ...]

    def residual(self, coeffs, q: int) -> int:
        return sum((x - y) * c for x, y, c in zip(self.tuple_a, self.tuple_b, coeffs)) % q


def find_collision(B: FSet, S: Surjection) -> Collision:
    """First repeated weighted sum when scanning B^k in lexicographic order."""
    q = B.q
    k = S.k
    if len(B) ** k <= q:
        raise NoCollisionInBudget(f"|B|^k = {len(B) ** k} <= q = {q}; no collision is forced")
    seen: dict[int, tuple[int, ...]] = {}
    elems = B.elements.tolist()
    for tup in itertools.product(elems, repeat=k):
        s = sum(x * c for x, c in zip(tup, S.coeffs)) % q
        prev = seen.get(s)
        if prev is not None:
            return Collision(prev, tup)
        seen[s] = tup
    raise AssertionError("pigeonhole violated")  # unreachable


def btilde(B: FSet) -> FSet:
    """B*(B - B) + B*(B - B)."""
    t = prodset(B, diffset(B, B))
    return sumset(t, t)


@dataclass(frozen=True)
class RankStep:
    source: FSet
    collision: Collision
    pivot: int  # coordinate with b_k != b_k', moved to the end
    reduced: Surjection


def reduce_rank(B: FSet, S: Surjection) -> tuple[FSet, Surjection, RankStep]:
    """One rank-reduction step: a surjection from B~^(k-1), B~ = B(B-B) + B(B-B).

    With the collision (b) != (b') and b_k != b_k' (after moving the last
    differing coordinate to the end), every element equals
    sum_{j<k} xi_j * [ u_j (b_k - b_k') - v_j (b_j - b_j') ], u_j, v_j in B,
    and each bracket lies in B~. The new coefficients are xi_1..xi_{k-1}.
    """
    if S.source != B:
        raise ValueError("surjection source must equal B")
    if S.k <= 1:
        raise ValueError("rank is already 1")
    if not S.surjective:
        raise ValueError("surjection hypothesis fails")
    col = find_collision(B, S)
    diffs = [j for j in range(S.k) if col.tuple_a[j] != col.tuple_b[j]]
    pivot = diffs[-1]
    order = [j for j in range(S.k) if j != pivot]
    Bt = btilde(B)
    reduced = make_surjection(Bt, [S.coeffs[j] for j in order])
    if not reduced.surjective:
        raise AssertionError("rank reduction lost surjectivity")
    return Bt, reduced, RankStep(B, col, pivot, reduced)


def reduce_to_rank_one(A: FSet, S: Surjection | None = None) -> list[RankStep]:
    S = S or build_surjection(A)
    steps = []
    B = S.source
    while S.k > 1:
        B, S, step = reduce_rank(B, S)
        steps.append(step)
    return steps


# ---------------------------------------------------------------------------
# extremal search

STATISTICS = {"max": 0, "sum": 1, "prod": 2}


@dataclass(frozen=True)
class ExponentRow:
    q: int
    n: int
    min_max: int
    argmin: tuple[int, ...]
    mode: str
    trials: int
    seed: int
    statistic: str = "max"
    symmetry: bool = False
    scanned: int = 0

    @property
    def exact(self) -> bool:
        return self.mode == "exhaustive"

    @property
    def epsilon(self) -> float:
        """Measured exponent: log(minMax)/log(n) - 1 (nan for n = 1)."""
        if self.n <= 1:
            return float("nan")
        return log(self.min_max) / log(self.n) - 1

    def csv_row(self) -> list:
        return [self.q, self.n, self.min_max, self.mode, self.trials, self.seed,
                " ".join(map(str, self.argmin))]

    def as_dict(self) -> dict:
        d = asdict(self)
        d["argmin"] = list(self.argmin)
        return d


CSV_HEADER = ["q", "n", "minMax", "mode", "trials", "seed", "argmin"]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sorted(rows, key=lambda r: (r.q, r.n, r.mode, r.seed)):
        w.writerow(r.csv_row())
    return buf.getvalue()


def rows_to_json(rows) -> str:
    ordered = sorted(rows, key=lambda r: (r.q, r.n, r.mode, r.seed))
    return json.dumps([r.as_dict() for r in ordered], indent=2, sort_keys=True) + "\n"


def _stat(sub: np.ndarray, q: int, statistic: str) -> tuple[int, int]:
    s, p = kernels.subset_stats(sub, q)
    if statistic == "sum":
        return s, s
    if statistic == "prod":
        return p, p
    return max(s, p), s + p


def sumprod_min_search(q: int, n: int, mode: str = "exhaustive", trials: int = 0,
                       seed: int = 0, statistic: str = "max", symmetry: bool = False) -> ExponentRow:
    """Minimum of max(|A+A|, |A.A|) over n-subsets of F_q.

    ``exhaustive`` is a true minimum (lexicographically first witness);
    ``randomized`` is seeded hill-climbing and gives an upper bound.
    ``symmetry`` restricts exhaustive search to sets containing 0 and 1,
    which is only valid for the affine-invariant ``statistic="sum"``.
    """
    F = make_field(q)
    if not 2 <= n <= q:
        raise SizeOutOfRange(f"need 2 <= n <= q, got n={n}, q={q}")
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}")
    if symmetry and statistic != "sum":
        raise ValueError("symmetry reduction is only valid for the sum statistic")
    if mode == "exhaustive":
        count = comb(q - 2, n - 2) if symmetry else comb(q, n)
        if count > EXHAUSTIVE_LIMIT:
            raise BudgetExceeded(f"C({q},{n}) = {count} subsets exceeds {EXHAUSTIVE_LIMIT}")
        best, arg, scanned = kernels.minmax_exhaustive(q, n, STATISTICS[statistic], symmetry)
        return ExponentRow(q, n, int(best), tuple(int(x) for x in arg), mode, 0, seed,
                           statistic, symmetry, int(scanned))
    if mode == "randomized":
        if trials < 1:
            raise ValueError("randomized mode needs trials >= 1")
        best, arg = _hill_climb(F, n, trials, seed, statistic)
        return ExponentRow(q, n, best, arg, mode, trials, seed, statistic, False, trials)
    raise ValueError(f"unknown mode {mode!r}")


def _hill_climb(F: PrimeField, n: int, trials: int, seed: int, statistic: str):
    """Swap one element at a time; accept strict improvements of (stat, tiebreak)."""
    q = F.q
    rng = np.random.default_rng(seed)
    stall_limit = max(100, 10 * n)
    best_key = None
    best_set: tuple[int, ...] = ()

    def restart():
        return np.sort(rng.choice(q, size=n, replace=False)).astype(np.int64)

    cur = restart()
    cur_key = _stat(cur, q, statistic)
    stall = 0
    for _ in range(trials):
        cand_key = (cur_key[0], tuple(cur.tolist()))
        if best_key is None or cand_key < best_key:
            best_key, best_set = cand_key, tuple(cur.tolist())
        if n == q:
            break
        i = int(rng.integers(n))
        outside = np.setdiff1d(np.arange(q), cur, assume_unique=True)
        new = cur.copy()
        new[i] = outside[int(rng.integers(outside.shape[0]))]
        new.sort()
        key = _stat(new, q, statistic)
        if key < cur_key:
            cur, cur_key, stall = new, key, 0
        else:
            stall += 1
            if stall >= stall_limit:
                cur = restart()
                cur_key = _stat(cur, q, statistic)
                stall = 0
    cand_key = (cur_key[0], tuple(cur.tolist()))
    if best_key is None or cand_key < best_key:
        best_key, best_set = cand_key, tuple(cur.tolist())
    return int(best_key[0]), best_set
