"""Sum and product set algebra, Ruzsa covers, and the BSG refinements."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import (
    BudgetExceeded,
    EmptyDivisor,
    EmptyInput,
    FieldMismatch,
    HypothesisFailed,
    TooSmall,
    ZeroDilation,
)
from .field import FSet, PrimeField, rotate
from .polyexpr import PolyExpr, parse_poly, tuples_grid

DEFAULT_BUDGET = 10**7


def _same_field(A: FSet, B: FSet) -> PrimeField:
    if A.field != B.field:
        raise FieldMismatch(f"{A.field!r} vs {B.field!r}")
    return A.field


# ---------------------------------------------------------------------------
# basic set algebra


def sumset(A: FSet, B: FSet) -> FSet:
    """A + B as an OR of translated bitmasks."""
    F = _same_field(A, B)
    if len(A) < len(B):
        A, B = B, A
    acc = 0
    full = F.full_mask
    for b in B:
        acc |= rotate(A.mask, b, F.q, full)
        if acc == full:
            break
    return FSet(F, acc)


def negate(A: FSet) -> FSet:
    return A.field.subset((-A.elements) % A.q)


def diffset(A: FSet, B: FSet) -> FSet:
    _same_field(A, B)
    return sumset(A, negate(B))


def prodset(A: FSet, B: FSet) -> FSet:
    F = _same_field(A, B)
    if not len(A) or not len(B):
        return F.empty()
    return F.from_bool(kernels.mark_products(A.elements, B.elements, F.q))


def quotset(A: FSet, B: FSet) -> FSet:
    """A / B, silently skipping the divisor 0."""
    F = _same_field(A, B)
    nz = B.without_element(0)
    if not len(nz):
        raise EmptyDivisor("divisor set has no nonzero element")
    if not len(A):
        return F.empty()
    inv = F.inverse_table[nz.elements]
    return F.from_bool(kernels.mark_products(A.elements, inv, F.q))


def dilate(A: FSet, xi: int) -> FSet:
    xi %= A.q
    if xi == 0:
        raise ZeroDilation("dilation by 0 is not invertible")
    return A.field.subset((A.elements * xi) % A.q)


@dataclass(frozen=True)
class CDReport:
    lhs: int
    rhs: int
    holds: bool


def verify_cauchy_davenport(A: FSet, B: FSet) -> CDReport:
    F = _same_field(A, B)
    if not len(A) or not len(B):
        raise EmptyInput("Cauchy-Davenport needs nonempty sets")
    lhs = len(sumset(A, B))
    rhs = min(len(A) + len(B) - 1, F.q)
    return CDReport(lhs, rhs, lhs >= rhs)


def cauchy_davenport_batch(q: int, a_masks: np.ndarray, b_masks: np.ndarray) -> np.ndarray:
    """Boolean array: Cauchy-Davenport holds for each mask pair (q <= 63)."""
    if q > 63:
        raise ValueError("batch masks need q <= 63")
    a_masks = np.asarray(a_masks, dtype=np.uint64)
    b_masks = np.asarray(b_masks, dtype=np.uint64)
    lhs = kernels.sumset_sizes_masks(a_masks, b_masks, q)
    na = np.bitwise_count(a_masks).astype(np.int64)
    nb = np.bitwise_count(b_masks).astype(np.int64)
    return lhs >= np.minimum(na + nb - 1, q)


def iterated_combination(signs: Sequence[int], A: FSet) -> FSet:
    """s1*A + s2*A + ... for signs s_i in {+1, -1}."""
    if not signs:
        raise ValueError("signs must be nonempty")
    neg = None
    out = None
    for s in signs:
        if s not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {s}")
        if s == -1 and neg is None:
            neg = negate(A)
        term = A if s == 1 else neg
        out = term if out is None else sumset(out, term)
    return out


def hk_set(A: FSet, h: int, k: int) -> FSet:
    return iterated_combination([1] * h + [-1] * k, A)


def plunnecke_check(A: FSet, h: int, k: int) -> tuple[int, Fraction, bool]:
    """(|hA - kA|, K^(h+k)|A|, holds) with K = |A+A|/|A|."""
    if not len(A):
        raise EmptyInput("empty set")
    K = Fraction(len(sumset(A, A)), len(A))
    lhs = len(hk_set(A, h, k))
    rhs = K ** (h + k) * len(A)
    return lhs, rhs, lhs <= rhs


def polynomial_image(P: PolyExpr | str, A: FSet, budget: int = DEFAULT_BUDGET) -> FSet:
    """{P(a_1, ..., a_m) : a_i in A}, by enumerating A^m."""
    if isinstance(P, str):
        P = parse_poly(P)
    F = A.field
    m = P.nvars
    total = len(A) ** m
    if total > budget:
        raise BudgetExceeded(f"|A|^{m} = {total} exceeds budget {budget}")
    if total == 0:
        return F.empty()
    seen = np.zeros(F.q, dtype=bool)
    chunk = 1 << 18
    for start in range(0, total, chunk):
        cols = tuples_grid(A.elements, m, start, min(total, start + chunk))
        vals = np.asarray(P.evaluate(cols, F.q))
        seen[np.broadcast_to(vals, cols[0].shape) % F.q] = True
    return F.from_bool(seen)


# ---------------------------------------------------------------------------
# Ruzsa covering


@dataclass(frozen=True)
class Cover:
    """target is covered by X + base; body is the set whose translates were packed."""

    X: FSet
    body: FSet
    base: FSet
    target: FSet

    def covers(self) -> bool:
        if not len(self.X):
            return not len(self.target)
        return self.target <= sumset(self.X, self.base)

    def greedy_bound_holds(self) -> bool:
        return len(self.X) * len(self.body) <= len(sumset(self.body, self.target))

    def translates_disjoint(self) -> bool:
        acc = 0
        for x in self.X:
            t = self.body.shift(x).mask
            if acc & t:
                return False
            acc |= t
        return True


def ruzsa_cover(A: FSet, B: FSet) -> Cover:
    """Greedy maximal X in B with x + A pairwise disjoint, scanning B upward.

    Maximality gives B in X + (A - A), and packing gives |X||A| <= |A + B|.
    """
    F = _same_field(A, B)
    if not len(A):
        raise EmptyInput("ruzsa_cover needs nonempty A")
    used = 0
    chosen = 0
    full = F.full_mask
    for b in B:
        t = rotate(A.mask, b, F.q, full)
        if used & t == 0:
            used |= t
            chosen |= 1 << b
    return Cover(FSet(F, chosen), A, diffset(A, A), B)


def goodness_cover(x: int, A: FSet) -> Cover:
    """Cover of x*A by translates of A - A."""
    if not len(A):
        raise EmptyInput("goodness_cover needs nonempty A")
    x %= A.q
    target = A.field.subset([0]) if x == 0 else dilate(A, x)
    return ruzsa_cover(A, target)


# ---------------------------------------------------------------------------
# Balog-Szemeredi-Gowers
#
# Path convention. For a' in A, b' in B a representation is a 6-tuple
# (a1, b1, a2, b2, a3, b3) with every slot pair (a_i, b_i) an edge of G and
#     a' - b' = (a1 - b1) - (a2 - b2) + (a3 - b3).
# The count therefore depends only on a' - b'.


def _edge_array(G: Iterable[tuple[int, int]], q: int | None = None) -> np.ndarray:
    arr = np.asarray(sorted(set((int(a), int(b)) for a, b in G)), dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if q is not None:
        arr %= q
    return arr


def _difference_histogram(edges: np.ndarray, m: int) -> np.ndarray:
    D = np.zeros(m, dtype=np.int64)
    if edges.shape[0]:
        np.add.at(D, (edges[:, 0] - edges[:, 1]) % m, 1)
    return D


def bsg_rep_table(G, q: int) -> np.ndarray:
    """reps[t] = number of 6-tuples representing any a' - b' = t."""
    return kernels.bsg_rep_counts(_difference_histogram(_edge_array(G, q), q))


def count_bsg_paths(a1: int, b1: int, A: FSet, B: FSet, G) -> int:
    F = _same_field(A, B)
    edges = _edge_array(G, F.q)
    _check_edges(edges, A, B)
    if not edges.shape[0]:
        return 0
    return int(bsg_rep_table(edges, F.q)[(a1 - b1) % F.q])


def _check_edges(edges: np.ndarray, A: FSet, B: FSet) -> None:
    for a, b in edges.tolist():
        if a not in A or b not in B:
            raise ValueError(f"edge {(a, b)} not in A x B")


@dataclass(frozen=True)
class BsgCertificate:
    A_prime: FSet
    B_prime: FSet
    min_reps: int
    threshold: int
    ratio_A: Fraction
    ratio_B: Fraction
    ratio_diff: Fraction  # |A' - B'| / |A|

    def recount(self, A: FSet, B: FSet, G) -> int:
        """Minimum path count over A' x B', recomputed pair by pair."""
        return min(
            count_bsg_paths(a, b, A, B, G) for a in self.A_prime for b in self.B_prime
        )


def _bsg_core(a_el: np.ndarray, b_el: np.ndarray, edges: np.ndarray, m: int):
    """Popularity pruning then bad-pair deletion, in the cyclic group Z/m.

    Returns (A' elements, B' elements, min reps, threshold).
    """
    nA = a_el.shape[0]
    gsize = edges.shape[0]
    # stage 1: keep vertices of degree >= |G| / (2|A|)
    deg_a = {int(a): 0 for a in a_el}
    deg_b = {int(b): 0 for b in b_el}
    for a, b in edges.tolist():
        deg_a[a] += 1
        deg_b[b] += 1
    A1 = [a for a in sorted(deg_a) if 2 * nA * deg_a[a] >= gsize]
    B1 = [b for b in sorted(deg_b) if 2 * nA * deg_b[b] >= gsize]
    reps = kernels.bsg_rep_counts(_difference_histogram(edges, m))
    if not A1 or not B1:  # cannot happen when |G| > 0; keep the set nonempty anyway
        A1 = A1 or [int(a_el[0])]
        B1 = B1 or [int(b_el[0])]
    A1a = np.asarray(A1, dtype=np.int64)
    B1a = np.asarray(B1, dtype=np.int64)
    table = reps[(A1a[:, None] - B1a[None, :]) % m]
    # stage 2: threshold at half the mean path count, delete worst vertices
    tau = -(-int(table.sum()) // (2 * table.size))
    alive_a = np.ones(len(A1), dtype=bool)
    alive_b = np.ones(len(B1), dtype=bool)
    while True:
        bad = (table < tau) & alive_a[:, None] & alive_b[None, :]
        if not bad.any():
            break
        row = bad.sum(axis=1)
        col = bad.sum(axis=0)
        ra = int(np.argmax(row)) if alive_a.sum() > 1 else -1
        cb = int(np.argmax(col)) if alive_b.sum() > 1 else -1
        if ra < 0 and cb < 0:
            break
        if cb < 0 or (ra >= 0 and row[ra] >= col[cb]):
            alive_a[ra] = False
        else:
            alive_b[cb] = False
    Ap = A1a[alive_a]
    Bp = B1a[alive_b]
    sub = table[np.ix_(alive_a, alive_b)]
    return Ap, Bp, int(sub.min()), tau


def _bsg_hypotheses(nA: int, nB: int, gsize: int, nsums: int, K: Fraction) -> None:
    if nA != nB:
        raise HypothesisFailed(f"|A| = {nA} differs from |B| = {nB}", K)
    if nA == 0:
        raise HypothesisFailed("A is empty", K)
    if gsize * K < nA * nB:
        raise HypothesisFailed(f"|G| = {gsize} < |A||B|/K", K)
    if nsums > K * nA:
        raise HypothesisFailed(f"|{{a+b : (a,b) in G}}| = {nsums} > K|A|", K)


def bsg_extract(A: FSet, B: FSet, G, K) -> BsgCertificate:
    F = _same_field(A, B)
    K = Fraction(K)
    edges = _edge_array(G, F.q)
    _check_edges(edges, A, B)
    nsums = len(set(((edges[:, 0] + edges[:, 1]) % F.q).tolist()))
    _bsg_hypotheses(len(A), len(B), edges.shape[0], nsums, K)
    Ap, Bp, min_reps, tau = _bsg_core(A.elements, B.elements, edges, F.q)
    A1 = F.subset(Ap.tolist())
    B1 = F.subset(Bp.tolist())
    return BsgCertificate(
        A1,
        B1,
        min_reps,
        tau,
        Fraction(len(A1), len(A)),
        Fraction(len(B1), len(B)),
        Fraction(len(diffset(A1, B1)), len(A)),
    )


def _bsg_multiplicative(C: FSet, D: FSet) -> tuple[FSet, FSet]:
    """BSG for the complete product graph C x D, run on discrete logs in Z/(q-1)."""
    F = C.field
    m = F.q - 1
    logs = F.log_table
    lc = np.sort(logs[C.elements])
    ld = np.sort(logs[D.elements])
    edges = np.array([(a, -b % m) for a in lc.tolist() for b in ld.tolist()], dtype=np.int64)
    # products c*d <-> log c + log d = (log c) - (-log d); the core works with differences
    nsums = len(prodset(C, D))
    K = max(Fraction(1), Fraction(nsums, len(C)))
    _bsg_hypotheses(len(C), len(D), edges.shape[0], nsums, K)
    Ap, Bp, _, _ = _bsg_core(lc, np.sort((-ld) % m), edges, m)
    exp = F.exp_table
    return F.subset(exp[Ap].tolist()), F.subset(exp[(-Bp) % m].tolist())


@dataclass(frozen=True)
class RefineResult:
    A_prime: FSet
    measured_K: Fraction
    C: FSet
    D: FSet
    C_prime: FSet
    D_prime: FSet
    fiber_x: int
    fallback: bool


def refine_small_product_difference(A: FSet, budget: int = 10**8) -> RefineResult:
    """Refine A to A' with small |A'A' - A'A'| by a two-stage BSG argument.

    Stages: additive BSG on the complete sum graph of A (giving C, D), then
    multiplicative BSG on C x D (giving C', D'), then the largest fibre
    C' & x*D' of the quotient map. The ratio |A'A' - A'A'|/|A'| is measured,
    never compared against a constant. When the best fibre has fewer than two
    elements, C' is returned instead and ``fallback`` is set.
    """
    F = A.field
    A0 = A.without_element(0)
    if len(A0) < 3:
        raise TooSmall(f"need at least 3 nonzero elements, got {len(A0)}")
    cost = F.q * F.q + len(A0) ** 3
    if cost > budget:
        raise BudgetExceeded(f"estimated work {cost} exceeds budget {budget}")

    # additive stage on G = A0 x A0
    el = A0.elements
    edges = np.array([(a, b) for a in el.tolist() for b in el.tolist()], dtype=np.int64)
    Ap, Bp, _, _ = _bsg_core(el, el, edges, F.q)
    C = F.subset(Ap.tolist())
    D = F.subset(Bp.tolist())
    n = min(len(C), len(D))
    C = F.subset(C.elements[:n].tolist())
    D = F.subset(D.elements[:n].tolist())

    # multiplicative stage
    Cp, Dp = _bsg_multiplicative(C, D)

    # fibre pigeonhole over x = c/d
    counts = np.zeros(F.q, dtype=np.int64)
    inv = F.inverse_table
    for c in Cp.elements.tolist():
        np.add.at(counts, (c * inv[Dp.elements]) % F.q, 1)
    counts[0] = 0
    x = int(np.argmax(counts))
    A1 = Cp & dilate(Dp, x)
    fallback = False
    if len(A1) < 2:
        fallback = True
        A1 = Cp if len(Cp) >= 2 else A0
    P = prodset(A1, A1)
    K1 = Fraction(len(diffset(P, P)), len(A1))
    return RefineResult(A1, K1, C, D, Cp, Dp, x, fallback)
