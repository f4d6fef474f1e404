"""Distances d(p, p') = (x - x')^2 + (y - y')^2 in F_q^2, bisectors, and
minimum distance-set search."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import comb
from pathlib import Path
from typing import Iterable

import numpy as np

from . import kernels
from .errors import BudgetExceeded, DegenerateField, EmptyInput, EqualPoints
from .field import FSet, make_field
from .incidence import PLine
from .setops import diffset, sumset

EXHAUSTIVE_LIMIT = 10**8

APoint2 = tuple[int, int]


def dist(p: APoint2, p2: APoint2, q: int) -> int:
    dx = p[0] - p2[0]
    dy = p[1] - p2[1]
    return (dx * dx + dy * dy) % q


def _check_points(P, q: int) -> np.ndarray:
    arr = np.asarray(sorted(set((int(x) % q, int(y) % q) for x, y in P)), dtype=np.int64)
    return arr.reshape(-1, 2)


def distance_set(P: Iterable[APoint2], q: int) -> FSet:
    """{d(p, p') : p, p' in P}; contains 0 since p = p' is allowed."""
    F = make_field(q)
    arr = _check_points(P, q)
    if not arr.shape[0]:
        raise EmptyInput("distance_set of an empty configuration")
    xs, ys = arr[:, 0], arr[:, 1]
    dx = xs[:, None] - xs[None, :]
    dy = ys[:, None] - ys[None, :]
    return F.subset(np.unique((dx * dx + dy * dy) % q).tolist())


def distance_count(P, q: int, exclude_zero: bool = False) -> int:
    arr = _check_points(P, q)
    return int(kernels.dist_set_size(arr[:, 0].copy(), arr[:, 1].copy(), q, exclude_zero))


def grid_identity_rhs(A: FSet) -> FSet:
    """(A - A)^2 + (A - A)^2 with squares taken elementwise."""
    D = diffset(A, A)
    sq = A.field.subset((D.elements * D.elements) % A.q)
    return sumset(sq, sq)


@dataclass(frozen=True)
class GateResult:
    q: int
    nonsquare: bool
    witness_i: int | None = None
    isotropic_distances: FSet | None = None


def nonsquare_gate(q: int) -> GateResult:
    """True iff -1 is a non-square (q = 3 mod 4).

    When -1 = i^2 the line {(x, i x)} is built and its distance set, {0},
    is returned as the degeneracy witness.
    """
    F = make_field(q)
    if q == 2:
        i = 1
    else:
        if F.legendre(q - 1) == -1:
            assert q % 4 == 3
            return GateResult(q, True)
        i = F.sqrt_minus_one()
    D = distance_set([(x, i * x % q) for x in range(q)], q)
    assert D == F.subset([0])
    return GateResult(q, False, i, D)


def bisector(p0: APoint2, p1: APoint2, q: int) -> PLine:
    """Line of points equidistant from p0 and p1:
    2(a1 - a0) x + 2(b1 - b0) y = (a1^2 + b1^2) - (a0^2 + b0^2).
    """
    if q == 2:
        raise DegenerateField("bisectors need characteristic > 2")
    a0, b0 = (int(c) % q for c in p0)
    a1, b1 = (int(c) % q for c in p1)
    if (a0, b0) == (a1, b1):
        raise EqualPoints(f"{p0} == {p1}")
    rhs = (a1 * a1 + b1 * b1) - (a0 * a0 + b0 * b0)
    return PLine(q, 2 * (a1 - a0), 2 * (b1 - b0), -rhs)


def on_affine_line(p: APoint2, l: PLine) -> bool:
    return (p[0] * l.a + p[1] * l.b + l.c) % l.q == 0


@dataclass(frozen=True)
class DistanceReport:
    q: int
    N: int
    min_size: int
    witness: tuple[APoint2, ...]
    mode: str
    trials: int
    seed: int
    exclude_zero: bool

    def csv_row(self) -> list:
        wit = " ".join(f"{x}:{y}" for x, y in self.witness)
        return [self.q, self.N, self.min_size, self.mode, self.trials, self.seed,
                int(self.exclude_zero), wit]


DIST_HEADER = ["q", "N", "minDelta", "mode", "trials", "seed", "excludeZero", "witness"]


def distance_min_search(q: int, N: int, mode: str = "exhaustive", trials: int = 0,
                        seed: int = 0, exclude_zero: bool = False) -> DistanceReport:
    """Smallest |Delta(P)| over N-point configurations in F_q^2 (q = 3 mod 4)."""
    make_field(q)
    if not nonsquare_gate(q).nonsquare:
        raise DegenerateField(f"-1 is a square mod {q}")
    if not 1 <= N <= q * q:
        raise ValueError(f"need 1 <= N <= q^2, got {N}")
    if mode == "exhaustive":
        if comb(q * q, N) > EXHAUSTIVE_LIMIT:
            raise BudgetExceeded(f"C({q * q},{N}) exceeds {EXHAUSTIVE_LIMIT}")
        best, arg = kernels.distance_exhaustive(q, N, exclude_zero)
        wit = tuple((int(i) // q, int(i) % q) for i in arg)
        return DistanceReport(q, N, int(best), wit, mode, 0, seed, exclude_zero)
    if mode == "randomized":
        if trials < 1:
            raise ValueError("randomized mode needs trials >= 1")
        best, wit = _climb(q, N, trials, seed, exclude_zero)
        return DistanceReport(q, N, best, wit, mode, trials, seed, exclude_zero)
    raise ValueError(f"unknown mode {mode!r}")


def _climb(q, N, trials, seed, exclude_zero):
    rng = np.random.default_rng(seed)
    m = q * q
    stall_limit = max(100, 10 * N)

    def score(idx):
        return int(kernels.dist_set_size(idx // q, idx % q, q, exclude_zero))

    def restart():
        return np.sort(rng.choice(m, size=N, replace=False)).astype(np.int64)

    cur = restart()
    cur_s = score(cur)
    best = (cur_s, tuple(cur.tolist()))
    stall = 0
    for _ in range(trials):
        if N == m:
            break
        i = int(rng.integers(N))
        outside = np.setdiff1d(np.arange(m), cur, assume_unique=True)
        new = cur.copy()
        new[i] = outside[int(rng.integers(outside.shape[0]))]
        new.sort()
        s = score(new)
        if s < cur_s:
            cur, cur_s, stall = new, s, 0
            best = min(best, (cur_s, tuple(cur.tolist())))
        else:
            stall += 1
            if stall >= stall_limit:
                cur = restart()
                cur_s = score(cur)
                best = min(best, (cur_s, tuple(cur.tolist())))
                stall = 0
    return best[0], tuple((i // q, i % q) for i in best[1])


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DIST_HEADER)
    for r in sorted(rows, key=lambda r: (r.q, r.N, r.mode, r.seed, r.exclude_zero)):
        w.writerow(r.csv_row())
    return buf.getvalue()


def read_points(path) -> list[APoint2]:
    out = []
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        raw = raw.split("#", 1)[0].strip()
        if not raw:
            continue
        parts = raw.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{n}: expected 'x y'")
        out.append((int(parts[0]), int(parts[1])))
    return out


def write_points(path, P) -> None:
    Path(path).write_text("".join(f"{x} {y}\n" for x, y in P))
