"""Lines in F_q^3: Besicovitch sets, the Wolff plane count, reguli, hairbrushes,
and the planar reduction maps Pi (lines -> points) and Lambda (lines -> lines)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import (
    BadConfiguration,
    BudgetExceeded,
    DegenerateIntersection,
    DegenerateLine,
    ExcludedNotMeetingStem,
    MissingDirection,
    NoNonzeroSolution,
    NotDisjoint,
    NotSkew,
    SingularMatrix,
)
from .field import make_field
from .incidence import PLine, PPoint, inverse3, line_point_triples, normalize

Point3 = tuple[int, int, int]
MAX_SEARCH_Q = 13


def _vec(p, q) -> tuple[int, int, int]:
    return tuple(int(c) % q for c in p)


def point_id(p: Point3, q: int) -> int:
    return (p[0] * q + p[1]) * q + p[2]


def _pivot(d) -> int:
    for i, c in enumerate(d):
        if c:
            return i
    raise ValueError("zero direction")


@dataclass(frozen=True, order=True)
class ALine3:
    """Affine line {base + t*direction}; direction has leading coordinate 1
    and base is the lexicographically least point (zero at that coordinate)."""

    q: int
    direction: Point3
    base: Point3

    def __post_init__(self):
        d = normalize(self.direction, self.q)
        i = _pivot(d)
        b = _vec(self.base, self.q)
        s = b[i]
        b = tuple((b[k] - s * d[k]) % self.q for k in range(3))
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "base", b)

    @property
    def pivot(self) -> int:
        return _pivot(self.direction)

    def point(self, t: int) -> Point3:
        return tuple((self.base[k] + t * self.direction[k]) % self.q for k in range(3))

    def points(self) -> list[Point3]:
        return [self.point(t) for t in range(self.q)]

    def point_ids(self) -> np.ndarray:
        q = self.q
        t = np.arange(q, dtype=np.int64)
        P = (np.array(self.base)[None, :] + t[:, None] * np.array(self.direction)[None, :]) % q
        return (P[:, 0] * q + P[:, 1]) * q + P[:, 2]

    def contains(self, p: Point3) -> bool:
        p = _vec(p, self.q)
        d = self.direction
        s = p[self.pivot]
        return tuple((p[k] - s * d[k]) % self.q for k in range(3)) == self.base

    def parallel(self, other: "ALine3") -> bool:
        return self.direction == other.direction


def line_through(q: int, p: Point3, d: Point3) -> ALine3:
    return ALine3(q, d, p)


def line_from_points(q: int, p1: Point3, p2: Point3) -> ALine3:
    d = tuple((b - a) % q for a, b in zip(p1, p2))
    if d == (0, 0, 0):
        raise ValueError("points coincide")
    return ALine3(q, d, p1)


def meet(l1: ALine3, l2: ALine3) -> Point3 | None:
    """The common point of two distinct lines, or None when disjoint."""
    if l1 == l2:
        raise ValueError("lines are equal")
    if l1.parallel(l2):
        return None
    for p in l1.points():
        if l2.contains(p):
            return p
    return None


def intersects(l1: ALine3, l2: ALine3) -> bool:
    return l1 == l2 or meet(l1, l2) is not None


def enumerate_directions(q: int) -> list[Point3]:
    make_field(q)
    dirs = [(0, 0, 1)]
    dirs += [(0, 1, z) for z in range(q)]
    dirs += [(1, y, z) for y in range(q) for z in range(q)]
    return dirs


def all_lines(q: int):
    for d in enumerate_directions(q):
        i = _pivot(d)
        free = [k for k in range(3) if k != i]
        for u in range(q):
            for v in range(q):
                b = [0, 0, 0]
                b[free[0]], b[free[1]] = u, v
                yield ALine3(q, d, tuple(b))


# ---------------------------------------------------------------------------
# Besicovitch sets


@dataclass(frozen=True)
class BesicovitchSet:
    q: int
    lines: tuple[ALine3, ...]
    point_ids: np.ndarray

    @property
    def size(self) -> int:
        return int(self.point_ids.shape[0])

    def contains_all_lines(self) -> bool:
        ids = set(self.point_ids.tolist())
        return all(set(l.point_ids().tolist()) <= ids for l in self.lines)


def cone_assignment(q: int, apex: Point3 = (0, 0, 0)) -> dict[Point3, Point3]:
    return {d: apex for d in enumerate_directions(q)}


def besicovitch_build(assignment: Mapping[Point3, Point3], q: int) -> BesicovitchSet:
    """Union of one line per direction, the line for d passing through assignment[d]."""
    given = {normalize(d, q): p for d, p in assignment.items()}
    lines = []
    for d in enumerate_directions(q):
        if d not in given:
            raise MissingDirection(f"no line assigned for direction {d}")
        lines.append(ALine3(q, d, given[d]))
    ids = np.unique(np.concatenate([l.point_ids() for l in lines]))
    out = BesicovitchSet(q, tuple(lines), ids)
    assert out.contains_all_lines()
    return out


def cone_size(q: int) -> int:
    return (q * q + q + 1) * (q - 1) + 1


# ---------------------------------------------------------------------------
# planes and the Wolff count


@dataclass(frozen=True, order=True)
class Plane3:
    """{p : normal . p = offset}, normal with leading coordinate 1."""

    q: int
    normal: Point3
    offset: int

    def __post_init__(self):
        n = _vec(self.normal, self.q)
        i = _pivot(n)
        s = pow(n[i], -1, self.q)
        object.__setattr__(self, "normal", tuple(c * s % self.q for c in n))
        object.__setattr__(self, "offset", self.offset * s % self.q)

    def contains(self, p: Point3) -> bool:
        return sum(a * b for a, b in zip(self.normal, p)) % self.q == self.offset

    def contains_line(self, l: ALine3) -> bool:
        n = self.normal
        return (sum(a * b for a, b in zip(n, l.direction)) % self.q == 0
                and self.contains(l.base))


def planes_containing(l: ALine3) -> list[Plane3]:
    """The q+1 planes through a line."""
    q = l.q
    out = []
    for n in line_point_triples(l.direction, q).tolist():
        c = sum(a * b for a, b in zip(n, l.base)) % q
        out.append(Plane3(q, tuple(n), c))
    return out


@dataclass(frozen=True)
class WolffReport:
    max_per_plane: int
    argmax: Plane3 | None
    n_lines: int


def wolff_axiom_check(L: Iterable[ALine3]) -> WolffReport:
    L = sorted(set(L))
    counts: dict[Plane3, int] = {}
    for l in L:
        for pl in planes_containing(l):
            counts[pl] = counts.get(pl, 0) + 1
    if not counts:
        return WolffReport(0, None, 0)
    best = max(counts.values())
    arg = min(pl for pl, c in counts.items() if c == best)
    return WolffReport(best, arg, len(L))


# ---------------------------------------------------------------------------
# reguli


def _check_disjoint(lines: Sequence[ALine3], exc) -> None:
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            if intersects(lines[i], lines[j]):
                raise exc(f"lines {i + 1} and {j + 1} intersect")


def _transversals_through(p: Point3, l2: ALine3, l3: ALine3) -> list[ALine3]:
    """Lines through p (off l2, l3) meeting both l2 and l3.

    Such a line lies in the plane spanned by p and l2, so it passes through
    that plane's intersection with l3.
    """
    q = l2.q
    w = tuple((b - a) % q for a, b in zip(p, l2.base))
    d = l2.direction
    n = ((d[1] * w[2] - d[2] * w[1]) % q, (d[2] * w[0] - d[0] * w[2]) % q,
         (d[0] * w[1] - d[1] * w[0]) % q)
    c = sum(a * b for a, b in zip(n, p)) % q
    nd3 = sum(a * b for a, b in zip(n, l3.direction)) % q
    off = (c - sum(a * b for a, b in zip(n, l3.base))) % q
    if nd3:
        targets = [l3.point(off * pow(nd3, -1, q) % q)]
    elif off == 0:
        targets = l3.points()  # l3 lies in the plane
    else:
        return []
    out = []
    for r in targets:
        l = line_from_points(q, p, r)
        if l != l2 and meet(l, l2) is not None:
            out.append(l)
    return out


def lines_meeting_three(l1: ALine3, l2: ALine3, l3: ALine3,
                        universe: Iterable[ALine3] | None = None,
                        method: str = "plane") -> list[ALine3]:
    """All lines (of universe, default every line of F_q^3) meeting l1, l2 and l3.

    ``plane`` builds each transversal from its point on l1; ``brute``
    tries every line through a point of l1 and a point of l2.
    """
    _check_disjoint([l1, l2, l3], NotDisjoint)
    q = l1.q
    if universe is not None:
        cands = {l for l in universe if l not in (l1, l2, l3)
                 and meet(l, l1) is not None and meet(l, l2) is not None}
    elif method == "brute":
        cands = {line_from_points(q, p, r) for p in l1.points() for r in l2.points()}
    elif method == "plane":
        cands = {l for p in l1.points() for l in _transversals_through(p, l2, l3)}
    else:
        raise ValueError(f"unknown method {method!r}")
    return sorted(l for l in cands if l not in (l1, l2, l3) and meet(l, l3) is not None)


MONOMIALS = ("1", "x", "y", "z", "x^2", "y^2", "z^2", "xy", "xz", "yz")


def monomial_row(p: Point3) -> list[int]:
    x, y, z = p
    return [1, x, y, z, x * x, y * y, z * z, x * y, x * z, y * z]


@dataclass(frozen=True)
class Quadric:
    q: int
    coeffs: tuple[int, ...]  # in MONOMIALS order

    def __call__(self, p: Point3) -> int:
        return sum(c * m for c, m in zip(self.coeffs, monomial_row(p))) % self.q

    def vanishes_on(self, l: ALine3) -> bool:
        return all(self(p) == 0 for p in l.points())

    def __str__(self) -> str:
        terms = [f"{c}*{m}" if m != "1" else str(c) for c, m in zip(self.coeffs, MONOMIALS) if c]
        return " + ".join(terms) or "0"


def rref_mod(M: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_q and the pivot columns."""
    R = np.array(M, dtype=np.int64) % q
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = (R[r] * pow(int(R[r, c]), -1, q)) % q
        for i in range(rows):
            if i != r and R[i, c]:
                R[i] = (R[i] - R[i, c] * R[r]) % q
        pivots.append(c)
        r += 1
    return R[:r], pivots


def nullspace_mod(M: np.ndarray, q: int) -> np.ndarray:
    """Kernel basis, as rows in reduced echelon form."""
    M = np.asarray(M, dtype=np.int64)
    ncols = M.shape[1]
    R, piv = rref_mod(M, q)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = np.zeros(ncols, dtype=np.int64)
        v[f] = 1
        for row, pc in enumerate(piv):
            v[pc] = (-R[row, f]) % q
        basis.append(v)
    if not basis:
        return np.zeros((0, ncols), dtype=np.int64)
    K, _ = rref_mod(np.array(basis), q)
    return K


def plane_through_parallel(l1: ALine3, l2: ALine3) -> Plane3:
    q = l1.q
    d = np.array(l1.direction)
    w = (np.array(l2.base) - np.array(l1.base)) % q
    n = np.cross(d, w) % q
    if not n.any():
        raise ValueError("lines coincide")
    c = int(np.dot(n, l1.base) % q)
    return Plane3(q, tuple(int(v) for v in n), c)


def regulus_fit(l1: ALine3, l2: ALine3, l3: ALine3) -> Quadric | Plane3:
    """Surface carrying every line that meets l1, l2, l3.

    Pairwise skew input: the lexicographically least nonzero quadric vanishing
    on all 3q points of the three lines. If two are parallel, the plane they
    span is returned instead.
    """
    ls = [l1, l2, l3]
    _check_disjoint(ls, NotSkew)
    for i in range(3):
        for j in range(i + 1, 3):
            if ls[i].parallel(ls[j]):
                return plane_through_parallel(ls[i], ls[j])
    q = l1.q
    rows = [monomial_row(p) for l in ls for p in l.points()]
    K = nullspace_mod(np.array(rows), q)
    if K.shape[0] == 0:
        raise NoNonzeroSolution("no quadric vanishes on the three lines")
    return Quadric(q, tuple(int(c) for c in K[-1]))


# ---------------------------------------------------------------------------
# hairbrushes


def hairbrush(stem: ALine3, L: Iterable[ALine3], excluded: tuple[ALine3, ALine3]) -> list[ALine3]:
    """Lines of L meeting the stem at a point other than where the excluded lines do."""
    bad = []
    for ex in excluded:
        if ex == stem:
            raise ExcludedNotMeetingStem("excluded line equals the stem")
        p = meet(ex, stem)
        if p is None:
            raise ExcludedNotMeetingStem(f"{ex} does not meet the stem")
        bad.append(p)
    out = []
    for l in sorted(set(L)):
        if l == stem:
            continue
        p = meet(l, stem)
        if p is not None and p not in bad:
            out.append(l)
    return out


# ---------------------------------------------------------------------------
# canonical frame and the planar maps


def canonical_triple(q: int) -> tuple[ALine3, ALine3, ALine3]:
    """l0 = {(x,0,0)}, stem = {(0,0,z)}, l1 = {(0,y,1)}."""
    return (ALine3(q, (1, 0, 0), (0, 0, 0)),
            ALine3(q, (0, 0, 1), (0, 0, 0)),
            ALine3(q, (0, 1, 0), (0, 0, 1)))


@dataclass(frozen=True)
class FrameMap:
    """p -> M p + t over F_q."""

    q: int
    M: tuple
    t: Point3

    def __call__(self, p: Point3) -> Point3:
        v = (np.array(self.M) @ np.array(p) + np.array(self.t)) % self.q
        return tuple(int(c) for c in v)

    def map_line(self, l: ALine3) -> ALine3:
        return line_from_points(self.q, self(l.point(0)), self(l.point(1)))

    def inverse(self) -> "FrameMap":
        Minv = inverse3(self.M, self.q)
        t = (-(Minv @ np.array(self.t))) % self.q
        return FrameMap(self.q, tuple(map(tuple, Minv.tolist())), tuple(int(c) for c in t))

    def is_identity(self) -> bool:
        return self.M == ((1, 0, 0), (0, 1, 0), (0, 0, 1)) and self.t == (0, 0, 0)


def normalize_frame(l0: ALine3, stem: ALine3, l1: ALine3) -> FrameMap:
    """Affine map carrying (l0, stem, l1) onto the canonical triple."""
    q = l0.q
    if l0 == l1 or intersects(l0, l1) or l0.parallel(l1):
        raise BadConfiguration("l0 and l1 must be skew")
    if stem in (l0, l1):
        raise BadConfiguration("stem must differ from l0, l1")
    P0 = meet(l0, stem)
    P1 = meet(l1, stem)
    if P0 is None or P1 is None:
        raise BadConfiguration("stem must meet both l0 and l1")
    e3 = tuple((b - a) % q for a, b in zip(P0, P1))
    B = np.array([l0.direction, l1.direction, e3], dtype=np.int64).T
    try:
        Minv = inverse3(B, q)
    except SingularMatrix:
        raise BadConfiguration("degenerate frame") from None
    t = (-(Minv @ np.array(P0))) % q
    fm = FrameMap(q, tuple(map(tuple, Minv.tolist())), tuple(int(c) for c in t))
    c0, cs, c1 = canonical_triple(q)
    if not (fm.map_line(l0) == c0 and fm.map_line(stem) == cs and fm.map_line(l1) == c1):
        raise AssertionError("frame map failed its image check")
    return fm


def pi_map(l: ALine3) -> tuple[int, int]:
    """(1/x, 1/y) where l meets l0 at (x,0,0) and l1 at (0,y,1); canonical frame."""
    q = l.q
    l0, _, l1 = canonical_triple(q)
    if l in (l0, l1):
        raise DegenerateIntersection("line is one of the frame lines")
    p0 = meet(l, l0)
    p1 = meet(l, l1)
    if p0 is None or p1 is None:
        raise DegenerateIntersection("line must meet both l0 and l1")
    x, y = p0[0], p1[1]
    if x == 0 or y == 0:
        raise DegenerateIntersection("intersection at x = 0 or y = 0")
    return (pow(x, -1, q), pow(y, -1, q))


@dataclass(frozen=True)
class LambdaParams:
    a: int
    b: int
    z: int
    alpha: int
    beta: int


def lambda_params(l: ALine3) -> LambdaParams:
    """Write l = {(a(t - z), b(t - z), t)} and return a, b, z, alpha = az, beta = bz - b."""
    q = l.q
    _, stem, _ = canonical_triple(q)
    if l == stem:
        raise DegenerateLine("line is the stem")
    d = l.direction
    if d[2] == 0:
        raise DegenerateLine("line is parallel to the plane z = 0")
    s = pow(d[2], -1, q)
    a, b = d[0] * s % q, d[1] * s % q
    p = meet(l, stem)
    if p is None:
        raise DegenerateLine("line does not meet the stem")
    z = p[2]
    if z in (0, 1):
        raise DegenerateLine("line meets the stem at z = 0 or z = 1")
    if a == 0 or b == 0:
        raise DegenerateLine("a and b must be nonzero")
    return LambdaParams(a, b, z, a * z % q, (b * z - b) % q)


def lambda_map(l: ALine3) -> PLine:
    """The planar line 1 + beta*Y + alpha*X = 0."""
    lp = lambda_params(l)
    return PLine(l.q, lp.alpha, lp.beta, 1)


def pi_point(l: ALine3) -> PPoint:
    X, Y = pi_map(l)
    return PPoint(l.q, X, Y, 1)


def lambda_fiber_guides(alpha: int, beta: int, q: int) -> tuple[ALine3, ALine3, ALine3]:
    """Three disjoint lines met by every line of the fibre over (alpha, beta)."""
    _, stem, _ = canonical_triple(q)
    return (stem,
            ALine3(q, (0, 1, 0), (-alpha % q, 0, 0)),
            ALine3(q, (1, 0, 0), (0, -beta % q, 1)))


def valid_pi_lines(q: int) -> list[ALine3]:
    """All lines through (x,0,0) and (0,y,1) with x, y != 0."""
    return [line_from_points(q, (x, 0, 0), (0, y, 1)) for x in range(1, q) for y in range(1, q)]


def valid_lambda_lines(q: int) -> list[ALine3]:
    """All lines {(a(t-z), b(t-z), t)} with a, b != 0 and z != 0, 1."""
    return [ALine3(q, (a, b, 1), (0, 0, z))
            for a in range(1, q) for b in range(1, q) for z in range(2, q)]


# ---------------------------------------------------------------------------
# search


@dataclass(frozen=True)
class KakeyaReport:
    q: int
    trials: int
    seed: int
    min_size: int
    best_assignment: dict
    reference: float  # q^(5/2)
    trivial_bound: int  # q(q+1)/2
    cone: int

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "trials": self.trials,
            "seed": self.seed,
            "minSize": self.min_size,
            "reference_q_5_2": round(self.reference, 6),
            "trivialBound": self.trivial_bound,
            "coneSize": self.cone,
            "bestAssignment": [[*d, *b] for d, b in sorted(self.best_assignment.items())],
        }

    def csv_row(self) -> list:
        return [self.q, self.trials, self.seed, self.min_size, f"{self.reference:.3f}",
                self.trivial_bound, self.cone]


KAKEYA_HEADER = ["q", "trials", "seed", "minSize", "q52", "trivialBound", "coneSize"]


def trivial_kakeya_bound(q: int) -> int:
    """q lines with pairwise <= 1 common point cover >= q*q - C(q,2) points."""
    return q * q - q * (q - 1) // 2


def kakeya_min_search(q: int, trials: int = 4, seed: int = 0, moves: int | None = None) -> KakeyaReport:
    """Local search over base-point assignments minimising the union size.

    Restart 0 starts from the cone through the origin; the others from
    random assignments. The result upper-bounds the true minimum.
    """
    make_field(q)
    if q > MAX_SEARCH_Q:
        raise BudgetExceeded(f"q={q} exceeds desk scale {MAX_SEARCH_Q}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dirs = np.array(enumerate_directions(q), dtype=np.int64)
    pivots = np.array([_pivot(d) for d in dirs.tolist()], dtype=np.int64)
    nd = dirs.shape[0]
    moves = moves if moves is not None else 30 * nd
    rng = np.random.default_rng(seed)
    best_size, best_choice = None, None
    for trial in range(trials):
        if trial == 0:
            choice = np.zeros(nd, dtype=np.int64)
        else:
            choice = rng.integers(0, q * q, size=nd).astype(np.int64)
        proposals = np.stack([rng.integers(0, nd, size=moves),
                              rng.integers(0, q * q, size=moves)], axis=1).astype(np.int64)
        size, ch, _ = kernels.kakeya_climb(dirs, pivots, q, choice, proposals)
        if best_size is None or size < best_size:
            best_size, best_choice = int(size), ch.copy()
    assignment = {}
    for k, d in enumerate(dirs.tolist()):
        u, v = divmod(int(best_choice[k]), q)
        free = [c for c in range(3) if c != pivots[k]]
        b = [0, 0, 0]
        b[free[0]], b[free[1]] = u, v
        assignment[tuple(d)] = tuple(b)
    check = besicovitch_build(assignment, q)
    assert check.size == best_size
    return KakeyaReport(q, trials, seed, best_size, assignment, q ** 2.5,
                        trivial_kakeya_bound(q), cone_size(q))


# ---------------------------------------------------------------------------
# files


def write_lines(path, L: Iterable[ALine3]) -> None:
    Path(path).write_text("".join(f"{' '.join(map(str, l.direction))} {' '.join(map(str, l.base))}\n"
                                  for l in sorted(set(L))))


def read_lines(path, q: int) -> list[ALine3]:
    out = []
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        raw = raw.split("#", 1)[0].strip()
        if not raw:
            continue
        vals = [int(v) for v in raw.split()]
        if len(vals) != 6:
            raise ValueError(f"{path}:{n}: expected 'd1 d2 d3 b1 b2 b3'")
        out.append(ALine3(q, tuple(vals[:3]), tuple(vals[3:])))
    return out


def write_assignment(path, assignment: Mapping[Point3, Point3], q: int) -> None:
    write_lines(path, [ALine3(q, d, b) for d, b in assignment.items()])


def read_assignment(path, q: int) -> dict[Point3, Point3]:
    return {l.direction: l.base for l in read_lines(path, q)}


def report_json(report: KakeyaReport) -> str:
    return json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"
