"""Points and lines of the projective plane over F_q, incidence counting,
popularity / Cauchy-Schwarz counting, and the Elekes construction."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log, sqrt
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import BudgetExceeded, FieldMismatch, MassTooSmall, SingularMatrix
from .field import FSet, make_field
from .setops import prodset, sumset

NAIVE_PAIR_LIMIT = 10**7


def normalize(v: Sequence[int], q: int) -> tuple[int, int, int]:
    """Scale a nonzero triple so its first nonzero coordinate is 1."""
    x, y, z = (int(c) % q for c in v)
    for c in (x, y, z):
        if c:
            s = pow(c, -1, q)
            return (x * s % q, y * s % q, z * s % q)
    raise ValueError("(0, 0, 0) is not a projective point")


def normalize_array(V: np.ndarray, q: int) -> np.ndarray:
    V = np.asarray(V, dtype=np.int64) % q
    lead = np.where(V[:, 0] != 0, V[:, 0], np.where(V[:, 1] != 0, V[:, 1], V[:, 2]))
    if np.any(lead == 0):
        raise ValueError("zero triple in array")
    inv = make_field(q).inverse_table[lead]
    return (V * inv[:, None]) % q


def triple_index(V: np.ndarray, q: int) -> np.ndarray:
    """Dense id in [0, q^2+q+1) for normalized triples."""
    V = np.asarray(V, dtype=np.int64).reshape(-1, 3)
    return np.where(
        V[:, 0] == 1,
        V[:, 1] * q + V[:, 2],
        np.where(V[:, 1] == 1, q * q + V[:, 2], q * q + q),
    )


@dataclass(frozen=True, order=True)
class PPoint:
    q: int
    x: int
    y: int
    z: int

    def __post_init__(self):
        x, y, z = normalize((self.x, self.y, self.z), self.q)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    @property
    def coords(self) -> tuple[int, int, int]:
        return (self.x, self.y, self.z)

    @property
    def is_affine(self) -> bool:
        return self.z != 0

    def affine(self) -> tuple[int, int]:
        if not self.z:
            raise ValueError("point at infinity")
        s = pow(self.z, -1, self.q)
        return (self.x * s % self.q, self.y * s % self.q)


@dataclass(frozen=True, order=True)
class PLine:
    """The line a*x + b*y + c*z = 0."""

    q: int
    a: int
    b: int
    c: int

    def __post_init__(self):
        a, b, c = normalize((self.a, self.b, self.c), self.q)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def coords(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def points(self) -> list[PPoint]:
        return [PPoint(self.q, *v) for v in line_point_triples(self.coords, self.q)]


def affine_point(q: int, x: int, y: int) -> PPoint:
    return PPoint(q, x, y, 1)


def slope_line(q: int, m: int, c: int) -> PLine:
    """y = m x + c."""
    return PLine(q, m, -1, c)


def vertical_line(q: int, c: int) -> PLine:
    """x = c."""
    return PLine(q, 1, 0, -c)


def line_at_infinity(q: int) -> PLine:
    return PLine(q, 0, 0, 1)


def incident(p: PPoint, l: PLine) -> bool:
    if p.q != l.q:
        raise FieldMismatch(f"point over F_{p.q}, line over F_{l.q}")
    return (p.x * l.a + p.y * l.b + p.z * l.c) % p.q == 0


def line_point_triples(abc: Sequence[int], q: int) -> np.ndarray:
    """The q+1 normalized points of a line, as a (q+1, 3) array."""
    a, b, c = (int(t) % q for t in abc)
    if a:
        ia = pow(a, -1, q)
        u = np.array([(-b * ia) % q, 1, 0])
        v = np.array([(-c * ia) % q, 0, 1])
    elif b:
        u = np.array([1, 0, 0])
        v = np.array([0, (-c * pow(b, -1, q)) % q, 1])
    elif c:
        u = np.array([1, 0, 0])
        v = np.array([0, 1, 0])
    else:
        raise ValueError("zero line")
    t = np.arange(q, dtype=np.int64)
    V = np.vstack([(u[None, :] + t[:, None] * v[None, :]) % q, v[None, :]])
    return normalize_array(V, q)


def _as_array(objs, q: int) -> np.ndarray:
    objs = list(objs)
    if not objs:
        return np.zeros((0, 3), dtype=np.int64)
    for o in objs:
        if o.q != q:
            raise FieldMismatch("mixed fields in instance")
    return np.array([o.coords for o in objs], dtype=np.int64)


def _field_of(P, L) -> int | None:
    for o in list(P) + list(L):
        return o.q
    return None


def count_incidences(P: Iterable[PPoint], L: Iterable[PLine], method: str = "auto") -> int:
    """|{(p, l) in P x L : p on l}|, duplicates in P or L removed first.

    ``naive`` scans all pairs; ``bucket`` walks the q+1 points of each line
    through a membership table. ``auto`` picks naive below 10^7 pairs.
    """
    P = sorted(set(P))
    L = sorted(set(L))
    q = _field_of(P, L)
    if q is None or not P or not L:
        return 0
    PA = _as_array(P, q)
    LA = _as_array(L, q)
    if method == "auto":
        method = "naive" if len(P) * len(L) <= NAIVE_PAIR_LIMIT else "bucket"
    if method == "naive":
        return int(kernels.incidence_naive(PA, LA, q))
    if method == "bucket":
        member = np.zeros(q * q + q + 1, dtype=np.int64)
        member[triple_index(PA, q)] = 1
        total = 0
        for row in LA:
            total += int(member[triple_index(line_point_triples(row, q), q)].sum())
        return total
    raise ValueError(f"unknown method {method!r}")


def incidence_matrix(P: Sequence[PPoint], L: Sequence[PLine]) -> np.ndarray:
    """Boolean |P| x |L| matrix, rows and columns in the given order."""
    q = _field_of(P, L)
    if q is None:
        return np.zeros((len(P), len(L)), dtype=bool)
    return (_as_array(P, q) @ _as_array(L, q).T) % q == 0


def point_multiplicities(P, L) -> dict[PPoint, int]:
    """mu(p) = number of lines of L through p."""
    P = sorted(set(P))
    M = incidence_matrix(P, sorted(set(L)))
    return {p: int(c) for p, c in zip(P, M.sum(axis=1))}


@dataclass(frozen=True)
class EasyBoundReport:
    incidences: int
    n_points: int
    n_lines: int
    bound_points: float  # |P|^(1/2) |L| + |P|
    bound_lines: float  # |L|^(1/2) |P| + |L|
    chain_points: bool  # I^2 <= |P| |L| (|L| - 1) + I |P|
    chain_lines: bool  # I^2 <= |L| |P| (|P| - 1) + I |L|
    chain_loose: bool  # I^2 <= 2 |L|^2 |P| + I |P|
    slack_points: int  # right side minus left side of chain_points

    @property
    def holds(self) -> bool:
        return self.chain_points and self.chain_lines and self.chain_loose


def easy_bound_check(P, L) -> EasyBoundReport:
    """Exact Cauchy-Schwarz form of the easy incidence bound.

    Counting triples (p, l, l') with l != l' through p in two ways gives
    sum mu(mu - 1) <= |L|(|L| - 1), and sum mu^2 >= I^2/|P|.
    """
    P = set(P)
    L = set(L)
    I = count_incidences(P, L)
    nP, nL = len(P), len(L)
    rhs_p = nP * nL * (nL - 1) + I * nP
    rhs_l = nL * nP * (nP - 1) + I * nL
    rhs_loose = 2 * nL * nL * nP + I * nP
    return EasyBoundReport(
        I, nP, nL,
        sqrt(nP) * nL + nP,
        sqrt(nL) * nP + nL,
        I * I <= rhs_p,
        I * I <= rhs_l,
        I * I <= rhs_loose,
        rhs_p - I * I,
    )


@dataclass(frozen=True)
class ElekesInstance:
    points: frozenset
    lines: frozenset
    degenerate: bool  # 0 in A: slope-0 lines coincide

    @property
    def incidences(self) -> int:
        return count_incidences(self.points, self.lines)


def elekes_construct(A: FSet) -> ElekesInstance:
    """Points (A+A) x (A.A) and lines y = b(x - a) for a, b in A.

    (a + c, b c) lies on the line of (a, b) for every c in A.
    """
    q = A.q
    S = sumset(A, A)
    Pr = prodset(A, A)
    points = frozenset(affine_point(q, x, y) for x in S for y in Pr)
    lines = frozenset(PLine(q, b, -1, -a * b) for a in A for b in A)
    return ElekesInstance(points, lines, 0 in A)


# ---------------------------------------------------------------------------
# projective maps


def det3(M) -> int:
    M = [[int(v) for v in row] for row in M]
    return (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )


def inverse3(M, q: int) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64) % q
    d = det3(M) % q
    if d == 0:
        raise SingularMatrix("matrix is singular mod q")
    m = M.tolist()
    adj = np.empty((3, 3), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != j]
            cols = [c for c in range(3) if c != i]
            minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]]
            adj[i, j] = (-1) ** (i + j) * minor
    return (adj * pow(d, -1, q)) % q


def apply_proj(M, P, L, q: int | None = None):
    """Image of points under M and of lines under the inverse transpose."""
    P = list(P)
    L = list(L)
    q = q or _field_of(P, L)
    if q is None:
        return [], []
    M = np.asarray(M, dtype=np.int64) % q
    Minv = inverse3(M, q)
    P2 = [PPoint(q, *((M @ np.array(p.coords)) % q).tolist()) for p in P]
    L2 = [PLine(q, *((np.array(l.coords) @ Minv) % q).tolist()) for l in L]
    return P2, L2


def proj_map_sending(p1: PPoint, p2: PPoint) -> np.ndarray:
    """A projective map taking p1 to [1:0:0] and p2 to [0:1:0]."""
    q = p1.q
    if p1 == p2:
        raise SingularMatrix("points must be distinct")
    u, v = np.array(p1.coords), np.array(p2.coords)
    for e in np.eye(3, dtype=np.int64):
        B = np.stack([u, v, e], axis=1)
        if det3(B) % q:
            return inverse3(B, q)
    raise SingularMatrix("no basis extension")  # unreachable for distinct points


# ---------------------------------------------------------------------------
# popularity and Cauchy-Schwarz counting


@dataclass(frozen=True)
class PopularityReport:
    kept: tuple
    threshold: Fraction
    retained: int
    total: int


def popular_restrict(weights, X) -> PopularityReport:
    """Keep b with mu(b) >= X / (2|B|); the kept mass is always >= X/2."""
    if isinstance(weights, Mapping):
        items = list(weights.items())
    else:
        items = list(enumerate(weights))
    if not items:
        raise MassTooSmall("empty multiplicity vector")
    X = Fraction(X)
    total = sum(Fraction(w) for _, w in items)
    if any(w < 0 for _, w in items):
        raise ValueError("multiplicities must be nonnegative")
    if total < X:
        raise MassTooSmall(f"total mass {total} < X = {X}")
    thr = X / (2 * len(items))
    kept = tuple(k for k, w in items if w >= thr)
    retained = sum(Fraction(w) for k, w in items if w >= thr)
    if 2 * retained < X:
        raise AssertionError("popularity identity violated")
    return PopularityReport(kept, thr, retained, total)


@dataclass(frozen=True)
class Relation:
    left: tuple
    right: tuple
    edges: frozenset

    @classmethod
    def build(cls, left, right, edges) -> "Relation":
        left, right = tuple(left), tuple(right)
        ls, rs = set(left), set(right)
        E = frozenset((a, b) for a, b in edges)
        for a, b in E:
            if a not in ls or b not in rs:
                raise ValueError(f"edge {(a, b)} outside left x right")
        return cls(left, right, E)

    def mu(self) -> dict:
        """Per right element: number of related left elements."""
        out = {b: 0 for b in self.right}
        for _, b in self.edges:
            out[b] += 1
        return out

    def lam(self) -> dict:
        out = {a: 0 for a in self.left}
        for a, _ in self.edges:
            out[a] += 1
        return out


@dataclass(frozen=True)
class CSReport:
    pairs: int
    paths: int
    n_right: int
    holds: bool  # paths >= pairs^2/|B| - pairs


def cs_count(R: Relation) -> CSReport:
    mu = list(R.mu().values())
    pairs = sum(mu)
    paths = sum(m * (m - 1) for m in mu)
    nB = len(R.right)
    holds = True if nB == 0 else paths * nB >= pairs * pairs - pairs * nB
    return CSReport(pairs, paths, nB, holds)


def incidence_relation(P, L) -> Relation:
    P = sorted(set(P))
    L = sorted(set(L))
    rows, cols = np.nonzero(incidence_matrix(P, L))
    return Relation.build(P, L, [(P[i], L[j]) for i, j in zip(rows.tolist(), cols.tolist())])


# ---------------------------------------------------------------------------
# Szemeredi-Trotter style experiments


@dataclass(frozen=True)
class STReport:
    q: int
    N: int
    generator: str
    trials: int
    seed: int
    max_incidences: int
    empirical_eps: float
    per_trial: tuple[int, ...] = field(default=())

    def csv_row(self) -> list:
        return [self.q, self.N, self.generator, self.trials, self.seed,
                self.max_incidences, f"{self.empirical_eps:.6f}"]


ST_HEADER = ["q", "N", "generator", "trials", "seed", "maxI", "empiricalEps"]
GENERATORS = ("uniform", "elekes", "grid")


def _all_affine_lines(q: int) -> list[PLine]:
    out = [slope_line(q, m, c) for m in range(q) for c in range(q)]
    return out + [vertical_line(q, c) for c in range(q)]


def _gen_uniform(q, N, rng):
    pidx = np.sort(rng.choice(q * q, size=N, replace=False))
    lidx = np.sort(rng.choice(q * q + q, size=N, replace=False))
    lines = _all_affine_lines(q)
    return [affine_point(q, i // q, i % q) for i in pidx.tolist()], [lines[i] for i in lidx.tolist()]


def _gen_grid(q, N, rng, trial):
    g = min(q, ceil(sqrt(N)))
    if g == q or trial == 0:
        G = list(range(g))
    else:
        G = sorted(rng.choice(q, size=g, replace=False).tolist())
    pts = [affine_point(q, x, y) for x in G for y in G][:N]
    lns = [slope_line(q, m, c) for m in G for c in G][:N]
    return pts, lns


def _gen_elekes(q, N, rng):
    s = min(q - 1, max(1, ceil(sqrt(N))))
    A = make_field(q).subset((rng.choice(q - 1, size=s, replace=False) + 1).tolist())
    inst = elekes_construct(A)
    lines = sorted(inst.lines)[:N]
    deg = {}
    for p in inst.points:
        deg[p] = sum(1 for l in lines if incident(p, l))
    pts = sorted(inst.points, key=lambda p: (-deg[p], p.coords))[:N]
    if len(pts) < N:
        have = set(pts)
        for i in rng.permutation(q * q).tolist():
            if len(pts) >= N:
                break
            p = affine_point(q, i // q, i % q)
            if p not in have:
                pts.append(p)
                have.add(p)
    if len(lines) < N:
        have = set(lines)
        for l in _all_affine_lines(q):
            if len(lines) >= N:
                break
            if l not in have:
                lines.append(l)
                have.add(l)
    return pts, lines


def st_experiment(q: int, N: int, generator: str = "uniform", trials: int = 1, seed: int = 0,
                  budget: int = 10**9) -> STReport:
    """Max incidences over seeded |P| = |L| = N instances.

    empiricalEps = 3/2 - log(maxI)/log(N); nan when N = 1.
    """
    make_field(q)
    if not 1 <= N <= q * q:
        raise ValueError(f"need 1 <= N <= q^2, got N={N}")
    if generator not in GENERATORS:
        raise ValueError(f"unknown generator {generator!r}")
    if trials * N * (q + 1) > budget:
        raise BudgetExceeded(f"trials*N*(q+1) exceeds {budget}")
    rng = np.random.default_rng(seed)
    counts = []
    for t in range(trials):
        if generator == "uniform":
            P, L = _gen_uniform(q, N, rng)
        elif generator == "grid":
            P, L = _gen_grid(q, N, rng, t)
        else:
            P, L = _gen_elekes(q, N, rng)
        assert len(set(P)) == N and len(set(L)) == N
        counts.append(count_incidences(P, L))
    m = max(counts)
    eps = float("nan") if N == 1 or m == 0 else 1.5 - log(m) / log(N)
    return STReport(q, N, generator, trials, seed, m, eps, tuple(counts))


# ---------------------------------------------------------------------------
# instance files


def write_instance(path, P, L) -> None:
    lines = [f"p {p.x} {p.y} {p.z}" for p in sorted(set(P))]
    lines += [f"l {l.a} {l.b} {l.c}" for l in sorted(set(L))]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def read_instance(path, q: int):
    P, L = [], []
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        raw = raw.split("#", 1)[0].strip()
        if not raw:
            continue
        parts = raw.split()
        if len(parts) != 4 or parts[0] not in ("p", "l"):
            raise ValueError(f"{path}:{n}: expected 'p x y z' or 'l a b c'")
        vals = [int(v) for v in parts[1:]]
        (P if parts[0] == "p" else L).append(
            PPoint(q, *vals) if parts[0] == "p" else PLine(q, *vals)
        )
    return P, L
