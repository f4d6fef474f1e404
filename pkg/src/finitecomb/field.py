"""Prime fields Z/qZ and dense subsets of them.

Field elements are plain Python ints kept fully reduced into ``[0, q)``.
Subsets are :class:`FSet` values backed by an integer bitmask, so unions,
intersections and translations run word-parallel inside CPython's bigint code.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from math import isqrt
from typing import Iterable, Iterator

import numpy as np

from .errors import FieldMismatch, NotPrime, SizeOutOfRange, ZeroInverse

MAX_Q = 1 << 20


def is_prime(n: int) -> bool:
    """Deterministic trial division up to isqrt(n)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or isinstance(self.q, bool):
            raise TypeError(f"modulus must be an integer, got {self.q!r}")
        object.__setattr__(self, "q", int(self.q))
        if self.q < 2 or not is_prime(self.q):
            raise NotPrime(self.q)
        if self.q > MAX_Q:
            raise SizeOutOfRange(f"q={self.q} exceeds desk scale 2^20")

    def __repr__(self) -> str:
        return f"F_{self.q}"

    # element arithmetic --------------------------------------------------

    def __call__(self, x: int) -> int:
        return int(x) % self.q

    def add(self, x: int, y: int) -> int:
        return (x + y) % self.q

    def sub(self, x: int, y: int) -> int:
        return (x - y) % self.q

    def mul(self, x: int, y: int) -> int:
        return (x * y) % self.q

    def neg(self, x: int) -> int:
        return (-x) % self.q

    def inv(self, x: int) -> int:
        x %= self.q
        if x == 0:
            raise ZeroInverse(f"0 has no inverse in {self!r}")
        return pow(x, -1, self.q)

    def div(self, x: int, y: int) -> int:
        return (x * self.inv(y)) % self.q

    def legendre(self, x: int) -> int:
        """Euler's criterion: -1, 0 or +1."""
        x %= self.q
        if x == 0:
            return 0
        if self.q == 2:
            return 1
        return 1 if pow(x, (self.q - 1) // 2, self.q) == 1 else -1

    def is_square(self, x: int) -> bool:
        return self.legendre(x) >= 0

    def sqrt_minus_one(self) -> int | None:
        """Smallest i with i^2 = -1, or None when -1 is a non-square."""
        for i in range(self.q):
            if (i * i + 1) % self.q == 0:
                return i
        return None

    @cached_property
    def inverse_table(self) -> np.ndarray:
        """inv[x] for x in [0, q); entry 0 is 0 as a placeholder."""
        xs = np.arange(self.q, dtype=np.int64)
        return _powmod_vec(xs, self.q - 2, self.q)

    @cached_property
    def primitive_root(self) -> int:
        if self.q == 2:
            return 1
        n = self.q - 1
        factors = _prime_factors(n)
        for g in range(2, self.q):
            if all(pow(g, n // p, self.q) != 1 for p in factors):
                return g
        raise AssertionError("no primitive root found")  # unreachable for prime q

    @cached_property
    def log_table(self) -> np.ndarray:
        """Discrete log base the primitive root; entry 0 is -1."""
        g = self.primitive_root
        table = np.full(self.q, -1, dtype=np.int64)
        x = 1
        for k in range(self.q - 1):
            table[x] = k
            x = (x * g) % self.q
        return table

    @cached_property
    def exp_table(self) -> np.ndarray:
        g = self.primitive_root
        out = np.empty(self.q - 1, dtype=np.int64)
        x = 1
        for k in range(self.q - 1):
            out[k] = x
            x = (x * g) % self.q
        return out

    # subset constructors ------------------------------------------------

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.q) - 1

    def subset(self, elements: Iterable[int]) -> "FSet":
        mask = 0
        for e in elements:
            mask |= 1 << (int(e) % self.q)
        return FSet(self, mask)

    def from_bool(self, flags: np.ndarray) -> "FSet":
        return FSet(self, bool_to_mask(np.asarray(flags, dtype=bool)[: self.q]))

    def empty(self) -> "FSet":
        return FSet(self, 0)

    def full(self) -> "FSet":
        return FSet(self, self.full_mask)

    def nonzero(self) -> "FSet":
        return FSet(self, self.full_mask & ~1)

    def interval(self, start: int, length: int, step: int = 1) -> "FSet":
        """Arithmetic progression start, start+step, ..."""
        return self.subset(start + k * step for k in range(length))

    def rand_subset(self, n: int, seed: int) -> "FSet":
        if not 0 <= n <= self.q:
            raise SizeOutOfRange(f"cannot draw {n} elements from F_{self.q}")
        rng = np.random.default_rng(seed)
        picks = rng.choice(self.q, size=n, replace=False)
        return self.subset(picks.tolist())


def make_field(q: int) -> PrimeField:
    return PrimeField(q)


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _powmod_vec(base: np.ndarray, exp: int, q: int) -> np.ndarray:
    result = np.ones_like(base)
    b = base % q
    while exp:
        if exp & 1:
            result = (result * b) % q
        b = (b * b) % q
        exp >>= 1
    return result


def bool_to_mask(flags: np.ndarray) -> int:
    if flags.size == 0:
        return 0
    packed = np.packbits(flags.astype(bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def mask_to_bool(mask: int, q: int) -> np.ndarray:
    nbytes = (q + 7) // 8
    raw = np.frombuffer(mask.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:q].astype(bool)


def rotate(mask: int, shift: int, q: int, full: int) -> int:
    """Translate a subset of Z/qZ by ``shift``."""
    shift %= q
    if shift == 0:
        return mask
    return ((mask << shift) | (mask >> (q - shift))) & full


@dataclass(frozen=True, eq=False)
class FSet:
    """Immutable subset of F_q stored as a bitmask (bit i set iff i is a member)."""

    field: PrimeField
    mask: int
    card: int = dc_field(init=False)

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.field.q:
            raise SizeOutOfRange("mask has bits outside [0, q)")
        object.__setattr__(self, "card", self.mask.bit_count())

    @property
    def q(self) -> int:
        return self.field.q

    @cached_property
    def elements(self) -> np.ndarray:
        """Sorted member residues as an int64 array."""
        if self.mask == 0:
            return np.zeros(0, dtype=np.int64)
        return np.flatnonzero(mask_to_bool(self.mask, self.q)).astype(np.int64)

    def to_bool(self) -> np.ndarray:
        return mask_to_bool(self.mask, self.q)

    def recount(self) -> int:
        return int(self.to_bool().sum())

    def __len__(self) -> int:
        return self.card

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements.tolist())

    def __contains__(self, x) -> bool:
        return bool((self.mask >> (int(x) % self.q)) & 1)

    def __eq__(self, other) -> bool:
        if isinstance(other, FSet):
            return self.field == other.field and self.mask == other.mask
        if isinstance(other, (set, frozenset)):
            return set(self) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.q, self.mask))

    def __repr__(self) -> str:
        elems = self.elements.tolist()
        if len(elems) > 12:
            body = ", ".join(map(str, elems[:12])) + ", ..."
        else:
            body = ", ".join(map(str, elems))
        return f"FSet(q={self.q}, {{{body}}})"

    def _check(self, other: "FSet") -> None:
        if self.field != other.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")

    def __or__(self, other: "FSet") -> "FSet":
        self._check(other)
        return FSet(self.field, self.mask | other.mask)

    def __and__(self, other: "FSet") -> "FSet":
        self._check(other)
        return FSet(self.field, self.mask & other.mask)

    def __sub__(self, other: "FSet") -> "FSet":
        """Set difference (not the difference set, see setops.diffset)."""
        self._check(other)
        return FSet(self.field, self.mask & ~other.mask)

    def __le__(self, other: "FSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "FSet") -> bool:
        self._check(other)
        return self.mask & other.mask == 0

    def shift(self, t: int) -> "FSet":
        return FSet(self.field, rotate(self.mask, t, self.q, self.field.full_mask))

    def with_element(self, x: int) -> "FSet":
        return FSet(self.field, self.mask | (1 << (int(x) % self.q)))

    def without_element(self, x: int) -> "FSet":
        return FSet(self.field, self.mask & ~(1 << (int(x) % self.q)))

    def min(self) -> int:
        if self.mask == 0:
            raise ValueError("min of empty set")
        return (self.mask & -self.mask).bit_length() - 1

    def is_full(self) -> bool:
        return self.mask == self.field.full_mask

    def sorted_tuple(self) -> tuple[int, ...]:
        return tuple(self.elements.tolist())
