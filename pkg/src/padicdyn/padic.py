"""Finite-precision p-adic integers and vectors.

A p-adic integer truncated to ``n`` digits is a tuple of base-``p`` digits
``(a_0, ..., a_{n-1})``.  A vector in ``Z_p^k`` is ``k`` such integers at a
shared precision.  Every vector has a canonical integer index obtained by
interleaving digits: digit ``i`` of component ``j`` lands at position
``i*k + j``.  With this encoding, reducing a vector modulo ``p^m`` is the
same as reducing its index modulo ``p^(k*m)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, LevelError, ShapeMismatch

MAX_PRIME = 2**8
MAX_POINTS = 2**24


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def check_params(p: int, k: int = 1, n: int = 1) -> None:
    """Raise ConfigError unless p is a small prime and p^(k*n) is within bounds."""
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ConfigError(f"p must be prime, got {p!r}")
    if p > MAX_PRIME:
        raise ConfigError(f"p={p} exceeds the configured bound {MAX_PRIME}")
    if k < 1 or n < 1:
        raise ConfigError(f"k and n must be >= 1, got k={k}, n={n}")
    if p ** (k * n) > MAX_POINTS:
        raise ConfigError(f"p^(k*n) = {p}^{k * n} exceeds {MAX_POINTS} points")


def int_digits(value: int, p: int, n: int) -> tuple[int, ...]:
    value %= p**n
    out = []
    for _ in range(n):
        value, d = divmod(value, p)
        out.append(d)
    return tuple(out)


@dataclass(frozen=True)
class TruncatedPadic:
    """A p-adic integer known to ``n`` digits, least significant first."""

    p: int
    n: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.p < 2:
            raise ValueError(f"p must be >= 2, got {self.p}")
        if self.n < 1:
            raise ValueError(f"precision must be >= 1, got {self.n}")
        digits = tuple(int(d) for d in self.digits)
        if len(digits) != self.n:
            raise ValueError(f"expected {self.n} digits, got {len(digits)}")
        if any(d < 0 or d >= self.p for d in digits):
            raise ValueError(f"digits must lie in [0, {self.p}): {digits}")
        object.__setattr__(self, "digits", digits)

    @classmethod
    def from_int(cls, value: int, p: int, n: int) -> TruncatedPadic:
        """Residue of ``value`` modulo ``p^n``; negative values wrap."""
        return cls(p, n, int_digits(value, p, n))

    @property
    def value(self) -> int:
        return sum(d * self.p**i for i, d in enumerate(self.digits))

    def __int__(self) -> int:
        return self.value

    def valuation(self) -> Valuation:
        for i, d in enumerate(self.digits):
            if d:
                return Valuation(i)
        return Valuation(None)


@dataclass(frozen=True)
class TruncatedVector:
    """An element of ``(Z/p^n)^k``; components share ``(p, n)``."""

    components: tuple[TruncatedPadic, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a vector needs at least one component")
        p, n = comps[0].p, comps[0].n
        for c in comps:
            if (c.p, c.n) != (p, n):
                raise ShapeMismatch(f"components disagree on (p, n): {(c.p, c.n)} vs {(p, n)}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_ints(cls, values: Sequence[int], p: int, n: int) -> TruncatedVector:
        return cls(tuple(TruncatedPadic.from_int(v, p, n) for v in values))

    @property
    def p(self) -> int:
        return self.components[0].p

    @property
    def n(self) -> int:
        return self.components[0].n

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(c.value for c in self.components)

    def shape(self) -> tuple[int, int, int]:
        return (self.p, self.k, self.n)


@dataclass(frozen=True, order=False)
class Valuation:
    """The order ``v`` of a truncated value, ``|x|_p = p^-v``.

    ``order is None`` means the value is zero at the available precision.
    """

    order: int | None

    @property
    def is_zero(self) -> bool:
        return self.order is None

    def norm(self, p: int) -> float:
        return 0.0 if self.order is None else float(p) ** (-self.order)

    def _key(self) -> float:
        return float("inf") if self.order is None else self.order

    def __lt__(self, other: Valuation) -> bool:
        return self._key() < other._key()

    def __le__(self, other: Valuation) -> bool:
        return self._key() <= other._key()

    def __str__(self) -> str:
        return "zero-at-precision" if self.order is None else f"order {self.order}"


def _as_vector(x) -> TruncatedVector:
    if isinstance(x, TruncatedPadic):
        return TruncatedVector((x,))
    return x


def encode(x: TruncatedVector | TruncatedPadic) -> int:
    """Interleaved index ``sum a^j_i p^(i*k + j)`` in ``[0, p^(k*n))``."""
    x = _as_vector(x)
    p, k = x.p, x.k
    index = 0
    for j, comp in enumerate(x.components):
        for i, d in enumerate(comp.digits):
            index += d * p ** (i * k + j)
    return index


def decode(index: int, p: int, k: int, n: int) -> TruncatedVector:
    """Inverse of :func:`encode`."""
    if not 0 <= index < p ** (k * n):
        raise LevelError(f"index {index} outside [0, {p}^{k * n})")
    flat = int_digits(index, p, k * n)
    return TruncatedVector(
        tuple(TruncatedPadic(p, n, flat[j::k]) for j in range(k))
    )


def reduce(x: TruncatedVector | TruncatedPadic, m: int):
    """Keep the ``m`` lowest digits of every component."""
    if not 1 <= m <= x.n:
        raise LevelError(f"reduction level {m} outside [1, {x.n}]")
    if isinstance(x, TruncatedPadic):
        return TruncatedPadic(x.p, m, x.digits[:m])
    return TruncatedVector(tuple(TruncatedPadic(c.p, m, c.digits[:m]) for c in x.components))


def sub(x: TruncatedPadic, y: TruncatedPadic) -> TruncatedPadic:
    if (x.p, x.n) != (y.p, y.n):
        raise ShapeMismatch(f"cannot subtract {(y.p, y.n)} from {(x.p, x.n)}")
    return TruncatedPadic.from_int(x.value - y.value, x.p, x.n)


def vec_distance(x, y) -> Valuation:
    """Max-metric distance, expressed as the minimum component order."""
    x, y = _as_vector(x), _as_vector(y)
    if x.shape() != y.shape():
        raise ShapeMismatch(f"shape mismatch: {x.shape()} vs {y.shape()}")
    orders = [sub(a, b).valuation() for a, b in zip(x.components, y.components)]
    return min(orders)


def add_with_carry(x: TruncatedPadic, c: int) -> TruncatedPadic:
    """Schoolbook digit addition of a non-negative integer, dropping the final carry."""
    if c < 0:
        raise ValueError("carry addend must be non-negative")
    p = x.p
    out = []
    carry = c
    for d in x.digits:
        carry, digit = divmod(d + carry, p)
        out.append(digit)
    return TruncatedPadic(p, x.n, tuple(out))


def sample_uniform(p: int, k: int, n: int, seed) -> TruncatedVector:
    """Vector with i.i.d. uniform digits, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    digits = rng.integers(0, p, size=(k, n))
    return TruncatedVector(tuple(TruncatedPadic(p, n, tuple(row)) for row in digits))


def sample_indices(p: int, k: int, n: int, size: int, seed) -> np.ndarray:
    """Batch form of :func:`sample_uniform` returning encoded indices."""
    rng = np.random.default_rng(seed)
    digits = rng.integers(0, p, size=(size, k * n))
    weights = p ** np.arange(k * n, dtype=np.int64)
    return digits @ weights
