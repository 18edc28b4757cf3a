"""Random ergodic maps, keystreams and full-period uniformity counts.

A compatible bijection of ``Z_p^k`` is determined by a tree of digit
permutations: for every level ``m`` and every residue class ``c`` modulo
``p^m`` (in vector terms) a permutation of the ``p^k`` possible digit
vectors at position ``m``.  The image of ``x`` takes its level-``m`` digit
vector from the permutation attached to ``x mod p^m``.  Every such table is
1-Lipschitz and bijective at every level by construction.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import NotBijective, NotTransitive, RetriesExhausted
from .maps import (
    MapSpec,
    Table,
    TruncatedMap,
    cycle_labels,
    induce,
    is_measure_preserving_up_to,
    is_transitive_at,
)
from .padic import check_params

EXTRACTORS = ("low-digit", "full-state")


def _level_rng(seed: int, m: int) -> np.random.Generator:
    # One stream per level, so level-m draws do not depend on the precision n.
    return np.random.default_rng([int(seed), m])


def _random_perms(rng: np.random.Generator, classes: int, width: int) -> np.ndarray:
    return rng.permuted(np.tile(np.arange(width, dtype=np.int64), (classes, 1)), axis=1)


def _extend(table: np.ndarray, perms: np.ndarray, M: int, width: int) -> np.ndarray:
    """Lift a level table on ``M`` points by one digit vector of ``width`` values."""
    x = np.arange(M * width, dtype=np.int64)
    low, digit = x % M, x // M
    return table[low] + M * perms[low, digit]


@dataclass(frozen=True, eq=False)
class TreeSampledMap:
    p: int
    k: int
    n: int
    seed: int
    # perms[m] has shape (p^(k*m), p^k); row c permutes the level-m digit vectors above class c
    perms: tuple[np.ndarray, ...] = field(repr=False)

    @classmethod
    def from_seed(cls, p: int, k: int, n: int, seed: int) -> TreeSampledMap:
        check_params(p, k, n)
        width = p**k
        perms = tuple(_random_perms(_level_rng(seed, m), width**m, width) for m in range(n))
        return cls(p, k, n, seed, perms)

    def materialize(self) -> TruncatedMap:
        width = self.p**self.k
        table = np.zeros(1, dtype=np.int64)
        for m, perms in enumerate(self.perms):
            table = _extend(table, perms, width**m, width)
        return TruncatedMap(self.p, self.k, self.n, table, provenance=f"tree-sampled({self.seed})")


def sample_transitive(p: int, k: int, n: int, seed: int, max_retries: int = 1000) -> TruncatedMap:
    """Random compatible map that is transitive at every level ``m <= n``.

    Level ``m`` permutations are redrawn until the lifted table is a single
    cycle at level ``m + 1``; lower levels are never revisited, so the
    expected cost is ``p^k`` draws per level.  ``max_retries`` bounds the
    draws at each level.
    """
    if max_retries < 1:
        raise ValueError("max_retries must be >= 1")
    check_params(p, k, n)
    width = p**k
    table = np.zeros(1, dtype=np.int64)
    for m in range(n):
        rng = _level_rng(seed, m)
        M = width**m
        for _ in range(max_retries):
            lifted = _extend(table, _random_perms(rng, M, width), M, width)
            count, _ = cycle_labels(lifted)
            if count == 1:
                table = lifted
                break
        else:
            raise RetriesExhausted(f"no transitive lift at level {m + 1} after {max_retries} draws")
    f = TruncatedMap(p, k, n, table, provenance=f"transitive({seed})")
    return f


# -- keystreams -------------------------------------------------------------


@dataclass(frozen=True)
class KeystreamConfig:
    spec: MapSpec
    p: int
    k: int
    n: int
    seed_state: int = 0
    count: int = 1
    extractor: str = "low-digit"

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if not 0 <= self.seed_state < self.p ** (self.k * self.n):
            raise ValueError(f"seed state {self.seed_state} is not a point at precision {self.n}")
        if self.extractor not in EXTRACTORS:
            raise ValueError(f"extractor must be one of {EXTRACTORS}")


def iterate(f: TruncatedMap, state: int, count: int) -> np.ndarray:
    """States ``f(s), f(f(s)), ...`` (``count`` of them)."""
    table = f.table.tolist()
    out = np.empty(count, dtype=np.int64)
    s = int(state)
    for i in range(count):
        s = table[s]
        out[i] = s
    return out


def keystream(cfg: KeystreamConfig) -> np.ndarray:
    f = cfg.spec.map.reduced(cfg.n) if isinstance(cfg.spec, Table) else induce(cfg.spec, cfg.p, cfg.k, cfg.n)
    r = is_measure_preserving_up_to(f)
    if not r:
        raise NotBijective(f"state map must be bijective at every level: {r.detail}")
    states = iterate(f, cfg.seed_state, cfg.count)
    if cfg.extractor == "low-digit":
        return states % cfg.p
    return states


def pack_bits(digits: np.ndarray) -> bytes:
    """Pack binary digits eight per byte, first digit in the lowest bit."""
    return np.packbits(np.asarray(digits, dtype=np.uint8), bitorder="little").tobytes()


def format_keystream(digits: np.ndarray) -> str:
    buf = io.StringIO()
    for d in digits.tolist():
        buf.write(f"{d}\n")
    return buf.getvalue()


# -- uniformity -------------------------------------------------------------


@dataclass(frozen=True)
class LevelCount:
    m: int
    class_count: int
    expected: int
    max_deviation: int
    histogram: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class UniformityReport:
    period: int
    levels: tuple[LevelCount, ...]

    @property
    def max_deviation(self) -> int:
        return max(lv.max_deviation for lv in self.levels)

    def to_dict(self, histograms: bool = False) -> dict:
        levels = []
        for lv in self.levels:
            d = {"m": lv.m, "class_count": lv.class_count, "expected": lv.expected, "max_deviation": lv.max_deviation}
            if histograms:
                d["histogram"] = lv.histogram.tolist()
            levels.append(d)
        return {"period": self.period, "levels": levels}


def uniformity_report(f: TruncatedMap, n: int | None = None) -> UniformityReport:
    """Residue counts over one full period of the orbit of 0 at level ``n``."""
    n = f.n if n is None else n
    f = f.reduced(n)
    r = is_transitive_at(f, n)
    if not r:
        raise NotTransitive(f"map is not transitive at level {n}: {r.detail}")
    period = f.size
    orbit = iterate(f, 0, period)
    levels = []
    for m in range(1, n + 1):
        M = f.modulus(m)
        hist = np.bincount(orbit % M, minlength=M)
        expected = period // M
        levels.append(LevelCount(m, M, expected, int(np.abs(hist - expected).max()), hist))
    return UniformityReport(period, tuple(levels))
