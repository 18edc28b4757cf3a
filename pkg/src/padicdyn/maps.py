"""Induced maps modulo p^n stored as explicit image tables.

A :class:`TruncatedMap` on ``(Z/p^n)^k`` holds ``table[i]``, the encoded
image of the encoded point ``i``.  Points are encoded by digit interleaving
(see :mod:`padicdyn.padic`), so the level-``m`` reduction of a map is read
off the table with the modulus ``p^(k*m)``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    IllFormed,
    LevelError,
    MapFormatError,
    NotBijective,
    ShapeMismatch,
)
from .padic import check_params

FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class TruncatedMap:
    p: int
    k: int
    n: int
    table: np.ndarray
    provenance: str = "constructed"

    def __post_init__(self):
        check_params(self.p, self.k, self.n)
        table = np.array(self.table, dtype=np.int64, copy=True).ravel()
        size = self.p ** (self.k * self.n)
        if table.shape[0] != size:
            raise ShapeMismatch(f"table length {table.shape[0]} != p^(kn) = {size}")
        if size and (table.min() < 0 or table.max() >= size):
            raise ShapeMismatch(f"table entries must lie in [0, {size})")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def size(self) -> int:
        return self.table.shape[0]

    def modulus(self, m: int) -> int:
        """Encoded modulus of vector level ``m``."""
        return self.p ** (self.k * m)

    def check_level(self, m: int) -> None:
        if not 1 <= m <= self.n:
            raise LevelError(f"level {m} outside [1, {self.n}]")

    def reduced(self, m: int) -> TruncatedMap:
        """The induced map at level ``m``; raises IllFormed if not well defined."""
        self.check_level(m)
        if m == self.n:
            return self
        w = _lipschitz_witness_at(self.table, self.modulus(m))
        if w is not None:
            raise IllFormed(f"table is not compatible at level {m}: witness {w}")
        M = self.modulus(m)
        return TruncatedMap(self.p, self.k, m, self.table[:M] % M, self.provenance)

    def as_scalar(self) -> TruncatedMap:
        """Same table viewed as a map on ``Z/p^(k*n)`` (the pull-back through H_k)."""
        return TruncatedMap(self.p, 1, self.k * self.n, self.table, self.provenance)

    def __call__(self, x):
        return self.table[x]

    def __eq__(self, other):
        if not isinstance(other, TruncatedMap):
            return NotImplemented
        return (self.p, self.k, self.n) == (other.p, other.k, other.n) and bool(
            np.array_equal(self.table, other.table)
        )

    def __hash__(self):
        return hash((self.p, self.k, self.n, self.table.tobytes()))

    def __repr__(self):
        head = ", ".join(map(str, self.table[:8]))
        more = ", ..." if self.size > 8 else ""
        return f"TruncatedMap(p={self.p}, k={self.k}, n={self.n}, table=[{head}{more}])"


# -- map zoo ----------------------------------------------------------------


@dataclass(frozen=True)
class Odometer:
    """``x -> x + c`` on Z_p."""

    c: int = 1


@dataclass(frozen=True)
class Affine:
    """``x -> a*x + b`` on Z_p."""

    a: int
    b: int


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class InterleavedOdometer:
    """``+1`` on Z_p^k transported through digit interleaving."""


@dataclass(frozen=True)
class Table:
    map: TruncatedMap = field(repr=False)


@dataclass(frozen=True)
class TreeSampled:
    """Random compatible bijection built from per-node digit permutations."""

    seed: int


MapSpec = Odometer | Affine | Identity | InterleavedOdometer | Table | TreeSampled


def induce(spec: MapSpec, p: int, k: int, n: int) -> TruncatedMap:
    """Table of the induced map of ``spec`` on ``(Z/p^n)^k``."""
    check_params(p, k, n)
    size = p ** (k * n)
    x = np.arange(size, dtype=np.int64)
    match spec:
        case Odometer(c=c):
            _scalar_only(spec, k)
            table = (x + c) % size
        case Affine(a=a, b=b):
            _scalar_only(spec, k)
            table = (a % size * x + b) % size
        case Identity():
            table = x
        case InterleavedOdometer():
            table = (x + 1) % size
        case Table(map=m):
            if (m.p, m.k) != (p, k):
                raise ShapeMismatch(f"table is for (p, k)={(m.p, m.k)}, requested {(p, k)}")
            if m.n < n:
                raise LevelError(f"table has precision {m.n} < requested {n}")
            return m.reduced(n)
        case TreeSampled(seed=seed):
            from .prng import TreeSampledMap

            return TreeSampledMap.from_seed(p, k, n, seed).materialize()
        case _:
            raise TypeError(f"unknown map spec {spec!r}")
    return TruncatedMap(p, k, n, table, provenance=spec_name(spec))


def _scalar_only(spec, k):
    if k != 1:
        raise ShapeMismatch(f"{type(spec).__name__} is defined on Z_p only, got k={k}")


def spec_name(spec: MapSpec) -> str:
    match spec:
        case Odometer(c=c):
            return f"odometer({c})"
        case Affine(a=a, b=b):
            return f"affine({a},{b})"
        case Identity():
            return "identity"
        case InterleavedOdometer():
            return "interleaved-odometer"
        case Table(map=m):
            return m.provenance
        case TreeSampled(seed=seed):
            return f"tree-sampled({seed})"
    return repr(spec)


# -- checks -----------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a per-level check.

    ``level`` and ``witness`` describe the first failure in scan order and are
    ``None`` on success.
    """

    ok: bool
    level: int | None = None
    witness: tuple | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def witness_line(self) -> str:
        if self.ok:
            return "witness: none"
        w = " ".join(str(int(v)) for v in self.witness or ())
        return f"witness: level={self.level} {w}".rstrip()


def _lipschitz_witness_at(table: np.ndarray, M: int):
    """First ``(x, y)`` with ``x = y mod M`` but images differing mod ``M``."""
    t = table % M
    rows = t.reshape(-1, M)
    bad = rows != rows[0]
    if not bad.any():
        return None
    y = int(np.argmax(bad.ravel()))
    return (y % M, y)


def is_compatible_at(f: TruncatedMap, m: int) -> CheckResult:
    """Whether ``f(x) mod p^m`` depends only on ``x mod p^m``."""
    f.check_level(m)
    w = _lipschitz_witness_at(f.table, f.modulus(m))
    if w is None:
        return CheckResult(True)
    return CheckResult(False, m, w, f"x={w[0]} and y={w[1]} agree mod p^{f.k * m} but images differ")


def is_one_lipschitz(f: TruncatedMap) -> CheckResult:
    """Compatibility at every level ``m <= n``; witness ``(x, y)`` on failure."""
    for m in range(1, f.n):
        r = is_compatible_at(f, m)
        if not r:
            return r
    return CheckResult(True)


def _duplicate_witness(images: np.ndarray):
    counts = np.bincount(images, minlength=images.shape[0])
    if counts.max() <= 1:
        return None
    first = {}
    for x, v in enumerate(images.tolist()):
        if v in first:
            return (first[v], x)
        first[v] = x
    return None  # pragma: no cover


def is_bijective_at(f: TruncatedMap, m: int) -> CheckResult:
    """Whether the level-``m`` reduction is a permutation; witness is a colliding pair."""
    f.check_level(m)
    M = f.modulus(m)
    w = _lipschitz_witness_at(f.table, M)
    if w is not None:
        raise IllFormed(f"reduction to level {m} is not well defined: witness {w}")
    w = _duplicate_witness(f.table[:M] % M)
    if w is not None:
        return CheckResult(False, m, w, f"points {w[0]} and {w[1]} share an image")
    return CheckResult(True)


def is_measure_preserving_up_to(f: TruncatedMap, n: int | None = None) -> CheckResult:
    n = f.n if n is None else n
    for m in range(1, n + 1):
        r = is_bijective_at(f, m)
        if not r:
            return r
    return CheckResult(True)


def _reduced_permutation(f: TruncatedMap, m: int) -> np.ndarray:
    r = is_bijective_at(f, m)
    if not r:
        raise NotBijective(f"map is not bijective at level {m}: {r.detail}")
    M = f.modulus(m)
    return f.table[:M] % M


def cycle_labels(perm: np.ndarray) -> tuple[int, np.ndarray]:
    """Number of cycles and a cycle label per point.

    Cycles of a permutation are the weakly connected components of its
    functional graph.
    """
    size = perm.shape[0]
    graph = csr_matrix((np.ones(size, dtype=np.int8), (np.arange(size), perm)), shape=(size, size))
    return connected_components(graph, directed=True, connection="weak")


def cycle_structure(f: TruncatedMap, m: int) -> list[int]:
    """Sorted cycle lengths of the level-``m`` reduction."""
    perm = _reduced_permutation(f, m)
    _, labels = cycle_labels(perm)
    return sorted(np.bincount(labels).tolist())


def is_transitive_at(f: TruncatedMap, m: int) -> CheckResult:
    perm = _reduced_permutation(f, m)
    count, labels = cycle_labels(perm)
    if count == 1:
        return CheckResult(True)
    # Witness: 0 and the first point off the cycle through 0.
    other = int(np.argmax(labels != labels[0]))
    return CheckResult(False, m, (0, other), f"{count} cycles; 0 and {other} lie on different cycles")


def is_ergodic_up_to(f: TruncatedMap, n: int | None = None) -> CheckResult:
    n = f.n if n is None else n
    for m in range(1, n + 1):
        r = is_transitive_at(f, m)
        if not r:
            return r
    return CheckResult(True)


def cycle_summary(lengths: list[int]) -> dict[int, int]:
    return dict(sorted(Counter(lengths).items()))


# -- algebra ----------------------------------------------------------------


def _same_shape(f: TruncatedMap, g: TruncatedMap) -> None:
    if (f.p, f.k, f.n) != (g.p, g.k, g.n):
        raise ShapeMismatch(f"(p, k, n) mismatch: {(f.p, f.k, f.n)} vs {(g.p, g.k, g.n)}")


def compose(f: TruncatedMap, g: TruncatedMap) -> TruncatedMap:
    """``f o g``: apply ``g`` first."""
    _same_shape(f, g)
    return TruncatedMap(f.p, f.k, f.n, f.table[g.table])


def invert(f: TruncatedMap) -> TruncatedMap:
    if _duplicate_witness(f.table) is not None:
        raise NotBijective("cannot invert a non-bijective table")
    inv = np.empty_like(f.table)
    inv[f.table] = np.arange(f.size, dtype=np.int64)
    return TruncatedMap(f.p, f.k, f.n, inv)


def identity(p: int, k: int, n: int) -> TruncatedMap:
    return induce(Identity(), p, k, n)


# -- persistence ------------------------------------------------------------


def to_dict(f: TruncatedMap) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "p": f.p,
        "k": f.k,
        "n": f.n,
        "encoding": "interleaved",
        "table": f.table.tolist(),
    }


def from_dict(obj) -> TruncatedMap:
    if not isinstance(obj, dict):
        raise MapFormatError("map file must hold a JSON object")
    missing = {"format_version", "p", "k", "n", "encoding", "table"} - obj.keys()
    if missing:
        raise MapFormatError(f"missing fields: {sorted(missing)}")
    if obj["format_version"] != FORMAT_VERSION:
        raise MapFormatError(f"unsupported format_version {obj['format_version']!r}")
    if obj["encoding"] != "interleaved":
        raise MapFormatError(f"unsupported encoding {obj['encoding']!r}")
    for key in ("p", "k", "n"):
        if type(obj[key]) is not int:
            raise MapFormatError(f"{key} must be an integer")
    table = obj["table"]
    if not isinstance(table, list) or any(type(v) is not int for v in table):
        raise MapFormatError("table must be a list of integers")
    try:
        return TruncatedMap(obj["p"], obj["k"], obj["n"], np.array(table, dtype=np.int64), provenance="file")
    except (ShapeMismatch, ValueError) as exc:
        raise MapFormatError(str(exc)) from exc


def save(f: TruncatedMap, path) -> None:
    Path(path).write_text(json.dumps(to_dict(f)) + "\n")


def load(path) -> TruncatedMap:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MapFormatError(f"{path}: not valid JSON ({exc})") from exc
    return from_dict(obj)
