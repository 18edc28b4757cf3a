"""Conjugating an ergodic map on Z_p^k to an ergodic map on Z_p.

The construction has three ingredients:

* ``H_k``, digit interleaving ``Z_p^k -> Z_p``.  Points are already encoded
  by interleaving, so on tables ``H_k`` is the identity on indices and a map
  on ``(Z/p^n)^k`` is pulled back to ``Z/p^(k*n)`` just by changing ``k``.
* Orbit blocks.  For a map ``D`` that is a single ``p^k``-cycle modulo ``p``
  every cycle at a higher level meets the start class (vectors ``= 0 mod p``)
  once every ``p^k`` steps.  Each point ``z`` is located as ``z = D^i(x0)``
  with ``x0`` the previous start-class point and ``1 <= i <= p^k``.
* ``T_{k,P}``, the bijection ``D^i(x0) -> D^P(i)(x0)`` for a permutation
  ``P`` of ``{1, ..., p^k}``.

``G = H_k T_{k,P} F H_k^-1`` is then built level by level and the inverse
construction recovers ``F``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    LevelError,
    NoSolution,
    NotTransitive,
    PartitionError,
    ShapeMismatch,
    TargetNotCompatible,
    TargetNotSingleCycle,
    VerificationFailure,
)
from .maps import (
    CheckResult,
    Odometer,
    TruncatedMap,
    induce,
    invert,
    is_bijective_at,
    is_measure_preserving_up_to,
    is_one_lipschitz,
    is_transitive_at,
    load,
    save,
)
from .padic import TruncatedPadic, TruncatedVector, decode, encode

# -- H_k ----------------------------------------------------------------------


def interleave(x: TruncatedVector) -> TruncatedPadic:
    """``H_k``: digit ``i`` of component ``j`` goes to position ``i*k + j``."""
    return TruncatedPadic.from_int(encode(x), x.p, x.k * x.n)


def deinterleave(z: TruncatedPadic, k: int) -> TruncatedVector:
    if z.n % k:
        raise LevelError(f"precision {z.n} is not divisible by k={k}")
    return decode(z.value, z.p, k, z.n // k)


# -- P --------------------------------------------------------------------------


@dataclass(frozen=True)
class PermutationP:
    """A permutation of ``{1, ..., size}`` given by its images, one-based."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(images)}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, size: int) -> PermutationP:
        return cls(tuple(range(1, size + 1)))

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def inverse(self) -> PermutationP:
        inv = [0] * self.size
        for i, v in enumerate(self.images, start=1):
            inv[v - 1] = i
        return PermutationP(tuple(inv))

    def __matmul__(self, other: PermutationP) -> PermutationP:
        """``self @ other`` applies ``other`` first."""
        return PermutationP(tuple(self(other(i)) for i in range(1, self.size + 1)))

    def as_array(self) -> np.ndarray:
        return np.array(self.images, dtype=np.int64)


# -- orbit blocks -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OrbitPartition:
    """Every level-``m`` point located as ``D^i(x0)``, ``1 <= i <= block_length``.

    ``start_modulus`` is the encoded modulus of the start class; ``powers[r]``
    holds ``D^1(x0), ..., D^L(x0)`` for the ``r``-th start point ``starts[r]``.
    """

    level: int
    block_length: int
    start_modulus: int
    starts: np.ndarray
    start_of: np.ndarray
    index_of: np.ndarray
    powers: np.ndarray = field(repr=False)

    def locate(self, x: int) -> tuple[int, int]:
        return int(self.start_of[x]), int(self.index_of[x])


def orbit_blocks(
    D: TruncatedMap,
    m: int | None = None,
    start_modulus: int | None = None,
    block_length: int | None = None,
) -> OrbitPartition:
    """Partition the level-``m`` points of ``D`` into orbit blocks.

    ``start_modulus`` is given in the map's own coordinates: the start class
    is the set of vectors ``= 0 mod start_modulus``, i.e. encoded indices
    ``= 0 mod start_modulus**k``.  It defaults to ``p``.  ``block_length``
    defaults to the encoded start modulus.
    """
    m = D.n if m is None else m
    s = D.p if start_modulus is None else start_modulus
    S = s**D.k
    L = S if block_length is None else block_length
    D = D.reduced(m)
    r = is_bijective_at(D, m)
    if not r:
        raise PartitionError(f"map is not a permutation at level {m}: {r.detail}")
    size = D.size
    if size % S or size % L:
        raise PartitionError(f"start modulus {S} / block length {L} do not divide {size}")

    inv = np.empty_like(D.table)
    inv[D.table] = np.arange(size, dtype=np.int64)
    start_of = np.full(size, -1, dtype=np.int64)
    index_of = np.zeros(size, dtype=np.int64)
    cur = np.arange(size, dtype=np.int64)
    for step in range(1, L + 1):
        cur = inv[cur]
        hit = (cur % S == 0) & (start_of < 0)
        start_of[hit] = cur[hit]
        index_of[hit] = step

    lost = np.flatnonzero(start_of < 0)
    if lost.size:
        x = int(lost[0])
        raise PartitionError(f"point {x} has no start-class point within {L} steps back")
    starts = np.arange(0, size, S, dtype=np.int64)
    short = starts[index_of[starts] != L]
    if short.size:
        x = int(short[0])
        raise PartitionError(
            f"start point {x} follows start point {int(start_of[x])} after {int(index_of[x])} steps, not {L}"
        )

    powers = np.empty((starts.size, L), dtype=np.int64)
    cur = starts
    for j in range(L):
        cur = D.table[cur]
        powers[:, j] = cur
    return OrbitPartition(m, L, S, starts, start_of, index_of, powers)


def apply_T(
    D: TruncatedMap,
    P: PermutationP,
    m: int | None = None,
    partition: OrbitPartition | None = None,
    **block_kw,
) -> TruncatedMap:
    """Table of ``T_{k,P}`` at level ``m``: ``D^i(x0) -> D^P(i)(x0)``."""
    part = orbit_blocks(D, m, **block_kw) if partition is None else partition
    if P.size != part.block_length:
        raise ShapeMismatch(f"P has size {P.size}, blocks have length {part.block_length}")
    row = part.start_of // part.start_modulus
    target = P.as_array()[part.index_of - 1] - 1
    table = part.powers[row, target]
    return TruncatedMap(D.p, D.k, part.level, table, provenance="T")


# -- solving for P ------------------------------------------------------------


def odometer_target(p: int, k: int) -> TruncatedMap:
    return induce(Odometer(1), p, 1, k)


def solve_P(F: TruncatedMap, target: TruncatedMap | None = None) -> PermutationP:
    """The permutation ``P`` making ``H_k T_{k,P} F H_k^-1 = target`` modulo ``p^k``.

    With ``y_i = F^i(0) mod p`` read as scalars mod ``p^k`` and
    ``y_(p^k) = y_0``, ``P`` is determined by ``y_P(j+1) = target(y_j)``.
    """
    p, k = F.p, F.k
    L = p**k
    target = odometer_target(p, k) if target is None else target
    if (target.p, target.k, target.n) != (p, 1, k):
        raise ShapeMismatch(f"target must live on Z/{p}^{k}")
    lip = is_one_lipschitz(target)
    if not lip:
        raise TargetNotCompatible(f"target is not compatible: {lip.detail}")
    if not is_bijective_at(target, k) or not is_transitive_at(target, k):
        raise TargetNotSingleCycle("target is not a single cycle on Z/p^k")
    F1 = F.reduced(1)
    r = is_transitive_at(F1, 1)
    if not r:
        raise NotTransitive(f"F is not transitive mod p: {r.detail}")

    y = np.empty(L, dtype=np.int64)
    s = 0
    for i in range(L):
        y[i] = s
        s = int(F1.table[s])
    position = np.empty(L, dtype=np.int64)
    position[y] = np.arange(L)
    position[y[0]] = L  # y_(p^k) = y_0 takes the shifted index p^k
    images = position[target.table[y]]
    try:
        return PermutationP(tuple(images.tolist()))
    except ValueError as exc:
        raise NoSolution(str(exc)) from exc


# -- forward and backward construction ----------------------------------------


@dataclass
class LevelChecks:
    """Per-level verification flags of a bundle; failures carry witnesses."""

    tower: dict[int, CheckResult] = field(default_factory=dict)
    scalar_lipschitz: dict[int, CheckResult] = field(default_factory=dict)
    bijective: dict[int, CheckResult] = field(default_factory=dict)
    transitive: dict[int, CheckResult] = field(default_factory=dict)
    f_transitive: dict[int, CheckResult] = field(default_factory=dict)
    t_inverse: dict[int, CheckResult] = field(default_factory=dict)

    NAMES = ("tower", "scalar_lipschitz", "bijective", "transitive", "t_inverse")

    def passed(self, name: str) -> bool:
        return all(getattr(self, name).values())

    def first_failure(self, name: str) -> CheckResult | None:
        for n, r in sorted(getattr(self, name).items()):
            if not r:
                return r
        return None

    @property
    def ok(self) -> bool:
        return all(self.passed(name) for name in self.NAMES)

    @property
    def ergodicity_transferred(self) -> bool:
        """F transitive at every vector level iff G transitive at every level kn."""
        return self.passed("f_transitive") == self.passed("transitive")

    def summary(self) -> dict:
        out = {}
        for name in self.NAMES + ("f_transitive",):
            fail = self.first_failure(name)
            out[name] = {
                "ok": fail is None,
                "levels": len(getattr(self, name)),
                "first_failure": None if fail is None else {"level": fail.level, "witness": list(fail.witness or ())},
            }
        out["ergodicity_transferred"] = self.ergodicity_transferred
        return out


@dataclass
class ConjugationBundle:
    """Everything produced by :func:`conjugate_forward`; level ``n`` is at index ``n``."""

    p: int
    k: int
    N: int
    P: PermutationP
    F: dict[int, TruncatedMap]
    G: dict[int, TruncatedMap]
    T: dict[int, TruncatedMap]
    T_inv: dict[int, TruncatedMap]
    checks: LevelChecks
    target: str = "odometer"
    provenance: str = ""

    def manifest(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "N": self.N,
            "P": list(self.P.images),
            "target": self.target,
            "source": self.provenance,
            "checks": self.checks.summary(),
        }


def _tower_check(upper: TruncatedMap, lower: TruncatedMap, level: int) -> CheckResult:
    M = lower.size
    diff = np.flatnonzero(upper.table[:M] % M != lower.table)
    if diff.size:
        x = int(diff[0])
        return CheckResult(False, level, (x,), f"G_{level + 1}({x}) != G_{level}({x}) mod p^(k*{level})")
    return CheckResult(True)


def conjugate_forward(
    F: TruncatedMap,
    P: PermutationP | None = None,
    N: int | None = None,
    target: TruncatedMap | None = None,
    strict: bool = False,
) -> ConjugationBundle:
    """Build ``G_n = H_k T_{k,P} F H_k^-1 mod p^(k*n)`` for ``n = 1..N`` and verify it.

    ``F`` must be compatible, bijective at every level and transitive mod
    ``p``.  The checks are recorded in ``bundle.checks``; with ``strict`` the
    first failing check raises :class:`VerificationFailure`.
    """
    N = F.n if N is None else N
    F.check_level(N)
    p, k = F.p, F.k
    lip = is_one_lipschitz(F)
    if not lip:
        raise VerificationFailure(f"F is not 1-Lipschitz: {lip.detail}", lip.level, lip.witness)
    if P is None:
        P = solve_P(F, target)
    elif not is_transitive_at(F, 1):
        raise NotTransitive("F is not transitive mod p")
    if P.size != p**k:
        raise ShapeMismatch(f"P must permute 1..{p**k}")
    P_inv = P.inverse()

    checks = LevelChecks()
    Fs, Gs, Ts, Tinvs = {}, {}, {}, {}
    for n in range(1, N + 1):
        Fn = F.reduced(n)
        part = orbit_blocks(Fn, n)
        Tn = apply_T(Fn, P, n, partition=part)
        Tn_inv = invert(Tn)
        # H_k is the identity on interleaved indices: G_n's table is T_n o F_n on Z/p^(kn).
        Gn = TruncatedMap(p, 1, k * n, Tn.table[Fn.table], provenance=f"G_{n}")
        Fs[n], Ts[n], Tinvs[n], Gs[n] = Fn, Tn, Tn_inv, Gn

        via_P_inv = apply_T(Fn, P_inv, n, partition=part)
        checks.t_inverse[n] = (
            CheckResult(True)
            if via_P_inv == Tn_inv
            else CheckResult(False, n, (int(np.argmax(via_P_inv.table != Tn_inv.table)),), "T^-1 != T_{k,P^-1}")
        )
        checks.scalar_lipschitz[n] = is_one_lipschitz(Gn)
        bij = is_bijective_at(Gn, k * n)
        if bij and checks.scalar_lipschitz[n]:
            bij = is_measure_preserving_up_to(Gn)
        checks.bijective[n] = bij
        checks.transitive[n] = is_transitive_at(Gn, k * n) if is_bijective_at(Gn, k * n) else bij
        checks.f_transitive[n] = is_transitive_at(Fn, n)
        if n > 1:
            checks.tower[n - 1] = _tower_check(Gn, Gs[n - 1], n - 1)

    if strict:
        for name in LevelChecks.NAMES:
            fail = checks.first_failure(name)
            if fail is not None:
                raise VerificationFailure(f"{name} failed at level {fail.level}: {fail.detail}", fail.level, fail.witness)

    return ConjugationBundle(p, k, N, P, Fs, Gs, Ts, Tinvs, checks, provenance=F.provenance)


def conjugate_backward(bundle: ConjugationBundle, n: int) -> TruncatedMap:
    """Recover ``F mod p^n`` as ``H_k^-1 T_{k,P}^-1 G_n H_k``; raises on mismatch."""
    if not 1 <= n <= bundle.N:
        raise LevelError(f"bundle covers levels 1..{bundle.N}, asked for {n}")
    Gn, Tn_inv = bundle.G[n], bundle.T_inv[n]
    table = Tn_inv.table[Gn.table]
    recovered = TruncatedMap(bundle.p, bundle.k, n, table, provenance=f"recovered F_{n}")
    original = bundle.F[n]
    diff = np.flatnonzero(recovered.table != original.table)
    if diff.size:
        x = int(diff[0])
        raise VerificationFailure(
            f"recovered F_{n}({x}) = {int(recovered.table[x])}, expected {int(original.table[x])}", n, (x,)
        )
    return recovered


@dataclass(frozen=True)
class ConventionReport:
    """Whether ``F`` is recovered with T rebuilt from G's own blocks on Z_p."""

    level: int
    holds: bool
    witness: tuple | None = None
    commutation_holds: bool = False
    commutation_witness: tuple | None = None
    error: str | None = None

    @property
    def verdict(self) -> str:
        if self.error is not None:
            return "error"
        return "holds" if self.holds else "counter-witness"

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "verdict": self.verdict,
            "witness": None if self.witness is None else list(self.witness),
            "commutation_holds": self.commutation_holds,
            "commutation_witness": None if self.commutation_witness is None else list(self.commutation_witness),
            "error": self.error,
        }


def verify_scalar_T_convention(
    bundle: ConjugationBundle, n: int, scalar_start_modulus: int | None = None
) -> ConventionReport:
    """Rebuild ``T_{k,P^-1}`` from G's own orbit blocks on Z_p and test ``F = H^-1 T G H``.

    The scalar start class is ``0 mod p^k`` unless ``scalar_start_modulus``
    says otherwise.  Also compares ``T`` built on the vector side with ``T``
    built from the pulled-back scalar map ``H F H^-1``.
    """
    p, k = bundle.p, bundle.k
    L = p**k
    s = L if scalar_start_modulus is None else scalar_start_modulus
    Gn, Fn = bundle.G[n], bundle.F[n]
    try:
        T_scal = apply_T(Fn.as_scalar(), bundle.P, k * n, start_modulus=s, block_length=L)
        diff = np.flatnonzero(T_scal.table != bundle.T[n].table)
        comm_ok = diff.size == 0
        comm_w = None if comm_ok else (int(diff[0]),)

        T_back = apply_T(Gn, bundle.P.inverse(), k * n, start_modulus=s, block_length=L)
        rebuilt = T_back.table[Gn.table]
        diff = np.flatnonzero(rebuilt != Fn.table)
    except PartitionError as exc:
        return ConventionReport(n, False, error=f"PartitionError: {exc}")
    if diff.size:
        x = int(diff[0])
        return ConventionReport(n, False, (x, int(rebuilt[x]), int(Fn.table[x])), comm_ok, comm_w)
    return ConventionReport(n, True, None, comm_ok, comm_w)


# -- export -------------------------------------------------------------------


def export_bundle(bundle: ConjugationBundle, directory) -> Path:
    """Write ``F_n.map``, ``G_n.map``, ``T_n.map`` per level and ``manifest.json``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for n in range(1, bundle.N + 1):
        save(bundle.F[n], out / f"F_{n}.map")
        save(bundle.G[n], out / f"G_{n}.map")
        save(bundle.T[n], out / f"T_{n}.map")
    (out / "manifest.json").write_text(json.dumps(bundle.manifest(), indent=2) + "\n")
    return out


def load_bundle(directory) -> ConjugationBundle:
    """Read an exported bundle back; ``T`` inverses and checks are recomputed."""
    src = Path(directory)
    manifest = json.loads((src / "manifest.json").read_text())
    p, k, N = manifest["p"], manifest["k"], manifest["N"]
    P = PermutationP(tuple(manifest["P"]))
    Fs = {n: load(src / f"F_{n}.map") for n in range(1, N + 1)}
    bundle = conjugate_forward(Fs[N], P, N)
    for n in range(1, N + 1):
        G_file = load(src / f"G_{n}.map")
        T_file = load(src / f"T_{n}.map")
        if G_file != bundle.G[n] or T_file != bundle.T[n]:
            raise VerificationFailure(f"stored tables at level {n} disagree with the rebuilt bundle", n)
    bundle.target = manifest.get("target", "odometer")
    return bundle


def roundtrip_all(bundle: ConjugationBundle, levels: Sequence[int] | None = None) -> list[TruncatedMap]:
    levels = range(1, bundle.N + 1) if levels is None else levels
    return [conjugate_backward(bundle, n) for n in levels]
