"""Acceptance criteria, one test per criterion.

Each test records a one-line verdict that ``conftest.py`` prints in the
terminal summary.  Run alone with ``pytest tests/test_acceptance.py -rA``.
"""

import time
from dataclasses import dataclass

import numpy as np
import pytest

from padicdyn.conjugation import (
    ConjugationBundle,
    conjugate_backward,
    conjugate_forward,
    orbit_blocks,
    verify_scalar_T_convention,
)
from padicdyn.errors import IllFormed
from padicdyn.maps import (
    InterleavedOdometer,
    Odometer,
    TruncatedMap,
    induce,
    is_bijective_at,
    is_compatible_at,
    is_one_lipschitz,
    is_transitive_at,
)
from padicdyn.prng import TreeSampledMap, sample_transitive, uniformity_report
from tests import oracles

K = 2
MAX_POINTS_RUN = 2**16
TREE_MAPS_PER_PRIME = 20
RUNTIME_BUDGET_S = 60.0
RANDOM_TABLES = 120
MAX_POINTS_RANDOM = 2**12

RESULTS: dict[int, str] = {}


def record(criterion: int, ok: bool, message: str) -> None:
    RESULTS[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {message}"


def max_level(p: int) -> int:
    n = 1
    while p ** (K * (n + 1)) <= MAX_POINTS_RUN:
        n += 1
    return n


@dataclass
class Run:
    p: int
    label: str
    F: TruncatedMap
    bundle: ConjugationBundle

    @property
    def N(self) -> int:
        return self.bundle.N


@pytest.fixture(scope="module")
def runs():
    t0 = time.perf_counter()
    out = []
    for p in (2, 3):
        N = max_level(p)
        maps = [("interleaved-odometer", induce(InterleavedOdometer(), p, K, N))]
        maps += [(f"tree-sampled seed={s}", sample_transitive(p, K, N, seed=s)) for s in range(TREE_MAPS_PER_PRIME)]
        for label, F in maps:
            out.append(Run(p, label, F, conjugate_forward(F, N=N)))
    build = time.perf_counter() - t0
    return out, build


def test_criterion_1_round_trip(runs):
    runs, build = runs
    t0 = time.perf_counter()
    mismatches = []
    for r in runs:
        for n in range(1, r.N + 1):
            recovered = conjugate_backward(r.bundle, n)
            if not np.array_equal(recovered.table, r.F.reduced(n).table):
                mismatches.append((r.p, r.label, n))
    elapsed = build + time.perf_counter() - t0
    tree_counts = {p: sum(1 for r in runs if r.p == p and r.label.startswith("tree")) for p in (2, 3)}
    ok = not mismatches and elapsed < RUNTIME_BUDGET_S and min(tree_counts.values()) >= 20
    record(
        1,
        ok,
        f"{len(runs)} maps, levels up to {max_level(2)} (p=2) / {max_level(3)} (p=3), "
        f"{len(mismatches)} mismatches, {elapsed:.1f}s",
    )
    assert not mismatches
    assert min(tree_counts.values()) >= 20
    assert elapsed < RUNTIME_BUDGET_S


def test_criterion_2_ergodicity_transfer(runs):
    runs, _ = runs
    bad = []
    for r in runs:
        f_ergodic = all(is_transitive_at(r.F, m) for m in range(1, r.N + 1))
        g_ergodic = all(is_transitive_at(r.bundle.G[m], K * m) for m in range(1, r.N + 1))
        g_top = oracles.cycle_walk(r.bundle.G[r.N].table) == [r.p ** (K * r.N)]
        g_mod_pk = bool(is_transitive_at(r.bundle.G[r.N], K))
        if f_ergodic != g_ergodic or g_top != g_ergodic or not g_mod_pk:
            bad.append((r.p, r.label))
    record(2, not bad, f"{len(runs) - len(bad)}/{len(runs)} runs transfer ergodicity and are transitive mod p^k")
    assert not bad


def test_criterion_3_tower(runs):
    runs, _ = runs
    bad = []
    for r in runs:
        for n in range(1, r.N):
            M = r.p ** (K * n)
            if not np.array_equal(r.bundle.G[n + 1].table[:M] % M, r.bundle.G[n].table):
                bad.append((r.p, r.label, n))
    record(3, not bad, f"{len(bad)} tower violations")
    assert not bad


def test_criterion_4_scalar_compatibility(runs):
    runs, _ = runs
    witnesses = []
    for r in runs:
        for n in range(1, r.N + 1):
            res = is_one_lipschitz(r.bundle.G[n])
            if not res:
                witnesses.append((r.p, r.label, n, res.level, res.witness))
    failing_maps = sorted({(p, label) for p, label, *_ in witnesses})
    msg = f"{len(failing_maps)}/{len(runs)} maps have a non-compatible G_n"
    if witnesses:
        p, label, n, level, (x, y) = witnesses[0]
        msg += f"; first counter-witness p={p} {label}: G_{n} at scalar level {level}, x={x}, y={y}"
    record(4, not witnesses, msg)
    assert not witnesses, msg


def _random_tables():
    rng = np.random.default_rng(2024)
    shapes = [(2, 1, 10), (2, 2, 6), (2, 3, 4), (3, 1, 7), (3, 2, 3), (5, 1, 5), (2, 2, 3), (3, 1, 4), (7, 1, 4), (2, 1, 6)]
    for i in range(RANDOM_TABLES):
        p, k, n = shapes[i % len(shapes)]
        size = p ** (k * n)
        assert size <= MAX_POINTS_RANDOM
        kind = (i // len(shapes)) % 5
        if kind == 0:
            table = rng.integers(0, size, size)
        elif kind == 1:
            table = rng.permutation(size)
        elif kind == 2:
            table = TreeSampledMap.from_seed(p, k, n, i).materialize().table
        elif kind == 3:
            table = TreeSampledMap.from_seed(p, k, n, i).materialize().table.copy()
            a, b = rng.choice(size, 2, replace=False)
            table[[a, b]] = table[[b, a]]
        else:
            table = sample_transitive(p, k, n, seed=i).table
        yield TruncatedMap(p, k, n, table)


def test_criterion_5_oracle_agreement():
    total = agree = 0
    disagreements = []
    for f in _random_tables():
        total += 1
        ok = True
        first = None
        for m in range(1, f.n + 1):
            M = f.modulus(m)
            w = oracles.lipschitz_pairs(f.table, M)
            if w is not None and first is None and m < f.n:
                first = (m, w)
            got = is_compatible_at(f, m)
            ok &= bool(got) == (w is None) and (got.witness is None or got.witness == w)
            expected_bij = oracles.bijective_count(f.table, M, compatible=w is None)
            try:
                bij = bool(is_bijective_at(f, m))
            except IllFormed:
                bij = None
            ok &= bij == expected_bij
            if expected_bij:
                lengths = oracles.cycle_walk(f.table[:M] % M)
                ok &= bool(is_transitive_at(f, m)) == (lengths == [M])
        lip = is_one_lipschitz(f)
        ok &= (first is None) == bool(lip) and (first is None or (lip.level, lip.witness) == first)
        agree += ok
        if not ok:
            disagreements.append((f.p, f.k, f.n))
    record(5, agree == total and total >= 100, f"{agree}/{total} random tables agree with brute-force oracles")
    assert total >= 100
    assert agree == total, disagreements[:5]


def test_criterion_6_block_structure(runs):
    runs, _ = runs
    bad = []
    checked = 0
    for r in runs:
        L = r.p**K
        for m in range(1, r.N + 1):
            Fm = r.F.reduced(m)
            try:
                part = orbit_blocks(Fm, m)
            except Exception as exc:  # noqa: BLE001
                bad.append((r.p, r.label, m, repr(exc)))
                continue
            positions, period = oracles.start_positions_along_cycle(Fm.table, L)
            spaced = positions == list(range(0, period, L)) and period == Fm.size
            closed = bool(np.all(part.powers[:, -1] % L == 0))
            if not (spaced and closed):
                bad.append((r.p, r.label, m))
            checked += 1
    record(6, not bad, f"{checked} (map, level) partitions, {len(bad)} failures")
    assert not bad


def test_criterion_7_uniformity(runs):
    runs, _ = runs
    maps = [induce(Odometer(1), 2, 1, 16), induce(Odometer(1), 3, 1, 10)]
    for r in runs:
        maps.append(r.F)
        if is_transitive_at(r.bundle.G[r.N], K * r.N):
            maps.append(r.bundle.G[r.N])
    worst = 0
    for f in maps:
        rep = uniformity_report(f)
        for lv in rep.levels:
            counts = lv.histogram
            worst = max(worst, int(np.abs(counts - f.size // lv.class_count).max()), lv.max_deviation)
    record(7, worst == 0, f"{len(maps)} transitive maps, max deviation {worst}")
    assert worst == 0


def test_criterion_8_convention_report(runs):
    runs, _ = runs
    tally = {"holds": 0, "counter-witness": 0, "error": 0}
    first_counter = None
    for r in runs:
        for n in range(1, r.N + 1):
            rep = verify_scalar_T_convention(r.bundle, n)
            tally[rep.verdict] += 1
            if rep.verdict == "counter-witness" and first_counter is None:
                first_counter = (r.p, r.label, n, rep.witness)
    msg = f"holds={tally['holds']} counter-witness={tally['counter-witness']} error={tally['error']}"
    if first_counter:
        p, label, n, (x, got, want) = first_counter
        msg += f"; first counter-witness p={p} {label} n={n}: x={x} rebuilt {got} != F(x)={want}"
    record(8, tally["error"] == 0, msg)
    assert tally["error"] == 0


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
