import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicdyn.errors import NotBijective, NotTransitive, RetriesExhausted
from padicdyn.maps import (
    Affine,
    Identity,
    InterleavedOdometer,
    Odometer,
    Table,
    TruncatedMap,
    induce,
    is_ergodic_up_to,
    is_measure_preserving_up_to,
    is_one_lipschitz,
)
from padicdyn.prng import (
    KeystreamConfig,
    TreeSampledMap,
    format_keystream,
    keystream,
    pack_bits,
    sample_transitive,
    uniformity_report,
)
from tests import oracles


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 1, 6), (2, 2, 3), (3, 1, 4), (3, 2, 2), (5, 1, 3), (2, 3, 2)]), st.integers(0, 10**6))
def test_tree_tables_are_compatible_bijections(shape, seed):
    f = TreeSampledMap.from_seed(*shape, seed).materialize()
    assert is_one_lipschitz(f)
    assert is_measure_preserving_up_to(f)


def test_sample_transitive_one_level_is_the_swap():
    assert sample_transitive(2, 1, 1, seed=0).table.tolist() == [1, 0]


@pytest.mark.parametrize("p,k,n", [(2, 2, 3), (3, 2, 2), (2, 1, 10), (5, 1, 3)])
def test_sample_transitive_passes_all_checks(p, k, n):
    f = sample_transitive(p, k, n, seed=42)
    assert is_one_lipschitz(f)
    assert is_measure_preserving_up_to(f)
    assert is_ergodic_up_to(f)
    assert oracles.cycle_walk(f.table) == [p ** (k * n)]
    assert sample_transitive(p, k, n, seed=42) == f
    assert sample_transitive(p, k, n - 1, seed=42) == f.reduced(n - 1) if n > 1 else True


def test_sample_transitive_validation():
    with pytest.raises(ValueError):
        sample_transitive(2, 2, 3, seed=0, max_retries=0)
    with pytest.raises(RetriesExhausted):
        # a single draw per level almost surely misses at some level of a deep tower
        for seed in range(50):
            sample_transitive(3, 2, 5, seed=seed, max_retries=1)


def test_keystream_odometer_low_digit():
    cfg = KeystreamConfig(Odometer(1), 2, 1, 3, seed_state=0, count=8)
    assert keystream(cfg).tolist() == [(v % 8) % 2 for v in range(1, 9)] == [1, 0, 1, 0, 1, 0, 1, 0]


def test_keystream_full_state_is_orbit():
    f = sample_transitive(3, 2, 2, seed=1)
    cfg = KeystreamConfig(Table(f), 3, 2, 2, seed_state=5, count=20, extractor="full-state")
    out, s = [], 5
    for _ in range(20):
        s = int(f.table[s])
        out.append(s)
    assert keystream(cfg).tolist() == out


def test_keystream_single_output_and_determinism():
    cfg = KeystreamConfig(InterleavedOdometer(), 2, 2, 3, seed_state=3, count=1)
    assert keystream(cfg).tolist() == [0]
    f = sample_transitive(2, 2, 4, seed=3)
    cfg = KeystreamConfig(Table(f), 2, 2, 4, seed_state=0, count=500)
    assert np.array_equal(keystream(cfg), keystream(cfg))


def test_keystream_validation():
    with pytest.raises(ValueError):
        KeystreamConfig(Odometer(1), 2, 1, 3, count=0)
    with pytest.raises(ValueError):
        KeystreamConfig(Odometer(1), 2, 1, 3, seed_state=8)
    with pytest.raises(ValueError):
        KeystreamConfig(Odometer(1), 2, 1, 3, extractor="middle")
    with pytest.raises(NotBijective):
        keystream(KeystreamConfig(Affine(2, 1), 2, 1, 3, count=4))


def test_keystream_output_formats():
    digits = np.array([1, 0, 0, 0, 0, 0, 0, 0, 1, 1])
    assert pack_bits(digits) == bytes([0b00000001, 0b00000011])
    assert format_keystream(np.array([2, 0, 1])) == "2\n0\n1\n"


def test_uniformity_odometer():
    r = uniformity_report(induce(Odometer(1), 2, 1, 4))
    assert r.period == 16
    lv = r.levels[1]
    assert (lv.class_count, lv.expected) == (4, 4)
    assert lv.histogram.tolist() == [4, 4, 4, 4]
    assert r.max_deviation == 0


@pytest.mark.parametrize("seed", range(5))
def test_uniformity_tree_sampled(seed):
    f = sample_transitive(2, 2, 3, seed)
    r = uniformity_report(f)
    assert r.max_deviation == 0
    d = r.to_dict()
    assert [lv["expected"] for lv in d["levels"]] == [16, 4, 1]


def test_uniformity_requires_transitivity():
    with pytest.raises(NotTransitive):
        uniformity_report(induce(Identity(), 2, 1, 3))
    with pytest.raises(NotTransitive):
        uniformity_report(induce(Affine(3, 1), 2, 1, 4))
