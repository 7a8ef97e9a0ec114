"""Entry distributions, seed derivation, sampling determinism, binary dumps."""

import logging
import math

import numpy as np
import pytest

from hardedge import (
    KINDS,
    EnsembleSpec,
    EntryDistribution,
    MatrixSample,
    check_entry_statistics,
    derive_trial_seed,
    read_sample,
    sample_matrix,
    write_sample,
)
from hardedge.ensemble import remove_column, column_vector, unscaled_column

GAUSS = EntryDistribution("complex-gaussian")
RAD = EntryDistribution("rademacher-pair")
UNIF = EntryDistribution("uniform-symmetric")


def spec_of(n, dist=GAUSS, seed=1):
    return EnsembleSpec(size=n, distribution=dist, master_seed=seed)


# the derivation from master 0 must reproduce the published SplitMix64 stream
def test_seed_derivation_known_vectors():
    assert derive_trial_seed(0, 0) == 0xE220A8397B1DCDAF
    assert derive_trial_seed(0, 1) == 0x6E789E6AA1B965F4
    assert derive_trial_seed(0, 2) == 0x06C45D188009454F


def _mirror(master, idx):
    # independent vectorized reimplementation of the documented mixing
    g = np.uint64(0x9E3779B97F4A7C15)
    z = np.uint64(master) + (idx.astype(np.uint64) + np.uint64(1)) * g
    z ^= z >> np.uint64(30)
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(27)
    z *= np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(31)
    return z


def test_seed_derivation_matches_mirror():
    rng = np.random.default_rng(7)
    masters = rng.integers(0, 2**64, size=200, dtype=np.uint64)
    indices = rng.integers(0, 2**32, size=200, dtype=np.uint64)
    for m, i in zip(masters, indices):
        assert derive_trial_seed(int(m), int(i)) == int(_mirror(int(m), np.array([i]))[0])


def test_seed_derivation_collision_scan():
    idx = np.arange(10**6, dtype=np.uint64)
    out = _mirror(1, idx)
    assert len(np.unique(out)) == 10**6


def test_seed_derivation_pure():
    assert derive_trial_seed(42, 9) == derive_trial_seed(42, 9)
    assert derive_trial_seed(42, 9) != derive_trial_seed(42, 10)
    assert derive_trial_seed(42, 9) != derive_trial_seed(43, 9)


def test_sample_determinism():
    a = sample_matrix(spec_of(32), 5)
    b = sample_matrix(spec_of(32), 5)
    assert np.array_equal(a.entries, b.entries)
    c = sample_matrix(spec_of(32), 6)
    assert not np.array_equal(a.entries, c.entries)


def test_sample_shape_and_dtype():
    s = sample_matrix(spec_of(17), 0)
    assert s.entries.shape == (17, 17)
    assert s.entries.dtype == np.complex128
    assert s.size == 17
    assert np.all(np.isfinite(s.entries.view(float)))


def test_rademacher_unit_modulus():
    s = sample_matrix(spec_of(24, RAD), 0)
    # |x| = 1 exactly before the 1/sqrt(N) scaling
    mods = np.abs(s.entries) * math.sqrt(24)
    assert np.allclose(mods, 1.0, atol=1e-12)


def test_rademacher_size_one():
    s = sample_matrix(spec_of(1, RAD), 3)
    assert abs(s.entries[0, 0]) ** 2 == pytest.approx(1.0, abs=1e-15)


def test_uniform_bounds_and_halfwidth():
    s = sample_matrix(spec_of(64, UNIF), 1)
    half = math.sqrt(1.5)
    parts = np.concatenate([s.entries.real.ravel(), s.entries.imag.ravel()]) * 8.0
    assert np.max(np.abs(parts)) <= half + 1e-12
    # per-part variance 1/2: sample variance of 8192 draws
    assert np.var(parts) == pytest.approx(0.5, rel=0.1)


def test_trace_statistic_near_one():
    for dist in (GAUSS, RAD, UNIF):
        s = sample_matrix(spec_of(256, dist), 0)
        trace = float(np.sum(np.abs(s.entries) ** 2))
        assert abs(trace / 256 - 1.0) < 0.2


def test_kind_table():
    assert set(KINDS) == {"complex-gaussian", "rademacher-pair", "uniform-symmetric"}
    assert GAUSS.density_bounded and UNIF.density_bounded
    assert not RAD.density_bounded
    assert GAUSS.modsq_variance == pytest.approx(1.0)
    assert RAD.modsq_variance == 0.0
    assert UNIF.modsq_variance == pytest.approx(0.4)
    assert GAUSS.subgaussian_delta0 > 0.0
    with pytest.raises(ValueError):
        EntryDistribution("real-gaussian")


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(size=0, distribution=GAUSS, master_seed=1)
    with pytest.raises(ValueError):
        EnsembleSpec(size=4, distribution=GAUSS, master_seed=-1)
    with pytest.raises(ValueError):
        EnsembleSpec(size=4, distribution=GAUSS, master_seed=2**64)


def test_entry_statistics_pass_for_honest_samples():
    mean_dev, modsq_dev = check_entry_statistics(sample_matrix(spec_of(64), 2))
    assert mean_dev <= 5.0 / math.sqrt(2 * 64**2)
    assert modsq_dev <= 10.0 / 64


def test_entry_statistics_reject_doctored_large_n():
    doctored = MatrixSample(
        entries=np.full((64, 64), 0.5 + 0.0j) / 8.0,
        spec=spec_of(64),
        trial_index=0,
    )
    with pytest.raises(ValueError):
        check_entry_statistics(doctored)


def test_entry_statistics_warn_below_threshold(caplog):
    doctored = MatrixSample(
        entries=np.full((8, 8), 0.9 + 0.0j) / math.sqrt(8),
        spec=spec_of(8),
        trial_index=0,
    )
    with caplog.at_level(logging.WARNING):
        check_entry_statistics(doctored)
    assert any("entry statistics" in r.message for r in caplog.records)


def test_column_helpers():
    s = sample_matrix(spec_of(9), 0)
    minor = remove_column(s, 4)
    assert minor.shape == (9, 8)
    assert np.array_equal(minor[:, 4], s.entries[:, 5])
    col = column_vector(s, 4)
    assert np.array_equal(col, s.entries[:, 4])
    assert np.allclose(unscaled_column(s, 4), col * 3.0)
    with pytest.raises(IndexError):
        remove_column(s, 9)


def test_dump_roundtrip(tmp_path):
    path = tmp_path / "sample.bin"
    s = sample_matrix(spec_of(12, UNIF, seed=99), 7)
    write_sample(s, path)
    # 40-byte header (magic, N, kind, reserved, seed, trial) + interleaved doubles
    assert path.stat().st_size == 40 + 16 * 12 * 12
    back = read_sample(path)
    assert np.array_equal(back.entries, s.entries)
    assert back.spec == s.spec
    assert back.trial_index == 7


def test_dump_rejects_corruption(tmp_path):
    path = tmp_path / "sample.bin"
    s = sample_matrix(spec_of(6), 0)
    write_sample(s, path)
    raw = bytearray(path.read_bytes())
    raw[:4] = b"XXXX"
    bad = tmp_path / "bad.bin"
    bad.write_bytes(bytes(raw))
    with pytest.raises(ValueError):
        read_sample(bad)
    trunc = tmp_path / "trunc.bin"
    trunc.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError):
        read_sample(trunc)


def test_kinds_differ_for_same_seed():
    a = sample_matrix(spec_of(16, GAUSS), 0)
    b = sample_matrix(spec_of(16, RAD), 0)
    assert not np.array_equal(a.entries, b.entries)
