"""Config validation and experiment runner behaviour at desk scale.

Runner checks here use small sizes and trial counts with fixed seeds; the
full-scale sweeps live in the acceptance tests.  Statistical verdicts are
deterministic because every runner derives its stream from (seed, size).
"""

import dataclasses
import math

import pytest

from hardedge import (
    ConfigError,
    ExperimentConfig,
    Thresholds,
    Window,
    derived_windows,
    run_apriori,
    run_delocalization,
    run_hard_edge_scaling,
    run_hw_experiment,
    run_identity_suite,
    run_local_law,
    run_projection_mass_experiment,
    run_wegner,
)

SMALL = dict(sizes=(96, 128), trials=30, seed=5, scale_min=20.0)


@pytest.fixture(scope="module")
def small_cfg():
    return ExperimentConfig(**SMALL)


# --- config ------------------------------------------------------------


def test_config_defaults_round_trip():
    cfg = ExperimentConfig()
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_config_round_trip_with_windows_and_thresholds():
    cfg = ExperimentConfig(
        sizes=(64,),
        trials=40,
        windows=(Window(1.0, 0.5), Window(2.0, 0.25)),
        thresholds=Thresholds(deloc_cap=20.0),
        kappa=0.3,
    )
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg
    assert again.windows == (Window(1.0, 0.5), Window(2.0, 0.25))
    assert again.thresholds.deloc_cap == 20.0


@pytest.mark.parametrize(
    "field,value",
    [
        ("sizes", ()),
        ("sizes", (0,)),
        ("trials", 29),
        ("distribution", "cauchy"),
        ("b", 0.0),
        ("b", math.inf),
        ("kappa", 0.0),
        ("kappa", 1.0),
        ("epsilon_grid", ()),
        ("epsilon_grid", (0.1, -0.2)),
        ("k_grid", (0.0,)),
        ("l_grid", (2, 1)),
        ("l_grid", (1, 1)),
        ("l_grid", (0, 1)),
        ("seed", -1),
        ("seed", 2**64),
        ("scale_min", 0.0),
        ("n_windows", 0),
    ],
)
def test_config_rejects_and_names_the_field(field, value):
    with pytest.raises(ConfigError) as err:
        ExperimentConfig(**{field: value})
    assert str(err.value).startswith(f"{field}:")


def test_thresholds_reject_and_name_the_field():
    with pytest.raises(ConfigError, match="thresholds.deloc_cap"):
        ExperimentConfig(thresholds=Thresholds(deloc_cap=-1.0))


def test_from_dict_rejects_unknown_key():
    with pytest.raises(ConfigError, match="scale_mni"):
        ExperimentConfig.from_dict({"scale_mni": 50.0})
    with pytest.raises(ConfigError, match="thresholds.deloc_gap"):
        ExperimentConfig.from_dict({"thresholds": {"deloc_gap": 1.0}})


def test_from_dict_rejects_non_object():
    with pytest.raises(ConfigError, match="config"):
        ExperimentConfig.from_dict([1, 2])


def test_from_dict_parses_windows():
    cfg = ExperimentConfig.from_dict(
        {"windows": [{"energy": 2.0, "eta": 0.1}], "trials": 50}
    )
    assert cfg.windows == (Window(2.0, 0.1),)
    with pytest.raises(ConfigError, match=r"windows\[0\]"):
        ExperimentConfig.from_dict({"windows": [{"energy": 2.0}]})
    with pytest.raises(ConfigError, match=r"windows\[1\]"):
        ExperimentConfig.from_dict(
            {"windows": [{"energy": 2.0, "eta": 0.1}, {"energy": 1.0, "eta": -0.1}]}
        )


def test_from_dict_coerces_lists():
    cfg = ExperimentConfig.from_dict({"sizes": [64, 96], "epsilon_grid": [0.1, 0.2]})
    assert cfg.sizes == (64, 96)
    assert cfg.epsilon_grid == (0.1, 0.2)


# --- window ladder ------------------------------------------------------


def test_derived_windows_formula():
    cfg = ExperimentConfig(sizes=(96,), scale_min=20.0, kappa=0.5, n_windows=4)
    windows = derived_windows(cfg, 96)
    lo = 2.0 * (20.0 / (0.5 * 96)) ** 2
    hi = 3.5
    ratio = (hi / lo) ** (1.0 / 3.0)
    assert len(windows) == 4
    for j, w in enumerate(windows):
        assert w.energy == pytest.approx(lo * ratio**j, rel=1e-12)
        assert w.eta == pytest.approx(20.0 * math.sqrt(w.energy) / 96, rel=1e-12)
    assert windows[-1].energy == pytest.approx(hi, rel=1e-12)


def test_derived_windows_single():
    cfg = ExperimentConfig(sizes=(96,), n_windows=1, kappa=0.5, scale_min=20.0)
    (w,) = derived_windows(cfg, 96)
    assert w.energy == pytest.approx(1.75)


def test_derived_windows_rejects_small_size():
    cfg = ExperimentConfig(sizes=(64,))
    with pytest.raises(ConfigError, match="cannot host"):
        derived_windows(cfg, 64)


def test_explicit_windows_scale_enforced():
    cfg = ExperimentConfig(sizes=(96,), trials=30, windows=(Window(2.0, 0.001),))
    with pytest.raises(ConfigError, match="below scale_min"):
        run_apriori(cfg)


# --- counting tails -----------------------------------------------------


def test_apriori_small(small_cfg):
    rep = run_apriori(small_cfg)
    assert rep.passed
    assert rep.theorem == "apriori-counting"
    assert len(rep.rows) == 2 * 4 * 5
    assert rep.config == small_cfg.to_dict()
    for row in rep.rows:
        assert set(row) == set(rep.columns)
        assert row["threshold"] == pytest.approx(row["K"] * row["scale"], rel=1e-12)
        assert row["ci_lo"] <= row["statistic"] <= row["ci_hi"]
    assert rep.summary["max_reference_exceedance"] <= 0.01


def test_apriori_thread_count_invisible(small_cfg):
    serial = run_apriori(small_cfg, threads=1)
    pooled = run_apriori(small_cfg, threads=3)
    assert serial.rows == pooled.rows
    assert serial.summary == pooled.summary


def test_report_config_survives_from_dict(small_cfg):
    rep = run_apriori(small_cfg)
    assert ExperimentConfig.from_dict(rep.config) == small_cfg


# --- local law ----------------------------------------------------------


def test_local_law_small(small_cfg):
    rep = run_local_law(small_cfg)
    assert rep.passed
    forms = {row["form"] for row in rep.rows}
    assert forms == {"transform", "count"}
    # per (size, window, form): one row per grid epsilon plus the reference
    n_eps = len(set(small_cfg.epsilon_grid) | {small_cfg.thresholds.locallaw_epsilon})
    assert len(rep.rows) == 2 * 4 * 2 * n_eps
    assert rep.summary["max_transform_exceedance_at_reference"] <= 0.05
    for row in rep.rows:
        assert 0.0 < row["nominal_tail"]


def test_local_law_rejects_atomic_entries(small_cfg):
    cfg = dataclasses.replace(small_cfg, distribution="rademacher-pair")
    with pytest.raises(ConfigError, match="excluded"):
        run_local_law(cfg)


# --- delocalization -----------------------------------------------------


def test_delocalization_small(small_cfg):
    rep = run_delocalization(small_cfg)
    assert rep.passed
    assert len(rep.rows) == 2
    for row in rep.rows:
        assert row["statistic"] == 0.0
        assert 1.0 < row["median_over_ln"] < 2.5
        assert row["lower_edge"] < row["upper_edge"] == 3.5
    sizes = [row["size"] for row in rep.rows]
    assert sizes == sorted(sizes)


def test_delocalization_cap_failure(small_cfg):
    cfg = dataclasses.replace(
        small_cfg, sizes=(96,), thresholds=Thresholds(deloc_cap=0.0001)
    )
    rep = run_delocalization(cfg)
    assert not rep.passed
    assert any("cap" in f for f in rep.failures)


def test_delocalization_rejects_atomic_entries(small_cfg):
    cfg = dataclasses.replace(small_cfg, distribution="rademacher-pair")
    with pytest.raises(ConfigError, match="excluded"):
        run_delocalization(cfg)


# --- near-zero counting ---------------------------------------------------


def test_wegner_small():
    cfg = ExperimentConfig(sizes=(128,), trials=120, seed=5, scale_min=20.0)
    rep = run_wegner(cfg)
    assert rep.passed
    assert len(rep.rows) == len(cfg.k_grid) * len(cfg.l_grid)
    by_cell = {}
    for row in rep.rows:
        by_cell.setdefault(row["K"], []).append(row["statistic"])
    for stats in by_cell.values():
        assert stats[0] > 0
        assert all(a >= b for a, b in zip(stats, stats[1:]))
    assert all(s > 0 for s in rep.summary["decay_slopes"].values())


def test_wegner_rejects_atomic_entries():
    cfg = ExperimentConfig(sizes=(128,), trials=30, distribution="rademacher-pair")
    with pytest.raises(ConfigError, match="excluded"):
        run_wegner(cfg)


# --- hard edge ------------------------------------------------------------


def test_hard_edge_small(small_cfg):
    rep = run_hard_edge_scaling(small_cfg)
    assert rep.passed
    medians = [row["statistic"] for row in rep.rows]
    assert max(medians) <= 2.0 * min(medians)
    for row in rep.rows:
        assert 0.5 < row["spacing_median"] < 2.0


# --- exact identities ------------------------------------------------------


@pytest.fixture(scope="module")
def identity_report():
    return run_identity_suite(sizes=(8, 16), trials=3, seed=7)


def test_identity_suite_small(identity_report):
    rep = identity_report
    assert rep.passed
    assert len(rep.rows) == 16
    checks = {row["check"] for row in rep.rows}
    assert "interlacing_violation" in checks and len(checks) == 8
    for row in rep.rows:
        assert math.isfinite(row["statistic"])


def test_identity_suite_thread_count_invisible(identity_report):
    pooled = run_identity_suite(sizes=(8, 16), trials=3, seed=7, threads=2)
    assert pooled.rows == identity_report.rows


def test_identity_suite_rejects_zero_trials():
    with pytest.raises(ConfigError, match="trials"):
        run_identity_suite(sizes=(8,), trials=0)


# --- tail experiments -------------------------------------------------------


def test_hw_experiment_small():
    rep = run_hw_experiment(trials=400, seed=3, size=16, deltas=(1.0, 2.0, 4.0, 8.0))
    assert rep.passed
    assert rep.summary["slope"] > 0
    assert rep.summary["normalizer"] == pytest.approx(16.0)
    stats = [row["statistic"] for row in rep.rows]
    assert all(a >= b for a, b in zip(stats, stats[1:]))


def test_projection_mass_experiment_small():
    rep = run_projection_mass_experiment(trials=4000, seed=3, size=32, m_grid=(4, 9, 16))
    assert rep.passed
    ratios = rep.summary["ratios"]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    for row, ratio in zip(rep.rows, ratios):
        assert ratio == pytest.approx(
            -math.log(row["statistic"]) / row["sqrt_m"], rel=1e-12
        )
