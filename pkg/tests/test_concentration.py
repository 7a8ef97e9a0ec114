"""Tail probes against closed-form laws.

For 1x1 operators both statistics have elementary distributions, so the
Monte Carlo estimates can be pinned to exact probabilities through their
Wilson intervals.  Wider-than-default intervals (z = 4) keep the checks
deterministic-in-practice without hiding a real discrepancy.
"""

import math

import numpy as np
import pytest
from scipy.special import gammainc

from hardedge import (
    EntryDistribution,
    hw_tail_curve,
    projection_mass_probe,
    wilson_interval,
)

GAUSS = EntryDistribution("complex-gaussian")
RADEMACHER = EntryDistribution("rademacher-pair")
UNIFORM = EntryDistribution("uniform-symmetric")


def wide_interval(prob: float, trials: int) -> tuple[float, float]:
    """Wilson interval at z = 4 around an exact probability."""
    return wilson_interval(round(prob * trials), trials, z=4.0)


# --- wilson_interval ---------------------------------------------------


def test_wilson_endpoints():
    lo, hi = wilson_interval(0, 500)
    assert lo == 0.0
    assert 0.0 < hi < 0.01
    lo, hi = wilson_interval(500, 500)
    assert hi == 1.0
    assert 0.99 < lo < 1.0


def test_wilson_frozen_value():
    # hand-recomputed: z=1.959963984540054, hits=25, trials=1000
    lo, hi = wilson_interval(25, 1000)
    z2 = 1.959963984540054**2
    center = (25 + z2 / 2) / (1000 + z2)
    half = (
        1.959963984540054
        * math.sqrt(25 * (1 - 25 / 1000) + z2 / 4)
        / (1000 + z2)
    )
    assert math.isclose(lo, center - half, rel_tol=1e-12)
    assert math.isclose(hi, center + half, rel_tol=1e-12)
    assert lo < 25 / 1000 < hi


def test_wilson_monotone_in_hits():
    los, his = zip(*(wilson_interval(h, 200) for h in range(0, 201, 10)))
    assert all(a < b for a, b in zip(los, los[1:]))
    assert all(a < b for a, b in zip(his, his[1:]))


# --- quadratic-form tails ----------------------------------------------


def test_hw_exponential_oracle_1x1():
    # statistic is | |x|^2 - 1 | with |x|^2 ~ Exp(1):
    # P(>= d) = exp(-(1+d)) + max(0, 1 - exp(-(1-d)))
    trials = 20000
    curve = hw_tail_curve(np.array([1.0]), GAUSS, trials, [0.5, 2.0], seed=11)
    for d, est in zip(curve.deltas, curve.exceedance):
        exact = math.exp(-(1 + d)) + max(0.0, 1.0 - math.exp(-(1 - d)))
        lo, hi = wide_interval(exact, trials)
        assert lo <= est <= hi, (d, est, exact)


def test_hw_zero_delta_saturates():
    for dist in (GAUSS, RADEMACHER, UNIFORM):
        curve = hw_tail_curve(np.ones(4), dist, 200, [0.0], seed=3)
        assert curve.exceedance[0] == 1.0


def test_hw_rademacher_identity_degenerates():
    # |x|^2 = 1 surely, so the diagonal statistic vanishes
    curve = hw_tail_curve(np.ones(8), RADEMACHER, 500, [0.0, 0.1, 1.0], seed=5)
    assert list(curve.exceedance) == [1.0, 0.0, 0.0]
    assert math.isnan(curve.slope)


def test_hw_diag_and_dense_routes_agree_exactly():
    # same seed, same draws: a diagonal matrix must give identical hits
    lam = np.array([0.3, 1.0, 2.5, 4.0])
    deltas = np.linspace(0.0, 12.0, 9)
    diag = hw_tail_curve(lam, GAUSS, 3000, deltas, seed=17)
    dense = hw_tail_curve(np.diag(lam), GAUSS, 3000, deltas, seed=17)
    assert np.array_equal(diag.exceedance, dense.exceedance)
    assert diag.normalizer == pytest.approx(dense.normalizer, rel=1e-12)
    assert diag.normalizer == pytest.approx(float(np.sum(lam**2)), rel=1e-12)


def test_hw_curve_shape():
    deltas = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
    curve = hw_tail_curve(np.ones(16), GAUSS, 4000, deltas, seed=2)
    assert np.all(np.diff(curve.exceedance) <= 0)
    assert np.all(curve.ci_lo <= curve.exceedance)
    assert np.all(curve.exceedance <= curve.ci_hi)
    assert curve.slope > 0
    assert curve.trials == 4000
    assert curve.kind == "complex-gaussian"


def test_hw_slope_nan_when_degenerate():
    # one interior cell is not enough for a fit
    curve = hw_tail_curve(np.ones(2), GAUSS, 400, [0.0, 1.0, 50.0], seed=9)
    assert curve.exceedance[0] == 1.0
    assert curve.exceedance[2] == 0.0
    assert math.isnan(curve.slope)


def test_hw_deterministic():
    a = hw_tail_curve(np.arange(1.0, 5.0), UNIFORM, 1500, [1.0, 3.0], seed=42)
    b = hw_tail_curve(np.arange(1.0, 5.0), UNIFORM, 1500, [1.0, 3.0], seed=42)
    assert np.array_equal(a.exceedance, b.exceedance)
    c = hw_tail_curve(np.arange(1.0, 5.0), UNIFORM, 1500, [1.0, 3.0], seed=43)
    assert not np.array_equal(a.exceedance, c.exceedance)


def test_hw_chunking_invisible():
    # straddling the chunk boundary must not change the law of the estimate;
    # prefix property: the first 2048 draws are chunk 0 in both runs
    deltas = [2.0]
    small = hw_tail_curve(np.ones(4), GAUSS, 2048, deltas, seed=7)
    big = hw_tail_curve(np.ones(4), GAUSS, 2048 + 512, deltas, seed=7)
    assert abs(big.exceedance[0] * 2560 - small.exceedance[0] * 2048) <= 512


def test_hw_rejects_bad_arguments():
    with pytest.raises(ValueError, match="trials"):
        hw_tail_curve(np.ones(4), GAUSS, 99, [1.0], seed=0)
    with pytest.raises(ValueError, match="degenerate"):
        hw_tail_curve(np.zeros(4), GAUSS, 200, [1.0], seed=0)
    with pytest.raises(ValueError, match="deltas"):
        hw_tail_curve(np.ones(4), GAUSS, 200, [-1.0], seed=0)
    with pytest.raises(ValueError, match="deltas"):
        hw_tail_curve(np.ones(4), GAUSS, 200, [], seed=0)
    with pytest.raises(ValueError, match="dense"):
        hw_tail_curve(np.eye(129), GAUSS, 200, [1.0], seed=0)
    with pytest.raises(ValueError, match="square"):
        hw_tail_curve(np.ones((2, 3)), GAUSS, 200, [1.0], seed=0)


# --- projection mass ---------------------------------------------------


def test_projmass_gaussian_gamma_oracle():
    # coordinate mass is Gamma(m, 1); P(<= m/2) = gammainc(m, m/2)
    trials = 20000
    for m in (1, 4, 9):
        probe = projection_mass_probe(m, 32, GAUSS, trials, seed=m)
        assert probe.family == "coordinate"
        lo, hi = wide_interval(float(gammainc(m, m / 2)), trials)
        assert lo <= probe.probability <= hi, (m, probe.probability)


def test_projmass_haar_matches_gamma_for_gaussian():
    # rotation invariance: a Haar family sees the same law
    probe = projection_mass_probe(4, 16, GAUSS, 4000, seed=1, family="haar")
    assert probe.family == "haar"
    lo, hi = wide_interval(float(gammainc(4, 2.0)), 4000)
    assert lo <= probe.probability <= hi


def test_projmass_uniform_coordinate_m1():
    # P(a^2 + b^2 <= 1/2) for (a, b) uniform on [-sqrt(1.5), sqrt(1.5)]^2
    trials = 20000
    probe = projection_mass_probe(1, 8, UNIFORM, trials, seed=6, family="coordinate")
    lo, hi = wide_interval(math.pi / 12, trials)
    assert lo <= probe.probability <= hi


def test_projmass_rademacher_coordinate_is_zero():
    # coordinate mass equals m surely, never <= m/2
    probe = projection_mass_probe(5, 16, RADEMACHER, 300, seed=0, family="coordinate")
    assert probe.probability == 0.0
    assert probe.ci_lo == 0.0


def test_projmass_auto_family_selection():
    assert projection_mass_probe(2, 8, GAUSS, 50, seed=0).family == "coordinate"
    assert projection_mass_probe(2, 8, RADEMACHER, 50, seed=0).family == "haar"
    assert projection_mass_probe(2, 8, UNIFORM, 50, seed=0).family == "haar"


def test_projmass_deterministic():
    a = projection_mass_probe(3, 12, UNIFORM, 500, seed=13)
    b = projection_mass_probe(3, 12, UNIFORM, 500, seed=13)
    assert a.probability == b.probability
    assert (a.ci_lo, a.ci_hi) == (b.ci_lo, b.ci_hi)


def test_projmass_rejects_bad_arguments():
    with pytest.raises(ValueError, match="m must"):
        projection_mass_probe(9, 8, GAUSS, 100, seed=0)
    with pytest.raises(ValueError, match="m must"):
        projection_mass_probe(0, 8, GAUSS, 100, seed=0)
    with pytest.raises(ValueError, match="trials"):
        projection_mass_probe(2, 8, GAUSS, 0, seed=0)
    with pytest.raises(ValueError, match="family"):
        projection_mass_probe(2, 8, GAUSS, 100, seed=0, family="grid")
