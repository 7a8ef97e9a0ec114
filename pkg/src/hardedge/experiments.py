"""Monte Carlo harnesses that put each spectral statement on the bench.

Asymptotic log-powers are unreachable at any size a workstation can
decompose ((log 512)^4 alone is ~1.5e3), so windows are parameterized by the
resolution scale N*eta/sqrt(E) directly (default floor 50) and the log-power
exponent b travels along as report metadata.  Thresholds are desk-calibrated
constants kept in the configuration, not claims about the theory's constants;
the calibration provenance is complex-gaussian pilot runs at N <= 1024,
seeds O(1), 2026-08.

Every experiment derives one sub-seed per matrix size and one seed per trial
below that, so trials are order- and schedule-independent; reports aggregate
in trial-index order and are reproducible bit for bit from (config, seed).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .concentration import hw_tail_curve, projection_mass_probe, wilson_interval
from .ensemble import (
    KINDS,
    EnsembleSpec,
    EntryDistribution,
    derive_trial_seed,
    sample_matrix,
)
from .mp import SpectralPoint, Window, mp_density, mp_stieltjes, mp_window_mass
from .resolvent import (
    empirical_stieltjes,
    resolvent_diag_leave_one_out,
    resolvent_diag_schur,
)
from .spectral import (
    counting_bound,
    decompose,
    eigenvalue_count,
    eigenvalues_only,
    eigenvector_identity_scan,
    interlacing_check,
)

__all__ = [
    "ConfigError",
    "Thresholds",
    "ExperimentConfig",
    "TheoremReport",
    "derived_windows",
    "run_apriori",
    "run_local_law",
    "run_delocalization",
    "run_wegner",
    "run_hard_edge_scaling",
    "run_identity_suite",
    "run_hw_experiment",
    "run_projection_mass_experiment",
]


class ConfigError(ValueError):
    """Configuration rejected; the message starts with the offending field path."""


@dataclass(frozen=True)
class Thresholds:
    """Desk-calibrated pass/fail constants (not the theory's constants).

    apriori_reference_k: K at which the counting tail must be empirically dead.
    locallaw_epsilon / locallaw_exceedance: sqrt(E)-scaled deviation and the
        admissible exceedance fraction at the largest size.
    deloc_cap: cap on max_a N*||u_a||_inf^2 / ln N; deloc_exceed_frac: admissible
        fraction of trials above the cap; deloc_ratio_band: allowed spread of
        median(max N||u||_inf^2)/ln N across sizes.
    hardedge_median_factor: allowed ratio of N^2*s_1 medians across sizes;
    spacing_lo/hi: band for mean central gap times N*rho(2).
    """

    apriori_tail: float = 0.01
    apriori_reference_k: float = 4.0
    locallaw_epsilon: float = 0.15
    locallaw_exceedance: float = 0.05
    deloc_cap: float = 15.0
    deloc_exceed_frac: float = 0.01
    deloc_ratio_band: float = 1.5
    hardedge_median_factor: float = 2.0
    spacing_lo: float = 0.5
    spacing_hi: float = 2.0

    def validate(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"thresholds.{f.name}: must be a positive real, got {value!r}")


_CONFIG_DOC = {
    "sizes": "matrix sizes N",
    "trials": "trials per size (>= 30)",
    "distribution": f"entry kind, one of {list(KINDS)}",
    "b": "log-power exponent carried as metadata (> 0)",
    "kappa": "bulk cutoff in (0, 1); windows stay below 4 - kappa",
    "epsilon_grid": "deviation grid for the local-law experiments",
    "k_grid": "counting thresholds K (units of N*eta/sqrt(E))",
    "l_grid": "near-zero count levels L",
    "seed": "64-bit master seed",
    "scale_min": "window resolution floor N*eta/sqrt(E)",
    "n_windows": "derived windows per size",
    "windows": "explicit [{energy, eta}] windows; null derives them",
    "thresholds": "desk-calibrated pass/fail constants",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment parameters; JSON keys match field names."""

    sizes: tuple[int, ...] = (128, 256, 512)
    trials: int = 100
    distribution: str = "complex-gaussian"
    b: float = 4.0
    kappa: float = 0.5
    epsilon_grid: tuple[float, ...] = (0.05, 0.1, 0.15, 0.2, 0.3)
    k_grid: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0)
    l_grid: tuple[int, ...] = (1, 2, 3, 4, 5)
    seed: int = 1
    scale_min: float = 50.0
    n_windows: int = 4
    windows: tuple[Window, ...] | None = None
    thresholds: Thresholds = field(default_factory=Thresholds)

    def __post_init__(self) -> None:
        if not self.sizes or any(int(n) < 1 for n in self.sizes):
            raise ConfigError(f"sizes: need a nonempty list of sizes >= 1, got {self.sizes!r}")
        if self.trials < 30:
            raise ConfigError(f"trials: must be >= 30, got {self.trials}")
        if self.distribution not in KINDS:
            raise ConfigError(
                f"distribution: unknown kind {self.distribution!r}, choose from {list(KINDS)}"
            )
        if not (math.isfinite(self.b) and self.b > 0):
            raise ConfigError(f"b: must be positive, got {self.b}")
        if not (0.0 < self.kappa < 1.0):
            raise ConfigError(f"kappa: must lie strictly in (0, 1), got {self.kappa}")
        if not self.epsilon_grid or any(e <= 0 for e in self.epsilon_grid):
            raise ConfigError(f"epsilon_grid: need entries > 0, got {self.epsilon_grid!r}")
        if not self.k_grid or any(k <= 0 for k in self.k_grid):
            raise ConfigError(f"k_grid: need entries > 0, got {self.k_grid!r}")
        if not self.l_grid or any(int(l) < 1 for l in self.l_grid) or list(self.l_grid) != sorted(
            set(int(l) for l in self.l_grid)
        ):
            raise ConfigError(
                f"l_grid: need strictly increasing integers >= 1, got {self.l_grid!r}"
            )
        if not (0 <= self.seed < 2**64):
            raise ConfigError(f"seed: must be a u64, got {self.seed}")
        if not (math.isfinite(self.scale_min) and self.scale_min > 0):
            raise ConfigError(f"scale_min: must be positive, got {self.scale_min}")
        if self.n_windows < 1:
            raise ConfigError(f"n_windows: must be >= 1, got {self.n_windows}")
        self.thresholds.validate()

    @property
    def entry_distribution(self) -> EntryDistribution:
        return EntryDistribution(self.distribution)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError(f"config: expected a JSON object, got {type(data).__name__}")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown config key (known keys: {sorted(known)})")
        kwargs: dict = {}
        for name, value in data.items():
            if name == "windows":
                if value is None:
                    kwargs[name] = None
                    continue
                if not isinstance(value, list):
                    raise ConfigError(f"windows: expected a list of objects, got {value!r}")
                parsed = []
                for i, w in enumerate(value):
                    if not isinstance(w, dict) or set(w) != {"energy", "eta"}:
                        raise ConfigError(
                            f"windows[{i}]: expected an object with keys energy, eta, got {w!r}"
                        )
                    try:
                        parsed.append(Window(float(w["energy"]), float(w["eta"])))
                    except ValueError as exc:
                        raise ConfigError(f"windows[{i}]: {exc}") from exc
                kwargs[name] = tuple(parsed)
            elif name == "thresholds":
                if not isinstance(value, dict):
                    raise ConfigError(f"thresholds: expected an object, got {value!r}")
                tnames = {f.name for f in fields(Thresholds)}
                bad = sorted(set(value) - tnames)
                if bad:
                    raise ConfigError(f"thresholds.{bad[0]}: unknown key")
                kwargs[name] = Thresholds(**value)
            elif name in ("sizes", "epsilon_grid", "k_grid", "l_grid"):
                if not isinstance(value, (list, tuple)):
                    raise ConfigError(f"{name}: expected a list, got {value!r}")
                kwargs[name] = tuple(int(v) if name in ("sizes", "l_grid") else float(v) for v in value)
            elif name in ("trials", "seed", "n_windows"):
                kwargs[name] = int(value)
            elif name in ("b", "kappa", "scale_min"):
                kwargs[name] = float(value)
            else:
                kwargs[name] = value
        return cls(**kwargs)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["windows"] = (
            None
            if self.windows is None
            else [{"energy": w.energy, "eta": w.eta} for w in self.windows]
        )
        out["sizes"] = list(self.sizes)
        out["epsilon_grid"] = list(self.epsilon_grid)
        out["k_grid"] = list(self.k_grid)
        out["l_grid"] = list(self.l_grid)
        return out


@dataclass(frozen=True)
class TheoremReport:
    """One experiment's sweep rows, summary, and pass/fail verdict."""

    theorem: str
    config: dict
    columns: tuple[str, ...]
    rows: tuple[dict, ...]
    summary: dict
    passed: bool
    failures: tuple[str, ...]


def _ensemble_for(cfg: ExperimentConfig, size: int) -> EnsembleSpec:
    # one sub-master per size so streams never overlap across sizes
    return EnsembleSpec(
        size=size,
        distribution=cfg.entry_distribution,
        master_seed=derive_trial_seed(cfg.seed, size),
    )


def _map_trials(fn, trials: int, threads: int) -> list:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(trials)))
    return [fn(t) for t in range(trials)]


def derived_windows(cfg: ExperimentConfig, size: int) -> tuple[Window, ...]:
    """Geometric energy ladder from the desk-scale hard-edge floor to 4 - kappa,
    each window at the exact resolution scale scale_min."""
    lo = 2.0 * (cfg.scale_min / (cfg.kappa * size)) ** 2
    hi = 4.0 - cfg.kappa
    if lo >= hi:
        raise ConfigError(
            f"sizes: N={size} cannot host windows at scale_min={cfg.scale_min} "
            f"with kappa={cfg.kappa} (floor {lo:.3g} >= ceiling {hi:.3g})"
        )
    if cfg.n_windows == 1:
        energies = [hi / 2.0]
    else:
        ratio = (hi / lo) ** (1.0 / (cfg.n_windows - 1))
        energies = [lo * ratio**j for j in range(cfg.n_windows)]
    return tuple(Window(e, cfg.scale_min * math.sqrt(e) / size) for e in energies)


def _windows_for(cfg: ExperimentConfig, size: int, enforce_scale: bool) -> tuple[Window, ...]:
    if cfg.windows is None:
        return derived_windows(cfg, size)
    if enforce_scale:
        for i, w in enumerate(cfg.windows):
            scale = size * w.eta / math.sqrt(w.energy) if w.energy > 0 else math.inf
            if scale < cfg.scale_min * (1.0 - 1e-9):
                raise ConfigError(
                    f"windows[{i}]: scale N*eta/sqrt(E) = {scale:.3g} at N={size} "
                    f"is below scale_min={cfg.scale_min}"
                )
    return cfg.windows


def _require_bounded_density(cfg: ExperimentConfig, theorem: str) -> None:
    if not cfg.entry_distribution.density_bounded:
        raise ConfigError(
            f"distribution: {cfg.distribution!r} has an atomic part density and is "
            f"excluded from the {theorem} experiment"
        )


def _pfx(size: int, w: Window) -> str:
    return f"N={size}, window E={w.energy:.6g}, eta={w.eta:.6g}"


def run_apriori(cfg: ExperimentConfig, threads: int = 1) -> TheoremReport:
    """Tail of the window eigenvalue count against thresholds K * N*eta/sqrt(E)."""
    per_size: dict[int, tuple[tuple[Window, ...], list[list[int]]]] = {}
    for size in cfg.sizes:
        windows = _windows_for(cfg, size, enforce_scale=True)
        spec = _ensemble_for(cfg, size)

        def one_trial(t: int, spec=spec, windows=windows) -> list[int]:
            eigs = eigenvalues_only(sample_matrix(spec, t))
            return [eigenvalue_count(eigs, w) for w in windows]

        per_size[size] = (windows, _map_trials(one_trial, cfg.trials, threads))

    rows = []
    failures = []
    reference_cells = []
    for size in cfg.sizes:
        windows, counts = per_size[size]
        counts_arr = np.asarray(counts)
        for j, w in enumerate(windows):
            scale = size * w.eta / math.sqrt(w.energy)
            previous = None
            for k in cfg.k_grid:
                threshold = k * scale
                hits = int(np.sum(counts_arr[:, j] >= threshold))
                p = hits / cfg.trials
                lo, hi = wilson_interval(hits, cfg.trials)
                rows.append(
                    {
                        "size": size,
                        "energy": w.energy,
                        "eta": w.eta,
                        "scale": scale,
                        "K": k,
                        "threshold": threshold,
                        "statistic": p,
                        "ci_lo": lo,
                        "ci_hi": hi,
                        "trials": cfg.trials,
                    }
                )
                if previous is not None and p > previous:
                    failures.append(f"{_pfx(size, w)}: exceedance not nonincreasing in K")
                previous = p
                if k >= cfg.thresholds.apriori_reference_k:
                    reference_cells.append(p)
                    if p > cfg.thresholds.apriori_tail:
                        failures.append(
                            f"{_pfx(size, w)}: exceedance {p:.4g} at K={k} above "
                            f"{cfg.thresholds.apriori_tail}"
                        )
    summary = {
        "reference_k": cfg.thresholds.apriori_reference_k,
        "max_reference_exceedance": max(reference_cells) if reference_cells else None,
        "cells": len(rows),
    }
    return TheoremReport(
        theorem="apriori-counting",
        config=cfg.to_dict(),
        columns=(
            "size", "energy", "eta", "scale", "K", "threshold",
            "statistic", "ci_lo", "ci_hi", "trials",
        ),
        rows=tuple(rows),
        summary=summary,
        passed=not failures,
        failures=tuple(failures),
    )


def run_local_law(cfg: ExperimentConfig, threads: int = 1) -> TheoremReport:
    """Deviation tails of the empirical transform and of the window counting form."""
    _require_bounded_density(cfg, "local-law")
    eps_grid = tuple(sorted(set(cfg.epsilon_grid) | {cfg.thresholds.locallaw_epsilon}))

    per_size: dict[int, tuple[tuple[Window, ...], np.ndarray, np.ndarray]] = {}
    for size in cfg.sizes:
        windows = _windows_for(cfg, size, enforce_scale=False)
        spec = _ensemble_for(cfg, size)
        limits = [mp_stieltjes(w.point) for w in windows]
        masses = [mp_window_mass(w) for w in windows]

        def one_trial(t: int, spec=spec, windows=windows, limits=limits, masses=masses):
            eigs = eigenvalues_only(sample_matrix(spec, t))
            size_n = spec.size
            transform = []
            counting = []
            for w, limit, mass in zip(windows, limits, masses):
                sqrt_e = math.sqrt(w.energy)
                delta_n = empirical_stieltjes(eigs, w.point)
                transform.append(sqrt_e * abs(delta_n - limit))
                count = eigenvalue_count(eigs, w)
                counting.append(sqrt_e * abs(count / (size_n * w.eta) - mass / w.eta))
            return transform, counting

        results = _map_trials(one_trial, cfg.trials, threads)
        per_size[size] = (
            windows,
            np.asarray([r[0] for r in results]),
            np.asarray([r[1] for r in results]),
        )

    rows = []
    failures = []
    eps_star = cfg.thresholds.locallaw_epsilon
    reference: dict[tuple[str, float, float, int], tuple[int, float]] = {}
    for size in cfg.sizes:
        windows, transform_devs, counting_devs = per_size[size]
        for j, w in enumerate(windows):
            scale = size * w.eta / math.sqrt(w.energy)
            for form, devs in (("transform", transform_devs), ("count", counting_devs)):
                for eps in eps_grid:
                    hits = int(np.sum(devs[:, j] >= eps))
                    p = hits / cfg.trials
                    lo, hi = wilson_interval(hits, cfg.trials)
                    nominal = math.exp(-eps * math.sqrt(scale)) + math.exp(
                        -math.log(size) ** (cfg.b / 4.0)
                    )
                    rows.append(
                        {
                            "size": size,
                            "energy": w.energy,
                            "eta": w.eta,
                            "scale": scale,
                            "form": form,
                            "epsilon": eps,
                            "nominal_tail": nominal,
                            "statistic": p,
                            "ci_lo": lo,
                            "ci_hi": hi,
                            "trials": cfg.trials,
                        }
                    )
                    if eps == eps_star:
                        reference[(form, w.energy, w.eta, size)] = (hits, p)
                        if form == "transform" and size == max(cfg.sizes) and p > cfg.thresholds.locallaw_exceedance:
                            failures.append(
                                f"{_pfx(size, w)}: transform exceedance {p:.4g} at "
                                f"epsilon={eps_star} above {cfg.thresholds.locallaw_exceedance}"
                            )

    if len(cfg.sizes) > 1 and cfg.windows is not None:
        # explicit windows are shared across sizes, so the size trend is testable
        small, large = min(cfg.sizes), max(cfg.sizes)
        for w in cfg.windows:
            hits_small, p_small = reference[("transform", w.energy, w.eta, small)]
            _, p_large = reference[("transform", w.energy, w.eta, large)]
            ci_hi_small = wilson_interval(hits_small, cfg.trials)[1]
            if p_large > ci_hi_small:
                failures.append(
                    f"window E={w.energy:.6g}: exceedance grew from N={small} "
                    f"({p_small:.4g}) to N={large} ({p_large:.4g}) beyond interval slack"
                )

    summary = {
        "epsilon_reference": eps_star,
        "max_transform_exceedance_at_reference": max(
            (v[1] for (form, _, _, _), v in reference.items() if form == "transform"),
            default=None,
        ),
    }
    return TheoremReport(
        theorem="local-law",
        config=cfg.to_dict(),
        columns=(
            "size", "energy", "eta", "scale", "form", "epsilon", "nominal_tail",
            "statistic", "ci_lo", "ci_hi", "trials",
        ),
        rows=tuple(rows),
        summary=summary,
        passed=not failures,
        failures=tuple(failures),
    )


def run_delocalization(cfg: ExperimentConfig, threads: int = 1) -> TheoremReport:
    """Sup-norm statistics of eigenvectors with eigenvalues away from the edges."""
    _require_bounded_density(cfg, "delocalization")
    rows = []
    failures = []
    medians_over_ln = {}
    for size in cfg.sizes:
        lower = 2.0 * (cfg.scale_min / (cfg.kappa * size)) ** 2
        upper = 4.0 - cfg.kappa
        if lower >= upper:
            raise ConfigError(
                f"sizes: N={size} leaves no eigenvalue window (floor {lower:.3g} >= {upper:.3g})"
            )
        spec = _ensemble_for(cfg, size)

        def one_trial(t: int, spec=spec, lower=lower, upper=upper) -> float:
            d = decompose(sample_matrix(spec, t))
            mask = (d.eigenvalues >= lower) & (d.eigenvalues <= upper)
            if not np.any(mask):
                return math.nan
            return float(spec.size * np.max(np.abs(d.eigenvectors[:, mask]) ** 2))

        stats = np.asarray(_map_trials(one_trial, cfg.trials, threads))
        if np.any(np.isnan(stats)):
            failures.append(f"N={size}: some trials had no eigenvalues in the window")
            stats = stats[~np.isnan(stats)]
        ln_n = math.log(size)
        ratio = stats / ln_n
        hits = int(np.sum(ratio > cfg.thresholds.deloc_cap))
        p = hits / cfg.trials
        lo, hi = wilson_interval(hits, cfg.trials)
        median = float(np.median(stats))
        medians_over_ln[size] = median / ln_n
        rows.append(
            {
                "size": size,
                "lower_edge": lower,
                "upper_edge": upper,
                "nominal_edge_b": math.log(size) ** cfg.b / (cfg.kappa**2 * size**2),
                "nominal_edge_2b": math.log(size) ** (2 * cfg.b) / (cfg.kappa**2 * size**2),
                "cap": cfg.thresholds.deloc_cap,
                "median_max_supsq": median,
                "median_over_ln": median / ln_n,
                "q95_over_ln": float(np.quantile(ratio, 0.95)),
                "max_over_ln": float(np.max(ratio)),
                "statistic": p,
                "ci_lo": lo,
                "ci_hi": hi,
                "trials": cfg.trials,
            }
        )
        if p > cfg.thresholds.deloc_exceed_frac:
            failures.append(
                f"N={size}: {p:.4g} of trials above cap {cfg.thresholds.deloc_cap} "
                f"(allowed {cfg.thresholds.deloc_exceed_frac})"
            )
    if len(medians_over_ln) > 1:
        ratios = list(medians_over_ln.values())
        spread = max(ratios) / min(ratios)
        if spread > cfg.thresholds.deloc_ratio_band:
            failures.append(
                f"median(max N*||u||_inf^2)/ln N spread {spread:.3g} across sizes exceeds "
                f"band {cfg.thresholds.deloc_ratio_band}"
            )
    summary = {"medians_over_ln": {str(k): v for k, v in medians_over_ln.items()}}
    return TheoremReport(
        theorem="delocalization",
        config=cfg.to_dict(),
        columns=(
            "size", "lower_edge", "upper_edge", "nominal_edge_b", "nominal_edge_2b",
            "cap", "median_max_supsq", "median_over_ln", "q95_over_ln", "max_over_ln",
            "statistic", "ci_lo", "ci_hi", "trials",
        ),
        rows=tuple(rows),
        summary=summary,
        passed=not failures,
        failures=tuple(failures),
    )


def run_wegner(cfg: ExperimentConfig, threads: int = 1) -> TheoremReport:
    """Tails of the near-zero eigenvalue count in [0, K/N^2] over the L grid.

    Hard-edge repulsion makes levels beyond the first one or two unobservable
    at desk trial counts (P ~ 1e-6 or less); zero-hit cells are therefore
    upper-bounded by 1/trials and the decay check requires strict decrease
    only where the data can show it.
    """
    _require_bounded_density(cfg, "near-zero counting")
    rows = []
    failures = []
    slopes = {}
    for size in cfg.sizes:
        spec = _ensemble_for(cfg, size)
        windows = [Window(0.0, k / size**2) for k in cfg.k_grid]

        def one_trial(t: int, spec=spec, windows=windows) -> list[int]:
            eigs = eigenvalues_only(sample_matrix(spec, t))
            return [eigenvalue_count(eigs, w) for w in windows]

        counts = np.asarray(_map_trials(one_trial, cfg.trials, threads))
        for j, k in enumerate(cfg.k_grid):
            levels = list(cfg.l_grid)
            hit_list = []
            for level in levels:
                hits = int(np.sum(counts[:, j] >= level))
                hit_list.append(hits)
                lo, hi = wilson_interval(hits, cfg.trials)
                rows.append(
                    {
                        "size": size,
                        "K": k,
                        "L": level,
                        "statistic": hits / cfg.trials,
                        "ci_lo": lo,
                        "ci_hi": hi,
                        "trials": cfg.trials,
                    }
                )
            cell = f"N={size}, K={k:.6g}"
            if hit_list[0] == 0:
                failures.append(f"{cell}: first level L={levels[0]} already has zero hits")
            pairs = list(zip(levels, hit_list))
            for (l1, h1), (l2, h2) in zip(pairs, pairs[1:]):
                if h2 > h1:
                    failures.append(f"{cell}: exceedance rose from L={l1} to L={l2}")
                if 0 < h1 == h2:
                    failures.append(f"{cell}: no strict decay from L={l1} to L={l2}")
            positive = [(l, h) for l, h in pairs if h > 0]
            if positive and positive[-1][1] < 2 and len(positive) < len(levels):
                failures.append(
                    f"{cell}: last resolvable level L={positive[-1][0]} has a single hit; "
                    "zero cells cannot be placed above it"
                )
            if len(positive) >= 2:
                ls = np.array([l for l, _ in positive], dtype=float)
                lp = np.array([-math.log(h / cfg.trials) for _, h in positive])
                slopes[cell] = float(np.polyfit(ls, lp, 1)[0])
                if slopes[cell] <= 0:
                    failures.append(f"{cell}: -log P slope {slopes[cell]:.3g} not positive")
    summary = {"decay_slopes": slopes}
    return TheoremReport(
        theorem="near-zero-counting",
        config=cfg.to_dict(),
        columns=("size", "K", "L", "statistic", "ci_lo", "ci_hi", "trials"),
        rows=tuple(rows),
        summary=summary,
        passed=not failures,
        failures=tuple(failures),
    )


def run_hard_edge_scaling(cfg: ExperimentConfig, threads: int = 1) -> TheoremReport:
    """N^2 scaling of the smallest eigenvalue and the 1/(N rho) bulk spacing near E=2."""
    rho2 = mp_density(2.0)
    rows = []
    failures = []
    medians = {}
    for size in cfg.sizes:
        spec = _ensemble_for(cfg, size)

        def one_trial(t: int, spec=spec) -> tuple[float, float]:
            eigs = eigenvalues_only(sample_matrix(spec, t))
            scaled_min = float(eigs[0]) * spec.size**2
            center = int(np.argmin(np.abs(eigs - 2.0)))
            lo = max(0, center - 5)
            hi = min(len(eigs), center + 6)
            gaps = np.diff(eigs[lo:hi])
            spacing = float(np.mean(gaps)) * spec.size * rho2
            return scaled_min, spacing

        results = _map_trials(one_trial, cfg.trials, threads)
        scaled = np.asarray([r[0] for r in results])
        spacing = np.asarray([r[1] for r in results])
        if np.any(scaled <= 0):
            failures.append(f"N={size}: nonpositive smallest eigenvalue observed")
        median = float(np.median(scaled))
        medians[size] = median
        spacing_median = float(np.median(spacing))
        rows.append(
            {
                "size": size,
                "spacing_median": spacing_median,
                "statistic": median,
                "ci_lo": float(np.quantile(scaled, 0.25)),
                "ci_hi": float(np.quantile(scaled, 0.75)),
                "trials": cfg.trials,
            }
        )
        if not (cfg.thresholds.spacing_lo < spacing_median < cfg.thresholds.spacing_hi):
            failures.append(
                f"N={size}: central spacing ratio {spacing_median:.4g} outside "
                f"({cfg.thresholds.spacing_lo}, {cfg.thresholds.spacing_hi})"
            )
    if len(medians) > 1:
        spread = max(medians.values()) / min(medians.values())
        if spread > cfg.thresholds.hardedge_median_factor:
            failures.append(
                f"N^2*s_1 medians spread by factor {spread:.3g} > "
                f"{cfg.thresholds.hardedge_median_factor} across sizes"
            )
    summary = {"medians": {str(k): v for k, v in medians.items()}}
    return TheoremReport(
        theorem="hard-edge-scaling",
        config=cfg.to_dict(),
        columns=("size", "spacing_median", "statistic", "ci_lo", "ci_hi", "trials"),
        rows=tuple(rows),
        summary=summary,
        passed=not failures,
        failures=tuple(failures),
    )


_IDENTITY_THETA_GRID = (
    (0.04, 0.02), (0.2, 0.1), (0.5, 0.05), (0.5, 0.5), (1.0, 0.2),
    (2.0, 0.1), (2.0, 1.0), (3.0, 0.3), (3.9, 0.1), (5.0, 0.7),
)
_IDENTITY_WINDOWS = (
    Window(0.0, 0.05), Window(0.5, 0.2), Window(2.0, 0.1), Window(3.5, 0.3),
)


def run_identity_suite(
    sizes: tuple[int, ...] = (16, 32),
    trials: int = 20,
    seed: int = 1,
    distribution: str = "complex-gaussian",
    threads: int = 1,
) -> TheoremReport:
    """Exact finite-N identities: leave-one-out diagonals vs dense inversion,
    eigenvector identity, interlacing, counting inequality, trace identity."""
    if trials < 1:
        raise ConfigError(f"trials: must be >= 1, got {trials}")
    dist = EntryDistribution(distribution)
    points = [SpectralPoint(e, h) for e, h in _IDENTITY_THETA_GRID]
    rows = []
    failures = []
    for size in sizes:
        spec = EnsembleSpec(size=size, distribution=dist, master_seed=derive_trial_seed(seed, size))

        def one_trial(t: int, spec=spec):
            sample = sample_matrix(spec, t)
            d = decompose(sample)
            n = spec.size
            gram = sample.entries.conj().T @ sample.entries
            loo_dev = 0.0
            schur_dev = 0.0
            mean_dev = 0.0
            for p in points:
                dense = np.linalg.inv(gram - p.theta * np.eye(n))
                loo = np.array(
                    [resolvent_diag_leave_one_out(sample, k, p) for k in range(n)]
                )
                schur = np.array(
                    [resolvent_diag_schur(sample, k, p) for k in range(n)]
                )
                loo_dev = max(loo_dev, float(np.max(np.abs(loo - np.diag(dense)))))
                schur_dev = max(schur_dev, float(np.max(np.abs(schur - np.diag(dense)))))
                mean_dev = max(
                    mean_dev, abs(np.mean(loo) - empirical_stieltjes(d, p))
                )
            inter = max(interlacing_check(d, k) for k in range(n))
            resid = 0.0
            covered = 0
            total = 0
            for k in range(n):
                for r in eigenvector_identity_scan(sample, k, decomposition=d):
                    total += 1
                    if r.covered:
                        covered += 1
                        resid = max(resid, r.residual)
            count_ok = all(
                eigenvalue_count(d.eigenvalues, w) <= counting_bound(d.eigenvalues, w)
                for w in _IDENTITY_WINDOWS
            )
            trace_dev = abs(
                math.fsum(d.eigenvalues) - float(np.sum(np.abs(sample.entries) ** 2))
            )
            return loo_dev, schur_dev, mean_dev, inter, resid, covered / total, count_ok, trace_dev

        results = _map_trials(one_trial, trials, threads)
        checks = (
            ("leave_one_out_vs_dense", max(r[0] for r in results), 1e-9),
            ("schur_vs_dense", max(r[1] for r in results), 1e-9),
            ("mean_diag_vs_transform", max(r[2] for r in results), 1e-9),
            ("interlacing_violation", max(r[3] for r in results), 1e-10),
            ("eigenvector_identity_residual", max(r[4] for r in results), 1e-8),
            ("coverage_fraction", min(r[5] for r in results), 0.95),
            ("counting_inequality_ok", float(all(r[6] for r in results)), 1.0),
            ("trace_identity", max(r[7] for r in results), 1e-10 * size),
        )
        for name, value, tol in checks:
            if name in ("coverage_fraction", "counting_inequality_ok"):
                ok = value >= tol
            else:
                ok = value <= tol
            rows.append(
                {
                    "size": size,
                    "check": name,
                    "tolerance": tol,
                    "statistic": value,
                    "ci_lo": value,
                    "ci_hi": value,
                    "trials": trials,
                }
            )
            if not ok:
                failures.append(f"N={size}: {name} = {value:.4g} vs tolerance {tol:.4g}")
    return TheoremReport(
        theorem="exact-identities",
        config={
            "sizes": list(sizes),
            "trials": trials,
            "seed": seed,
            "distribution": distribution,
            "theta_grid": [list(p) for p in _IDENTITY_THETA_GRID],
        },
        columns=("size", "check", "tolerance", "statistic", "ci_lo", "ci_hi", "trials"),
        rows=tuple(rows),
        summary={"checks_per_size": 8},
        passed=not failures,
        failures=tuple(failures),
    )


_HW_DELTAS = (1.0, 2.0, 4.0, 8.0, 12.0, 16.0, 20.0, 24.0)


def run_hw_experiment(
    distribution: str = "complex-gaussian",
    trials: int = 10_000,
    seed: int = 1,
    size: int = 64,
    deltas: tuple[float, ...] = _HW_DELTAS,
    spectrum=None,
) -> TheoremReport:
    """Quadratic-form tail shape on the identity (or a given spectrum)."""
    dist = EntryDistribution(distribution)
    operator = np.ones(size) if spectrum is None else np.asarray(spectrum, dtype=float)
    curve = hw_tail_curve(operator, dist, trials, deltas, seed)
    rows = []
    failures = []
    previous = None
    for i, delta in enumerate(curve.deltas):
        p = float(curve.exceedance[i])
        rows.append(
            {
                "delta": float(delta),
                "shape": float(
                    min(delta / math.sqrt(curve.normalizer), delta**2 / curve.normalizer)
                ),
                "statistic": p,
                "ci_lo": float(curve.ci_lo[i]),
                "ci_hi": float(curve.ci_hi[i]),
                "trials": trials,
            }
        )
        if previous is not None and p > previous:
            failures.append(f"delta={delta:g}: exceedance rose along the grid")
        previous = p
    if not (math.isfinite(curve.slope) and curve.slope > 0):
        failures.append(f"fitted decay rate {curve.slope} not positive")
    return TheoremReport(
        theorem="quadratic-form-tail",
        config={
            "distribution": distribution,
            "trials": trials,
            "seed": seed,
            "size": size,
            "deltas": [float(d) for d in deltas],
            "spectrum": None if spectrum is None else [float(x) for x in operator],
        },
        columns=("delta", "shape", "statistic", "ci_lo", "ci_hi", "trials"),
        rows=tuple(rows),
        summary={"slope": curve.slope, "normalizer": curve.normalizer},
        passed=not failures,
        failures=tuple(failures),
    )


_MASS_M_GRID = (4, 9, 16, 25)


def run_projection_mass_experiment(
    distribution: str = "complex-gaussian",
    trials: int = 40_000,
    seed: int = 1,
    size: int = 64,
    m_grid: tuple[int, ...] = _MASS_M_GRID,
    family: str = "auto",
) -> TheoremReport:
    """Superlinear-in-sqrt(m) decay of -log P(projection mass <= m/2).

    The m grid must stay where the direct estimator resolves: the complex-
    gaussian probability is already 4e-7 at m=64, far beyond desk trial
    counts, so the default stops at m=25.
    """
    dist = EntryDistribution(distribution)
    rows = []
    failures = []
    ratios = []
    for m in m_grid:
        probe = projection_mass_probe(m, size, dist, trials, derive_trial_seed(seed, m), family)
        rows.append(
            {
                "m": m,
                "sqrt_m": math.sqrt(m),
                "family": probe.family,
                "statistic": probe.probability,
                "ci_lo": probe.ci_lo,
                "ci_hi": probe.ci_hi,
                "trials": trials,
            }
        )
        if probe.probability <= 0.0:
            failures.append(
                f"m={m}: zero hits at {trials} trials; grid beyond the estimator's resolution"
            )
            ratios.append(math.inf)
        else:
            ratios.append(-math.log(probe.probability) / math.sqrt(m))
    for (m1, r1), (m2, r2) in zip(zip(m_grid, ratios), list(zip(m_grid, ratios))[1:]):
        if not r2 > r1:
            failures.append(
                f"-log P / sqrt(m) did not increase from m={m1} ({r1:.4g}) to m={m2} ({r2:.4g})"
            )
    return TheoremReport(
        theorem="projection-mass-tail",
        config={
            "distribution": distribution,
            "trials": trials,
            "seed": seed,
            "size": size,
            "m_grid": [int(m) for m in m_grid],
            "family": family,
        },
        columns=("m", "sqrt_m", "family", "statistic", "ci_lo", "ci_hi", "trials"),
        rows=tuple(rows),
        summary={"ratios": ratios},
        passed=not failures,
        failures=tuple(failures),
    )
