"""Spectral decompositions of X*X and the exact finite-N facts about them.

Eigenvalues are always obtained through the SVD of X itself and squared, so
the hard-edge values (of order 1/N^2) keep full relative precision; an
eigensolver applied to the Gram matrix would see them through an absolute
error of order machine epsilon times ||X*X||.

Ascending order everywhere.  Eigenvectors of X*X are the right singular
vectors of X.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import MatrixSample, remove_column, unscaled_column
from .mp import Window

__all__ = [
    "DecompositionError",
    "SpectralDecomposition",
    "CountResult",
    "IdentityResidual",
    "decompose",
    "eigenvalues_only",
    "minor_eigenvalues",
    "eigenvalue_count",
    "count_in_window",
    "counting_bound",
    "interlacing_check",
    "eigenvector_identity_residual",
    "eigenvector_identity_scan",
    "near_zero_count",
]

DEFAULT_GAP_TOL = 1e-6


class DecompositionError(RuntimeError):
    """SVD non-convergence, tagged with the trial that produced it."""

    def __init__(self, sample: MatrixSample, original: Exception):
        spec = sample.spec
        super().__init__(
            f"SVD failed for size={spec.size}, kind={spec.distribution.kind}, "
            f"seed={spec.master_seed}, trial={sample.trial_index}: {original}"
        )
        self.sample = sample


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and eigenvectors (columns) of X*X."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: MatrixSample

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    @property
    def top(self) -> float:
        return float(self.eigenvalues[-1])

    def validate(self) -> dict[str, float]:
        """Measure orthonormality, reconstruction, and trace deviations.

        Raises if any exceeds its contract: orthonormality 1e-10,
        reconstruction 1e-9 * (1 + s_max), trace 1e-10 * N.
        """
        v = self.eigenvectors
        n = self.size
        gram_dev = float(np.max(np.abs(v.conj().T @ v - np.eye(n))))
        x = self.source.entries
        lhs = x.conj().T @ (x @ v)
        recon_dev = float(
            np.max(np.linalg.norm(lhs - v * self.eigenvalues[None, :], axis=0))
        )
        trace_dev = abs(math.fsum(self.eigenvalues) - float(np.sum(np.abs(x) ** 2)))
        margins = {
            "orthonormality": gram_dev,
            "reconstruction": recon_dev,
            "trace": trace_dev,
        }
        if gram_dev > 1e-10:
            raise ArithmeticError(f"orthonormality deviation {gram_dev:.3e} > 1e-10")
        if recon_dev > 1e-9 * (1.0 + self.top):
            raise ArithmeticError(f"reconstruction deviation {recon_dev:.3e}")
        if trace_dev > 1e-10 * n:
            raise ArithmeticError(f"trace deviation {trace_dev:.3e} > 1e-10 * N")
        return margins


@dataclass(frozen=True)
class CountResult:
    window: Window
    count: int


@dataclass(frozen=True)
class IdentityResidual:
    """Residual of the minor-spectrum identity for one (alpha, k), with the
    coverage flag that gates it on a nondegenerate gap."""

    alpha: int
    column: int
    residual: float
    covered: bool
    min_gap: float


def decompose(sample: MatrixSample) -> SpectralDecomposition:
    """Full decomposition of X*X via the SVD of X (eigenvalues ascending)."""
    try:
        _, sing, vh = np.linalg.svd(sample.entries)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(sample, exc) from exc
    eigenvalues = (sing[::-1] ** 2).copy()
    eigenvectors = vh[::-1].conj().T.copy()
    return SpectralDecomposition(
        eigenvalues=eigenvalues, eigenvectors=eigenvectors, source=sample
    )


def eigenvalues_only(sample: MatrixSample) -> np.ndarray:
    """Ascending eigenvalues of X*X without vectors (sigma-only SVD)."""
    try:
        sing = np.linalg.svd(sample.entries, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(sample, exc) from exc
    return (sing[::-1] ** 2).copy()


def minor_eigenvalues(sample: MatrixSample, k: int) -> np.ndarray:
    """Ascending eigenvalues of the Gram matrix of X with column k removed."""
    minor = remove_column(sample, k)
    try:
        sing = np.linalg.svd(minor, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(sample, exc) from exc
    return (sing[::-1] ** 2).copy()


def eigenvalue_count(eigenvalues: np.ndarray, window: Window) -> int:
    """Inclusive count of eigenvalues in [E, E+eta] (array assumed ascending)."""
    left = int(np.searchsorted(eigenvalues, window.energy, side="left"))
    right = int(np.searchsorted(eigenvalues, window.right, side="right"))
    return right - left

def count_in_window(decomposition: SpectralDecomposition, window: Window) -> CountResult:
    return CountResult(window=window, count=eigenvalue_count(decomposition.eigenvalues, window))


def counting_bound(eigenvalues: np.ndarray, window: Window) -> float:
    """Deterministic cap 2 * eta * Im Tr (X*X - (E + i eta))^(-1) on the window count.

    On [E, E+eta] each Lorentzian weight eta^2/((s-E)^2 + eta^2) is >= 1/2,
    which is where the factor 2 comes from.
    """
    theta = complex(window.energy, window.eta)
    im_trace = math.fsum(((s - theta) ** -1).imag for s in eigenvalues)
    return 2.0 * window.eta * im_trace


def interlacing_check(decomposition: SpectralDecomposition, k: int) -> float:
    """Largest violation of s_a <= t_a <= s_(a+1) between X*X and its k-minor.

    Exact zero in exact arithmetic; anything above rounding noise indicates
    a broken decomposition.
    """
    s = decomposition.eigenvalues
    t = minor_eigenvalues(decomposition.source, k)
    below = float(np.max(s[:-1] - t)) if len(t) else 0.0
    above = float(np.max(t - s[1:])) if len(t) else 0.0
    return max(below, above, 0.0)


def _minor_left_basis(sample: MatrixSample, k: int):
    """Thin SVD pieces of the k-minor: ascending eigenvalues and the matching
    left singular vectors (columns, in C^N)."""
    minor = remove_column(sample, k)
    try:
        u, sing, _ = np.linalg.svd(minor, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(sample, exc) from exc
    order = np.argsort(sing**2, kind="stable")
    return (sing**2)[order], u[:, order]


def eigenvector_identity_scan(
    sample: MatrixSample,
    k: int,
    gap_tol: float = DEFAULT_GAP_TOL,
    decomposition: SpectralDecomposition | None = None,
) -> list[IdentityResidual]:
    """Identity residuals for every eigenvector at one removed column.

    |u_a(k)|^2 must equal 1/(1 + (1/N) sum_b t_b |<v_b, x_k>|^2 / (s_a - t_b)^2)
    where (t_b, v_b) is the left spectral data of the k-minor and x_k the
    unscaled removed column.  Pairs whose full/minor gap falls below
    gap_tol * (1 + s_max) are reported uncovered and carry no accuracy claim.
    """
    d = decomposition if decomposition is not None else decompose(sample)
    n = sample.size
    t, basis = _minor_left_basis(sample, k)
    weights = t * np.abs(basis.conj().T @ unscaled_column(sample, k)) ** 2
    cutoff = gap_tol * (1.0 + d.top)
    out = []
    for alpha in range(n):
        gaps = d.eigenvalues[alpha] - t
        min_gap = float(np.min(np.abs(gaps))) if len(t) else math.inf
        covered = min_gap >= cutoff
        if covered and len(t):
            rhs = 1.0 / (1.0 + math.fsum(weights / gaps**2) / n)
        elif len(t) == 0:
            rhs = 1.0
        else:
            rhs = math.nan
        lhs = float(np.abs(d.eigenvectors[k, alpha]) ** 2)
        residual = abs(lhs - rhs) if covered or len(t) == 0 else math.inf
        out.append(
            IdentityResidual(
                alpha=alpha, column=k, residual=residual, covered=covered, min_gap=min_gap
            )
        )
    return out


def eigenvector_identity_residual(
    sample: MatrixSample,
    alpha: int,
    k: int,
    gap_tol: float = DEFAULT_GAP_TOL,
    decomposition: SpectralDecomposition | None = None,
) -> IdentityResidual:
    if not 0 <= alpha < sample.size:
        raise IndexError(f"eigenvalue index {alpha} out of range for size {sample.size}")
    return eigenvector_identity_scan(sample, k, gap_tol, decomposition)[alpha]


def near_zero_count(decomposition: SpectralDecomposition, K: float) -> CountResult:
    """Count in the hard-edge window [0, K/N^2]."""
    if K <= 0:
        raise ValueError(f"K must be positive, got {K}")
    n = decomposition.size
    return count_in_window(decomposition, Window(0.0, K / n**2))
