"""Evaluation metrics: BER, expected MSE, array factors, flop counts and
condition-number sweeps.

Flop accounting model (real-flop counts, documented in the README):

* one complex multiply-accumulate = 8 real flops;
* sample covariance of dimension n over k snapshots = ``8 n^2 k``;
* sample cross-covariance = ``8 n k``;
* n x n Hermitian solve = ``(8/3) n^3 + 8 n^2``.

Counts cover filter *design* (statistics formation plus solves); applying
a designed filter to data is excluded for every method alike.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .array_model import UraGeometry
from .beamformers import SeparableBeamformer, expected_mse
from .kron_algebra import condition_number_2
from .signal_model import Scenario, SecondOrderStats, analytic_subarray_stats

__all__ = [
    "ber",
    "mse_eval",
    "ArrayFactorGrid",
    "array_factor",
    "subarray_factor",
    "FlopsModel",
    "flops",
    "condition_sweep",
]

FLOPS_METHODS = ("mmse_sample", "mmse_lemma", "tmmse", "kmmse")


def ber(decoded_bits: np.ndarray, reference_bits: np.ndarray) -> float:
    """Fraction of differing bits between two equal-shape bit arrays."""
    decoded_bits = np.asarray(decoded_bits)
    reference_bits = np.asarray(reference_bits)
    if decoded_bits.shape != reference_bits.shape:
        raise ValueError(
            f"shape mismatch: {decoded_bits.shape} vs {reference_bits.shape}"
        )
    if decoded_bits.size == 0:
        raise ValueError("empty bit arrays")
    return float(np.mean(decoded_bits != reference_bits))


def mse_eval(filt, stats: SecondOrderStats, sigma_s2: float) -> float:
    """Expected squared error of a filter under given statistics, >= 0.

    Separable filters are composed first; tiny negative values from
    rounding are clipped to zero.
    """
    w = filt.compose() if isinstance(filt, SeparableBeamformer) else np.asarray(filt)
    return max(0.0, expected_mse(w, stats, sigma_s2))


@dataclass(frozen=True)
class ArrayFactorGrid:
    """Normalized power pattern sampled on a direction-cosine grid.

    ``af[i, j]`` is the pattern at ``(p_grid[i], q_grid[j])``, scaled so the
    grid peak is exactly 1.
    """

    p_grid: np.ndarray = field(repr=False)
    q_grid: np.ndarray = field(repr=False)
    af: np.ndarray = field(repr=False)


def array_factor(filt, geometry: UraGeometry, p_grid, q_grid) -> ArrayFactorGrid:
    """Power pattern ``|w^H a(p, q)|^2`` normalized to a unit peak.

    Separable filters use the product of the two sub-array patterns, which
    equals the composed-filter pattern identically.
    """
    p_grid = np.asarray(p_grid, dtype=np.float64)
    q_grid = np.asarray(q_grid, dtype=np.float64)
    if p_grid.size == 0 or q_grid.size == 0:
        raise ValueError("grids must be non-empty")
    if np.abs(p_grid).max() > 1.0 or np.abs(q_grid).max() > 1.0:
        raise ValueError("direction cosines must lie in [-1, 1]")
    if isinstance(filt, SeparableBeamformer):
        if filt.w_h.shape[0] != geometry.n_h or filt.w_v.shape[0] != geometry.n_v:
            raise ValueError("separable filter does not match the geometry")
        af = _kernels.af_grid_separable(filt.w_h, filt.w_v, p_grid, q_grid)
    else:
        w = np.asarray(filt, dtype=np.complex128)
        if w.ndim != 1 or w.shape[0] != geometry.n:
            raise ValueError(f"filter length {w.shape} does not match geometry {geometry.n}")
        w_mat = w.reshape(geometry.n_h, geometry.n_v, order="F")
        af = _kernels.af_grid_full(w_mat, p_grid, q_grid)
    peak = af.max()
    if peak == 0.0:
        raise ValueError("zero filter has no normalizable pattern")
    return ArrayFactorGrid(p_grid=p_grid, q_grid=q_grid, af=af / peak)


def subarray_factor(w: np.ndarray, cos_grid) -> np.ndarray:
    """1-D normalized power pattern of a single-axis filter."""
    w = np.asarray(w, dtype=np.complex128)
    cos_grid = np.asarray(cos_grid, dtype=np.float64)
    g = _kernels.af_grid_separable(w, np.ones(1, dtype=np.complex128), cos_grid, np.zeros(1))[:, 0]
    peak = g.max()
    if peak == 0.0:
        raise ValueError("zero filter has no normalizable pattern")
    return g / peak


@dataclass(frozen=True)
class FlopsModel:
    """Design-cost model instance.

    ``method`` is one of ``mmse_sample``, ``mmse_lemma``, ``tmmse``,
    ``kmmse``; ``iterations`` only affects ``tmmse``.
    """

    method: str
    geometry: UraGeometry
    r: int
    k: int
    iterations: int = 1

    def __post_init__(self):
        if self.method not in FLOPS_METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {FLOPS_METHODS}")
        if self.r < 1 or self.k < 1 or self.iterations < 1:
            raise ValueError("r, k and iterations must all be >= 1")


def _solve_flops(n: int) -> float:
    return (8.0 / 3.0) * n**3 + 8.0 * n**2


def _cov_flops(n: int, k: int) -> float:
    return 8.0 * n**2 * k


def _cross_flops(n: int, k: int) -> float:
    return 8.0 * n * k


def flops(fm: FlopsModel) -> int:
    """Real-flop count of one filter design under the documented model."""
    n_h, n_v = fm.geometry.n_h, fm.geometry.n_v
    n = fm.geometry.n
    if fm.method == "mmse_sample":
        total = _cov_flops(n, fm.k) + _cross_flops(n, fm.k) + _solve_flops(n)
    elif fm.method == "mmse_lemma":
        # R x R Gram from the N x R manifold, reduced solve, final expansion.
        total = 8.0 * fm.r**2 * n + _solve_flops(fm.r) + 8.0 * n * fm.r
    elif fm.method == "tmmse":
        per_iter = (
            2.0 * 8.0 * n * fm.k  # both co-filtered reductions over the block
            + _cov_flops(n_h, fm.k)
            + _cov_flops(n_v, fm.k)
            + _cross_flops(n_h, fm.k)
            + _cross_flops(n_v, fm.k)
            + _solve_flops(n_h)
            + _solve_flops(n_v)
        )
        total = fm.iterations * per_iter
    else:  # kmmse
        total = (
            _cov_flops(n_h, fm.k)
            + _cov_flops(n_v, fm.k)
            + _cross_flops(n_h, fm.k)
            + _cross_flops(n_v, fm.k)
            + _solve_flops(n_h)
            + _solve_flops(n_v)
        )
    return int(round(total))


def condition_sweep(sc: Scenario, axis: str, rho_list) -> list[tuple[float, float]]:
    """Spectral condition number of the loaded sub-array covariance for
    each ``rho``; returns ``(rho, cond)`` pairs in input order."""
    rho_list = list(rho_list)
    if any(rho < 0 for rho in rho_list):
        raise ValueError("rho values must be >= 0")
    cov = analytic_subarray_stats(sc, axis).cov
    out = []
    eye = np.eye(cov.shape[0])
    for rho in rho_list:
        out.append((float(rho), condition_number_2(cov + rho * eye)))
    return out
