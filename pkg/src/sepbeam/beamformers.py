"""MMSE beamformer designs: full-array, alternating separable, sub-array.

Three designs share the linear-MMSE objective ``E|s_d[k] - w^H x[k]|^2``:

* ``mmse_direct`` / ``mmse_lemma`` solve the full N-dimensional problem
  (the latter through an R-dimensional inversion when the steering matrix
  is known).
* ``tmmse`` alternates two small solves, one per array axis, each obtained
  from the statistics of snapshots reduced by the other axis' filter.
* ``kmmse`` designs the two axis filters independently from the edge
  sub-arrays, with diagonal loading ``rho`` to tame the ill-conditioning
  the sub-array problems inherit, then rescales its output power.

Singular statistics raise :class:`DesignFailure`; callers (e.g. the Monte
Carlo harness) decide whether to retry, skip or record the failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .array_model import ManifoldSet, UraGeometry
from .kron_algebra import (
    SingularMatrixError,
    hermitian_solve,
    kron,
    pseudo_inverse,
    unfold,
)
from .array_model import manifold_tensor
from .signal_model import (
    Scenario,
    SecondOrderStats,
    SnapshotBlock,
    analytic_full_stats,
    as_rng,
    sample_full_stats,
)

__all__ = [
    "DesignFailure",
    "SeparableBeamformer",
    "TmmseReport",
    "expected_mse",
    "mmse_direct",
    "mmse_lemma",
    "tmmse_stats_analytic",
    "tmmse_stats_sample",
    "AnalyticStatsProvider",
    "SampleStatsProvider",
    "random_separable_init",
    "tmmse",
    "kmmse",
    "kmmse_output",
    "apply",
    "zf_separable_limit",
    "matched_separable_limit",
]

_RANK_RTOL = 1e-12


class DesignFailure(RuntimeError):
    """A beamformer design could not be completed (singular statistics,
    rank-deficient manifold, or degenerate output)."""


@dataclass(frozen=True)
class SeparableBeamformer:
    """Axis-factored filter; the equivalent full filter is
    ``kron(w_v, w_h)`` under the column-major element indexing."""

    w_h: np.ndarray = field(repr=False)
    w_v: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.w_h.ndim != 1 or self.w_v.ndim != 1:
            raise ValueError("w_h and w_v must be 1-D")

    def compose(self) -> np.ndarray:
        """Length ``n_h * n_v`` full-array filter equal to this pair."""
        return kron(self.w_v, self.w_h)


@dataclass
class TmmseReport:
    """Outcome of one alternating design run."""

    filter: SeparableBeamformer
    iterations: int
    converged: bool
    residual_history: list[float]
    mse_history: list[float]
    seed: int | None = None


def expected_mse(w: np.ndarray, stats: SecondOrderStats, sigma_s2: float) -> float:
    """Quadratic MSE of filter ``w`` under the given second-order stats."""
    w = np.asarray(w, dtype=np.complex128)
    quad = np.vdot(w, stats.cov @ w).real
    return float(sigma_s2 - 2.0 * np.vdot(w, stats.cross).real + quad)


def mmse_direct(stats: SecondOrderStats) -> np.ndarray:
    """Wiener filter ``cov^{-1} cross`` from full-array statistics."""
    try:
        return hermitian_solve(stats.cov, stats.cross)
    except SingularMatrixError as e:
        raise DesignFailure("singular covariance in direct MMSE design") from e


def mmse_lemma(sc: Scenario) -> np.ndarray:
    """Wiener filter via the R-dimensional inversion-lemma form.

    Uses the known steering matrix:
    ``w = A ((sigma_b2/sigma_s2) I + A^H A)^{-1} e_d``. Equal to
    :func:`mmse_direct` on the analytic statistics.
    """
    a = sc.manifolds.a_full
    r = sc.manifolds.r
    m = a.conj().T @ a
    m[np.diag_indices_from(m)] += sc.sigma_b2 / sc.sigma_s2
    m = 0.5 * (m + m.conj().T)
    e_d = np.zeros(r, dtype=np.complex128)
    e_d[sc.desired_index] = 1.0
    try:
        z = hermitian_solve(m, e_d)
    except SingularMatrixError as e:
        raise DesignFailure("singular reduced system in lemma MMSE design") from e
    return a @ z


def tmmse_stats_analytic(sc: Scenario, fixed: np.ndarray, axis: str) -> SecondOrderStats:
    """Exact statistics of snapshots reduced by a fixed co-filter.

    For ``axis == 'h'`` the reduced observation is ``u[k] = X[k] conj(w_v)``
    and the returned statistics are::

        cov   = T1 (R_ss (x) conj(w_v) w_v^T) T1^H + sigma_b2 ||w_v||^2 I
        cross = T1 (R_ss e_d (x) conj(w_v))

    with ``T1`` the mode-1 unfolding of the steering tensor. ``axis == 'v'``
    uses the mode-2 unfolding and a fixed horizontal filter.
    """
    if axis not in ("h", "v"):
        raise ValueError(f"axis must be 'h' or 'v', got {axis!r}")
    fixed = np.asarray(fixed, dtype=np.complex128)
    ms = sc.manifolds
    t = manifold_tensor(ms)
    unf = unfold(t, 1 if axis == "h" else 2)
    r_ss = sc.sigma_s2 * np.eye(ms.r, dtype=np.complex128)
    mid = kron(r_ss, np.outer(fixed.conj(), fixed))
    cov = unf @ mid @ unf.conj().T
    cov[np.diag_indices_from(cov)] += sc.sigma_b2 * float(np.vdot(fixed, fixed).real)
    cov = 0.5 * (cov + cov.conj().T)
    e_d = np.zeros(ms.r, dtype=np.complex128)
    e_d[sc.desired_index] = 1.0
    cross = unf @ kron(r_ss @ e_d, fixed.conj())
    return SecondOrderStats(cov=cov, cross=cross, kind="analytic")


def tmmse_stats_sample(
    blk: SnapshotBlock, fixed: np.ndarray, axis: str, desired_index: int
) -> SecondOrderStats:
    """Block-averaged statistics of snapshots reduced by a fixed co-filter."""
    if axis not in ("h", "v"):
        raise ValueError(f"axis must be 'h' or 'v', got {axis!r}")
    cube = blk.matrix_view()
    cov, cross = _kernels.cofiltered_second_order(
        cube, np.asarray(fixed, dtype=np.complex128), blk.s[desired_index], 0 if axis == "h" else 1
    )
    return SecondOrderStats(cov=cov, cross=cross, kind="sample")


class AnalyticStatsProvider:
    """Exact-statistics source for the alternating design."""

    def __init__(self, sc: Scenario):
        self.scenario = sc
        self._full: SecondOrderStats | None = None

    @property
    def geometry(self) -> UraGeometry:
        return self.scenario.geometry

    @property
    def signal_power(self) -> float:
        return self.scenario.sigma_s2

    def cofiltered(self, fixed: np.ndarray, axis: str) -> SecondOrderStats:
        return tmmse_stats_analytic(self.scenario, fixed, axis)

    def full(self) -> SecondOrderStats:
        if self._full is None:
            self._full = analytic_full_stats(self.scenario)
        return self._full


class SampleStatsProvider:
    """Block-estimate source for the alternating design.

    Caches the snapshot cube and the full-array sample statistics; the
    co-filtered statistics are re-estimated from the same block at every
    request, so the alternating objective stays a fixed quadratic.
    """

    def __init__(self, blk: SnapshotBlock, desired_index: int):
        if not 0 <= desired_index < blk.s.shape[0]:
            raise ValueError(f"desired_index {desired_index} out of range")
        self.block = blk
        self.desired_index = desired_index
        self._cube = np.ascontiguousarray(blk.matrix_view())
        self._s_d = blk.s[desired_index]
        self._full: SecondOrderStats | None = None

    @property
    def geometry(self) -> UraGeometry:
        return self.block.geometry

    @property
    def signal_power(self) -> float:
        return float(np.mean(np.abs(self._s_d) ** 2))

    def cofiltered(self, fixed: np.ndarray, axis: str) -> SecondOrderStats:
        if axis not in ("h", "v"):
            raise ValueError(f"axis must be 'h' or 'v', got {axis!r}")
        cov, cross = _kernels.cofiltered_second_order(
            self._cube, np.asarray(fixed, dtype=np.complex128), self._s_d, 0 if axis == "h" else 1
        )
        return SecondOrderStats(cov=cov, cross=cross, kind="sample")

    def full(self) -> SecondOrderStats:
        if self._full is None:
            self._full = sample_full_stats(self.block, self.desired_index)
        return self._full


def random_separable_init(geometry: UraGeometry, rng) -> SeparableBeamformer:
    """Unit-norm circularly symmetric Gaussian starting factors."""
    rng = as_rng(rng)
    w_h = rng.standard_normal(geometry.n_h) + 1j * rng.standard_normal(geometry.n_h)
    w_v = rng.standard_normal(geometry.n_v) + 1j * rng.standard_normal(geometry.n_v)
    return SeparableBeamformer(w_h=w_h / np.linalg.norm(w_h), w_v=w_v / np.linalg.norm(w_v))


def _unit(w: np.ndarray) -> np.ndarray:
    return w / np.linalg.norm(w)


def tmmse(
    provider,
    init: SeparableBeamformer | None = None,
    eps: float = 1e-3,
    max_iter: int = 50,
    seed: int = 0,
) -> TmmseReport:
    """Alternating separable MMSE design.

    Each iteration solves the horizontal normal equations with the vertical
    factor fixed, then the vertical ones with the new horizontal factor.
    Iteration stops when the normalized composed filter moves less than
    ``eps`` in Euclidean norm between consecutive iterations.

    Parameters
    ----------
    provider : AnalyticStatsProvider or SampleStatsProvider
    init : optional explicit starting point; when omitted a random
        unit-norm start is drawn from ``seed`` (recorded in the report).
    eps : convergence threshold on the normalized composed filter.
    max_iter : iteration cap; hitting it flags ``converged=False``.

    Returns
    -------
    TmmseReport
        ``mse_history`` holds the composed-filter MSE at the start and
        after every half-update (non-increasing under exact arithmetic);
        ``residual_history`` has one entry per full iteration.
    """
    if eps <= 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    used_seed: int | None = None
    if init is None:
        used_seed = seed
        init = random_separable_init(provider.geometry, seed)
    w_h = np.asarray(init.w_h, dtype=np.complex128)
    w_v = np.asarray(init.w_v, dtype=np.complex128)

    full = provider.full()
    s2 = provider.signal_power

    def composed_mse(wh, wv):
        return expected_mse(kron(wv, wh), full, s2)

    mse_history = [composed_mse(w_h, w_v)]
    residual_history: list[float] = []
    prev = _unit(kron(w_v, w_h))
    converged = False
    iterations = 0
    try:
        for iterations in range(1, max_iter + 1):
            st = provider.cofiltered(w_v, "h")
            w_h = hermitian_solve(st.cov, st.cross)
            mse_history.append(composed_mse(w_h, w_v))
            st = provider.cofiltered(w_h, "v")
            w_v = hermitian_solve(st.cov, st.cross)
            mse_history.append(composed_mse(w_h, w_v))
            cur = _unit(kron(w_v, w_h))
            residual = float(np.linalg.norm(cur - prev))
            residual_history.append(residual)
            prev = cur
            if residual < eps:
                converged = True
                break
    except SingularMatrixError as e:
        raise DesignFailure("singular co-filtered covariance mid-iteration") from e

    return TmmseReport(
        filter=SeparableBeamformer(w_h=w_h, w_v=w_v),
        iterations=iterations,
        converged=converged,
        residual_history=residual_history,
        mse_history=mse_history,
        seed=used_seed,
    )


def kmmse(
    stats_h: SecondOrderStats, stats_v: SecondOrderStats, rho: float = 0.5
) -> SeparableBeamformer:
    """Independent diagonally loaded Wiener designs for the two edge
    sub-arrays: ``w_m = (cov_m + rho I)^{-1} cross_m``."""
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    factors = []
    for st in (stats_h, stats_v):
        cov = st.cov.copy()
        cov[np.diag_indices_from(cov)] += rho
        try:
            factors.append(hermitian_solve(cov, st.cross))
        except SingularMatrixError as e:
            raise DesignFailure("singular sub-array covariance in KMMSE design") from e
    return SeparableBeamformer(w_h=factors[0], w_v=factors[1])


def kmmse_output(filt: SeparableBeamformer, blk: SnapshotBlock, sigma_s2: float) -> np.ndarray:
    """Filter the block and rescale the output to the desired power.

    The raw output ``p[k]`` is divided by its root mean square power (mean
    not subtracted; signals are zero-mean by design) and multiplied by
    ``sqrt(sigma_s2)``.
    """
    if sigma_s2 <= 0:
        raise ValueError(f"sigma_s2 must be > 0, got {sigma_s2}")
    p = apply(filt, blk)
    sigma_p = float(np.sqrt(np.mean(np.abs(p) ** 2)))
    if sigma_p == 0.0:
        raise DesignFailure("zero output power; cannot rescale")
    return (np.sqrt(sigma_s2) / sigma_p) * p


def apply(filt, blk: SnapshotBlock) -> np.ndarray:
    """Run a filter over a block: ``y[k] = w^H x[k]``.

    Accepts either a plain length-N filter vector or a
    :class:`SeparableBeamformer` (applied in bilinear form, which matches
    the composed filter to rounding error).
    """
    if isinstance(filt, SeparableBeamformer):
        g = blk.geometry
        if filt.w_h.shape[0] != g.n_h or filt.w_v.shape[0] != g.n_v:
            raise ValueError("separable filter does not match the block geometry")
        return _kernels.bilinear_output(blk.matrix_view(), filt.w_h, filt.w_v)
    w = np.asarray(filt, dtype=np.complex128)
    if w.ndim != 1 or w.shape[0] != blk.x.shape[0]:
        raise ValueError(f"filter length {w.shape} does not match block dimension {blk.x.shape[0]}")
    return w.conj() @ blk.x


def _full_column_rank(a: np.ndarray) -> bool:
    s = np.linalg.svd(a, compute_uv=False)
    return s.size > 0 and s[-1] > _RANK_RTOL * s[0] and a.shape[0] >= a.shape[1]


def zf_separable_limit(ms: ManifoldSet, desired_index: int) -> SeparableBeamformer:
    """High-SNR limit: per-axis zero-forcing rows of the pseudo-inverses.

    Requires both sub-array manifolds to have full column rank (at least as
    many elements per axis as wavefronts, distinct cosines).
    """
    if not 0 <= desired_index < ms.r:
        raise ValueError(f"desired_index {desired_index} out of range for r={ms.r}")
    factors = []
    for a in (ms.a_h, ms.a_v):
        if not _full_column_rank(a):
            raise DesignFailure("sub-array manifold is rank deficient; no zero-forcing limit")
        factors.append(pseudo_inverse(a)[desired_index].conj())
    return SeparableBeamformer(w_h=factors[0], w_v=factors[1])


def matched_separable_limit(
    ms: ManifoldSet, desired_index: int, sigma_s2: float, sigma_b2: float
) -> SeparableBeamformer:
    """Low-SNR limit: scaled per-axis matched filters
    ``w_m = (sigma_s2/sigma_b2) a_m(desired)``."""
    if not 0 <= desired_index < ms.r:
        raise ValueError(f"desired_index {desired_index} out of range for r={ms.r}")
    if sigma_b2 <= 0:
        raise ValueError(f"sigma_b2 must be > 0, got {sigma_b2}")
    scale = sigma_s2 / sigma_b2
    return SeparableBeamformer(
        w_h=scale * ms.a_h[:, desired_index].copy(),
        w_v=scale * ms.a_v[:, desired_index].copy(),
    )
