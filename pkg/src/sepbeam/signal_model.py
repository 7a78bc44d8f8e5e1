"""Narrowband multi-source signal model and second-order statistics.

A scenario is ``r`` uncorrelated QPSK wavefronts of common power
``sigma_s2`` hitting a rectangular array in circularly symmetric white
Gaussian noise of per-element power ``sigma_b2``. One of the wavefronts
(``desired_index``, zero-based) is the stream the beamformers try to
recover; the rest are interference.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .array_model import DirectionCosines, ManifoldSet, UraGeometry, build_manifolds

__all__ = [
    "Scenario",
    "SnapshotBlock",
    "SecondOrderStats",
    "DIRECTION_RANGE",
    "as_rng",
    "draw_directions",
    "qpsk_modulate",
    "qpsk_demodulate",
    "qpsk_symbols",
    "synthesize",
    "analytic_full_stats",
    "sample_full_stats",
    "subarray_received",
    "analytic_subarray_stats",
    "sample_subarray_stats",
]

# Random direction cosines are confined away from the +-1 edges.
DIRECTION_RANGE = (-0.9, 0.9)

_STATS_HERMITIAN_RTOL = 1e-10


def as_rng(seed) -> np.random.Generator:
    """Coerce an int seed, SeedSequence or Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class Scenario:
    """Immutable problem instance: manifolds, desired stream and powers."""

    manifolds: ManifoldSet
    desired_index: int
    sigma_s2: float
    sigma_b2: float

    def __post_init__(self):
        if not 0 <= self.desired_index < self.manifolds.r:
            raise ValueError(
                f"desired_index {self.desired_index} out of range for r={self.manifolds.r}"
            )
        if self.sigma_s2 <= 0:
            raise ValueError(f"sigma_s2 must be > 0, got {self.sigma_s2}")
        if self.sigma_b2 < 0:
            raise ValueError(f"sigma_b2 must be >= 0, got {self.sigma_b2}")

    @property
    def geometry(self) -> UraGeometry:
        return self.manifolds.geometry

    @property
    def snr(self) -> float:
        """Per-element signal-to-noise power ratio (linear)."""
        return self.sigma_s2 / self.sigma_b2


@dataclass(frozen=True)
class SnapshotBlock:
    """K array snapshots together with the transmitted symbol streams.

    ``x`` holds the received snapshots column-wise, ``s`` the clean symbol
    streams (row per wavefront). The geometry is retained so snapshots can
    be viewed as ``(n_h, n_v)`` matrices.
    """

    geometry: UraGeometry
    x: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.x.ndim != 2 or self.s.ndim != 2:
            raise ValueError("x and s must be 2-D arrays")
        if self.x.shape[0] != self.geometry.n:
            raise ValueError(
                f"x has {self.x.shape[0]} rows but the array has {self.geometry.n} elements"
            )
        if self.x.shape[1] != self.s.shape[1]:
            raise ValueError("x and s must have the same number of snapshots")

    @property
    def k(self) -> int:
        """Number of snapshots."""
        return self.x.shape[1]

    def matrix_view(self) -> np.ndarray:
        """Snapshots as an ``(n_h, n_v, k)`` cube (column-major element map)."""
        g = self.geometry
        return self.x.reshape(g.n_h, g.n_v, self.k, order="F")


@dataclass(frozen=True)
class SecondOrderStats:
    """Covariance of an observation plus its cross-covariance with the
    desired stream. ``kind`` records whether the values are analytic or
    sample estimates."""

    cov: np.ndarray = field(repr=False)
    cross: np.ndarray = field(repr=False)
    kind: str = "analytic"

    def __post_init__(self):
        if self.cov.ndim != 2 or self.cov.shape[0] != self.cov.shape[1]:
            raise ValueError(f"cov must be square, got shape {self.cov.shape}")
        if self.cross.shape != (self.cov.shape[0],):
            raise ValueError(
                f"cross shape {self.cross.shape} does not match cov {self.cov.shape}"
            )
        if self.kind not in ("analytic", "sample"):
            raise ValueError(f"kind must be 'analytic' or 'sample', got {self.kind!r}")
        nrm = np.linalg.norm(self.cov)
        if np.linalg.norm(self.cov - self.cov.conj().T) > _STATS_HERMITIAN_RTOL * max(nrm, 1e-300):
            raise ValueError("covariance is not Hermitian within tolerance")

    @property
    def dim(self) -> int:
        return self.cov.shape[0]


def draw_directions(r: int, rng) -> list[DirectionCosines]:
    """Draw ``r`` directions with p, q independent uniform on [-0.9, 0.9]."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    rng = as_rng(rng)
    lo, hi = DIRECTION_RANGE
    pq = rng.uniform(lo, hi, size=(r, 2))
    return [DirectionCosines(p=float(p), q=float(q)) for p, q in pq]


def qpsk_modulate(bits: np.ndarray, sigma_s2: float = 1.0) -> np.ndarray:
    """Map Gray-coded bit pairs to QPSK symbols of power ``sigma_s2``.

    ``bits`` has a leading axis of size 2: ``bits[0]`` drives the real part,
    ``bits[1]`` the imaginary part, via ``(1 - 2*b)``. Each symbol lands on
    ``(+-1 +-1j) * sqrt(sigma_s2 / 2)``.
    """
    bits = np.asarray(bits)
    if bits.shape[0] != 2:
        raise ValueError("bits must have a leading axis of size 2")
    amp = np.sqrt(sigma_s2 / 2.0)
    return ((1.0 - 2.0 * bits[0]) + 1j * (1.0 - 2.0 * bits[1])) * amp


def qpsk_demodulate(y: np.ndarray) -> np.ndarray:
    """Hard quadrant decisions, inverse of :func:`qpsk_modulate`.

    Returns uint8 bits with a leading axis of size 2 (real bit, imag bit).
    Scale invariant: any positive rescaling of ``y`` decodes identically.
    """
    y = np.asarray(y)
    return np.stack([(y.real < 0), (y.imag < 0)]).astype(np.uint8)


def qpsk_symbols(r: int, k: int, sigma_s2: float, rng) -> np.ndarray:
    """(r, k) matrix of i.i.d. uniform QPSK symbols of power ``sigma_s2``."""
    if r < 1 or k < 1:
        raise ValueError(f"r and k must be >= 1, got r={r}, k={k}")
    if sigma_s2 <= 0:
        raise ValueError(f"sigma_s2 must be > 0, got {sigma_s2}")
    rng = as_rng(rng)
    bits = rng.integers(0, 2, size=(2, r, k))
    return qpsk_modulate(bits, sigma_s2)


def circular_noise(shape, sigma_b2: float, rng) -> np.ndarray:
    """Circularly symmetric complex Gaussian noise, per-entry power sigma_b2."""
    rng = as_rng(rng)
    scale = np.sqrt(sigma_b2 / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def synthesize(sc: Scenario, k: int, rng) -> SnapshotBlock:
    """Generate a block of ``k`` received snapshots for the scenario.

    Deterministic given the rng seed; symbols are drawn before noise.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    rng = as_rng(rng)
    s = qpsk_symbols(sc.manifolds.r, k, sc.sigma_s2, rng)
    x = sc.manifolds.a_full @ s
    if sc.sigma_b2 > 0:
        x = x + circular_noise(x.shape, sc.sigma_b2, rng)
    return SnapshotBlock(geometry=sc.geometry, x=x, s=s)


def _analytic_stats(a: np.ndarray, sc: Scenario) -> SecondOrderStats:
    # cov = sigma_s2 * A A^H + sigma_b2 * I, cross = sigma_s2 * a_desired
    cov = sc.sigma_s2 * (a @ a.conj().T)
    cov[np.diag_indices_from(cov)] += sc.sigma_b2
    cov = 0.5 * (cov + cov.conj().T)
    cross = sc.sigma_s2 * a[:, sc.desired_index].copy()
    return SecondOrderStats(cov=cov, cross=cross, kind="analytic")


def analytic_full_stats(sc: Scenario) -> SecondOrderStats:
    """Exact second-order statistics of the full array observation."""
    return _analytic_stats(sc.manifolds.a_full, sc)


def sample_full_stats(blk: SnapshotBlock, desired_index: int) -> SecondOrderStats:
    """Block-averaged estimates of the full-array statistics."""
    cov, cross = _kernels.sample_second_order(blk.x, blk.s[desired_index])
    return SecondOrderStats(cov=cov, cross=cross, kind="sample")


def _subarray_rows(geometry: UraGeometry, axis: str) -> slice:
    # horizontal sub-array = first physical row; vertical = first column.
    # Both include the shared corner element (linear index 0).
    if axis == "h":
        return slice(0, geometry.n_h)
    if axis == "v":
        return slice(0, None, geometry.n_h)
    raise ValueError(f"axis must be 'h' or 'v', got {axis!r}")


def subarray_received(blk: SnapshotBlock, axis: str) -> np.ndarray:
    """Rows of ``x`` seen by the horizontal or vertical edge sub-array."""
    return blk.x[_subarray_rows(blk.geometry, axis)]


def analytic_subarray_stats(sc: Scenario, axis: str) -> SecondOrderStats:
    """Exact statistics of the edge sub-array observation."""
    a = sc.manifolds.a_h if axis == "h" else sc.manifolds.a_v
    if axis not in ("h", "v"):
        raise ValueError(f"axis must be 'h' or 'v', got {axis!r}")
    return _analytic_stats(a, sc)


def sample_subarray_stats(blk: SnapshotBlock, axis: str, desired_index: int) -> SecondOrderStats:
    """Block-averaged statistics of the edge sub-array observation."""
    xm = subarray_received(blk, axis)
    cov, cross = _kernels.sample_second_order(np.ascontiguousarray(xm), blk.s[desired_index])
    return SecondOrderStats(cov=cov, cross=cross, kind="sample")
