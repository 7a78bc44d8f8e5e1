"""Uniform rectangular array geometry, steering vectors and manifolds.

Element spacing is half a wavelength on both axes. Elements are indexed
column-major: the element at horizontal position ``i_h`` and vertical
position ``i_v`` (zero-based) maps to linear index ``i_h + i_v * n_h``, so a
length-``n_h*n_v`` snapshot reshapes to an ``(n_h, n_v)`` matrix in
column-major (Fortran) order. A full steering vector factors as
``kron(a_v(q), a_h(p))`` under this indexing.

Directions are direction cosines ``p`` (horizontal) and ``q`` (vertical),
both in [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kron_algebra import khatri_rao, kron

__all__ = [
    "UraGeometry",
    "DirectionCosines",
    "ManifoldSet",
    "subarray_steering",
    "full_steering",
    "build_manifolds",
    "manifold_tensor",
]


@dataclass(frozen=True)
class UraGeometry:
    """Array size: ``n_h`` horizontal by ``n_v`` vertical elements."""

    n_h: int
    n_v: int

    def __post_init__(self):
        if self.n_h < 1 or self.n_v < 1:
            raise ValueError(f"array dimensions must be >= 1, got {self.n_h}x{self.n_v}")

    @property
    def n(self) -> int:
        """Total element count."""
        return self.n_h * self.n_v


@dataclass(frozen=True)
class DirectionCosines:
    """A propagation direction as horizontal/vertical direction cosines."""

    p: float
    q: float

    def __post_init__(self):
        if not (abs(self.p) <= 1.0 and abs(self.q) <= 1.0):
            raise ValueError(f"direction cosines must lie in [-1, 1], got ({self.p}, {self.q})")


def subarray_steering(n: int, c: float) -> np.ndarray:
    """Length-``n`` half-wavelength ULA steering vector for cosine ``c``.

    Entry ``k`` (zero-based) is ``exp(1j * pi * k * c)``; all entries have
    unit modulus and the first is exactly 1.
    """
    if n < 1:
        raise ValueError(f"steering length must be >= 1, got {n}")
    return np.exp(1j * np.pi * c * np.arange(n))


def full_steering(geometry: UraGeometry, d: DirectionCosines) -> np.ndarray:
    """Length-``n_h*n_v`` steering vector ``kron(a_v(q), a_h(p))``."""
    a_h = subarray_steering(geometry.n_h, d.p)
    a_v = subarray_steering(geometry.n_v, d.q)
    return kron(a_v, a_h)


@dataclass(frozen=True)
class ManifoldSet:
    """Steering matrices of ``r`` wavefronts impinging on one array.

    Attributes
    ----------
    geometry : UraGeometry
    directions : tuple[DirectionCosines, ...]
    a_h : (n_h, r) ndarray
        Horizontal sub-array manifold.
    a_v : (n_v, r) ndarray
        Vertical sub-array manifold.
    a_full : (n_h*n_v, r) ndarray
        Full manifold; column ``j`` is ``kron(a_v[:, j], a_h[:, j])``, i.e.
        ``a_full == khatri_rao(a_v, a_h)``.
    """

    geometry: UraGeometry
    directions: tuple[DirectionCosines, ...]
    a_h: np.ndarray = field(repr=False)
    a_v: np.ndarray = field(repr=False)
    a_full: np.ndarray = field(repr=False)

    @property
    def r(self) -> int:
        """Number of wavefronts."""
        return len(self.directions)


def build_manifolds(geometry: UraGeometry, directions) -> ManifoldSet:
    """Assemble the sub-array and full manifolds for the given directions."""
    directions = tuple(directions)
    if not directions:
        raise ValueError("at least one direction is required")
    a_h = np.stack([subarray_steering(geometry.n_h, d.p) for d in directions], axis=1)
    a_v = np.stack([subarray_steering(geometry.n_v, d.q) for d in directions], axis=1)
    a_full = khatri_rao(a_v, a_h)
    for arr in (a_h, a_v, a_full):
        arr.setflags(write=False)
    return ManifoldSet(geometry=geometry, directions=directions, a_h=a_h, a_v=a_v, a_full=a_full)


def manifold_tensor(ms: ManifoldSet) -> np.ndarray:
    """Order-3 steering tensor, shape ``(n_h, n_v, r)``.

    Slice ``[:, :, j]`` is the rank-one outer product
    ``outer(a_h[:, j], a_v[:, j])``; its mode-3 unfolding equals
    ``a_full.T``.
    """
    return np.einsum("hr,vr->hvr", ms.a_h, ms.a_v)
