"""Evaluation-metric tests.

Flops oracles below are hand computed from the documented model
(complex MAC = 8 real flops, covariance 8 n^2 K, cross 8 n K, Hermitian
solve (8/3) n^3 + 8 n^2):

* mmse_sample, 2x2 (n=4), K=10:
    8*16*10 + 8*4*10 + (8/3)*64 + 8*16 = 1280 + 320 + 298.67 = 1898.67 -> 1899
* kmmse, 2x3, K=10:
    (320 + 720) + (160 + 240) + (21.33 + 32) + (72 + 72) = 1637.33 -> 1637
* tmmse, 2x2, K=10, 3 iterations:
    per iter 640 + 640 + 320 + 106.67 = 1706.67; x3 = 5120
* mmse_lemma, 2x2 (n=4), R=2:
    8*4*4 + ((8/3)*8 + 8*4) + 8*4*2 = 128 + 53.33 + 64 = 245.33 -> 245
"""
import numpy as np
import pytest

from sepbeam.array_model import DirectionCosines, UraGeometry, build_manifolds
from sepbeam.beamformers import SeparableBeamformer, random_separable_init
from sepbeam.metrics import (
    FLOPS_METHODS,
    ArrayFactorGrid,
    FlopsModel,
    array_factor,
    ber,
    condition_sweep,
    flops,
    mse_eval,
    subarray_factor,
)
from sepbeam.signal_model import Scenario, analytic_full_stats, draw_directions

RNG = np.random.default_rng(4242)


def make_scenario(n_h=4, n_v=4, r=3, sigma_b2=0.5, rng=None):
    rng = RNG if rng is None else rng
    ms = build_manifolds(UraGeometry(n_h, n_v), draw_directions(r, rng))
    return Scenario(manifolds=ms, desired_index=0, sigma_s2=1.0, sigma_b2=sigma_b2)


# ----------------------------------------------------------- BER


def test_ber_counts_mismatches():
    a = np.array([[0, 1, 0], [1, 1, 0]], dtype=np.uint8)
    b = np.array([[0, 0, 0], [1, 1, 1]], dtype=np.uint8)
    assert ber(a, b) == pytest.approx(2 / 6)
    assert ber(a, a) == 0.0


def test_ber_validates():
    a = np.zeros((2, 3), dtype=np.uint8)
    with pytest.raises(ValueError):
        ber(a, np.zeros((2, 4), dtype=np.uint8))
    with pytest.raises(ValueError):
        ber(np.zeros((2, 0), dtype=np.uint8), np.zeros((2, 0), dtype=np.uint8))


# ----------------------------------------------------------- MSE


def test_mse_eval_accepts_both_filter_kinds():
    sc = make_scenario()
    st = analytic_full_stats(sc)
    filt = random_separable_init(sc.geometry, np.random.default_rng(5))
    sep = mse_eval(filt, st, sc.sigma_s2)
    full = mse_eval(filt.compose(), st, sc.sigma_s2)
    assert sep == pytest.approx(full, rel=1e-12)
    assert sep >= 0.0


# ----------------------------------------------------------- array factor


def test_array_factor_peak_normalized():
    sc = make_scenario()
    filt = random_separable_init(sc.geometry, np.random.default_rng(6))
    grid = np.linspace(-1, 1, 41)
    g = array_factor(filt, sc.geometry, grid, grid)
    assert isinstance(g, ArrayFactorGrid)
    assert g.af.shape == (41, 41)
    assert g.af.max() == 1.0
    assert g.af.min() >= 0.0


def test_array_factor_separable_is_product_of_cuts():
    g = UraGeometry(3, 5)
    filt = random_separable_init(g, np.random.default_rng(7))
    pg = np.linspace(-1, 1, 21)
    qg = np.linspace(-1, 1, 17)
    full = array_factor(filt, g, pg, qg).af
    fh = subarray_factor(filt.w_h, pg)
    fv = subarray_factor(filt.w_v, qg)
    np.testing.assert_allclose(full, np.outer(fh, fv), atol=1e-12)


def test_array_factor_full_filter_matches_composed():
    g = UraGeometry(4, 4)
    filt = random_separable_init(g, np.random.default_rng(8))
    pg = np.linspace(-0.9, 0.9, 19)
    qg = np.linspace(-0.9, 0.9, 19)
    a = array_factor(filt, g, pg, qg).af
    b = array_factor(filt.compose(), g, pg, qg).af
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_matched_filter_peaks_at_steering_direction():
    g = UraGeometry(4, 4)
    ms = build_manifolds(g, [DirectionCosines(0.5, -0.25)])
    filt = SeparableBeamformer(w_h=ms.a_h[:, 0].copy(), w_v=ms.a_v[:, 0].copy())
    pg = np.linspace(-1, 1, 9)  # includes 0.5 exactly
    qg = np.linspace(-1, 1, 9)  # includes -0.25 exactly
    grid = array_factor(filt, g, pg, qg)
    i, j = np.unravel_index(np.argmax(grid.af), grid.af.shape)
    assert grid.p_grid[i] == pytest.approx(0.5)
    assert grid.q_grid[j] == pytest.approx(-0.25)


def test_array_factor_validation():
    g = UraGeometry(2, 2)
    z = np.zeros(4, dtype=complex)
    with pytest.raises(ValueError):
        array_factor(z, g, [0.0], [0.0])
    filt = random_separable_init(g, np.random.default_rng(9))
    with pytest.raises(ValueError):
        array_factor(filt, g, [1.5], [0.0])
    with pytest.raises(ValueError):
        subarray_factor(np.zeros(3, dtype=complex), [0.0])


# ----------------------------------------------------------- flops


def test_flops_frozen_values():
    g22, g23 = UraGeometry(2, 2), UraGeometry(2, 3)
    assert flops(FlopsModel("mmse_sample", g22, r=2, k=10)) == 1899
    assert flops(FlopsModel("kmmse", g23, r=2, k=10)) == 1637
    assert flops(FlopsModel("tmmse", g22, r=2, k=10, iterations=3)) == 5120
    assert flops(FlopsModel("mmse_lemma", g22, r=2, k=10)) == 245


def test_flops_model_validation():
    g = UraGeometry(2, 2)
    with pytest.raises(ValueError):
        FlopsModel("wiener", g, r=2, k=10)
    with pytest.raises(ValueError):
        FlopsModel("kmmse", g, r=0, k=10)
    assert set(FLOPS_METHODS) == {"mmse_sample", "mmse_lemma", "tmmse", "kmmse"}


def test_flops_scaling_shape():
    # sample covariance dominates: mmse grows ~n^2 k, kmmse ~(n_h^2+n_v^2) k
    k = 1000
    for n in (4, 8, 16):
        g = UraGeometry(n, n)
        full = flops(FlopsModel("mmse_sample", g, r=4, k=k))
        sub = flops(FlopsModel("kmmse", g, r=4, k=k))
        assert full > sub
        ratio = full / sub
        assert ratio == pytest.approx(n**2 / 2, rel=0.25)


# ----------------------------------------------------------- conditioning


def test_condition_sweep_non_increasing():
    for seed in range(5):
        sc = make_scenario(rng=np.random.default_rng(300 + seed))
        for axis in ("h", "v"):
            pairs = condition_sweep(sc, axis, [0.0, 0.1, 0.5, 2.0, 10.0])
            conds = [c for _, c in pairs]
            assert all(a >= b - 1e-9 for a, b in zip(conds, conds[1:]))
            assert pairs[0][0] == 0.0


def test_condition_sweep_validates_rho():
    sc = make_scenario()
    with pytest.raises(ValueError):
        condition_sweep(sc, "h", [-0.5])
