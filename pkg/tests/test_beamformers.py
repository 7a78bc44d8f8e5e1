"""Filter-design tests.

Closed-form oracles used below:

* 2x2 array, one broadside source, sigma_s2 = sigma_b2 = 1: the full
  Wiener filter is ones(4)/5 and the minimum MSE is exactly 0.2
  (direct inversion of I + 11^T by Sherman-Morrison, done by hand).
* A rank-1 problem is separable, so the alternating design must reach
  the full Wiener optimum.
* Orthogonal-grid directions (cosine spacing 2/n) make the sub-array
  manifolds unitary up to sqrt(n); the noiseless rho=0 sub-array design
  then nulls every interferer exactly.
"""
import numpy as np
import pytest

from sepbeam.array_model import DirectionCosines, UraGeometry, build_manifolds
from sepbeam.beamformers import (
    AnalyticStatsProvider,
    DesignFailure,
    SampleStatsProvider,
    SeparableBeamformer,
    apply,
    expected_mse,
    kmmse,
    kmmse_output,
    matched_separable_limit,
    mmse_direct,
    mmse_lemma,
    random_separable_init,
    tmmse,
    tmmse_stats_analytic,
    tmmse_stats_sample,
    zf_separable_limit,
)
from sepbeam.kron_algebra import kron, vector_angle
from sepbeam.signal_model import (
    Scenario,
    analytic_full_stats,
    analytic_subarray_stats,
    draw_directions,
    sample_subarray_stats,
    synthesize,
)

RNG = np.random.default_rng(777)


def make_scenario(n_h=4, n_v=4, r=3, sigma_s2=1.0, sigma_b2=0.5, rng=None, d=0):
    rng = RNG if rng is None else rng
    ms = build_manifolds(UraGeometry(n_h, n_v), draw_directions(r, rng))
    return Scenario(manifolds=ms, desired_index=d, sigma_s2=sigma_s2, sigma_b2=sigma_b2)


def broadside_rank1(n_h=2, n_v=2):
    ms = build_manifolds(UraGeometry(n_h, n_v), [DirectionCosines(0.0, 0.0)])
    return Scenario(manifolds=ms, desired_index=0, sigma_s2=1.0, sigma_b2=1.0)


# ----------------------------------------------------------- Wiener


def test_wiener_rank1_closed_form():
    st = analytic_full_stats(broadside_rank1())
    w = mmse_direct(st)
    np.testing.assert_allclose(w, np.full(4, 0.2), atol=1e-12)
    assert expected_mse(w, st, 1.0) == pytest.approx(0.2, abs=1e-12)


def test_expected_mse_bruteforce():
    sc = make_scenario()
    st = analytic_full_stats(sc)
    w = RNG.standard_normal(16) + 1j * RNG.standard_normal(16)
    want = sc.sigma_s2 - 2 * np.real(w.conj() @ st.cross) + np.real(w.conj() @ st.cov @ w)
    assert expected_mse(w, st, sc.sigma_s2) == pytest.approx(want, rel=1e-12)


def test_mmse_lemma_matches_direct():
    for trial in range(25):
        sc = make_scenario(sigma_b2=0.1 + 0.5 * (trial % 5))
        w_direct = mmse_direct(analytic_full_stats(sc))
        w_lemma = mmse_lemma(sc)
        assert np.linalg.norm(w_lemma - w_direct) <= 1e-8 * np.linalg.norm(w_direct)


def test_wiener_mse_at_optimum_is_minimal():
    sc = make_scenario()
    st = analytic_full_stats(sc)
    w = mmse_direct(st)
    base = expected_mse(w, st, sc.sigma_s2)
    for _ in range(20):
        pert = w + 1e-3 * (RNG.standard_normal(16) + 1j * RNG.standard_normal(16))
        assert expected_mse(pert, st, sc.sigma_s2) >= base - 1e-12


# ----------------------------------------------------------- co-filtered stats


def test_cofiltered_stats_sample_converges():
    sc = make_scenario(rng=np.random.default_rng(12))
    blk = synthesize(sc, 50_000, np.random.default_rng(13))
    fixed = random_separable_init(sc.geometry, np.random.default_rng(14))
    for axis, vec in (("h", fixed.w_v), ("v", fixed.w_h)):
        st_a = tmmse_stats_analytic(sc, vec, axis)
        st_s = tmmse_stats_sample(blk, vec, axis, sc.desired_index)
        assert np.linalg.norm(st_s.cov - st_a.cov) / np.linalg.norm(st_a.cov) < 0.05
        assert np.linalg.norm(st_s.cross - st_a.cross) / np.linalg.norm(st_a.cross) < 0.05


def test_cofiltered_noise_floor_is_isotropic():
    # after the vertical co-filter, the noise part of the covariance is
    # exactly sigma_b2 * ||w_v||^2 * I (single source makes the signal
    # part a rank-1 term that can be subtracted in closed form)
    sc = make_scenario(r=1, sigma_b2=0.8, rng=np.random.default_rng(15))
    w_v = np.arange(1, sc.geometry.n_v + 1).astype(complex)
    st = tmmse_stats_analytic(sc, w_v, "h")
    a_h = sc.manifolds.a_h
    gain = np.abs(w_v.conj() @ sc.manifolds.a_v[:, 0]) ** 2
    sig = sc.sigma_s2 * gain * np.outer(a_h[:, 0], a_h[:, 0].conj())
    np.testing.assert_allclose(
        st.cov - sig,
        sc.sigma_b2 * np.linalg.norm(w_v) ** 2 * np.eye(sc.geometry.n_h),
        atol=1e-10,
    )


# ----------------------------------------------------------- TMMSE


def test_tmmse_monotone_and_converged():
    for seed in range(10):
        sc = make_scenario(rng=np.random.default_rng(100 + seed))
        rep = tmmse(AnalyticStatsProvider(sc), seed=seed)
        hist = np.array(rep.mse_history)
        assert np.all(np.diff(hist) <= 1e-10)
        assert rep.converged
        assert len(rep.mse_history) == 1 + 2 * rep.iterations
        assert len(rep.residual_history) == rep.iterations


def test_tmmse_seed_reproducible():
    sc = make_scenario(rng=np.random.default_rng(55))
    a = tmmse(AnalyticStatsProvider(sc), seed=9)
    b = tmmse(AnalyticStatsProvider(sc), seed=9)
    np.testing.assert_array_equal(a.filter.w_h, b.filter.w_h)
    np.testing.assert_array_equal(a.filter.w_v, b.filter.w_v)
    assert a.seed == 9
    c = tmmse(AnalyticStatsProvider(sc), seed=10)
    assert np.linalg.norm(c.filter.w_h - a.filter.w_h) > 0


def test_tmmse_explicit_init_recorded():
    sc = make_scenario(rng=np.random.default_rng(56))
    init = random_separable_init(sc.geometry, np.random.default_rng(1))
    rep = tmmse(AnalyticStatsProvider(sc), init=init)
    assert rep.seed is None


def test_tmmse_rank1_reaches_wiener():
    sc = broadside_rank1()
    st = analytic_full_stats(sc)
    w_opt = mmse_direct(st)
    rep = tmmse(AnalyticStatsProvider(sc), eps=1e-12, max_iter=200, seed=3)
    gap = expected_mse(rep.filter.compose(), st, 1.0) - expected_mse(w_opt, st, 1.0)
    assert -1e-12 <= gap <= 1e-8


def test_tmmse_suboptimal_vs_wiener():
    for seed in range(10):
        sc = make_scenario(rng=np.random.default_rng(200 + seed))
        st = analytic_full_stats(sc)
        wiener = expected_mse(mmse_direct(st), st, sc.sigma_s2)
        rep = tmmse(AnalyticStatsProvider(sc), seed=seed)
        sep = expected_mse(rep.filter.compose(), st, sc.sigma_s2)
        assert sep >= wiener - 1e-10


def test_tmmse_sample_provider_runs():
    sc = make_scenario(rng=np.random.default_rng(57))
    blk = synthesize(sc, 2000, np.random.default_rng(58))
    rep = tmmse(SampleStatsProvider(blk, sc.desired_index), seed=0)
    assert rep.converged
    hist = np.array(rep.mse_history)
    assert np.all(np.diff(hist) <= 1e-10)


def test_tmmse_parameter_validation():
    sc = make_scenario()
    with pytest.raises(ValueError):
        tmmse(AnalyticStatsProvider(sc), eps=0.0)
    with pytest.raises(ValueError):
        tmmse(AnalyticStatsProvider(sc), max_iter=0)


# ----------------------------------------------------------- KMMSE


def test_kmmse_matches_manual_solve():
    sc = make_scenario(rng=np.random.default_rng(60))
    st_h = analytic_subarray_stats(sc, "h")
    st_v = analytic_subarray_stats(sc, "v")
    filt = kmmse(st_h, st_v, rho=0.7)
    for st, w in ((st_h, filt.w_h), (st_v, filt.w_v)):
        want = np.linalg.solve(st.cov + 0.7 * np.eye(st.dim), st.cross)
        np.testing.assert_allclose(w, want, atol=1e-10)
    with pytest.raises(ValueError):
        kmmse(st_h, st_v, rho=-0.1)


def test_kmmse_singular_unloaded_design_fails():
    # one source, no noise: rank-1 sub-covariance, rho=0 cannot be solved
    sc = make_scenario(r=1, sigma_b2=0.0, rng=np.random.default_rng(61))
    st_h = analytic_subarray_stats(sc, "h")
    st_v = analytic_subarray_stats(sc, "v")
    with pytest.raises(DesignFailure):
        kmmse(st_h, st_v, rho=0.0)
    # diagonal loading rescues the same instance
    kmmse(st_h, st_v, rho=0.5)


def test_kmmse_output_power_is_exact():
    sc = make_scenario(rng=np.random.default_rng(62), sigma_s2=2.0)
    blk = synthesize(sc, 500, np.random.default_rng(63))
    filt = kmmse(
        sample_subarray_stats(blk, "h", 0), sample_subarray_stats(blk, "v", 0), rho=0.5
    )
    y = kmmse_output(filt, blk, sc.sigma_s2)
    assert np.mean(np.abs(y) ** 2) == pytest.approx(2.0, rel=1e-12)


def test_kmmse_output_zero_filter_fails():
    sc = make_scenario(rng=np.random.default_rng(64))
    blk = synthesize(sc, 100, np.random.default_rng(65))
    z = SeparableBeamformer(
        w_h=np.zeros(4, dtype=complex), w_v=np.zeros(4, dtype=complex)
    )
    with pytest.raises(DesignFailure):
        kmmse_output(z, blk, 1.0)
    with pytest.raises(ValueError):
        kmmse_output(z, blk, 0.0)


def test_kmmse_orthogonal_boundary_exact_recovery():
    # r = min(n_h, n_v) orthogonal-grid sources: the noiseless rho=0 design
    # is well posed and nulls every interferer exactly.
    n = 4
    ps = [-0.75, -0.25, 0.25, 0.75]  # cosine spacing 2/n = 0.5
    qs = [0.75, -0.75, 0.25, -0.25]
    dirs = [DirectionCosines(p, q) for p, q in zip(ps, qs)]
    ms = build_manifolds(UraGeometry(n, n), dirs)
    sc = Scenario(manifolds=ms, desired_index=1, sigma_s2=1.0, sigma_b2=0.0)
    filt = kmmse(
        analytic_subarray_stats(sc, "h"), analytic_subarray_stats(sc, "v"), rho=0.0
    )
    w = filt.compose()
    resp = w.conj() @ ms.a_full
    for j in range(4):
        if j == 1:
            assert abs(resp[j]) > 0.9
        else:
            assert abs(resp[j]) <= 1e-12


# ----------------------------------------------------------- apply


def test_apply_separable_equals_composed():
    sc = make_scenario(n_h=3, n_v=5, rng=np.random.default_rng(70))
    blk = synthesize(sc, 64, np.random.default_rng(71))
    filt = random_separable_init(sc.geometry, np.random.default_rng(72))
    y_sep = apply(filt, blk)
    y_full = apply(filt.compose(), blk)
    np.testing.assert_allclose(y_sep, y_full, atol=1e-12)


def test_apply_validates_shapes():
    sc = make_scenario(n_h=3, n_v=5, rng=np.random.default_rng(73))
    blk = synthesize(sc, 8, np.random.default_rng(74))
    with pytest.raises(ValueError):
        apply(np.ones(7, dtype=complex), blk)
    bad = SeparableBeamformer(w_h=np.ones(4, dtype=complex), w_v=np.ones(5, dtype=complex))
    with pytest.raises(ValueError):
        apply(bad, blk)


def test_separable_compose_layout():
    w_h = np.array([1.0, 2.0], dtype=complex)
    w_v = np.array([1.0, 10.0], dtype=complex)
    filt = SeparableBeamformer(w_h=w_h, w_v=w_v)
    np.testing.assert_array_equal(filt.compose(), np.array([1, 2, 10, 20], dtype=complex))


# ----------------------------------------------------------- limits


def grid_scenario(snr_db, n=4, r=3):
    # well separated grid directions -> full rank sub-manifolds
    ps = [-0.5, 0.0, 0.5]
    qs = [0.5, -0.5, 0.0]
    dirs = [DirectionCosines(p, q) for p, q in zip(ps[:r], qs[:r])]
    ms = build_manifolds(UraGeometry(n, n), dirs)
    return Scenario(
        manifolds=ms, desired_index=0, sigma_s2=1.0, sigma_b2=10.0 ** (-snr_db / 10.0)
    )


def test_kmmse_high_snr_limit_is_zero_forcing():
    sc = grid_scenario(60.0)
    filt = kmmse(
        analytic_subarray_stats(sc, "h"), analytic_subarray_stats(sc, "v"), rho=0.0
    )
    zf = zf_separable_limit(sc.manifolds, 0)
    assert vector_angle(filt.compose(), zf.compose()) <= 0.01


def test_kmmse_low_snr_limit_is_matched_filter():
    sc = grid_scenario(-60.0)
    filt = kmmse(
        analytic_subarray_stats(sc, "h"), analytic_subarray_stats(sc, "v"), rho=0.0
    )
    mf = matched_separable_limit(sc.manifolds, 0, sc.sigma_s2, sc.sigma_b2)
    assert vector_angle(filt.compose(), mf.compose()) <= 0.01


def test_zf_limit_nulls_exactly():
    sc = grid_scenario(60.0)
    zf = zf_separable_limit(sc.manifolds, 0)
    resp = zf.compose().conj() @ sc.manifolds.a_full
    np.testing.assert_allclose(resp, np.array([1.0, 0.0, 0.0]), atol=1e-12)


def test_zf_limit_rank_deficient_fails():
    # five wavefronts through a 4-element edge: no left inverse
    ms = build_manifolds(UraGeometry(4, 4), draw_directions(5, np.random.default_rng(80)))
    with pytest.raises(DesignFailure):
        zf_separable_limit(ms, 0)
    with pytest.raises(ValueError):
        zf_separable_limit(ms, 5)


def test_matched_limit_frozen_form():
    sc = grid_scenario(0.0)
    mf = matched_separable_limit(sc.manifolds, 1, 2.0, 0.5)
    np.testing.assert_allclose(mf.w_h, 4.0 * sc.manifolds.a_h[:, 1], atol=1e-14)
    np.testing.assert_allclose(mf.w_v, 4.0 * sc.manifolds.a_v[:, 1], atol=1e-14)
    with pytest.raises(ValueError):
        matched_separable_limit(sc.manifolds, 0, 1.0, 0.0)
