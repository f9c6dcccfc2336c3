"""Cross-module invariant checks over randomized inputs."""

import numpy as np
import pytest

from ldplab import benchmarks as bench
from ldplab import linalg
from ldplab.enumeration import initial_level, level_step
from ldplab.rng import counter_uniforms, uniform_block
from ldplab.stats import wilson_interval
from ldplab.walk import kappa_samples, lambda_samples, make_measure


def random_invertibles(seed, count, dim, min_cond=1e-6):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        m = rng.standard_normal((count, dim, dim))
        sv = np.linalg.svd(m, compute_uv=False)
        out.extend(m[sv[:, -1] > min_cond * sv[:, 0]])
    return np.stack(out[:count])


def test_weyl_majorization_bulk():
    mats = random_invertibles(0, 10_000, 3)
    sv = np.linalg.svd(mats, compute_uv=False)
    kappa = np.log(sv)
    lam = np.log(-np.sort(-np.abs(np.linalg.eigvals(mats)), axis=1))
    assert np.all(np.cumsum(lam, axis=1) <= np.cumsum(kappa, axis=1) + 1e-8)
    # full sums agree: both equal log |det|
    np.testing.assert_allclose(lam.sum(axis=1), kappa.sum(axis=1), atol=1e-7)


def test_cartan_subadditivity_bulk():
    mats = random_invertibles(1, 10_000, 3)
    prods = mats[:5000] @ mats[5000:]
    k_prod = np.log(np.linalg.svd(prods, compute_uv=False)[:, 0])
    k_a = np.log(np.linalg.svd(mats[:5000], compute_uv=False)[:, 0])
    k_b = np.log(np.linalg.svd(mats[5000:], compute_uv=False)[:, 0])
    assert np.all(k_prod <= k_a + k_b + 1e-8)


def test_exterior_power_tracks_partial_sums():
    mats = random_invertibles(2, 100, 4, min_cond=1e-3)
    for m in mats:
        k = linalg.cartan_projection(m)
        for i in (2, 3):
            ki = linalg.cartan_projection(linalg.exterior_power(m, i))
            assert ki[0] == pytest.approx(k[:i].sum(), abs=1e-6)


def test_fs_metric_axioms():
    rng = np.random.default_rng(3)
    pts = np.stack([linalg.canonical_rep(v) for v in rng.standard_normal((3000, 3))])
    a, b, c = pts[:1000], pts[1000:2000], pts[2000:]
    dab = linalg.fs_distance_many(a, b)
    dbc = linalg.fs_distance_many(b, c)
    dac = linalg.fs_distance_many(a, c)
    assert np.all((0.0 <= dab) & (dab <= 1.0 + 1e-12))
    assert np.all(dac <= dab + dbc + 1e-9)
    # symmetry and identity
    np.testing.assert_allclose(dab, linalg.fs_distance_many(b, a), atol=1e-15)
    assert np.all(linalg.fs_distance_many(a, a) <= 1e-7)


def test_counter_rng_determinism_and_range():
    u1 = counter_uniforms(5, np.arange(100), np.arange(100))
    u2 = counter_uniforms(5, np.arange(100), np.arange(100))
    np.testing.assert_array_equal(u1, u2)
    assert np.all((0.0 <= u1) & (u1 < 1.0))
    # distinct streams decorrelate
    block = uniform_block(5, 0, 1000, 8)
    assert abs(np.corrcoef(block[:, 0], block[:, 1])[0, 1]) < 0.1
    assert abs(block.mean() - 0.5) < 0.02


def test_stream_slices_are_consistent():
    full = uniform_block(9, 0, 50, 6)
    tail = uniform_block(9, 10, 40, 6)
    np.testing.assert_array_equal(full[10:], tail)


def test_wilson_interval_sane():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    lo0, hi0 = wilson_interval(0, 100)
    assert lo0 == pytest.approx(0.0, abs=1e-15) and hi0 > 0.0
    lo1, hi1 = wilson_interval(100, 100)
    assert hi1 == 1.0 and lo1 < 1.0


def test_enumeration_merges_probabilities_exactly():
    meas = bench.diagonal_pair_measure()
    mats, weights = meas.matrices, meas.weights
    states, logs = initial_level(2)
    probs, aux = np.ones(1), np.zeros(1)
    for depth in range(1, 13):
        states, logs, probs, aux = level_step(
            mats, states, logs, probs, weights, aux, meas.log_dets
        )
        assert states.shape[0] == depth + 1  # commuting atoms merge to binomial support
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.max(np.abs(states), axis=(1, 2)) <= 1.0 + 1e-14)


def test_enumeration_matches_sampling_distribution():
    meas = bench.boundary_measure(1)
    mats, weights = meas.matrices, meas.weights
    states, logs = initial_level(2)
    probs, aux = np.ones(1), np.zeros(1)
    for _ in range(6):
        states, logs, probs, aux = level_step(
            mats, states, logs, probs, weights, aux, meas.log_dets
        )
    sv = np.linalg.svd(states, compute_uv=False)
    tops = linalg.corrected_log_spectrum(sv, logs, aux)[:, 0]
    mean_exact = float(np.dot(tops, probs)) / 6.0
    samples = kappa_samples(meas, 6, 50_000, seed=17)
    assert abs(samples[:, 0].mean() - mean_exact) < 0.02


def test_kappa_dominates_lambda_everywhere():
    meas = bench.graded_schottky_measure()
    k = kappa_samples(meas, 15, 300, seed=23)
    lam = lambda_samples(meas, 15, 300, seed=23)
    assert np.all(k[:, 0] >= lam[:, 0] - 1e-8)


def test_commuting_reduction_exact():
    meas = bench.diagonal_pair_measure()
    n = 10
    samples = kappa_samples(meas, n, 200, seed=31)
    from ldplab.walk import sample_words

    words = sample_words(meas, n, 200, seed=31)
    tops = np.array([3.0, 3.5])
    means = tops[words].mean(axis=1)
    np.testing.assert_allclose(samples[:, 0], means, atol=1e-10)


def test_scaled_cartan_identity_random_words():
    # kappa of the scaled state plus the uniform log-scale shift equals the
    # direct product's kappa
    rng = np.random.default_rng(41)
    atoms = []
    for i in range(3):
        q = bench.rotation(rng.uniform(0, np.pi))
        atoms.append((f"g{i}", q @ np.diag([1.5, 0.8]) @ q.T, 1.0 / 3.0))
    meas = make_measure(2, atoms)
    from ldplab.walk import sample_words, walk_product

    for w in sample_words(meas, 12, 30, seed=43):
        state = walk_product(meas, w)
        direct = np.eye(2)
        for idx in w:
            direct = meas.atoms[idx].matrix @ direct
        np.testing.assert_allclose(
            state.cartan(), linalg.cartan_projection(direct), atol=1e-8
        )
