import numpy as np
import pytest

from ldplab import benchmarks as bench
from ldplab import spectrum
from ldplab.errors import BadParameters, BudgetExceeded, EmptySet
from ldplab.geometry import hausdorff
from ldplab.rate import RateGrid, exact_rate


def diagonal_mats():
    return [np.diag([np.exp(3.0), np.exp(-3.0)]), np.diag([np.exp(3.5), np.exp(-3.5)])]


def test_hausdorff_basics():
    assert hausdorff(np.array([[0.0], [1.0]]), np.array([[0.0], [1.0]])) == 0.0
    assert hausdorff(np.array([[0.0]]), np.array([[1.0]])) == pytest.approx(1.0)
    assert hausdorff(np.array([[0.0], [1.0]]), np.array([[0.5]])) == pytest.approx(0.5)
    with pytest.raises(EmptySet):
        hausdorff(np.empty((0, 1)), np.array([[0.0]]))


def test_iterate_spectrum_diagonal_pair():
    approx = spectrum.iterate_spectrum(diagonal_mats(), 8)
    for lvl in approx.levels:
        expected = 3.0 + 0.5 * np.arange(lvl.n + 1) / lvl.n
        np.testing.assert_allclose(np.sort(lvl.points), expected, atol=1e-10)
        np.testing.assert_allclose(lvl.hull, [3.0, 3.5], atol=1e-10)
        assert lvl.hausdorff_to_previous <= 1e-10
        # hull contains every cloud point
        assert lvl.points.min() >= lvl.hull[0] - 1e-9
        assert lvl.points.max() <= lvl.hull[1] + 1e-9


def test_iterate_spectrum_singleton():
    g = bench.rotation(0.2) @ np.diag([4.0, 0.5]) @ bench.rotation(-0.2)
    approx = spectrum.iterate_spectrum([g], 20)
    from ldplab.linalg import jordan_projection

    assert approx.deepest.points.shape[0] == 1
    assert approx.deepest.points[0] == pytest.approx(jordan_projection(g)[0], abs=1e-2)


def test_iterate_spectrum_boundary_right_endpoint():
    for K in (1, 2):
        meas = bench.boundary_measure(K)
        mats = [a.matrix for a in meas.atoms]
        approx = spectrum.iterate_spectrum(mats, 8, budget=400_000)
        right = approx.deepest.hull[1]
        assert right == pytest.approx(4.0 - 1.0 / K, abs=1e-9)


def test_iterate_spectrum_budget():
    with pytest.raises(BudgetExceeded):
        spectrum.iterate_spectrum(diagonal_mats(), 25, budget=1000)


def test_iterate_spectrum_chamber_mode():
    approx = spectrum.iterate_spectrum(diagonal_mats(), 6, mode="chamber")
    assert approx.deepest.points.shape[1] == 2
    # zero-sum chamber vectors for determinant-one atoms
    np.testing.assert_allclose(approx.deepest.points.sum(axis=1), 0.0, atol=1e-9)


def test_iterate_spectrum_chamber_dim_limit():
    mats = [np.eye(4)]
    with pytest.raises(BadParameters):
        spectrum.iterate_spectrum(mats, 2, mode="chamber")


def test_jsr_singleton_diagonalizable():
    g = np.diag([4.0, 0.5])
    jb = spectrum.jsr_bounds([g], 1)
    assert jb.lower == pytest.approx(np.log(4.0), abs=1e-12)
    assert jb.upper == pytest.approx(np.log(4.0), abs=1e-12)


def test_jsr_shear_pair():
    jb = spectrum.jsr_bounds([bench.SHEAR_U, bench.SHEAR_L], 6)
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    assert jb.lower >= np.log(phi) - 1e-9
    assert jb.upper >= jb.lower - 1e-9
    # monotone by depth
    assert all(b >= a - 1e-12 for a, b in zip(jb.lower_by_depth, jb.lower_by_depth[1:]))
    assert all(b <= a + 1e-12 for a, b in zip(jb.upper_by_depth, jb.upper_by_depth[1:]))


def test_jsr_boundary_family_collapse():
    mats = [a.matrix for a in bench.boundary_measure(4).atoms]
    jb = spectrum.jsr_bounds(mats, 1)
    assert jb.lower == pytest.approx(3.75, abs=1e-6)
    assert jb.upper == pytest.approx(3.75, abs=1e-6)


def test_jsr_pruning_soundness():
    mats = [a.matrix for a in bench.boundary_measure(2).atoms]
    full = spectrum.jsr_bounds(mats, 5, prune_margin=100.0)
    pruned = spectrum.jsr_bounds(mats, 5, prune_margin=0.5)
    assert pruned.lower <= full.lower + 1e-9
    assert pruned.upper >= full.upper - 1e-9
    assert pruned.lower <= pruned.upper + 1e-9


def test_subradius_diagonal_pair():
    sb = spectrum.subradius_bounds(diagonal_mats(), 1)
    assert sb.sub_upper == pytest.approx(3.0, abs=1e-12)
    assert sb.sub_lower <= sb.sub_upper + 1e-9


def test_subradius_shear_bracket():
    sb = spectrum.subradius_bounds([bench.SHEAR_U], 16)
    assert sb.sub_lower >= -0.18
    assert sb.sub_upper <= 0.18
    assert sb.sub_lower <= sb.sub_upper + 1e-9
    assert sb.exhaustive_depth == 16


def test_subradius_singleton_contains_min_eigenvalue():
    g = np.diag([4.0, 0.5])
    sb = spectrum.subradius_bounds([g], 6)
    assert sb.sub_lower - 1e-9 <= np.log(0.5) <= sb.sub_upper + 1e-9


def test_compare_support_diagonal_pair():
    meas = bench.diagonal_pair_measure()
    grid = RateGrid.top(3.0, 3.5, 0.025)
    est = exact_rate(meas, 12, grid)
    approx = spectrum.iterate_spectrum([a.matrix for a in meas.atoms], 12)
    rep = spectrum.compare_support(est, approx, cutoff=10.0)
    assert rep.passed
    assert rep.distance <= grid.pitch


def test_compare_support_point_mass():
    from ldplab.walk import make_measure

    g = bench.rotation(0.1) @ np.diag([4.0, 0.5]) @ bench.rotation(-0.1)
    meas = make_measure(2, [("g", g, 1.0)])
    grid = RateGrid.top(0.5, 2.0, 0.05)
    est = exact_rate(meas, 10, grid)
    approx = spectrum.iterate_spectrum([g], 10)
    rep = spectrum.compare_support(est, approx, cutoff=1.0)
    assert rep.passed


def test_compare_support_requires_exact():
    from ldplab.rate import mc_rate

    meas = bench.diagonal_pair_measure()
    grid = RateGrid.top(3.0, 3.5, 0.05)
    est = mc_rate(meas, 10, 2000, grid, seed=0)
    approx = spectrum.iterate_spectrum([a.matrix for a in meas.atoms], 8)
    with pytest.raises(BadParameters):
        spectrum.compare_support(est, approx, cutoff=10.0)


def test_hull_trend_eventually_decreasing():
    meas = bench.boundary_measure(2)
    approx = spectrum.iterate_spectrum([a.matrix for a in meas.atoms], 9, budget=400_000)
    steps = [lvl.hausdorff_to_previous for lvl in approx.levels[1:]]
    assert steps[-1] <= max(steps[:3]) + 1e-12
