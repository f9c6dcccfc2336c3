"""Verification suite: the ten desk-scale checks shipped with the package.

Each criterion is a function returning a CriterionResult with a pass flag
and a short human-readable detail line.  The CLI `suite` command and the
test suite both run these; criteria are deterministic given their fixed
seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import benchmarks as bench
from .linalg import (
    cartan_projection,
    jordan_projection,
    exterior_power,
    fs_distance,
    canonical_rep,
    operator_norm,
    spectral_radius,
)
from .proximal import analyze_proximal, certify_r_eps, is_schottky, product_spectral_deviation
from .rate import (
    RateGrid,
    exact_rate,
    mc_rate,
    laplace_transform,
    legendre_conjugate,
    default_dual_ladder,
)
from .spectrum import compare_support, iterate_spectrum, jsr_bounds, subradius_bounds
from .walk import (
    deviation_decay,
    kappa_lambda_gap_experiment,
    kappa_samples,
    lyapunov_estimate,
    walk_product,
    sample_words,
)


@dataclass
class CriterionResult:
    name: str
    passed: bool
    details: str


def _result(name, checks, details):
    return CriterionResult(name=name, passed=all(ok for ok, _ in checks), details=details)


def criterion_1():
    """Commuting-reduction Cramer check on the two-point diagonal measure."""
    meas = bench.diagonal_pair_measure()
    grid = RateGrid.top(3.0, 3.5, 0.025)
    est = exact_rate(meas, 20, grid)
    v0 = est.values[grid.nearest(3.0)]
    v25 = est.values[grid.nearest(3.25)]
    target25 = math.log(2) - math.log(math.comb(20, 10)) / 20
    err0 = abs(v0 - math.log(2))
    err25 = abs(v25 - target25)
    worst_kl = 0.0
    for i, p in enumerate(grid.points):
        frac = (p - 3.0) / 0.5
        if not 0.0 < frac < 1.0 or not np.isfinite(est.values[i]):
            continue
        kl = math.log(2) + frac * math.log(frac) + (1 - frac) * math.log(1 - frac)
        worst_kl = max(worst_kl, abs(est.values[i] - kl))
    ok = err0 <= 1e-9 and err25 <= 1e-9 and worst_kl <= 0.1
    return CriterionResult(
        "cramer-exact-rate",
        ok,
        f"|I(3.0)-log2|={err0:.2e} |I(3.25)-target|={err25:.2e} "
        f"max KL deviation={worst_kl:.4f}",
    )


def criterion_2():
    """Legendre conjugate of the Laplace transform against the exact rate."""
    meas = bench.diagonal_pair_measure()
    n = 16
    grid = RateGrid.top(3.0, 3.5, 0.07)
    exact = exact_rate(meas, n, grid)
    lap = laplace_transform(meas, n, default_dual_ladder())
    dual = legendre_conjugate(lap, grid)
    diffs = []
    for i, p in enumerate(grid.points):
        if not 3.0 < p < 3.5 or not exact.finite_mask()[i]:
            continue
        if dual.boundary_warn is not None and dual.boundary_warn[i]:
            continue
        diffs.append(abs(exact.values[i] - dual.values[i]))
    sup = max(diffs) if diffs else np.inf
    ok = bool(diffs) and sup <= 0.1
    return CriterionResult(
        "legendre-identification",
        ok,
        f"sup |I_exact - I_dual| over {len(diffs)} interior cells = {sup:.4f}",
    )


def criterion_3():
    """mc_rate has its minimum at the Lyapunov vector, with a small value."""
    meas = bench.diagonal_pair_measure()
    lyap = lyapunov_estimate(meas, 100, 2000, seed=5)
    grid = RateGrid.top(3.0, 3.5, 0.025, delta=0.0375)
    est = mc_rate(meas, 30, 100_000, grid, seed=6)
    finite = est.finite_mask()
    vals = np.where(finite, est.values, np.inf)
    argmin = int(np.argmin(vals))
    dist = abs(grid.points[argmin] - lyap.vector[0])
    minimum = float(vals[argmin])
    ok = dist <= grid.pitch + 1e-12 and minimum <= 0.02
    return CriterionResult(
        "unique-zero-at-lyapunov",
        ok,
        f"argmin cell {grid.points[argmin]:.3f} vs lyapunov {lyap.vector[0]:.3f} "
        f"(pitch {grid.pitch}); min value {minimum:.4f}",
    )


def criterion_4():
    """Exponential decay of deviations off the Lyapunov vector."""
    meas = bench.diagonal_pair_measure()
    eps = 0.2
    lyap = np.array([3.25, -3.25])
    points = deviation_decay(meas, lyap, eps, (10, 15, 20), 100_000, seed=8)
    positive = all(p.rate > 0 for p in points)
    # increasing trend, tolerating dips within 2 CI of the previous point
    trend = True
    for a, b in zip(points, points[1:]):
        if a.zero_hits or b.zero_hits:
            continue
        ci = (a.rate_hi - a.rate_lo) + (b.rate_hi - b.rate_lo)
        if b.rate < a.rate - 2 * ci:
            trend = False
    # exact binomial tail at n=20: deviation norm 0.5*sqrt(2)*|k/n - 1/2| > eps
    n = 20
    tail = sum(
        math.comb(n, k)
        for k in range(n + 1)
        if abs(k / n - 0.5) * 0.5 * math.sqrt(2) > eps
    ) / 2**n
    exact = -math.log(tail) / n
    p20 = points[-1]
    half = (p20.rate_hi - p20.rate_lo) / 2 if np.isfinite(p20.rate_hi) else np.inf
    close = (not p20.zero_hits) and abs(p20.rate - exact) <= 3 * half
    ok = positive and trend and close
    return CriterionResult(
        "deviation-decay",
        ok,
        f"rates={[round(float(p.rate), 4) for p in points]} exact(n=20)={exact:.4f} "
        f"|diff|={abs(p20.rate - exact):.4f} 3CI={3 * half:.4f}",
    )


def criterion_5():
    """Effective support of the rate matches the joint spectrum."""
    meas = bench.diagonal_pair_measure()
    grid = RateGrid.top(3.0, 3.5, 0.025)
    est = exact_rate(meas, 20, grid)
    spec = iterate_spectrum([a.matrix for a in meas.atoms], 12)
    rep1 = compare_support(est, spec, cutoff=10.0)

    meas2 = bench.boundary_measure(2)
    grid2 = RateGrid.top(0.0, 3.5, 0.05)
    est2 = exact_rate(meas2, 9, grid2)
    spec2 = iterate_spectrum([a.matrix for a in meas2.atoms], 9, budget=400_000)
    rep2 = compare_support(est2, spec2, cutoff=10.0)
    ok = rep1.passed and rep2.passed
    return CriterionResult(
        "support-identification",
        ok,
        f"diagonal pair: d={rep1.distance:.4f} thr={rep1.threshold:.4f}; "
        f"boundary K=2: d={rep2.distance:.4f} thr={rep2.threshold:.4f}",
    )


def criterion_6():
    """Truncated boundary-explosion family: jsr, subradius, interior rate."""
    mats4 = [a.matrix for a in bench.boundary_measure(4).atoms]
    jb = jsr_bounds(mats4, 1)
    jsr_ok = abs(jb.lower - 3.75) <= 1e-6 and abs(jb.upper - 3.75) <= 1e-6

    sb = subradius_bounds([bench.SHEAR_U], 16)
    sub_ok = -0.18 <= sb.sub_lower and sb.sub_upper <= 0.18

    meas2 = bench.boundary_measure(2)
    grid = RateGrid.top(2.9, 3.1, 0.05)
    est = exact_rate(meas2, 12, grid, budget=17_000_000)
    v = est.values[grid.nearest(3.0)]
    bound = -math.log(min(a.weight for a in meas2.atoms))
    rate_ok = np.isfinite(v) and v <= bound + 1e-9
    ok = jsr_ok and sub_ok and rate_ok
    return CriterionResult(
        "boundary-family",
        ok,
        f"jsr=[{jb.lower:.6f},{jb.upper:.6f}] "
        f"sub=[{sb.sub_lower:.4f},{sb.sub_upper:.4f}] "
        f"I_12(3.0)={v:.4f} <= {bound:.4f}",
    )


def criterion_7():
    """Certified proximal matrices: norm dominates lambda_1; ratio floor rises as eps falls."""
    rng = np.random.default_rng(42)
    count = 1000
    r = 0.1
    strengths = rng.uniform(7.5, 16.0, count)
    shears = (16.5 - strengths) * 0.4
    candidates = []
    for s, t in zip(strengths, shears):
        q = bench.rotation(rng.uniform(0.0, np.pi))
        a = np.array([[np.exp(s), t * np.exp(s)], [0.0, 1.0]])
        candidates.append(q @ a @ q.T)
    norm_ok = True
    min_ratios = []
    counts = []
    for j, eps in enumerate((0.1, 0.03, 0.01)):
        ratios = []
        for i, m in enumerate(candidates):
            cert = certify_r_eps(m, r, eps, 200, seed=1000 * j + i)
            if not cert.certified:
                continue
            lam1 = float(np.exp(jordan_projection(m)[0]))
            norm = operator_norm(m)
            if lam1 > norm * (1 + 1e-12):
                norm_ok = False
            ratios.append(lam1 / norm)
        counts.append(len(ratios))
        min_ratios.append(min(ratios) if ratios else np.inf)
    monotone = all(b >= a - 1e-12 for a, b in zip(min_ratios, min_ratios[1:]))
    nonempty = all(c > 0 for c in counts)
    ok = norm_ok and monotone and nonempty
    return CriterionResult(
        "proximality-ratio",
        ok,
        f"certified counts={counts} min ratios="
        f"{[round(x, 4) for x in min_ratios]} norm domination={norm_ok}",
    )


def _product_is_proximal(factors):
    """Eigen-gap simplicity test on a per-factor renormalized product.

    Proximality is scale invariant, so the renormalized product carries the
    same verdict while staying inside floating-point range.
    """
    y = np.eye(factors[0].shape[0])
    for f in factors:
        y = f @ y
        y /= np.max(np.abs(y))
    mods = np.sort(np.abs(np.linalg.eigvals(y)))[::-1]
    return mods[0] - mods[1] > 1e-9 * mods[0]


def criterion_8():
    """Schottky pair: exponent products stay proximal with bounded deviation."""
    g1, g2 = bench.schottky_pair()
    cert = is_schottky([g1, g2], theta=(1,), r=0.1, epsilon=0.05, sample_count=1000, seed=9)
    base = abs(product_spectral_deviation([g1, g2], [1, 1]))
    worst = 0.0
    all_proximal = True
    for k in range(1, 6):
        for m in range(1, 6):
            if not _product_is_proximal([g1] * k + [g2] * m):
                all_proximal = False
            dev = abs(product_spectral_deviation([g1, g2], [k, m]))
            worst = max(worst, dev)
    ok = cert.verdict and all_proximal and worst <= 2 * base + 1e-6
    return CriterionResult(
        "schottky-product-control",
        ok,
        f"schottky={cert.verdict} all 25 products proximal={all_proximal} "
        f"max |deviation|={worst:.4f} vs 2x base={2 * base:.4f}",
    )


def criterion_9():
    """Cartan-Jordan gap tail decays in l; paired rate estimates agree."""
    graded = bench.graded_schottky_measure()
    cert = is_schottky(
        [a.matrix for a in graded.atoms], theta=(1,), r=8e-4, epsilon=8e-4,
        sample_count=1000, seed=3,
    )
    exp = kappa_lambda_gap_experiment(graded, 20, (5, 10, 15), 0.5, 20_000, seed=7)
    freqs = [p.frequency for p in exp.points]
    decreasing = all(a >= b for a, b in zip(freqs, freqs[1:])) and freqs[0] > 0
    slope_ok = exp.slope + 2 * exp.slope_stderr < 0

    pair = bench.tilted_pair_measure()
    grid = RateGrid.top(3.0, 3.5, 0.025)
    rk = mc_rate(pair, 20, 100_000, grid, seed=11)
    rl = mc_rate(pair, 20, 100_000, grid, seed=11, projection="jordan")
    agree = True
    worst = 0.0
    for i, p in enumerate(grid.points):
        if not 3.0 < p < 3.5:
            continue
        if not (rk.finite_mask()[i] and rl.finite_mask()[i]):
            continue
        diff = abs(rk.values[i] - rl.values[i])
        tol = 3 * (np.nan_to_num(rk.ci_half[i]) + np.nan_to_num(rl.ci_half[i]))
        worst = max(worst, diff - tol)
        if diff > tol:
            agree = False
    ok = cert.verdict and decreasing and slope_ok and agree
    return CriterionResult(
        "kappa-lambda-pairing",
        ok,
        f"exceedance={[round(f, 4) for f in freqs]} slope={exp.slope:.3f}"
        f"+-{exp.slope_stderr:.3f}; paired rates agree={agree} "
        f"(worst excess {worst:.2e})",
    )


def _random_invertibles(rng, count, dim):
    out = []
    while len(out) < count:
        m = rng.standard_normal((count, dim, dim))
        sv = np.linalg.svd(m, compute_uv=False)
        good = sv[:, -1] > 1e-6 * sv[:, 0]
        out.extend(m[good])
    return np.stack(out[:count])


def criterion_10():
    """Module-level invariants over random inputs."""
    rng = np.random.default_rng(2024)
    failures = []

    mats = _random_invertibles(rng, 10_000, 3)
    sv = np.linalg.svd(mats, compute_uv=False)
    kappa = np.log(sv)
    mods = -np.sort(-np.abs(np.linalg.eigvals(mats)), axis=1)
    lam = np.log(mods)
    # Weyl majorization: partial sums of lambda never exceed those of kappa
    if not np.all(np.cumsum(lam, axis=1) <= np.cumsum(kappa, axis=1) + 1e-8):
        failures.append("majorization")
    # subadditivity of kappa_1 under products, via a random pairing
    pairs = mats[:5000] @ mats[5000:]
    sv_p = np.linalg.svd(pairs, compute_uv=False)
    if not np.all(np.log(sv_p[:, 0]) <= kappa[:5000, 0] + kappa[5000:, 0] + 1e-8):
        failures.append("subadditivity")
    # functoriality: top singular value of the second exterior power
    for m in mats[:200]:
        k2 = cartan_projection(exterior_power(m, 2))
        k1 = cartan_projection(m)
        if abs(k2[0] - (k1[0] + k1[1])) > 1e-6:
            failures.append("exterior-power")
            break
    # jordan projection of powers; needs well-conditioned matrices with
    # separated eigenvalue moduli so M^5 stays inside the invertibility
    # tolerance and the moduli are resolvable
    checked = 0
    for m in mats:
        if checked >= 200:
            break
        svm = np.linalg.svd(m, compute_uv=False)
        mods_m = np.sort(np.abs(np.linalg.eigvals(m)))
        if svm[-1] < 1e-2 * svm[0] or np.min(np.diff(mods_m)) < 0.05 * mods_m[-1]:
            continue
        checked += 1
        lam1 = jordan_projection(m)
        for k in (2, 5):
            lk = jordan_projection(np.linalg.matrix_power(m, k))
            if np.max(np.abs(lk - k * lam1)) > 1e-6:
                failures.append("jordan-power")
                break
        if "jordan-power" in failures:
            break

    # metric axioms on 1000 random projective triples
    xs = np.stack([canonical_rep(v) for v in rng.standard_normal((3000, 3))])
    a, b, c = xs[:1000], xs[1000:2000], xs[2000:]
    dab = np.array([fs_distance(p, q) for p, q in zip(a, b)])
    dbc = np.array([fs_distance(p, q) for p, q in zip(b, c)])
    dac = np.array([fs_distance(p, q) for p, q in zip(a, c)])
    if np.any(dab < 0) or np.any(dab > 1 + 1e-12):
        failures.append("metric-range")
    if not np.all(dac <= dab + dbc + 1e-9):
        failures.append("triangle-inequality")
    # self distance is sqrt(1 - c^2) with c = 1 up to roundoff, so half
    # the working precision is the best achievable
    if any(fs_distance(p, p) > 1e-7 for p in a[:100]):
        failures.append("metric-identity")

    # renormalization exactness against direct products; mild atoms keep
    # the unrenormalized length-12 product inside the invertibility
    # tolerance so the direct route stays computable
    from .walk import make_measure

    mild = make_measure(
        2,
        [
            ("D", np.diag([np.exp(0.4), np.exp(-0.4)]), 0.4),
            ("R", bench.rotation(0.3) @ np.diag([1.2, 0.7]) @ bench.rotation(-0.3), 0.3),
            ("U", bench.SHEAR_U, 0.3),
        ],
    )
    meas = bench.diagonal_pair_measure()
    for measure in (mild,):
        words = sample_words(measure, 12, 50, seed=13)
        for w in words:
            state = walk_product(measure, w)
            direct = np.eye(2)
            for idx in w:
                direct = measure.atoms[idx].matrix @ direct
            if np.max(np.abs(state.cartan() - cartan_projection(direct))) > 1e-8:
                failures.append("renormalization")
                break

    # determinism across worker counts
    base = kappa_samples(meas, 10, 500, seed=21, workers=1)
    for workers in (2, 8):
        again = kappa_samples(meas, 10, 500, seed=21, workers=workers)
        if not np.array_equal(base, again):
            failures.append(f"determinism-w{workers}")
    ok = not failures
    return CriterionResult(
        "invariant-suites",
        ok,
        "all invariant bundles passed" if ok else f"failed: {failures}",
    )


CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
)


def run_suite():
    return [fn() for fn in CRITERIA]
