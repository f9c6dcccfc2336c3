"""Rate-function estimation for the scaled Cartan projection of the walk.

Three routes to the finite-horizon rate I_n(cell) = -(1/n) log P(kappa(Y_n)/n
in cell):

  * exact enumeration of the word distribution (with duplicate merging);
  * Monte Carlo binning with Wilson intervals;
  * the Legendre conjugate of the finite-horizon Laplace transform.

Grids are either scalar (top coordinate, i.e. (1/n) log ||Y_n||) or full
chamber vectors for d <= 3.  Cells are closed boxes of half-width delta
around each grid point; samples are assigned to the nearest grid point and
dropped when farther than delta in every coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .enumeration import initial_level, level_step
from .errors import BadParameters, BudgetExceeded
from .geometry import hull_vertices
from .linalg import corrected_log_spectrum
from .walk import kappa_samples, lambda_samples
from .stats import wilson_interval

DEFAULT_BUDGET = 2_000_000

TOP = "top"
CHAMBER = "chamber"


@dataclass(frozen=True)
class RateGrid:
    mode: str  # TOP or CHAMBER
    points: np.ndarray  # (G,) scalars or (G, d) vectors
    delta: float  # cell half-width

    def __post_init__(self):
        if self.mode not in (TOP, CHAMBER):
            raise BadParameters(f"unknown grid mode {self.mode!r}")
        if self.delta <= 0:
            raise BadParameters("cell half-width must be positive")
        pts = np.asarray(self.points, dtype=float)
        if self.mode == TOP:
            if pts.ndim != 1 or np.any(np.diff(pts) <= 0):
                raise BadParameters("top-coordinate grid must be strictly increasing")
        elif pts.ndim != 2 or pts.shape[1] > 3:
            raise BadParameters("chamber grids need (G, d) points with d <= 3")
        object.__setattr__(self, "points", pts)

    @classmethod
    def top(cls, lo, hi, pitch, delta=None):
        """Regular scalar grid; default half-width tiles without gaps."""
        count = int(round((hi - lo) / pitch)) + 1
        pts = lo + pitch * np.arange(count)
        return cls(TOP, pts, pitch / 2 if delta is None else delta)

    @property
    def pitch(self):
        if self.mode == TOP:
            return float(np.min(np.diff(self.points))) if self.points.size > 1 else 2 * self.delta
        d = np.linalg.norm(self.points[:, None, :] - self.points[None, :, :], axis=2)
        np.fill_diagonal(d, np.inf)
        return float(d.min())

    def _coords(self, vectors):
        v = np.asarray(vectors, dtype=float)
        if self.mode == TOP:
            return v[:, 0] if v.ndim == 2 else np.atleast_1d(v)
        return np.atleast_2d(v)

    def cell_masses(self, vectors, weights=None):
        """Total weight landing in each closed cell [point - delta, point + delta].

        Cells with half-width above half the pitch overlap, so a sample may
        contribute to more than one cell; this matches the closed-box cell
        semantics rather than a nearest-point partition.
        """
        x = self._coords(vectors)
        w = np.ones(x.shape[0]) if weights is None else np.asarray(weights, dtype=float)
        slack = self.delta + 1e-12
        if self.mode == TOP:
            order = np.argsort(x)
            xs, ws = x[order], w[order]
            cum = np.concatenate([[0.0], np.cumsum(ws)])
            lo = np.searchsorted(xs, self.points - slack, side="left")
            hi = np.searchsorted(xs, self.points + slack, side="right")
            return cum[hi] - cum[lo]
        masses = np.empty(self.points.shape[0])
        for i, p in enumerate(self.points):
            inside = np.max(np.abs(x - p[None, :]), axis=1) <= slack
            masses[i] = w[inside].sum()
        return masses

    def nearest(self, vector):
        """Index of the grid point nearest to a single kappa/n value."""
        x = self._coords(np.atleast_1d(np.asarray(vector, dtype=float)))
        if self.mode == TOP:
            return int(np.argmin(np.abs(self.points - x[0])))
        return int(np.argmin(np.max(np.abs(self.points - x[0][None, :]), axis=1)))


@dataclass
class RateEstimate:
    grid: RateGrid
    n: int
    values: np.ndarray
    method: str  # ExactEnumeration / MonteCarlo / LegendreDual
    ci_half: np.ndarray | None = None
    infinite: np.ndarray | None = None  # exact: unreachable cells
    zero_hits: np.ndarray | None = None  # MC: value is a one-sided bound
    boundary_warn: np.ndarray | None = None  # Legendre: maximizer on dual box edge
    count: int = 0

    def finite_mask(self):
        mask = np.isfinite(self.values)
        if self.infinite is not None:
            mask &= ~self.infinite
        if self.zero_hits is not None:
            mask &= ~self.zero_hits
        return mask


def exact_distribution(measure, n, budget=DEFAULT_BUDGET):
    """Full word distribution of kappa(Y_n)/n: (vectors, probabilities).

    Words with identical renormalized products are merged with their
    probabilities added, so the state count is often far below |S|^n; the
    budget guards the worst case.
    """
    if n < 1:
        raise BadParameters("n must be at least 1")
    required = len(measure.atoms) ** n
    if required > budget:
        raise BudgetExceeded(required, budget)
    mats = measure.matrices
    weights = measure.weights
    log_dets = measure.log_dets
    states, logs = initial_level(measure.dim)
    probs, aux = np.ones(1), np.zeros(1)
    for _ in range(n):
        states, logs, probs, aux = level_step(
            mats, states, logs, probs, weights, aux, log_dets
        )
    sv = np.linalg.svd(states, compute_uv=False)
    vectors = corrected_log_spectrum(sv, logs, aux) / n
    return vectors, probs


def exact_rate(measure, n, grid, budget=DEFAULT_BUDGET):
    """Exact finite-horizon rate per cell; unreachable cells are +inf."""
    vectors, probs = exact_distribution(measure, n, budget)
    mass = grid.cell_masses(vectors, probs)
    with np.errstate(divide="ignore"):
        values = -np.log(mass) / n
    infinite = mass == 0.0
    values[infinite] = np.inf
    return RateEstimate(
        grid=grid,
        n=n,
        values=values,
        method="ExactEnumeration",
        infinite=infinite,
        count=int(probs.size),
    )


def mc_rate(measure, n, sample_count, grid, seed, workers=1, projection="cartan"):
    """Monte Carlo rate with Wilson intervals mapped through -(1/n) log.

    Zero-hit cells report the one-sided bound (1/n) log(sample_count),
    flagged in ``zero_hits``; only exact enumeration can assert +inf.
    ``projection`` selects the binned statistic: "cartan" bins kappa(Y_n)/n,
    "jordan" bins lambda(Y_n)/n on the same words (same seed, same streams),
    so the two estimates are paired sample by sample.
    """
    if sample_count < 1000:
        raise BadParameters("mc_rate needs at least 1000 samples")
    if projection == "cartan":
        samples = kappa_samples(measure, n, sample_count, seed, workers)
    elif projection == "jordan":
        samples = lambda_samples(measure, n, sample_count, seed, workers)
    else:
        raise BadParameters(f"unknown projection {projection!r}")
    hits = np.round(grid.cell_masses(samples)).astype(int)
    g = grid.points.shape[0]
    values = np.empty(g)
    ci_half = np.full(g, np.nan)
    zero = hits == 0
    values[zero] = np.log(sample_count) / n
    for i in np.nonzero(~zero)[0]:
        lo, hi = wilson_interval(int(hits[i]), sample_count)
        v_lo, v_hi = -np.log(hi) / n, -np.log(lo) / n
        values[i] = -np.log(hits[i] / sample_count) / n
        ci_half[i] = max(values[i] - v_lo, v_hi - values[i])
    return RateEstimate(
        grid=grid,
        n=n,
        values=values,
        method="MonteCarlo",
        ci_half=ci_half,
        zero_hits=zero,
        count=sample_count,
    )


@dataclass
class LaplaceEstimate:
    duals: np.ndarray  # (K,) scalars in top mode, (K, d) otherwise
    values: np.ndarray
    n: int
    method: str  # exact / monte-carlo
    mode: str = TOP


def default_dual_ladder(dim=None, k_max=8):
    """Symmetric geometric ladder 0, +-0.1 * 2^k of scalar duals."""
    base = 0.1 * 2.0 ** np.arange(k_max + 1)
    return np.concatenate([-base[::-1], [0.0], base])


def laplace_transform(measure, n, duals, budget=DEFAULT_BUDGET, sample_count=100_000, seed=0, mode=TOP):
    """Finite-horizon Laplace transform (1/n) log E exp(<dual, kappa(Y_n)>).

    Exact enumeration when |S|^n fits the budget, Monte Carlo otherwise;
    always evaluated in log-sum-exp form.
    """
    duals = np.asarray(duals, dtype=float)
    exact = len(measure.atoms) ** n <= budget
    if exact:
        vectors, probs = exact_distribution(measure, n, budget)
        log_w = np.log(probs)
    else:
        vectors = kappa_samples(measure, n, sample_count, seed)
        log_w = np.full(vectors.shape[0], -np.log(vectors.shape[0]))
    if mode == TOP:
        scores = n * duals[:, None] * vectors[None, :, 0]
    else:
        scores = n * (duals @ vectors.T)
    values = logsumexp(scores + log_w[None, :], axis=1) / n
    return LaplaceEstimate(
        duals=duals,
        values=values,
        n=n,
        method="exact" if exact else "monte-carlo",
        mode=mode,
    )


def legendre_conjugate(laplace, grid):
    """Pointwise Legendre conjugate sup_dual (<dual, x> - Laplace(dual)).

    Convex on the grid by construction.  A per-point warning is raised when
    the maximizing dual sits on the boundary of the supplied dual range,
    meaning the true supremum may lie outside it.
    """
    if (laplace.mode == TOP) != (grid.mode == TOP):
        raise BadParameters("laplace and grid modes disagree")
    duals = laplace.duals
    if grid.mode == TOP:
        scores = duals[None, :] * grid.points[:, None] - laplace.values[None, :]
        extreme = np.abs(duals) >= np.max(np.abs(duals)) - 1e-12
    else:
        scores = grid.points @ duals.T - laplace.values[None, :]
        mags = np.abs(duals).max(axis=1)
        extreme = mags >= mags.max() - 1e-12
    best = scores.argmax(axis=1)
    return RateEstimate(
        grid=grid,
        n=laplace.n,
        values=scores[np.arange(grid.points.shape[0]), best],
        method="LegendreDual",
        boundary_warn=extreme[best],
        count=duals.shape[0],
    )


@dataclass
class ConvexityViolation:
    left: int
    mid: int
    right: int
    excess: float


def convexity_report(estimate, extra_tolerance=0.0):
    """Midpoint convexity check on finite cells; empty list means pass.

    The tolerance combines the cells' confidence half-widths with a
    Lipschitz slack 2 * delta * (max adjacent slope) covering midpoints
    that do not land exactly on a grid point.
    """
    if estimate.method == "LegendreDual":
        return []
    grid = estimate.grid
    mask = estimate.finite_mask()
    idx = np.nonzero(mask)[0]
    if idx.size < 3:
        return []
    vals = estimate.values
    ci = estimate.ci_half if estimate.ci_half is not None else np.zeros_like(vals)
    pts = grid.points
    violations = []
    for ii, i in enumerate(idx):
        for j in idx[ii + 2:]:
            mid_point = (pts[i] + pts[j]) / 2.0
            m = grid.nearest(mid_point)
            if not mask[m] or m == i or m == j:
                continue
            # Lipschitz slack for midpoints that miss the grid, from the
            # chord slope of this triple's endpoints
            gap = np.linalg.norm(np.atleast_1d(pts[j] - pts[i]))
            slope = abs(vals[j] - vals[i]) / gap if gap > 0 else 0.0
            slack = 2.0 * grid.delta * slope + extra_tolerance
            tol = (np.nan_to_num(ci[i]) + np.nan_to_num(ci[j])) / 2.0 + np.nan_to_num(ci[m]) + slack
            excess = vals[m] - (vals[i] + vals[j]) / 2.0 - tol
            if excess > 0:
                violations.append(ConvexityViolation(int(i), int(m), int(j), float(excess)))
    return violations


@dataclass
class SupportEstimate:
    cells: np.ndarray  # retained grid points
    hull: np.ndarray  # interval endpoints (top) or hull vertices (chamber)
    cutoff: float


def support_estimate(estimate, cutoff):
    """Cells with finite rate at most ``cutoff`` and their hull."""
    if cutoff <= 0:
        raise BadParameters("cutoff must be positive")
    mask = estimate.finite_mask() & (estimate.values <= cutoff)
    pts = estimate.grid.points[mask]
    if pts.size == 0:
        hull = np.empty((0, 1))
    elif estimate.grid.mode == TOP:
        hull = np.array([[pts.min()], [pts.max()]])
    else:
        hull = hull_vertices(pts)
    return SupportEstimate(cells=pts, hull=hull, cutoff=cutoff)
