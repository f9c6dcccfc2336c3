"""Joint spectrum approximation and joint spectral radius brackets.

The joint spectrum of a finite matrix set S is the Hausdorff limit of the
scaled Cartan clouds (1/n) kappa(S^n); its extremes along the top
coordinate are the joint spectral radius and subradius.  This module
computes the clouds exactly by merged enumeration, tracks Hausdorff
distances between consecutive scaled hulls, and brackets the radius and
subradius with depth-limited, submultiplicativity-sound bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .enumeration import initial_level, level_step
from .errors import BadParameters, BudgetExceeded, DimensionMismatch
from .geometry import hausdorff, hull_vertices, interval_hausdorff
from .linalg import corrected_log_spectrum
from .rate import TOP, CHAMBER, support_estimate

DEFAULT_BUDGET = 2_000_000


@dataclass
class DepthLevel:
    n: int
    points: np.ndarray  # (N,) top scalars or (N, d) chamber vectors
    hull: np.ndarray
    hausdorff_to_previous: float


@dataclass
class SpectrumApproximation:
    mode: str
    levels: list = field(default_factory=list)

    @property
    def deepest(self):
        return self.levels[-1]


def _stack_matrices(s):
    mats = np.stack([np.asarray(m, dtype=float) for m in s])
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise DimensionMismatch("expected a list of square matrices of equal size")
    return mats


def _log_dets(mats):
    return np.array([np.linalg.slogdet(m)[1] for m in mats])


def iterate_spectrum(s, n_max, budget=DEFAULT_BUDGET, mode=TOP):
    """Exact scaled Cartan clouds of S^n for n <= n_max, with merging.

    Chamber mode keeps full kappa vectors and is limited to d <= 3.
    """
    mats = _stack_matrices(s)
    d = mats.shape[1]
    if mode == CHAMBER and d > 3:
        raise BadParameters("chamber mode supports d <= 3 only")
    required = sum(len(s) ** n for n in range(1, n_max + 1))
    if required > budget:
        raise BudgetExceeded(required, budget)
    states, logs = initial_level(d)
    aux = np.zeros(1)
    log_dets = _log_dets(mats)
    approx = SpectrumApproximation(mode=mode)
    prev_hull = None
    for n in range(1, n_max + 1):
        states, logs, _, aux = level_step(mats, states, logs, aux=aux, aux_atoms=log_dets)
        vectors = corrected_log_spectrum(
            np.linalg.svd(states, compute_uv=False), logs, aux
        ) / n
        if mode == TOP:
            pts = np.unique(np.round(vectors[:, 0], 12))
            hull = np.array([pts.min(), pts.max()])
            dist = 0.0 if prev_hull is None else interval_hausdorff(hull, prev_hull)
        else:
            pts = vectors
            hull = hull_vertices(pts)
            dist = 0.0 if prev_hull is None else hausdorff(hull, prev_hull)
        approx.levels.append(DepthLevel(n, pts, hull, float(dist)))
        prev_hull = hull
    return approx


@dataclass
class JsrBounds:
    depth: int
    lower: float  # best (1/k) log rho over visited words
    upper: float  # min over k of (1/k) log (max-norm bound at depth k)
    visited: int
    lower_by_depth: list = field(default_factory=list)
    upper_by_depth: list = field(default_factory=list)


def _log_norms(states, logs):
    return np.log(np.linalg.svd(states, compute_uv=False)[:, 0]) + logs


def _log_radii(states, logs):
    mods = np.abs(np.linalg.eigvals(states)).max(axis=1)
    out = np.full(mods.shape, -np.inf)
    pos = mods > 0
    out[pos] = np.log(mods[pos]) + logs[pos]
    return out


def jsr_bounds(s, max_depth, prune_margin=0.5, budget=200_000):
    """Branch-and-bound bracket for the joint spectral radius (log scale).

    Lower bounds come from spectral radii of visited words and only
    improve with more visits; the per-depth norm ceiling stays valid under
    pruning because every pruned prefix contributes the submultiplicative
    bound ||w|| * (max atom norm)^(remaining depth) to later ceilings.
    """
    if max_depth < 1:
        raise BadParameters("max_depth must be at least 1")
    mats = _stack_matrices(s)
    log_atom_norm_max = float(np.max(np.log(np.linalg.svd(mats, compute_uv=False)[:, 0])))
    states, logs = initial_level(mats.shape[1])
    lower = -np.inf
    upper = np.inf
    visited = 0
    pruned = []  # (depth, log norm) of abandoned prefixes
    lower_by_depth, upper_by_depth = [], []
    for k in range(1, max_depth + 1):
        states, logs, _, _ = level_step(mats, states, logs)
        visited += states.shape[0]
        log_norms = _log_norms(states, logs)
        lower = max(lower, float(np.max(_log_radii(states, logs)) / k))
        ceiling = float(np.max(log_norms))
        for depth_p, log_norm_p in pruned:
            ceiling = max(ceiling, log_norm_p + (k - depth_p) * log_atom_norm_max)
        upper = min(upper, ceiling / k)
        lower_by_depth.append(lower)
        upper_by_depth.append(upper)
        if k == max_depth:
            break
        keep = log_norms / k >= lower - prune_margin
        if np.count_nonzero(keep) * mats.shape[0] > budget:
            order = np.argsort(log_norms)[::-1]
            cap = max(1, budget // mats.shape[0])
            keep = np.zeros(log_norms.size, dtype=bool)
            keep[order[:cap]] = True
        for i in np.nonzero(~keep)[0]:
            pruned.append((k, float(log_norms[i])))
        states, logs = states[keep], logs[keep]
    return JsrBounds(
        depth=max_depth,
        lower=lower,
        upper=upper,
        visited=visited,
        lower_by_depth=lower_by_depth,
        upper_by_depth=upper_by_depth,
    )


@dataclass
class SubradiusBounds:
    depth: int
    sub_lower: float
    sub_upper: float
    exhaustive_depth: int  # deepest level enumerated in full


def subradius_bounds(s, max_depth, budget=200_000):
    """Two-sided bracket for the joint spectral subradius (log scale).

    The lower bound uses superadditivity of the smallest singular value
    and therefore needs the true per-depth minimum: it only advances while
    full (merged) enumeration fits the budget.  The upper bound is valid
    for *any* word, so past the exhaustive horizon it keeps improving
    along pure powers of each atom.
    """
    if max_depth < 1:
        raise BadParameters("max_depth must be at least 1")
    mats = _stack_matrices(s)
    log_dets = _log_dets(mats)
    states, logs = initial_level(mats.shape[1])
    aux = np.zeros(1)
    sub_lower, sub_upper = -np.inf, np.inf
    exhaustive_depth = 0
    for k in range(1, max_depth + 1):
        if states is not None and states.shape[0] * mats.shape[0] <= budget:
            states, logs, _, aux = level_step(mats, states, logs, aux=aux, aux_atoms=log_dets)
            sv = np.linalg.svd(states, compute_uv=False)
            kappas = corrected_log_spectrum(sv, logs, aux)
            log_sigma_min = kappas[:, -1]
            log_norms = kappas[:, 0]
            sub_lower = max(sub_lower, float(np.min(log_sigma_min)) / k)
            sub_upper = min(
                sub_upper,
                float(np.min(log_norms)) / k,
                float(np.min(_log_radii(states, logs))) / k,
            )
            exhaustive_depth = k
        else:
            states = None
            # pure atom powers still give honest upper bounds
            for m in mats:
                y, log_scale = np.eye(m.shape[0]), 0.0
                for j in range(1, k + 1):
                    y = m @ y
                    sc = np.max(np.abs(y))
                    y /= sc
                    log_scale += np.log(sc)
                sv = np.linalg.svd(y, compute_uv=False)
                sub_upper = min(sub_upper, (np.log(sv[0]) + log_scale) / k)
                mods = np.abs(np.linalg.eigvals(y))
                if mods.max() > 0:
                    sub_upper = min(sub_upper, (np.log(mods.max()) + log_scale) / k)
    return SubradiusBounds(
        depth=max_depth,
        sub_lower=float(sub_lower),
        sub_upper=float(sub_upper),
        exhaustive_depth=exhaustive_depth,
    )


@dataclass
class SupportComparison:
    distance: float
    threshold: float
    passed: bool
    rate_hull: np.ndarray
    spectrum_hull: np.ndarray


def compare_support(rate_estimate, spectrum_approx, cutoff):
    """Hausdorff distance between the rate support hull and the deepest cloud hull.

    Passes when the distance is at most the grid pitch plus the deepest
    level's Hausdorff step (the resolution of both approximations).
    """
    if rate_estimate.method != "ExactEnumeration":
        raise BadParameters("compare_support needs an exact rate estimate")
    if (rate_estimate.grid.mode == TOP) != (spectrum_approx.mode == TOP):
        raise DimensionMismatch("grid and spectrum modes disagree")
    sup = support_estimate(rate_estimate, cutoff)
    deepest = spectrum_approx.deepest
    if spectrum_approx.mode == TOP:
        if sup.hull.size == 0:
            raise BadParameters("empty support estimate")
        dist = interval_hausdorff(
            (sup.hull.min(), sup.hull.max()), (deepest.hull[0], deepest.hull[1])
        )
    else:
        dist = hausdorff(sup.hull, deepest.hull)
    threshold = rate_estimate.grid.pitch + deepest.hausdorff_to_previous
    return SupportComparison(
        distance=float(dist),
        threshold=float(threshold),
        passed=bool(dist <= threshold),
        rate_hull=sup.hull,
        spectrum_hull=deepest.hull,
    )
