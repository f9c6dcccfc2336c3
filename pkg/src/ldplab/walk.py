"""Random walk engine for finitely supported matrix measures.

Products are taken left: Y_n = X_n ... X_1, with the word stored oldest
first and applied right to left.  Running products are renormalized after
every multiplication so the maximum absolute entry is exactly 1; the
removed scalar is accumulated in log scale.  A scalar rescaling shifts the
Cartan projection uniformly, so kappa(Y_n) is recovered exactly as
kappa(scaled) + log_scale * (1, ..., 1).

All sampling is driven by counter-based streams (see :mod:`ldplab.rng`):
sample ``s`` of any experiment is a pure function of ``(seed, s)``, so
results do not depend on evaluation order or worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import BadParameters, SingularProduct, ValidationError
from .rng import uniform_block
from .stats import Z95, wilson_interval

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Atom:
    label: str
    matrix: np.ndarray
    weight: float


@dataclass(frozen=True)
class MeasureSpec:
    """A finitely supported probability measure on invertible matrices."""

    dim: int
    atoms: tuple

    def __post_init__(self):
        if not self.atoms:
            raise ValidationError("measure needs at least one atom")
        labels = [a.label for a in self.atoms]
        if len(set(labels)) != len(labels):
            raise ValidationError("atom labels must be unique")
        total = 0.0
        for a in self.atoms:
            if a.weight <= 0:
                raise ValidationError(f"atom {a.label!r} has non-positive weight")
            m = linalg.as_matrix(a.matrix)
            if m.shape[0] != self.dim:
                raise ValidationError(f"atom {a.label!r} has dimension {m.shape[0]}, expected {self.dim}")
            total += a.weight
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"weights sum to {total!r}, not 1")

    @property
    def weights(self):
        return np.array([a.weight for a in self.atoms])

    @property
    def matrices(self):
        return np.stack([np.asarray(a.matrix, float) for a in self.atoms])

    @property
    def log_dets(self):
        """log |det| per atom; tracked exactly along products."""
        return np.array(
            [np.linalg.slogdet(np.asarray(a.matrix, float))[1] for a in self.atoms]
        )


def make_measure(dim, entries):
    """Build a MeasureSpec from (label, matrix, weight) triples."""
    atoms = tuple(
        Atom(label, np.asarray(m, dtype=float), float(w)) for label, m, w in entries
    )
    return MeasureSpec(int(dim), atoms)


@dataclass
class WalkState:
    scaled: np.ndarray  # max absolute entry exactly 1
    log_scale: float
    step_count: int
    log_det: float = 0.0  # exact log |det| of the full product

    def cartan(self):
        """kappa of the full, unrenormalized product.

        Long products are legitimately ill-conditioned; the smallest
        component is recovered from the exactly tracked determinant rather
        than from the (precision-starved) smallest singular value.
        """
        sv = np.linalg.svd(self.scaled, compute_uv=False)
        return linalg.corrected_log_spectrum(sv, self.log_scale, self.log_det)

    def jordan(self):
        mods = np.sort(np.abs(np.linalg.eigvals(self.scaled)))[::-1]
        return linalg.corrected_log_spectrum(mods, self.log_scale, self.log_det)


def sample_word(measure, n, stream_index, seed):
    """Length-n iid word of atom indices for one sample stream."""
    if n < 1:
        raise BadParameters("word length must be at least 1")
    u = uniform_block(seed, stream_index, 1, n)[0]
    cum = np.cumsum(measure.weights)
    cum[-1] = 1.0
    return np.searchsorted(cum, u, side="right").astype(np.intp)


def sample_words(measure, n, sample_count, seed, stream_start=0):
    """Words for streams stream_start .. stream_start+sample_count-1."""
    u = uniform_block(seed, stream_start, sample_count, n)
    cum = np.cumsum(measure.weights)
    cum[-1] = 1.0
    return np.searchsorted(cum, u, side="right").astype(np.intp)


def walk_product(measure, word):
    """Renormalized product of the atoms along ``word`` (oldest first)."""
    word = np.asarray(word, dtype=np.intp)
    if word.size == 0:
        raise BadParameters("word must be non-empty")
    if np.any(word < 0) or np.any(word >= len(measure.atoms)):
        raise BadParameters("word index out of range")
    mats = measure.matrices
    log_dets = measure.log_dets
    y = np.eye(measure.dim)
    log_scale = 0.0
    log_det = 0.0
    for idx in word:
        y = mats[idx] @ y
        m = np.max(np.abs(y))
        if not np.isfinite(m) or m == 0.0:
            raise SingularProduct("running product collapsed")
        y /= m
        log_scale += np.log(m)
        log_det += log_dets[idx]
    return WalkState(
        scaled=y, log_scale=log_scale, step_count=int(word.size), log_det=log_det
    )


def _batch_products(mats, words):
    """Scaled products for a (S, n) word block; returns (S, d, d) and (S,)."""
    s = words.shape[0]
    d = mats.shape[1]
    y = np.broadcast_to(np.eye(d), (s, d, d)).copy()
    log_scale = np.zeros(s)
    for j in range(words.shape[1]):
        y = mats[words[:, j]] @ y
        m = np.max(np.abs(y), axis=(1, 2))
        if not np.all(np.isfinite(m)) or np.any(m == 0.0):
            raise SingularProduct("running product collapsed")
        y /= m[:, None, None]
        log_scale += np.log(m)
    return y, log_scale


def _run_streams(measure, n, sample_count, seed, workers, kinds):
    """Per-sample kappa and/or lambda vectors of Y_n / n, in stream order."""
    if n < 1 or sample_count < 1:
        raise BadParameters("n and sample_count must be positive")
    mats = measure.matrices
    log_dets = measure.log_dets

    def one_chunk(start, count):
        words = sample_words(measure, n, count, seed, stream_start=start)
        y, log_scale = _batch_products(mats, words)
        log_det = log_dets[words].sum(axis=1)
        out = {}
        if "kappa" in kinds:
            sv = np.linalg.svd(y, compute_uv=False)
            out["kappa"] = linalg.corrected_log_spectrum(sv, log_scale, log_det) / n
        if "lambda" in kinds:
            mods = np.sort(np.abs(np.linalg.eigvals(y)), axis=1)[:, ::-1]
            out["lambda"] = linalg.corrected_log_spectrum(mods, log_scale, log_det) / n
        return out

    workers = max(1, int(workers))
    if workers == 1:
        chunks = [one_chunk(0, sample_count)]
    else:
        bounds = np.linspace(0, sample_count, workers + 1).astype(int)
        spans = [(a, b - a) for a, b in zip(bounds, bounds[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda ab: one_chunk(*ab), spans))
    return {k: np.concatenate([c[k] for c in chunks]) for k in kinds}


def kappa_samples(measure, n, sample_count, seed, workers=1):
    """sample_count draws of kappa(Y_n)/n, shape (sample_count, d)."""
    return _run_streams(measure, n, sample_count, seed, workers, ("kappa",))["kappa"]


def lambda_samples(measure, n, sample_count, seed, workers=1):
    """Jordan projections lambda(Y_n)/n on the same words as kappa_samples."""
    return _run_streams(measure, n, sample_count, seed, workers, ("lambda",))["lambda"]


def paired_samples(measure, n, sample_count, seed, workers=1):
    """(kappa, lambda) sample blocks computed from identical words."""
    out = _run_streams(measure, n, sample_count, seed, workers, ("kappa", "lambda"))
    return out["kappa"], out["lambda"]


@dataclass
class LyapunovEstimate:
    vector: np.ndarray
    half_width: np.ndarray  # 95% CI from batch means
    n: int
    sample_count: int


def lyapunov_estimate(measure, n, sample_count, seed, workers=1):
    """Mean of kappa(Y_n)/n with a batch-means confidence interval."""
    samples = kappa_samples(measure, n, sample_count, seed, workers)
    n_batches = max(2, min(50, int(np.sqrt(sample_count))))
    usable = (sample_count // n_batches) * n_batches
    batches = samples[:usable].reshape(n_batches, -1, samples.shape[1]).mean(axis=1)
    half = Z95 * batches.std(axis=0, ddof=1) / np.sqrt(n_batches)
    return LyapunovEstimate(
        vector=samples.mean(axis=0),
        half_width=half,
        n=n,
        sample_count=sample_count,
    )


@dataclass
class DecayPoint:
    n: int
    hits: int
    sample_count: int
    rate: float  # -(1/n) log p_hat; lower bound when no hits
    rate_lo: float
    rate_hi: float
    zero_hits: bool


def deviation_decay(measure, lyapunov, eps, n_list, sample_count, seed, workers=1):
    """Decay rate of P(|kappa(Y_n)/n - lyapunov| > eps) across horizons.

    Deviations are measured in the Euclidean norm.  When no deviation is
    observed the reported rate is the one-sided bound (1/n) log(sample
    count), flagged via ``zero_hits``.
    """
    if eps <= 0:
        raise BadParameters("eps must be positive")
    lyapunov = np.asarray(lyapunov, dtype=float)
    points = []
    for n in n_list:
        samples = kappa_samples(measure, n, sample_count, seed, workers)
        dev = np.linalg.norm(samples - lyapunov[None, :], axis=1)
        hits = int(np.count_nonzero(dev > eps))
        if hits == 0:
            bound = np.log(sample_count) / n
            points.append(DecayPoint(n, 0, sample_count, bound, bound, np.inf, True))
            continue
        lo, hi = wilson_interval(hits, sample_count)
        points.append(
            DecayPoint(
                n=n,
                hits=hits,
                sample_count=sample_count,
                rate=-np.log(hits / sample_count) / n,
                rate_lo=-np.log(hi) / n,
                rate_hi=-np.log(lo) / n,
                zero_hits=False,
            )
        )
    return points


@dataclass
class GapExceedance:
    l: float
    threshold: float
    hits: int
    frequency: float
    freq_lo: float
    freq_hi: float


@dataclass
class GapExperiment:
    n: int
    eps: float
    sample_count: int
    points: list
    slope: float  # fitted d log p / d l
    slope_stderr: float


def kappa_lambda_gap_experiment(measure, n, l_values, eps, sample_count, seed, workers=1):
    """Empirical tail of the Cartan-Jordan gap on paired samples.

    For each threshold level l, reports the frequency of
    ||kappa(Y_n) - lambda(Y_n)||_inf > eps * l with a Wilson interval, and
    fits a decay slope of log-frequency against l (frequencies are
    continuity-corrected by half a hit so zero-hit levels stay usable).
    """
    l_values = [float(l) for l in l_values]
    if any(l > n for l in l_values):
        raise BadParameters("threshold levels must not exceed n")
    kap, lam = paired_samples(measure, n, sample_count, seed, workers)
    gap = np.max(np.abs(kap - lam), axis=1) * n  # unscaled projections
    points = []
    log_p, log_p_var = [], []
    for l in l_values:
        hits = int(np.count_nonzero(gap > eps * l))
        lo, hi = wilson_interval(max(hits, 1), sample_count)
        p_adj = (hits + 0.5) / (sample_count + 1)
        points.append(
            GapExceedance(l, eps * l, hits, hits / sample_count, lo, hi)
        )
        log_p.append(np.log(p_adj))
        # delta-method variance of log p
        log_p_var.append(max(1.0 - p_adj, 0.0) / ((hits + 0.5)))
    x = np.asarray(l_values)
    ybar = np.asarray(log_p)
    xc = x - x.mean()
    slope = float(np.dot(xc, ybar) / np.dot(xc, xc))
    slope_var = float(np.dot(xc * xc, np.asarray(log_p_var)) / np.dot(xc, xc) ** 2)
    return GapExperiment(
        n=n,
        eps=eps,
        sample_count=sample_count,
        points=points,
        slope=slope,
        slope_stderr=np.sqrt(slope_var),
    )
