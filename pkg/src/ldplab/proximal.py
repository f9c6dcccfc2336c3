"""Proximality and Schottky certification.

A matrix is proximal when its top eigenvalue modulus is attained by a
single simple eigenvalue; the attracting fixed line and the invariant
repelling hyperplane of its projective action are then well defined.  The
stronger quantitative property checked here requires an attractor-repeller
gap of at least 2r, that the matrix maps the region epsilon-far from the
repeller into the epsilon-ball of the attractor, and that it is
epsilon-Lipschitz there.

The gap condition is checked exactly; the mapping and Lipschitz conditions
are certified by quasi-uniform sampling of the basin (they quantify over a
continuum), so every certificate records its sample count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from . import linalg
from .errors import BadParameters, NotProximalError

#: Absolute slack on exact gap comparisons.
GAP_SLACK = 1e-10

#: Pairs closer than this are skipped in Lipschitz ratio estimation.
MIN_PAIR_DISTANCE = 1e-6


@dataclass
class ProximalityCertificate:
    attractor: np.ndarray | None
    repeller_normal: np.ndarray | None
    gap: float
    r: float | None = None
    epsilon: float | None = None
    lipschitz_on_basin: float | None = None
    sample_count: int = 0
    verdict: str | None = None  # Certified / Refuted* / NotProximal / None

    @property
    def is_proximal(self):
        return self.verdict != "NotProximal"

    @property
    def certified(self):
        return self.verdict == "Certified"


@dataclass
class ThetaCertificate:
    """Per-exterior-power certificates for one matrix."""

    per_index: dict
    verdict: bool


@dataclass
class SchottkyCertificate:
    member_count: int
    r: float
    epsilon: float
    min_cross_gap: float
    theta: tuple
    verdict: bool
    member_certificates: list = field(default_factory=list)


@dataclass
class NarrownessReport:
    attractor_diameter: float
    max_repeller_hausdorff: float
    a: float
    per_index: dict = field(default_factory=dict)


def analyze_proximal(m):
    """Locate attractor and repelling hyperplane, or report non-proximality.

    Returns a certificate whose (r, epsilon) fields are unset; the verdict
    is "NotProximal" when the top eigenvalue modulus is tied (complex pair
    or relative gap below the simplicity tolerance).
    """
    a = linalg.as_matrix(m)
    ev, vecs = np.linalg.eig(a)
    order = np.argsort(-np.abs(ev))
    ev, vecs = ev[order], vecs[:, order]
    top = abs(ev[0])
    if a.shape[0] > 1 and top - abs(ev[1]) <= linalg.EIGEN_GAP_TOL * top:
        return ProximalityCertificate(None, None, 0.0, verdict="NotProximal")
    attractor = linalg.canonical_rep(vecs[:, 0].real)
    # Annihilator of the sum of the non-dominant generalized eigenspaces is
    # the dominant left eigendirection.
    lev, lvecs = np.linalg.eig(a.T)
    normal = linalg.canonical_rep(lvecs[:, np.argmax(np.abs(lev))].real)
    gap = linalg.fs_point_to_hyperplane(attractor, normal)
    return ProximalityCertificate(attractor, normal, gap)


def _basin_samples(normal, epsilon, count, seed, pairs=False):
    """Quasi-uniform unit vectors at distance >= epsilon from the hyperplane.

    Sobol directions pushed through the Gaussian inverse CDF, rejected
    against the basin condition.  When ``pairs`` is true, 2*count vectors
    are returned so callers can form disjoint sample pairs.
    """
    d = normal.shape[0]
    need = 2 * count if pairs else count
    engine = qmc.Sobol(d, scramble=True, seed=seed)
    chunk = 1 << max(8, int(np.ceil(np.log2(need))))
    out, got, dry_rounds = [], 0, 0
    while got < need:
        u = engine.random(chunk)
        z = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        keep = np.abs(z @ normal) >= epsilon
        if not np.any(keep):
            dry_rounds += 1
            if dry_rounds > 50:
                raise BadParameters("basin sampling starved; epsilon too large")
            continue
        z = z[keep]
        out.append(z)
        got += z.shape[0]
    return np.concatenate(out)[:need]


def certify_r_eps(m, r, epsilon, sample_count=1000, seed=0):
    """Sampling-based (r, epsilon)-proximality check.

    Verdict is the first failure among RefutedGap, RefutedMapping,
    RefutedLipschitz, else Certified.  NotProximal inputs pass through.
    """
    if not 0.0 < epsilon <= r <= 0.5:
        raise BadParameters(f"need 0 < epsilon <= r <= 1/2, got r={r}, epsilon={epsilon}")
    if sample_count < 100:
        raise BadParameters("sample_count must be at least 100")
    cert = analyze_proximal(m)
    if not cert.is_proximal:
        return cert
    cert.r, cert.epsilon, cert.sample_count = r, epsilon, sample_count
    if cert.gap < 2.0 * r - GAP_SLACK:
        cert.verdict = "RefutedGap"
        return cert

    a = linalg.as_matrix(m)
    x = _basin_samples(cert.repeller_normal, epsilon, sample_count, seed, pairs=True)
    y = x @ a.T
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    dist_to_attractor = linalg.fs_distance_many(y, cert.attractor[None, :])
    if np.any(dist_to_attractor > epsilon):
        cert.verdict = "RefutedMapping"
        return cert

    src = linalg.fs_distance_many(x[0::2], x[1::2])
    img = linalg.fs_distance_many(y[0::2], y[1::2])
    ok = src >= MIN_PAIR_DISTANCE
    ratios = img[ok] / src[ok]
    cert.lipschitz_on_basin = float(np.max(ratios)) if ratios.size else 0.0
    if cert.lipschitz_on_basin > epsilon + GAP_SLACK:
        cert.verdict = "RefutedLipschitz"
        return cert
    cert.verdict = "Certified"
    return cert


def theta_certify(m, theta, r, epsilon, sample_count=1000, seed=0):
    """Certify (r, epsilon)-proximality of each exterior power in ``theta``."""
    a = linalg.as_matrix(m)
    d = a.shape[0]
    theta = tuple(sorted(set(int(i) for i in theta)))
    if any(not 1 <= i <= d - 1 for i in theta):
        raise BadParameters(f"theta must be a subset of 1..{d - 1}")
    per = {}
    for i in theta:
        per[i] = certify_r_eps(
            linalg.exterior_power(a, i), r, epsilon, sample_count, seed + i
        )
    return ThetaCertificate(per, all(c.certified for c in per.values()))


def is_schottky(family, theta, r, epsilon, sample_count=1000, seed=0):
    """Check the Schottky condition for a finite family.

    Every member must certify (r, epsilon)-proximal in every exterior power
    of ``theta`` and every ordered cross gap d(attractor, repeller'),
    including a member against itself, must be at least 6r.
    """
    if not family:
        raise BadParameters("family must be non-empty")
    members = []
    for j, m in enumerate(family):
        members.append(theta_certify(m, theta, r, epsilon, sample_count, seed + 1000 * j))
    all_certified = all(tc.verdict for tc in members)
    min_gap = np.inf
    for i in sorted(set().union(*(tc.per_index for tc in members))):
        certs = [tc.per_index[i] for tc in members]
        for ca in certs:
            for cb in certs:
                if ca.attractor is None or cb.repeller_normal is None:
                    continue
                g = linalg.fs_point_to_hyperplane(ca.attractor, cb.repeller_normal)
                min_gap = min(min_gap, g)
    verdict = bool(all_certified and min_gap >= 6.0 * r - GAP_SLACK)
    return SchottkyCertificate(
        member_count=len(family),
        r=r,
        epsilon=epsilon,
        min_cross_gap=float(min_gap),
        theta=tuple(sorted(set(int(i) for i in theta))),
        verdict=verdict,
        member_certificates=members,
    )


def narrowness(family, theta):
    """Attractor diameter and worst repeller Hausdorff distance of a family."""
    if not family:
        raise BadParameters("family must be non-empty")
    theta = tuple(sorted(set(int(i) for i in theta)))
    per_index = {}
    worst_attr, worst_rep = 0.0, 0.0
    for i in theta:
        attractors, normals = [], []
        for j, m in enumerate(family):
            cert = analyze_proximal(linalg.exterior_power(np.asarray(m, float), i))
            if not cert.is_proximal:
                raise NotProximalError(f"member {j} is not proximal in power {i}")
            attractors.append(cert.attractor)
            normals.append(cert.repeller_normal)
        da = max(
            (linalg.fs_distance(p, q) for p in attractors for q in attractors),
            default=0.0,
        )
        dr = max(
            (linalg.hyperplane_hausdorff(p, q) for p in normals for q in normals),
            default=0.0,
        )
        per_index[i] = (da, dr)
        worst_attr, worst_rep = max(worst_attr, da), max(worst_rep, dr)
    return NarrownessReport(
        attractor_diameter=worst_attr,
        max_repeller_hausdorff=worst_rep,
        a=max(worst_attr, worst_rep),
        per_index=per_index,
    )


def _scaled_product_log_radius(factors):
    """log spectral radius of a product, renormalizing to dodge overflow."""
    y = np.eye(factors[0].shape[0])
    log_scale = 0.0
    for f in factors:
        y = f @ y
        m = np.max(np.abs(y))
        y /= m
        log_scale += np.log(m)
    return np.log(linalg.spectral_radius(y)) + log_scale


def product_spectral_deviation(gens, exponents):
    """log lambda_1 of g_l^{n_l} ... g_1^{n_1} minus the factorized value.

    ``gens[0]`` is applied first (rightmost factor).  Zero for a single
    generator or for commuting families; bounded for Schottky families.
    """
    if len(gens) != len(exponents) or not gens:
        raise BadParameters("gens and exponents must be non-empty and aligned")
    mats = [linalg.as_matrix(g) for g in gens]
    factors = []
    for g, n in zip(mats, exponents):
        if n < 1:
            raise BadParameters("exponents must be positive")
        factors.extend([g] * int(n))
    actual = _scaled_product_log_radius(factors)
    expected = sum(
        n * np.log(linalg.spectral_radius(g)) for g, n in zip(mats, exponents)
    )
    return float(actual - expected)


def kappa_lambda_gap(m):
    """Sup-norm distance between the Jordan and Cartan projections."""
    return float(
        np.max(np.abs(linalg.jordan_projection(m) - linalg.cartan_projection(m)))
    )
