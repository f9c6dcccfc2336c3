"""Shipped benchmark measures and generator families.

These are the fixtures used by the verification suite and the CLI:

  * a two-atom commuting diagonal measure whose top-coordinate rate is a
    Bernoulli relative entropy (binomial arithmetic gives exact oracles);
  * the boundary-explosion family: shears U (upper) and L (lower) plus
    diagonal atoms diag(a_k, 1/a_k) with a_k = exp(4 - 1/k), truncated to
    the first K diagonal atoms with weights 1/4, 1/4, 1/(2K) each;
  * rotated-axis Schottky pairs of strong diagonal matrices.
"""

from __future__ import annotations

import numpy as np

from .walk import make_measure

SHEAR_U = np.array([[1.0, 1.0], [0.0, 1.0]])
SHEAR_L = np.array([[1.0, 0.0], [1.0, 1.0]])


def diagonal_pair_measure(a=3.0, b=3.5):
    """Equal-weight pair diag(e^a, e^-a), diag(e^b, e^-b)."""
    return make_measure(
        2,
        [
            ("A", np.diag([np.exp(a), np.exp(-a)]), 0.5),
            ("B", np.diag([np.exp(b), np.exp(-b)]), 0.5),
        ],
    )


def boundary_atom(k):
    """diag(a_k, 1/a_k) with a_k = exp(4 - 1/k)."""
    a = np.exp(4.0 - 1.0 / k)
    return np.diag([a, 1.0 / a])


def boundary_measure(K):
    """Truncation of the boundary-explosion measure to K diagonal atoms."""
    if K < 1:
        raise ValueError("K must be at least 1")
    entries = [("U", SHEAR_U, 0.25), ("L", SHEAR_L, 0.25)]
    for k in range(1, K + 1):
        entries.append((f"A{k}", boundary_atom(k), 0.5 / K))
    return make_measure(2, entries)


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def schottky_pair(strength=10.0, angle=np.pi / 4):
    """Strong diagonal and its rotated conjugate; Schottky for 6r <= cos(angle)."""
    d = np.diag([np.exp(strength), np.exp(-strength)])
    r = rotation(angle)
    return [d, r @ d @ r.T]


def schottky_measure(strength=10.0, angle=np.pi / 4):
    g1, g2 = schottky_pair(strength, angle)
    return make_measure(2, [("g1", g1, 0.5), ("g2", g2, 0.5)])


def tilted_pair_measure(a=3.0, b=3.5, angle=np.deg2rad(5.0)):
    """Schottky pair with mixed strengths and a small axis tilt.

    The top-coordinate spread comes from mixing the two strengths (atoms of
    kappa_1/n sit on a lattice of pitch (b - a)/n), while the Cartan-Jordan
    gap of any word is at most -log cos(angle), orders of magnitude below
    that lattice pitch, so kappa- and lambda-based histograms bin the same
    words identically.
    """
    g1 = np.diag([np.exp(a), np.exp(-a)])
    q = rotation(angle)
    g2 = q @ np.diag([np.exp(b), np.exp(-b)]) @ q.T
    return make_measure(2, [("g1", g1, 0.5), ("g2", g2, 0.5)])


#: Axis angles whose pairwise cosines sit at two separated scales (about
#: e^-2.8 and e^-5.3 against the first axis), so the Cartan-Jordan gap of
#: a random word takes graded values depending on its first and last
#: letters.
GRADED_ANGLES = (
    0.0,
    np.arccos(np.exp(-2.8)),
    np.arccos(np.exp(-5.3)),
)


def graded_schottky_measure(strength=12.0):
    """Three rotated conjugates of a strong diagonal, uniform weights.

    The cross gaps between distinct axes stay bounded away from zero (the
    smallest cosine is about 5e-3), so the family certifies as Schottky
    for r around 8e-4, but the word gap log(||w|| / lambda_1(w)) now has
    a stepped, decaying tail instead of a single bounded value.
    """
    d = np.diag([np.exp(strength), np.exp(-strength)])
    entries = []
    for i, phi in enumerate(GRADED_ANGLES):
        q = rotation(phi)
        entries.append((f"g{i}", q @ d @ q.T, 1.0 / len(GRADED_ANGLES)))
    return make_measure(2, entries)


def proximal_family(count, strength, seed, dim=2, shear=0.0):
    """Random orthogonal conjugates of a strong diagonal, optionally sheared.

    Attractor-repeller gaps stay near 1 (the conjugating matrix is
    orthogonal), so members certify for any r <= 1/2 once the contraction
    is strong enough for the requested epsilon.
    """
    rng = np.random.default_rng(seed)
    base = np.diag(np.exp(np.linspace(strength, 0.0, dim)))
    out = []
    for _ in range(count):
        q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        a = base.copy()
        if shear:
            a = a @ (np.eye(dim) + shear * np.triu(rng.standard_normal((dim, dim)), 1))
        out.append(q @ a @ q.T)
    return out
