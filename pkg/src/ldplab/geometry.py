"""Point-cloud geometry: Hausdorff distances and small convex hulls."""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch, EmptySet

#: Singular values below this fraction of the largest are treated as a
#: degenerate (lower-dimensional) direction when building hulls.
DEGENERACY_RTOL = 1e-9


def _as_points(a):
    p = np.asarray(a, dtype=float)
    if p.ndim == 1:
        p = p[:, None]
    if p.size == 0:
        raise EmptySet("empty point set")
    return p


def hausdorff(cloud_a, cloud_b):
    """Symmetric Hausdorff distance between finite Euclidean point sets."""
    a, b = _as_points(cloud_a), _as_points(cloud_b)
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"point dimensions differ: {a.shape[1]} vs {b.shape[1]}")
    d = cdist(a, b)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def interval_hausdorff(ival_a, ival_b):
    """Hausdorff distance between two closed intervals (lo, hi)."""
    return max(abs(ival_a[0] - ival_b[0]), abs(ival_a[1] - ival_b[1]))


def hull_vertices(points):
    """Vertices of the convex hull of a small point cloud (d <= 3).

    Degenerate clouds (collinear, coplanar, or a single point) fall back to
    extreme points in the affine subspace actually spanned.
    """
    p = _as_points(points)
    if p.shape[1] == 1:
        return np.array([[p.min()], [p.max()]]) if p.shape[0] > 1 else p.copy()
    center = p.mean(axis=0)
    q = p - center
    u, s, vt = np.linalg.svd(q, full_matrices=False)
    if s.size == 0 or s[0] <= 1e-12:
        return center[None, :]
    rank = int(np.sum(s > DEGENERACY_RTOL * s[0]))
    if rank == 1:
        t = q @ vt[0]
        return center[None, :] + np.array([[t.min()], [t.max()]]) * vt[0][None, :]
    proj = q @ vt[:rank].T
    try:
        hull = ConvexHull(proj)
        idx = hull.vertices
    except QhullError:
        idx = np.arange(p.shape[0])
    return p[idx]
