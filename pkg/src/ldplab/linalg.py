"""Small dense linear algebra for invertible real matrices.

Cartan and Jordan projections (sorted log singular values / log eigenvalue
moduli), exterior powers, operator norms and the Fubini-Study geometry of
projective space.  Everything here is exact small-d numerics on top of
LAPACK via numpy; matrices are plain (d, d) float arrays.

Conventions:
  * projective points and hyperplane normals are unit vectors with the
    first nonzero coordinate positive, so equal lines compare equal;
  * all logarithms are natural.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import (
    BadIndex,
    DimensionMismatch,
    EigenFailure,
    NonFinite,
    SingularMatrix,
)

#: A matrix counts as invertible when its smallest singular value exceeds
#: DET_TOL_FACTOR times its largest.  The test is scale-invariant; matrices
#: below it are rejected, never regularized.
DET_TOL_FACTOR = 1e-12

#: Relative modulus gap required between the top two eigenvalues before we
#: call the dominant eigenvalue simple.
EIGEN_GAP_TOL = 1e-9


def as_matrix(m):
    """Validate and return ``m`` as a square invertible float array."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix has non-finite entries")
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[-1] <= DET_TOL_FACTOR * sv[0]:
        raise SingularMatrix("matrix is singular within tolerance")
    return a


def det(a):
    return float(np.linalg.det(a))


def cartan_projection(m):
    """Sorted log singular values of ``m`` (descending), as a (d,) array."""
    a = as_matrix(m)
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[-1] <= 0.0:
        raise SingularMatrix("zero singular value")
    return np.log(sv)


def jordan_projection(m):
    """Sorted log eigenvalue moduli of ``m`` (descending), as a (d,) array."""
    a = as_matrix(m)
    try:
        ev = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    mods = np.sort(np.abs(ev))[::-1]
    if mods[-1] <= 0.0:
        raise SingularMatrix("zero eigenvalue modulus")
    return np.log(mods)


def exterior_power(m, k):
    """Matrix of the k-th exterior power in the lexicographic minor basis.

    Entry (I, J) is the k x k minor of ``m`` with rows I and columns J,
    index sets ordered lexicographically; the result has dimension C(d, k).
    """
    a = np.asarray(m, dtype=float)
    d = a.shape[0]
    if not 1 <= k <= d:
        raise BadIndex(f"exterior power index {k} outside [1, {d}]")
    if k == 1:
        return a.copy()
    subsets = list(combinations(range(d), k))
    out = np.empty((len(subsets), len(subsets)))
    for i, rows in enumerate(subsets):
        for j, cols in enumerate(subsets):
            out[i, j] = np.linalg.det(a[np.ix_(rows, cols)])
    return out


def operator_norm(m):
    """Largest singular value."""
    a = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix has non-finite entries")
    return float(np.linalg.svd(a, compute_uv=False)[0])


def spectral_radius(m):
    """Largest eigenvalue modulus."""
    a = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix has non-finite entries")
    try:
        ev = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    return float(np.max(np.abs(ev)))


def lipschitz_bound(m):
    """Lipschitz constant of the projective action of ``m``.

    Returns ||Lambda^2 m|| * ||m^-1||^2, which dominates the Fubini-Study
    distortion ratio d(mx, my) / d(x, y) over all pairs of lines.
    """
    a = as_matrix(m)
    if a.shape[0] < 2:
        raise DimensionMismatch("projective Lipschitz bound needs d >= 2")
    inv_norm = operator_norm(np.linalg.inv(a))
    return operator_norm(exterior_power(a, 2)) * inv_norm**2


# -- projective geometry ------------------------------------------------------


def canonical_rep(v):
    """Unit representative of the line through ``v``, canonical sign."""
    x = np.asarray(v, dtype=float)
    n = np.linalg.norm(x)
    if not np.isfinite(n) or n == 0.0:
        raise NonFinite("cannot normalize a zero or non-finite vector")
    x = x / n
    nz = np.nonzero(np.abs(x) > 1e-14)[0]
    if nz.size and x[nz[0]] < 0:
        x = -x
    return x


def _check_same_dim(p, q):
    if p.shape != q.shape:
        raise DimensionMismatch(f"dimension mismatch: {p.shape} vs {q.shape}")


def fs_distance(p, q):
    """Fubini-Study distance between lines: the sine of their angle."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    _check_same_dim(p, q)
    c = float(np.dot(p, q))
    return float(np.sqrt(max(0.0, 1.0 - c * c)))


def corrected_log_spectrum(moduli, log_scale, log_det):
    """Log singular values (or eigen moduli) of scaled products, det-corrected.

    ``moduli`` are the computed values of the renormalized factor, shape
    (..., d).  The smallest modulus of a strongly contracting product sits
    far below floating-point resolution of the factor, so it is replaced
    using the exactly tracked determinant: the components must sum to
    log |det|.  Rows are returned sorted descending.
    """
    moduli = np.asarray(moduli, dtype=float)
    if np.any(moduli[..., :-1] <= 0.0):
        raise SingularMatrix("product lost numerical rank beyond repair")
    k = np.empty_like(moduli)
    k[..., :-1] = np.log(moduli[..., :-1]) + np.asarray(log_scale)[..., None]
    k[..., -1] = np.asarray(log_det) - k[..., :-1].sum(axis=-1)
    return -np.sort(-k, axis=-1)


def fs_distance_many(ps, qs):
    """Vectorized fs_distance for (..., d) stacks of unit vectors."""
    c = np.sum(ps * qs, axis=-1)
    return np.sqrt(np.maximum(0.0, 1.0 - c * c))


def fs_point_to_hyperplane(p, normal):
    """Distance from a projective point to the hyperplane with unit ``normal``.

    Equals |<p, normal>| and is the minimum of fs_distance(p, .) over the
    hyperplane.
    """
    p = np.asarray(p, dtype=float)
    n = np.asarray(normal, dtype=float)
    _check_same_dim(p, n)
    return float(abs(np.dot(p, n)))


def projective_action(m, p):
    """Image of the line ``p`` under ``m``, canonically normalized."""
    a = as_matrix(m)
    p = np.asarray(p, dtype=float)
    if p.shape[0] != a.shape[0]:
        raise DimensionMismatch("point dimension does not match matrix")
    return canonical_rep(a @ p)


def hyperplane_hausdorff(normal_a, normal_b):
    """Hausdorff distance of two projective hyperplanes.

    For hyperplanes this equals the Fubini-Study distance between their
    unit normals viewed as projective points.
    """
    return fs_distance(normal_a, normal_b)
