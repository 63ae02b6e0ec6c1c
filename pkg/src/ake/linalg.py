"""Dense linear-algebra primitives: symmetric solve, SVD pseudoinverse,
symmetric eigendecomposition.

Thin contract-enforcing wrappers around LAPACK (via numpy). All arithmetic
is 64-bit; eigenvector signs are fixed deterministically so downstream
outputs are reproducible across runs.
"""

import numpy as np

from .exceptions import DimensionMismatch, NotSymmetric, NumericalFailure
from .validation import as_vector, check_square

# Relative singular-value cutoff; Gram matrices of duplicated points are
# exactly rank-deficient, so the default must sit well below 1.
RANK_TOL_DEFAULT = 1e-12

RESIDUAL_RTOL = 1e-8


def fix_signs(vectors):
    """Flip each column so its largest-magnitude entry is positive.

    Ties are broken by the first index of maximal magnitude, which makes
    golden-file comparisons deterministic.
    """
    out = np.array(vectors, copy=True)
    for j in range(out.shape[1]):
        i = int(np.argmax(np.abs(out[:, j])))
        if out[i, j] < 0:
            out[:, j] = -out[:, j]
    return out


def pinv(a, rank_tol=RANK_TOL_DEFAULT):
    """Moore-Penrose pseudoinverse via SVD.

    Singular values at or below ``rank_tol`` times the largest singular
    value are treated as exact zeros.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatch(f"a must be 2-D, got shape {a.shape}")
    if not rank_tol > 0:
        raise ValueError("rank_tol must be positive")
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    cutoff = rank_tol * (s[0] if s.size else 0.0)
    inv = np.zeros_like(s)
    keep = s > cutoff
    inv[keep] = 1.0 / s[keep]
    return (vt.T * inv) @ u.T


def solve_spd_detailed(a, rhs, ridge=0.0):
    """Solve ``(a + ridge*I) x = rhs`` for symmetric PSD ``a``.

    Attempts a direct factorization first and accepts it only if the
    residual passes a relative check; otherwise returns the minimum-norm
    pseudoinverse solution.

    Returns
    -------
    (x, path) where path is "direct" or "pseudoinverse".
    """
    a = check_square(a, "a")
    rhs = as_vector(rhs, "rhs")
    if rhs.shape[0] != a.shape[0]:
        raise DimensionMismatch(
            f"rhs length {rhs.shape[0]} does not match matrix size {a.shape[0]}"
        )
    if ridge < 0:
        raise ValueError("ridge must be non-negative")

    m = a + ridge * np.eye(a.shape[0]) if ridge > 0 else a
    tol = RESIDUAL_RTOL * (1.0 + np.linalg.norm(rhs))
    try:
        x = np.linalg.solve(m, rhs)
        if np.all(np.isfinite(x)) and np.linalg.norm(m @ x - rhs) <= tol:
            return x, "direct"
    except np.linalg.LinAlgError:
        pass
    x = pinv(m) @ rhs
    if not np.all(np.isfinite(x)):
        raise NumericalFailure("direct solve and pseudoinverse both failed")
    return x, "pseudoinverse"


def solve_spd(a, rhs, ridge=0.0):
    """Solve ``(a + ridge*I) x = rhs``; see :func:`solve_spd_detailed`."""
    return solve_spd_detailed(a, rhs, ridge)[0]


def sym_eig(a):
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted descending,
    eigenvectors as orthonormal columns with deterministic signs.

    Raises NotSymmetric when the maximum asymmetry exceeds 1e-10 times the
    Frobenius norm of the matrix.
    """
    a = check_square(a, "a")
    scale = np.linalg.norm(a)
    if np.abs(a - a.T).max(initial=0.0) > 1e-10 * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-10 of its norm")
    try:
        w, v = np.linalg.eigh((a + a.T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    return w[::-1].copy(), fix_signs(v[:, ::-1])
