"""Kernel functions and Gram-matrix construction.

Supported kernels: linear inner product, Gaussian (RBF), and Tanimoto
similarity for binary vectors. Pairwise blocks are evaluated with
order-stable arithmetic so that the block of a sample set against itself
is bit-for-bit symmetric; full Gram matrices additionally mirror the upper
triangle, making symmetry exact by construction.
"""

from dataclasses import dataclass, replace
from numbers import Real

import numpy as np

from . import linalg
from .exceptions import (
    DegenerateData,
    DimensionMismatch,
    NonBinaryInput,
    UnresolvedSigma,
)
from .validation import as_matrix, as_vector

KERNEL_KINDS = ("linear", "gaussian", "tanimoto")

AUTO = "auto"

# Cap on the size of the (rows, n, D) difference tensor used for squared
# distances, in float64 elements (~64 MB).
_CHUNK_ELEMENTS = 8_000_000


@dataclass(frozen=True)
class KernelSpec:
    """Declarative description of a kernel function.

    Parameters
    ----------
    kind : "linear", "gaussian" or "tanimoto".
    sigma : Gaussian bandwidth; a positive number or "auto" (resolved from
        data via the median heuristic at fit time). Must be omitted for the
        other kernels.
    """

    kind: str
    sigma: object = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KERNEL_KINDS}")
        if self.kind == "gaussian":
            ok = self.sigma == AUTO or (isinstance(self.sigma, Real) and self.sigma > 0)
            if not ok:
                raise ValueError("gaussian kernel needs sigma > 0 or 'auto'")
        elif self.sigma is not None:
            raise ValueError(f"{self.kind} kernel takes no sigma")

    @property
    def resolved(self):
        """True when no 'auto' placeholder remains."""
        return not (self.kind == "gaussian" and self.sigma == AUTO)

    def resolve(self, x):
        """Return a copy with sigma='auto' replaced by the median heuristic on x."""
        if self.resolved:
            return self
        return replace(self, sigma=float(median_heuristic_sigma(x)))

    def to_dict(self):
        doc = {"kind": self.kind}
        if self.kind == "gaussian":
            doc["sigma"] = self.sigma
        return doc

    @classmethod
    def from_dict(cls, doc):
        return cls(kind=doc["kind"], sigma=doc.get("sigma"))


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric kernel matrix together with its zero-diagonal companion."""

    full: np.ndarray
    zero_diag: np.ndarray

    @property
    def n(self):
        return self.full.shape[0]

    @classmethod
    def from_full(cls, full, sym_tol=1e-12):
        """Wrap an externally built kernel matrix.

        The matrix must be symmetric within ``sym_tol`` (absolute, relative
        to its largest entry); the upper triangle is mirrored so the stored
        matrix is exactly symmetric.
        """
        full = as_matrix(full, "full")
        if full.shape[0] != full.shape[1]:
            raise DimensionMismatch(f"kernel matrix must be square, got {full.shape}")
        scale = max(1.0, np.abs(full).max(initial=0.0))
        if np.abs(full - full.T).max(initial=0.0) > sym_tol * scale:
            raise ValueError("kernel matrix is not symmetric")
        mirrored = np.triu(full) + np.triu(full, 1).T
        zd = mirrored.copy()
        np.fill_diagonal(zd, 0.0)
        return cls(full=mirrored, zero_diag=zd)


def _require_binary(x, name):
    if not np.all((x == 0.0) | (x == 1.0)):
        raise NonBinaryInput(f"{name} must contain only 0/1 entries for the tanimoto kernel")


def squared_distances(x, y):
    """Pairwise squared Euclidean distances between rows of x and rows of y.

    Computed from explicit differences (never the expanded inner-product
    identity), so results are non-negative and the block is bit-symmetric
    when x and y hold the same data.
    """
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    if x.shape[1] != y.shape[1]:
        raise DimensionMismatch(f"feature counts differ: {x.shape[1]} vs {y.shape[1]}")
    m, d = x.shape
    n = y.shape[0]
    out = np.empty((m, n))
    step = max(1, _CHUNK_ELEMENTS // max(1, n * d))
    for s in range(0, m, step):
        e = min(m, s + step)
        diff = x[s:e, None, :] - y[None, :, :]
        out[s:e] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def _pairwise(spec, x, y):
    """Kernel block k(x_i, y_j) with order-stable, symmetric arithmetic."""
    if spec.kind == "linear":
        return np.einsum("ik,jk->ij", x, y)
    if spec.kind == "gaussian":
        if not spec.resolved:
            raise UnresolvedSigma("gaussian sigma is 'auto'; resolve it against data first")
        return np.exp(squared_distances(x, y) / (-2.0 * spec.sigma * spec.sigma))
    _require_binary(x, "x")
    _require_binary(y, "y")
    num = np.einsum("ik,jk->ij", x, y)
    sx = np.einsum("ik,ik->i", x, x)
    sy = np.einsum("ik,ik->i", y, y)
    denom = sx[:, None] + sy[None, :] - num
    out = np.zeros_like(num)
    nz = denom > 0
    out[nz] = num[nz] / denom[nz]
    return out


def eval_kernel(spec, x, y):
    """Evaluate the kernel for a single pair of vectors."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"vector lengths differ: {x.shape[0]} vs {y.shape[0]}")
    return float(_pairwise(spec, x[None, :], y[None, :])[0, 0])


def gram(spec, x):
    """Kernel matrix of a sample set against itself.

    Each unordered pair is evaluated once and mirrored, so the result is
    exactly symmetric regardless of floating-point non-associativity.
    """
    x = as_matrix(x, "x")
    if x.shape[0] < 2:
        raise DegenerateData("need at least 2 samples to build a Gram matrix")
    block = _pairwise(spec, x, x)
    full = np.triu(block) + np.triu(block, 1).T
    zd = full.copy()
    np.fill_diagonal(zd, 0.0)
    return GramMatrix(full=full, zero_diag=zd)


def cross_gram(spec, x_test, x_train):
    """Kernel block between test rows and training rows.

    ``cross_gram(spec, x, x)`` reproduces ``gram(spec, x).full`` exactly.
    """
    x_test = as_matrix(x_test, "x_test")
    x_train = as_matrix(x_train, "x_train")
    if x_test.shape[1] != x_train.shape[1]:
        raise DimensionMismatch(
            f"feature counts differ: test has {x_test.shape[1]}, train has {x_train.shape[1]}"
        )
    return _pairwise(spec, x_test, x_train)


def median_heuristic_sigma(x):
    """Median of all pairwise Euclidean distances (i < j).

    The standard bandwidth heuristic for the Gaussian kernel. Raises
    DegenerateData when the median is zero (at least half of the pairs
    coincide), since the bandwidth must be strictly positive.
    """
    x = as_matrix(x, "x")
    n = x.shape[0]
    if n < 2:
        raise DegenerateData("need at least 2 samples for the median heuristic")
    d2 = squared_distances(x, x)
    med = float(np.median(np.sqrt(d2[np.triu_indices(n, 1)])))
    if med == 0.0:
        raise DegenerateData("median pairwise distance is zero; bandwidth undefined")
    return med


def check_psd(g, tol=1e-8):
    """True iff the Gram matrix has no eigenvalue below ``-tol * max(1, largest)``."""
    w, _ = linalg.sym_eig(g.full)
    lam_max = float(w[0]) if w.size else 0.0
    return bool(w[-1] >= -tol * max(1.0, lam_max))
