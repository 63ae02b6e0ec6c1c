"""Closed-form reconstruction weights in feature space (stage A).

Every mapped sample is expressed as a weighted combination of all other
mapped samples, with one shared weight per sample. The total reconstruction
error is a quadratic in that weight vector, assembled entirely from the
Gram matrix, and is minimized by a symmetric solve.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import DimensionMismatch
from .validation import as_vector


@dataclass(frozen=True)
class QuadraticForm:
    """Coefficients of the reconstruction error as a quadratic in the weights.

    The error at weight vector w is ``w @ a @ w - 2 c @ w + trace_g``.
    """

    a: np.ndarray
    c: np.ndarray
    trace_g: float

    @property
    def n(self):
        return self.c.shape[0]


@dataclass(frozen=True)
class ReconstructionWeights:
    """Solved stage-A weights with the achieved loss and solver metadata."""

    weights: np.ndarray
    loss: float
    ridge_used: float
    solver_path: str  # "direct" | "pseudoinverse"


def build_quadratic(g):
    """Assemble the quadratic-form coefficients from a Gram matrix.

    The quadratic coefficient matrix is the element-wise product of the full
    Gram matrix with the matrix square of its zero-diagonal companion; the
    linear term collects, per sample, the summed squares of its off-diagonal
    kernel values.
    """
    full, zd = g.full, g.zero_diag
    a = full * (zd @ zd)
    c = (zd * zd).sum(axis=1)
    return QuadraticForm(a=a, c=c, trace_g=float(np.trace(full)))


def reconstruction_loss(q, weights):
    """Reconstruction error of the quadratic form at the given weights."""
    w = as_vector(weights, "weights")
    if w.shape[0] != q.n:
        raise DimensionMismatch(f"weights length {w.shape[0]} does not match n={q.n}")
    return float(w @ q.a @ w - 2.0 * (q.c @ w) + q.trace_g)


def default_ridge(q):
    """Tiny trace-scaled stabilizer applied before the direct solve."""
    return 1e-8 * float(np.trace(q.a)) / q.n


def solve_weights(q, ridge=None):
    """Minimize the reconstruction quadratic in closed form.

    With ridge=None a stabilizer of ``1e-8 * trace(a) / n`` is added to the
    diagonal before the direct solve; pass 0.0 for the raw normal equations.
    Falls back to the minimum-norm pseudoinverse solution when the direct
    factorization fails its residual check.
    """
    ridge = default_ridge(q) if ridge is None else float(ridge)
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    w, path = linalg.solve_spd_detailed(q.a, q.c, ridge)
    return ReconstructionWeights(
        weights=w,
        loss=reconstruction_loss(q, w),
        ridge_used=ridge,
        solver_path=path,
    )
