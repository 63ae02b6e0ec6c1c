"""Kernel principal component analysis baseline.

Classical double-centered kernel PCA with deterministic component signs, so
repeated fits on the same data produce identical outputs.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import linalg
from .exceptions import DimensionMismatch, InsufficientRank
from .kernels import AUTO, KernelSpec, cross_gram, gram
from .validation import as_matrix

# Centered Gram matrices always have at least one zero eigenvalue; values
# below this relative floor are treated as zero rank.
EIG_FLOOR = 1e-10


class KernelPCA(BaseEstimator, TransformerMixin):
    """Kernel PCA projecting onto the top eigenvectors of the double-centered
    kernel matrix, scaled by inverse square-root eigenvalues.

    With the linear kernel this reproduces classical PCA scores up to
    per-component sign.

    Parameters
    ----------
    n_components : int
        Output dimensionality d, 1 <= d < n_samples.
    kernel : "linear" | "gaussian" | "tanimoto"
    sigma : float or "auto"
        Gaussian bandwidth ("auto": median heuristic at fit time).

    Attributes
    ----------
    projection_ : ndarray (n, d), eigenvectors scaled by 1/sqrt(eigenvalue).
    eigenvalues_ : ndarray (d,), descending positive eigenvalues kept.
    column_means_, grand_mean_ : training kernel statistics reused to center
        cross-kernel blocks at transform time.
    embedding_ : ndarray (n, d), training embedding.
    """

    def __init__(self, n_components=2, kernel="linear", sigma=None):
        self.n_components = n_components
        self.kernel = kernel
        self.sigma = sigma

    def _spec(self):
        if isinstance(self.kernel, KernelSpec):
            return self.kernel
        if self.kernel == "gaussian":
            return KernelSpec("gaussian", self.sigma if self.sigma is not None else AUTO)
        return KernelSpec(self.kernel)

    def fit(self, X, y=None):
        X = as_matrix(X, "X")
        n = X.shape[0]
        d = int(self.n_components)
        if not 1 <= d < n:
            raise ValueError(
                f"n_components must satisfy 1 <= d < n_samples; got d={d}, n={n}"
            )
        spec = self._spec().resolve(X)
        k = gram(spec, X).full
        col_means = k.mean(axis=0)
        grand = float(k.mean())
        kc = k - col_means[None, :] - col_means[:, None] + grand

        w, v = linalg.sym_eig(kc)
        lam_max = float(w[0]) if w.size else 0.0
        n_pos = int(np.count_nonzero(w > EIG_FLOOR * max(lam_max, 0.0))) if lam_max > 0.0 else 0
        if n_pos < d:
            raise InsufficientRank(
                f"centered kernel matrix has {n_pos} positive eigenvalues, need {d}"
            )
        lam = w[:d]
        self.projection_ = v[:, :d] / np.sqrt(lam)[None, :]
        self.eigenvalues_ = lam
        self.column_means_ = col_means
        self.grand_mean_ = grand
        self.kernel_ = spec
        self.X_train_ = X.copy()
        self.n_features_in_ = X.shape[1]
        self.embedding_ = kc @ self.projection_
        return self

    def transform(self, X):
        """Project new rows using the training centering statistics."""
        check_is_fitted(self, "projection_")
        X = as_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(
                f"expected {self.n_features_in_} features, found {X.shape[1]}"
            )
        ks = cross_gram(self.kernel_, X, self.X_train_)
        ksc = ks - ks.mean(axis=1)[:, None] - self.column_means_[None, :] + self.grand_mean_
        return ksc @ self.projection_

    def fit_transform(self, X, y=None):
        return self.fit(X, y).embedding_.copy()
