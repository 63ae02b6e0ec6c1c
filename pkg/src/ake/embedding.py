"""Latent-embedding stage (B) and the main estimator.

The embedding is parameterized as the training Gram matrix times a learned
projection. Its latent kernel matrix is pushed, by gradient descent on the
same quadratic template as stage A, to reproduce the reconstruction geometry
fixed by the stage-A weights. Out-of-sample points are embedded through
their kernel similarities to the training set, without retraining.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import (
    DegenerateData,
    DimensionMismatch,
    NonFiniteLoss,
    PrecomputedModeNeedsGram,
    UnsupportedKernel,
)
from .kernels import AUTO, GramMatrix, KernelSpec, cross_gram, gram
from .reconstruction import build_quadratic, reconstruction_loss, solve_weights
from .validation import as_matrix, as_vector

OPTIMIZER_METHODS = ("gd", "adam")

_ARMIJO = 1e-4
_MAX_HALVINGS = 60


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for the gradient-based alignment stage.

    method "gd" is plain gradient descent with a backtracking line search
    (monotone non-increasing loss); "adam" uses adaptive moments with the
    usual constants (0.9, 0.999, 1e-8) and returns the best iterate seen.
    Iteration stops at ``max_iters`` or when the relative loss change
    ``|dL| / (1 + |L|)`` falls below ``rel_tol``.
    """

    max_iters: int = 2000
    learning_rate: float = 1.0
    method: str = "gd"
    rel_tol: float = 1e-9
    seed: int = 0
    init_scale: float = 1.0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.method not in OPTIMIZER_METHODS:
            raise ValueError(f"method must be one of {OPTIMIZER_METHODS}")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be non-negative")
        if not self.init_scale > 0:
            raise ValueError("init_scale must be positive")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


def _check_stage_b_inputs(projection, weights, gram_train):
    projection = as_matrix(projection, "projection")
    weights = as_vector(weights, "weights")
    gram_train = as_matrix(gram_train, "gram_train")
    n = gram_train.shape[0]
    if gram_train.shape[1] != n:
        raise DimensionMismatch(f"gram_train must be square, got {gram_train.shape}")
    if projection.shape[0] != n:
        raise DimensionMismatch(
            f"projection has {projection.shape[0]} rows, gram_train has {n}"
        )
    if weights.shape[0] != n:
        raise DimensionMismatch(f"weights length {weights.shape[0]} does not match n={n}")
    return projection, weights, gram_train


def alignment_loss(projection, weights, gram_train, latent_kernel):
    """Reconstruction error induced by the latent kernel matrix of the
    embedded points, under the frozen stage-A weights.

    Reuses the stage-A quadratic template verbatim: the latent Gram matrix
    is built from the embedding ``gram_train @ projection`` and evaluated
    with :func:`build_quadratic` / :func:`reconstruction_loss`.
    """
    projection, weights, gram_train = _check_stage_b_inputs(projection, weights, gram_train)
    z = gram_train @ projection
    gh = gram(latent_kernel, z)
    return reconstruction_loss(build_quadratic(gh), weights)


def alignment_grad(projection, weights, gram_train, latent_kernel):
    """Gradient of :func:`alignment_loss` with respect to the projection.

    Chains through embedding -> latent Gram -> loss; supports the linear
    and Gaussian latent kernels (the Tanimoto kernel is not differentiable).
    """
    if latent_kernel.kind == "tanimoto":
        raise UnsupportedKernel("tanimoto latent kernel is not differentiable")
    projection, weights, gram_train = _check_stage_b_inputs(projection, weights, gram_train)

    z = gram_train @ projection
    gh = gram(latent_kernel, z)
    h, ht = gh.full, gh.zero_diag

    b = np.outer(weights, weights)
    s = b * h
    sht = s @ ht
    bracket = sht + sht.T - 2.0 * (weights[:, None] * h + h * weights[None, :])
    np.fill_diagonal(bracket, 0.0)
    dh = b * (ht @ ht) + bracket
    dh[np.diag_indices_from(dh)] += 1.0

    if latent_kernel.kind == "linear":
        dz = 2.0 * (dh @ z)
    else:
        p = dh * h
        dz = (2.0 / latent_kernel.sigma**2) * (p @ z - p.sum(axis=1)[:, None] * z)
    return gram_train.T @ dz


def _require_finite(value, what, trace):
    if not np.all(np.isfinite(value)):
        raise NonFiniteLoss(f"{what} became non-finite during alignment", trace)


def _descend_gd(loss_fn, grad_fn, x0, cfg):
    """Backtracking gradient descent; the loss trace is monotone non-increasing."""
    x = x0
    fx = loss_fn(x)
    trace = [(0, fx)]
    _require_finite(fx, "loss", trace)
    step = cfg.learning_rate
    for it in range(1, cfg.max_iters + 1):
        g = grad_fn(x)
        _require_finite(g, "gradient", trace)
        gnorm2 = float((g * g).sum())
        if gnorm2 == 0.0:
            break
        step *= 2.0
        accepted = False
        for _ in range(_MAX_HALVINGS):
            cand = x - step * g
            fc = loss_fn(cand)
            if np.isfinite(fc) and fc <= fx - _ARMIJO * step * gnorm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        rel = abs(fx - fc) / (1.0 + abs(fc))
        x, fx = cand, fc
        trace.append((it, fx))
        if rel < cfg.rel_tol:
            break
    return x, fx, trace


def _descend_adam(loss_fn, grad_fn, x0, cfg):
    """Adaptive-moment descent; returns the best iterate seen."""
    b1, b2, eps = 0.9, 0.999, 1e-8
    x = x0
    fx = loss_fn(x)
    trace = [(0, fx)]
    _require_finite(fx, "loss", trace)
    best_x, best_f = x, fx
    m = np.zeros_like(x0)
    v = np.zeros_like(x0)
    prev = fx
    for it in range(1, cfg.max_iters + 1):
        g = grad_fn(x)
        _require_finite(g, "gradient", trace)
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * g * g
        mhat = m / (1.0 - b1**it)
        vhat = v / (1.0 - b2**it)
        x = x - cfg.learning_rate * mhat / (np.sqrt(vhat) + eps)
        fx = loss_fn(x)
        _require_finite(fx, "loss", trace)
        trace.append((it, fx))
        if fx < best_f:
            best_x, best_f = x.copy(), fx
        if abs(prev - fx) / (1.0 + abs(fx)) < cfg.rel_tol:
            break
        prev = fx
    return best_x, best_f, trace


_DESCENT = {"gd": _descend_gd, "adam": _descend_adam}


class KernelEmbedding(BaseEstimator, TransformerMixin):
    """Two-stage kernel embedding with out-of-sample extension.

    Stage A computes closed-form reconstruction weights from the training
    kernel matrix: each feature-space point is expressed as a weighted
    combination of all the others, and the optimal shared weight vector has
    a closed form in the Gram matrix alone. Stage B learns a projection by
    gradient descent so that the kernel matrix of the embedded points
    reproduces that same reconstruction geometry. New points are embedded
    through their kernel similarities to the training set.

    Parameters
    ----------
    n_components : int
        Latent dimensionality d, with 1 <= d < n_samples.
    input_kernel : str, "linear" | "gaussian" | "tanimoto"
        Kernel on the input space.
    input_sigma : float or "auto"
        Gaussian bandwidth for the input kernel; "auto" resolves to the
        median pairwise distance of the training data at fit time and is
        frozen into the model.
    latent_kernel : str, "linear" | "gaussian"
        Kernel on the embedding space.
    latent_sigma : float or "auto"
        Gaussian bandwidth for the latent kernel; "auto" resolves from the
        initial (random) embedding once and stays fixed during optimization.
    ridge : float or None
        Stabilizer added to the stage-A normal equations. None applies a
        tiny trace-scaled default; 0.0 solves the raw system.
    method : "gd" | "adam"
        Stage-B optimizer. "gd" guarantees a monotone loss trace.
    learning_rate : float
        Initial step size ("gd") or step size ("adam").
    max_iter : int
        Stage-B iteration cap.
    tol : float
        Relative-loss-change stopping threshold.
    init_scale : float
        The initial projection has i.i.d. Gaussian entries with standard
        deviation ``init_scale / sqrt(n)``, keeping the initial embedding at
        O(1) scale regardless of n.
    random_state : int
        Seed for the projection initialization.
    precomputed : bool
        When true, ``fit`` expects the full training kernel matrix instead
        of raw features, and ``transform`` is unavailable (supply the
        test-against-training kernel block to :meth:`transform_gram`).

    Attributes
    ----------
    weights_ : ndarray of shape (n,)
        Stage-A reconstruction weights.
    projection_ : ndarray of shape (n, n_components)
        Learned stage-B projection.
    embedding_ : ndarray of shape (n, n_components)
        Training embedding (training Gram matrix times projection).
    stage_a_loss_, final_loss_ : float
        Achieved losses of the two stages.
    loss_trace_ : list of (iteration, loss)
        Stage-B optimizer trace.
    input_kernel_, latent_kernel_ : KernelSpec
        Resolved kernel descriptions (None input kernel in precomputed mode).
    """

    def __init__(
        self,
        n_components=2,
        input_kernel="gaussian",
        input_sigma="auto",
        latent_kernel="gaussian",
        latent_sigma="auto",
        ridge=None,
        method="gd",
        learning_rate=1.0,
        max_iter=2000,
        tol=1e-9,
        init_scale=1.0,
        random_state=0,
        precomputed=False,
    ):
        self.n_components = n_components
        self.input_kernel = input_kernel
        self.input_sigma = input_sigma
        self.latent_kernel = latent_kernel
        self.latent_sigma = latent_sigma
        self.ridge = ridge
        self.method = method
        self.learning_rate = learning_rate
        self.max_iter = max_iter
        self.tol = tol
        self.init_scale = init_scale
        self.random_state = random_state
        self.precomputed = precomputed

    def _spec(self, kind, sigma):
        if isinstance(kind, KernelSpec):
            return kind
        if kind == "gaussian":
            return KernelSpec("gaussian", sigma if sigma is not None else AUTO)
        return KernelSpec(kind)

    def _optimizer_config(self):
        return OptimizerConfig(
            max_iters=int(self.max_iter),
            learning_rate=float(self.learning_rate),
            method=self.method,
            rel_tol=float(self.tol),
            seed=int(self.random_state),
            init_scale=float(self.init_scale),
        )

    def fit(self, X, y=None):
        """Run both stages on training features (or a precomputed kernel matrix)."""
        cfg = self._optimizer_config()
        X = as_matrix(X, "X")
        n = X.shape[0]
        if n < 2:
            raise DegenerateData("need at least 2 samples to fit")
        d = int(self.n_components)
        if not 1 <= d < n:
            raise ValueError(
                f"n_components must satisfy 1 <= d < n_samples; got d={d}, n={n}"
            )

        if self.precomputed:
            g = GramMatrix.from_full(X)
            self.input_kernel_ = None
            self.X_train_ = None
            self.n_features_in_ = None
        else:
            ik = self._spec(self.input_kernel, self.input_sigma).resolve(X)
            g = gram(ik, X)
            self.input_kernel_ = ik
            self.X_train_ = X.copy()
            self.n_features_in_ = X.shape[1]
        self.gram_train_ = g.full

        rec = solve_weights(build_quadratic(g), self.ridge)
        self.weights_ = rec.weights
        self.stage_a_loss_ = rec.loss
        self.ridge_used_ = rec.ridge_used
        self.solver_path_ = rec.solver_path

        rng = np.random.default_rng(cfg.seed)
        a0 = rng.normal(0.0, cfg.init_scale / np.sqrt(n), size=(n, d))
        lk = self._spec(self.latent_kernel, self.latent_sigma)
        if lk.kind == "tanimoto":
            raise UnsupportedKernel("tanimoto cannot serve as the latent kernel")
        if not lk.resolved:
            lk = lk.resolve(g.full @ a0)
        self.latent_kernel_ = lk

        w = self.weights_
        gf = self.gram_train_

        def loss_fn(a):
            return alignment_loss(a, w, gf, lk)

        def grad_fn(a):
            return alignment_grad(a, w, gf, lk)

        proj, final, trace = _DESCENT[cfg.method](loss_fn, grad_fn, a0, cfg)
        self.projection_ = proj
        self.embedding_ = gf @ proj
        self.final_loss_ = final
        self.loss_trace_ = trace
        self.n_iter_ = trace[-1][0]
        return self

    def transform(self, X):
        """Embed new feature rows via their kernel block against the training set."""
        check_is_fitted(self, "projection_")
        if self.precomputed:
            raise PrecomputedModeNeedsGram(
                "model was fitted on a precomputed kernel matrix; "
                "pass the test-against-training kernel block to transform_gram"
            )
        X = as_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(
                f"expected {self.n_features_in_} features, found {X.shape[1]}"
            )
        return cross_gram(self.input_kernel_, X, self.X_train_) @ self.projection_

    def transform_gram(self, g_star):
        """Embed rows given their kernel block against the training samples."""
        check_is_fitted(self, "projection_")
        g_star = as_matrix(g_star, "g_star")
        if g_star.shape[1] != self.weights_.shape[0]:
            raise DimensionMismatch(
                f"kernel block has {g_star.shape[1]} columns, "
                f"model was trained on {self.weights_.shape[0]} samples"
            )
        return g_star @ self.projection_

    def fit_transform(self, X, y=None):
        return self.fit(X, y).embedding_.copy()
