"""Embedding-quality metrics.

Clustering validity indices (Davies-Bouldin, Calinski-Harabasz) and
rank-based neighborhood preservation scores (trustworthiness, continuity).
All distances are Euclidean; neighbor ranks exclude the point itself and
ties are broken by ascending point index, so repeated runs give identical
values.
"""

import math

import numpy as np

from .exceptions import (
    DegenerateClusters,
    DimensionMismatch,
    KOutOfRange,
    SingleCluster,
)
from .kernels import squared_distances
from .validation import as_matrix

DEFAULT_K = 15


def _check_labels(points, labels):
    points = as_matrix(points, "points")
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.shape[0] != points.shape[0]:
        raise DimensionMismatch(
            f"labels must be 1-D with one entry per row; got {labels.shape} "
            f"for {points.shape[0]} rows"
        )
    return points, labels


def davies_bouldin(points, labels):
    """Davies-Bouldin index; lower is better.

    Mean over clusters of the worst (scatter_i + scatter_j) / centroid-gap
    ratio, where scatter is the mean Euclidean distance to the centroid.
    """
    x, labels = _check_labels(points, labels)
    uniq = np.unique(labels)
    if uniq.size < 2:
        raise SingleCluster("Davies-Bouldin needs at least 2 clusters")
    centroids = np.stack([x[labels == u].mean(axis=0) for u in uniq])
    scatter = np.array(
        [np.linalg.norm(x[labels == u] - centroids[i], axis=1).mean() for i, u in enumerate(uniq)]
    )
    gaps = np.sqrt(squared_distances(centroids, centroids))
    off = ~np.eye(uniq.size, dtype=bool)
    if np.any(gaps[off] == 0.0):
        raise DegenerateClusters("two cluster centroids coincide")
    ratios = (scatter[:, None] + scatter[None, :]) / np.where(off, gaps, np.inf)
    return float(np.max(ratios, axis=1).mean())


def calinski_harabasz(points, labels):
    """Calinski-Harabasz index; higher is better.

    Ratio of between-cluster to within-cluster dispersion, each normalized
    by its degrees of freedom. Returns +inf when the within-cluster
    dispersion is exactly zero.
    """
    x, labels = _check_labels(points, labels)
    uniq = np.unique(labels)
    n = x.shape[0]
    n_clusters = uniq.size
    if n_clusters < 2:
        raise SingleCluster("Calinski-Harabasz needs at least 2 clusters")
    overall = x.mean(axis=0)
    between = 0.0
    within = 0.0
    for u in uniq:
        member = x[labels == u]
        mu = member.mean(axis=0)
        between += member.shape[0] * float(((mu - overall) ** 2).sum())
        within += float(((member - mu) ** 2).sum())
    if within == 0.0:
        return math.inf
    return (between / (n_clusters - 1)) / (within / (n - n_clusters))


def _neighbor_ranks(x):
    """Per-point neighbor ordering and ranks under Euclidean distance.

    Returns (order, rank): order[i] lists the other points by increasing
    distance from i (ties by ascending index); rank[i, j] is the 1-based
    position of j in that ordering.
    """
    d = np.sqrt(squared_distances(x, x))
    n = d.shape[0]
    order = np.empty((n, n - 1), dtype=np.intp)
    rank = np.zeros((n, n), dtype=np.intp)
    for i in range(n):
        idx = np.argsort(d[i], kind="stable")
        idx = idx[idx != i]
        order[i] = idx
        rank[i, idx] = np.arange(1, n)
    return order, rank


def trustworthiness(x_orig, z, k=DEFAULT_K):
    """Penalty-free score in [0, 1] for spurious embedding neighbors.

    Points that enter the k-neighborhood of a sample in the embedding but
    are not among its k nearest in the original space are penalized by how
    far down the original ranking they sit.
    """
    x = as_matrix(x_orig, "x_orig")
    z = as_matrix(z, "z")
    n = x.shape[0]
    if z.shape[0] != n:
        raise DimensionMismatch(f"row counts differ: {n} vs {z.shape[0]}")
    k = int(k)
    if not 1 <= k < n / 2:
        raise KOutOfRange(f"k must satisfy 1 <= k < n/2; got k={k}, n={n}")
    orig_order, orig_rank = _neighbor_ranks(x)
    emb_order, _ = _neighbor_ranks(z)
    penalty = 0
    for i in range(n):
        true_nn = set(orig_order[i, :k].tolist())
        for j in emb_order[i, :k]:
            if int(j) not in true_nn:
                penalty += int(orig_rank[i, j]) - k
    return 1.0 - 2.0 * penalty / (n * k * (2 * n - 3 * k - 1))


def continuity(x_orig, z, k=DEFAULT_K):
    """Penalty-free score in [0, 1] for lost original neighbors.

    Exact mirror of :func:`trustworthiness` with the roles of the original
    and embedded spaces swapped: original neighbors missing from the
    embedding's k-neighborhood are penalized by their embedding rank.
    """
    return trustworthiness(z, x_orig, k)


def metrics_report(x_orig, z, labels=None, k=DEFAULT_K):
    """Bundle all metrics into a plain dict (the CLI serializes it as JSON).

    Cluster indices are included only when labels with at least two distinct
    values are provided.
    """
    report = {
        "trustworthiness": trustworthiness(x_orig, z, k),
        "continuity": continuity(x_orig, z, k),
        "k": int(k),
    }
    if labels is not None:
        report["davies_bouldin"] = davies_bouldin(z, labels)
        report["calinski_harabasz"] = calinski_harabasz(z, labels)
    return report
