"""Model persistence.

A model file is a single JSON document with a ``format_version`` field.
Numeric arrays are stored as base64-encoded little-endian IEEE-754 float64,
row-major, next to explicit shape fields, so save/load round-trips are
byte-identical and loading validates shapes before touching the payload.
"""

import base64
import json

import numpy as np

from .embedding import KernelEmbedding
from .exceptions import ModelFormatError
from .kernels import KernelSpec
from .kpca import KernelPCA

FORMAT_VERSION = 1


def _encode_array(a):
    a = np.ascontiguousarray(a, dtype="<f8")
    return {
        "shape": list(a.shape),
        "data": base64.b64encode(a.tobytes()).decode("ascii"),
    }


def _decode_array(doc, name):
    try:
        shape = tuple(int(s) for s in doc["shape"])
        raw = base64.b64decode(doc["data"].encode("ascii"), validate=True)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"array {name!r} is malformed: {exc}") from exc
    arr = np.frombuffer(raw, dtype="<f8")
    expected = int(np.prod(shape)) if shape else 1
    if arr.size != expected:
        raise ModelFormatError(
            f"array {name!r}: payload holds {arr.size} values, shape {shape} "
            f"needs {expected}"
        )
    return arr.reshape(shape).astype(np.float64, copy=True)


def _dump(doc, path):
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")


def _load_document(path, expected_type):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{path}: expected a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: format_version {version!r} is not supported (expected {FORMAT_VERSION})"
        )
    if doc.get("model_type") != expected_type:
        raise ModelFormatError(
            f"{path}: model_type {doc.get('model_type')!r}, expected {expected_type!r}"
        )
    return doc


def save_embedding_model(model, path):
    """Persist a fitted KernelEmbedding."""
    doc = {
        "format_version": FORMAT_VERSION,
        "model_type": "kernel_embedding",
        "precomputed": bool(model.precomputed),
        "input_kernel": None if model.input_kernel_ is None else model.input_kernel_.to_dict(),
        "latent_kernel": model.latent_kernel_.to_dict(),
        "n_samples": int(model.weights_.shape[0]),
        "n_features": None if model.n_features_in_ is None else int(model.n_features_in_),
        "n_components": int(model.projection_.shape[1]),
        "seed": int(model.random_state),
        "projection": _encode_array(model.projection_),
        "weights": _encode_array(model.weights_),
        "embedding": _encode_array(model.embedding_),
        "optimizer": {
            "method": model.method,
            "iterations": int(model.n_iter_),
            "stage_a_loss": float(model.stage_a_loss_),
            "final_loss": float(model.final_loss_),
            "ridge_used": float(model.ridge_used_),
            "solver_path": model.solver_path_,
        },
    }
    if model.precomputed:
        doc["gram_train"] = _encode_array(model.gram_train_)
    else:
        doc["X_train"] = _encode_array(model.X_train_)
    _dump(doc, path)


def load_embedding_model(path):
    """Load a KernelEmbedding model file into a ready-to-transform estimator."""
    doc = _load_document(path, "kernel_embedding")
    try:
        precomputed = bool(doc["precomputed"])
        n = int(doc["n_samples"])
        d = int(doc["n_components"])
        latent_kernel = KernelSpec.from_dict(doc["latent_kernel"])
        input_kernel = (
            None if doc["input_kernel"] is None else KernelSpec.from_dict(doc["input_kernel"])
        )
        optimizer = doc["optimizer"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: missing or malformed field: {exc}") from exc

    model = KernelEmbedding(
        n_components=d,
        precomputed=precomputed,
        method=optimizer.get("method", "gd"),
        random_state=int(doc.get("seed", 0)),
    )
    model.projection_ = _decode_array(doc["projection"], "projection")
    model.weights_ = _decode_array(doc["weights"], "weights")
    model.embedding_ = _decode_array(doc["embedding"], "embedding")
    model.input_kernel_ = input_kernel
    model.latent_kernel_ = latent_kernel
    model.stage_a_loss_ = float(optimizer["stage_a_loss"])
    model.final_loss_ = float(optimizer["final_loss"])
    model.ridge_used_ = float(optimizer["ridge_used"])
    model.solver_path_ = optimizer["solver_path"]
    model.n_iter_ = int(optimizer["iterations"])
    model.loss_trace_ = []
    if precomputed:
        model.gram_train_ = _decode_array(doc["gram_train"], "gram_train")
        model.X_train_ = None
        model.n_features_in_ = None
    else:
        model.X_train_ = _decode_array(doc["X_train"], "X_train")
        model.n_features_in_ = int(doc["n_features"])
        model.gram_train_ = None

    _check_model_shapes(path, model, n, d)
    return model


def _check_model_shapes(path, model, n, d):
    if model.projection_.shape != (n, d):
        raise ModelFormatError(
            f"{path}: projection shape {model.projection_.shape} does not match "
            f"declared ({n}, {d})"
        )
    if model.weights_.shape != (n,):
        raise ModelFormatError(f"{path}: weights shape {model.weights_.shape} != ({n},)")
    if model.embedding_.shape != (n, d):
        raise ModelFormatError(f"{path}: embedding shape mismatch")
    if model.X_train_ is not None and model.X_train_.shape != (n, model.n_features_in_):
        raise ModelFormatError(f"{path}: X_train shape mismatch")
    if model.gram_train_ is not None and model.gram_train_.shape != (n, n):
        raise ModelFormatError(f"{path}: gram_train shape mismatch")


def save_kpca_model(model, path):
    """Persist a fitted KernelPCA."""
    doc = {
        "format_version": FORMAT_VERSION,
        "model_type": "kernel_pca",
        "kernel": model.kernel_.to_dict(),
        "n_samples": int(model.X_train_.shape[0]),
        "n_features": int(model.n_features_in_),
        "n_components": int(model.projection_.shape[1]),
        "projection": _encode_array(model.projection_),
        "eigenvalues": _encode_array(model.eigenvalues_),
        "column_means": _encode_array(model.column_means_),
        "grand_mean": float(model.grand_mean_),
        "X_train": _encode_array(model.X_train_),
        "embedding": _encode_array(model.embedding_),
    }
    _dump(doc, path)


def load_kpca_model(path):
    """Load a KernelPCA model file into a ready-to-transform estimator."""
    doc = _load_document(path, "kernel_pca")
    try:
        n = int(doc["n_samples"])
        d = int(doc["n_components"])
        spec = KernelSpec.from_dict(doc["kernel"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: missing or malformed field: {exc}") from exc
    model = KernelPCA(n_components=d, kernel=spec.kind, sigma=spec.sigma)
    model.kernel_ = spec
    model.projection_ = _decode_array(doc["projection"], "projection")
    model.eigenvalues_ = _decode_array(doc["eigenvalues"], "eigenvalues")
    model.column_means_ = _decode_array(doc["column_means"], "column_means")
    model.grand_mean_ = float(doc["grand_mean"])
    model.X_train_ = _decode_array(doc["X_train"], "X_train")
    model.embedding_ = _decode_array(doc["embedding"], "embedding")
    model.n_features_in_ = int(doc["n_features"])
    if model.projection_.shape != (n, d):
        raise ModelFormatError(f"{path}: projection shape mismatch")
    if model.X_train_.shape[0] != n:
        raise ModelFormatError(f"{path}: X_train row count mismatch")
    return model
