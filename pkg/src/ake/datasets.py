"""Synthetic dataset generators and delimited-file ingestion.

Generators are pure functions of (parameters, seed) built on PCG64 with one
substream per purpose (class angles, noise, axes), so changing the noise
settings never shifts the coordinate draws. CSV serialization uses
shortest round-trip decimal formatting, so save/load reproduces every
float64 bit-exactly.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    EmptyFile,
    InvalidRadii,
    NonBinaryEntry,
    ParseError,
    RaggedRows,
)

RNG_ALGORITHM = "pcg64"


@dataclass
class Dataset:
    """Row-major samples with optional labels and manifold coordinate."""

    X: np.ndarray
    labels: np.ndarray = None
    color: np.ndarray = None
    feature_names: list = None
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.X.shape[0]


def _streams(seed, count):
    return [np.random.Generator(np.random.PCG64(ss)) for ss in np.random.SeedSequence(seed).spawn(count)]


def gen_circles(n_per_class=100, radii=(1.0, 2.0, 3.0), noise_std=0.05, seed=0):
    """Interleaved circular classes in the plane.

    Each class places ``n_per_class`` points at uniformly random angles on a
    circle of its radius, plus isotropic Gaussian noise. Labels are the
    radius indices.
    """
    radii = tuple(float(r) for r in radii)
    if any(r <= 0 for r in radii) or len(set(radii)) != len(radii):
        raise InvalidRadii(f"radii must be positive and distinct, got {radii}")
    if int(n_per_class) < 1:
        raise ValueError("n_per_class must be >= 1")
    n_per_class = int(n_per_class)

    points = []
    for class_seq, r in zip(np.random.SeedSequence(seed).spawn(len(radii)), radii):
        angle_seq, noise_seq = class_seq.spawn(2)
        theta = np.random.Generator(np.random.PCG64(angle_seq)).uniform(
            0.0, 2.0 * np.pi, n_per_class
        )
        xy = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)
        if noise_std > 0:
            noise_rng = np.random.Generator(np.random.PCG64(noise_seq))
            xy = xy + noise_std * noise_rng.standard_normal((n_per_class, 2))
        points.append(xy)
    X = np.vstack(points)
    labels = np.repeat(np.arange(len(radii)), n_per_class)
    return Dataset(
        X=X,
        labels=labels,
        feature_names=["x0", "x1"],
        meta={
            "generator": "circles",
            "rng": RNG_ALGORITHM,
            "seed": int(seed),
            "radii": list(radii),
            "noise_std": float(noise_std),
        },
    )


def gen_swiss_roll(n=1000, noise_std=0.0, seed=0):
    """Curled 2-D sheet in 3-D space; ``color`` stores the roll parameter.

    The roll parameter t is uniform on [1.5*pi, 4.5*pi], the sheet width is
    uniform on [0, 21], and the point is (t*cos t, width, t*sin t) plus
    isotropic Gaussian noise.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    t_rng, y_rng, noise_rng = _streams(seed, 3)
    t = t_rng.uniform(1.5 * np.pi, 4.5 * np.pi, n)
    y = y_rng.uniform(0.0, 21.0, n)
    X = np.stack([t * np.cos(t), y, t * np.sin(t)], axis=1)
    if noise_std > 0:
        X = X + noise_std * noise_rng.standard_normal((n, 3))
    return Dataset(
        X=X,
        color=t,
        feature_names=["x0", "x1", "x2"],
        meta={
            "generator": "swissroll",
            "rng": RNG_ALGORITHM,
            "seed": int(seed),
            "noise_std": float(noise_std),
        },
    )


def format_value(v):
    """Shortest decimal string that parses back to the identical float64."""
    f = float(v)
    if f.is_integer() and abs(f) < 1e16:
        return str(int(f))
    return repr(f)


def save_dataset_csv(ds, path):
    """Write a Dataset as CSV: features, then label and/or color columns."""
    names = ds.feature_names or [f"x{j}" for j in range(ds.X.shape[1])]
    header = list(names)
    if ds.labels is not None:
        header.append("label")
    if ds.color is not None:
        header.append("color")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(ds.X.shape[0]):
            row = [format_value(v) for v in ds.X[i]]
            if ds.labels is not None:
                row.append(str(int(ds.labels[i])))
            if ds.color is not None:
                row.append(format_value(ds.color[i]))
            fh.write(",".join(row) + "\n")


def _resolve_column(spec, header, what):
    """Map a column name or 0-based index to an index."""
    if spec is None:
        return None
    if isinstance(spec, int):
        return spec
    text = str(spec)
    if header is not None and text in header:
        return header.index(text)
    if text.lstrip("-").isdigit():
        return int(text)
    raise ParseError(f"{what} column {spec!r} not found in header")


def _parse_label(token, row, col):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"row {row}, column {col}: cannot parse label {token!r}") from None
    if not value.is_integer():
        raise ParseError(f"row {row}, column {col}: label {token!r} is not an integer")
    return int(value)


def load_csv(path, has_header=True, label_column=None, color_column=None):
    """Parse a rectangular numeric CSV into a Dataset.

    ``label_column`` / ``color_column`` may be a header name or a 0-based
    index; those columns are split out of the feature block. Errors carry
    1-based row and column coordinates.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise EmptyFile(f"{path}: no rows")
    header = [c.strip() for c in rows[0]] if has_header else None
    data_rows = rows[1:] if has_header else rows
    if not data_rows:
        raise EmptyFile(f"{path}: no data rows")

    width = len(data_rows[0])
    label_idx = _resolve_column(label_column, header, "label")
    color_idx = _resolve_column(color_column, header, "color")
    for special, what in ((label_idx, "label"), (color_idx, "color")):
        if special is not None and not 0 <= special < width:
            raise ParseError(f"{what} column index {special} out of range for width {width}")

    feature_cols = [j for j in range(width) if j not in (label_idx, color_idx)]
    X = np.empty((len(data_rows), len(feature_cols)))
    labels = np.empty(len(data_rows), dtype=np.int64) if label_idx is not None else None
    color = np.empty(len(data_rows)) if color_idx is not None else None

    offset = 2 if has_header else 1
    for i, row in enumerate(data_rows):
        if len(row) != width:
            raise RaggedRows(
                f"row {i + offset}: expected {width} columns, found {len(row)}"
            )
        for out_j, j in enumerate(feature_cols):
            token = row[j].strip()
            try:
                X[i, out_j] = float(token)
            except ValueError:
                raise ParseError(
                    f"row {i + offset}, column {j + 1}: cannot parse {token!r}"
                ) from None
        if label_idx is not None:
            labels[i] = _parse_label(row[label_idx].strip(), i + offset, label_idx + 1)
        if color_idx is not None:
            token = row[color_idx].strip()
            try:
                color[i] = float(token)
            except ValueError:
                raise ParseError(
                    f"row {i + offset}, column {color_idx + 1}: cannot parse {token!r}"
                ) from None
    if not np.all(np.isfinite(X)):
        raise ParseError(f"{path}: non-finite feature values")

    names = [header[j] for j in feature_cols] if header is not None else None
    return Dataset(X=X, labels=labels, color=color, feature_names=names)


def load_fingerprints(path):
    """Load a whitespace- or comma-separated 0/1 matrix (Tanimoto inputs)."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            tokens = line.replace(",", " ").split()
            if not tokens:
                continue
            values = []
            for col, tok in enumerate(tokens, start=1):
                if tok == "0":
                    values.append(0.0)
                elif tok == "1":
                    values.append(1.0)
                else:
                    raise NonBinaryEntry(
                        f"row {line_no}, column {col}: {tok!r} is not 0 or 1"
                    )
            rows.append((line_no, values))
    if not rows:
        raise EmptyFile(f"{path}: no data rows")
    width = len(rows[0][1])
    for line_no, values in rows:
        if len(values) != width:
            raise RaggedRows(
                f"row {line_no}: expected {width} columns, found {len(values)}"
            )
    return Dataset(X=np.array([v for _, v in rows], dtype=np.float64))
