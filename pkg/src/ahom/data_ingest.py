"""LIBSVM text datasets and a seeded synthetic fallback."""

import io
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ParameterError
from .problems import LogisticProblem


@dataclass
class Dataset:
    samples: np.ndarray
    raw_labels: np.ndarray
    source: str

    @property
    def shape(self):
        return self.samples.shape


def _parse_number(tok, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"non-numeric token {tok!r}", lineno) from None


def parse_libsvm(stream, dim_override=None, source="<stream>"):
    """Parse ``label idx:val ...`` lines into a dense Dataset.

    ``stream`` is a text stream, a string, or an iterable of lines. Feature
    indices are 1-based and must be strictly increasing within a line.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    labels = []
    rows = []
    max_idx = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        labels.append(_parse_number(toks[0], lineno))
        feats = {}
        prev = 0
        for tok in toks[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise ParseError(f"expected idx:val, got {tok!r}", lineno)
            try:
                idx = int(idx_s)
            except ValueError:
                raise ParseError(f"non-numeric feature index {idx_s!r}", lineno) from None
            if idx < 1:
                raise ParseError("feature index must be ≥ 1", lineno)
            if idx in feats:
                raise ParseError(f"duplicate feature index {idx}", lineno)
            if idx < prev:
                raise ParseError(f"feature indices not increasing ({idx} after {prev})", lineno)
            feats[idx] = _parse_number(val_s, lineno)
            prev = idx
        max_idx = max(max_idx, prev)
        rows.append(feats)

    d = max_idx if dim_override is None else max(max_idx, int(dim_override))
    X = np.zeros((len(rows), d))
    for i, feats in enumerate(rows):
        for idx, val in feats.items():
            X[i, idx - 1] = val
    return Dataset(X, np.array(labels, dtype=np.float64), source)


def load_libsvm(path, dim_override=None):
    with open(path, encoding="utf-8", newline=None) as fh:
        return parse_libsvm(fh, dim_override, source=str(path))


def to_libsvm(ds):
    """Serialise a Dataset to LIBSVM text (zeros omitted, repr-exact values)."""
    out = []
    for label, row in zip(ds.raw_labels, ds.samples):
        parts = [_fmt_label(label)]
        parts += [f"{j + 1}:{float(row[j])!r}" for j in np.flatnonzero(row)]
        out.append(" ".join(parts))
    return "\n".join(out) + ("\n" if out else "")


def _fmt_label(v):
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def map_labels(ds):
    """Map {-1, 0} -> 0 and {+1, 1} -> 1."""
    y = np.asarray(ds.raw_labels, dtype=np.float64)
    out = np.empty(y.shape)
    for i, v in enumerate(y):
        if v == 1.0:
            out[i] = 1.0
        elif v == -1.0 or v == 0.0:
            out[i] = 0.0
        else:
            raise ParameterError(f"unsupported label value {v!r} (expected -1, 0, +1 or 1)")
    return out


def minmax_scale(ds):
    """Rescale every feature column to [0, 1]; constant columns become 0."""
    X = ds.samples
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    span[span == 0] = 1.0
    return Dataset((X - lo) / span, ds.raw_labels.copy(), ds.source)


def synthetic_dataset(m, d, seed):
    """Gaussian features with labels from a planted linear rule plus noise."""
    if m < 1 or d < 1:
        raise ParameterError("m and d must be >= 1")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(d)
    X = rng.standard_normal((m, d))
    noise = 0.5 * rng.standard_normal(m)
    labels = (X @ w + noise > 0).astype(np.float64)
    return Dataset(X, labels, f"synthetic({seed})")


def to_logistic_problem(ds, alpha=1e-5, name=None):
    return LogisticProblem(ds.samples, map_labels(ds), alpha, name=name or "logistic")
