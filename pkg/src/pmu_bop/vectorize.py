"""Multivariate bag-of-patterns and TF-DF feature extraction.

Every channel of a record becomes a bag of SAX words; stacking the bags gives a
word-by-channel count matrix. Counts are reweighted with a log term frequency
times a *document frequency* factor that grows with the fraction of channels
containing the word, so patterns shared by many channels dominate. The mean of
each weighted row is one feature; current and voltage blocks are concatenated,
current first.

Only words that actually occur are stored. Row order is ascending word index,
which is lexicographic word order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import EventRecord
from .sax import FLAT_EPSILON, SaxParams, index_to_word, sax_indices, word_to_index

__all__ = [
    "BopMatrix",
    "WeightMatrix",
    "FeatureVector",
    "bow",
    "bop_matrix",
    "bop_from_indices",
    "tf",
    "df",
    "idf",
    "weight_matrix",
    "feature_vector_block",
    "extract_features",
    "BLOCKS",
]

# feature-key prefixes: current block first, then voltage
BLOCKS = ("i", "v")


def tf(count) -> float | np.ndarray:
    """Log-scaled term frequency: ``1 + log10(count)`` for positive counts, else 0."""
    c = np.asarray(count, dtype=np.float64)
    if np.any(c < 0):
        raise ValueError("counts must be non-negative")
    out = np.zeros_like(c)
    pos = c > 0
    out[pos] = 1.0 + np.log10(c[pos])
    return float(out) if out.ndim == 0 else out


def df(channels_containing, total_channels: int) -> float | np.ndarray:
    """Scaled document frequency ``exp(containing / N - 1)``; equals 1 when every channel has the word."""
    if total_channels <= 0:
        raise ValueError("total_channels must be positive")
    k = np.asarray(channels_containing, dtype=np.float64)
    if np.any(k < 0) or np.any(k > total_channels):
        raise ValueError(f"channels_containing must be in [0, {total_channels}]")
    out = np.exp(k / total_channels - 1.0)
    return float(out) if out.ndim == 0 else out


def idf(channels_containing: int, total_channels: int) -> float:
    """Classical inverse document frequency ``log10(N / containing)``.

    Kept for comparison with the DF weighting; the feature pipeline never uses it.
    """
    if total_channels <= 0:
        raise ValueError("total_channels must be positive")
    if not 1 <= channels_containing <= total_channels:
        raise ValueError(f"channels_containing must be in [1, {total_channels}]")
    return math.log10(total_channels / channels_containing)


def bow(words: Sequence[str], params: SaxParams) -> dict[str, int]:
    """Word counts for one channel, keyed by word in lexicographic order.

    Absent words are omitted; the implied vector has ``alpha ** gamma`` entries.
    """
    counts: dict[int, int] = {}
    for w in words:
        if len(w) != params.gamma:
            raise ValueError(f"word {w!r} has length {len(w)}, expected gamma={params.gamma}")
        i = word_to_index(w, params.alpha)
        counts[i] = counts.get(i, 0) + 1
    return {index_to_word(i, params.alpha, params.gamma): counts[i] for i in sorted(counts)}


@dataclass(frozen=True, eq=False)
class BopMatrix:
    """Word-by-channel count matrix, stored by present rows only.

    Attributes
    ----------
    rows : int64 array, shape (r,)
        Sorted word indices that occur in at least one channel.
    counts : int64 array, shape (r, n_channels)
    params : SaxParams
    """

    rows: np.ndarray
    counts: np.ndarray
    params: SaxParams

    @property
    def n_channels(self) -> int:
        return self.counts.shape[1]

    @property
    def words(self) -> list[str]:
        return [index_to_word(int(i), self.params.alpha, self.params.gamma) for i in self.rows]

    def to_dense(self) -> np.ndarray:
        """All ``alpha ** gamma`` rows. Only sensible for small vocabularies."""
        out = np.zeros((self.params.vocab_size, self.n_channels), dtype=np.int64)
        out[self.rows] = self.counts
        return out

    @classmethod
    def from_dense(cls, dense, params: SaxParams) -> "BopMatrix":
        m = np.asarray(dense, dtype=np.int64)
        if m.ndim != 2 or m.shape[0] != params.vocab_size:
            raise ValueError(f"expected {params.vocab_size} rows, got shape {m.shape}")
        if np.any(m < 0):
            raise ValueError("counts must be non-negative")
        rows = np.flatnonzero(m.any(axis=1))
        return cls(rows=rows, counts=m[rows], params=params)


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """TF-DF weights with the same row layout as the source :class:`BopMatrix`."""

    rows: np.ndarray
    weights: np.ndarray
    params: SaxParams

    @property
    def n_channels(self) -> int:
        return self.weights.shape[1]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.params.vocab_size, self.n_channels))
        out[self.rows] = self.weights
        return out


def bop_from_indices(word_idx: np.ndarray, params: SaxParams) -> BopMatrix:
    """Count matrix from a ``(n_channels, n_words)`` array of word indices."""
    word_idx = np.asarray(word_idx, dtype=np.int64)
    n_channels = word_idx.shape[0]
    if n_channels == 0:
        raise ValueError("at least one channel is required")
    rows, inverse = np.unique(word_idx, return_inverse=True)
    inverse = inverse.reshape(word_idx.shape)
    counts = np.zeros((rows.size, n_channels), dtype=np.int64)
    cols = np.broadcast_to(np.arange(n_channels)[:, None], word_idx.shape)
    np.add.at(counts, (inverse.ravel(), cols.ravel()), 1)
    return BopMatrix(rows=rows, counts=counts, params=params)


def bop_matrix(channels, params: SaxParams, flat_epsilon: float = FLAT_EPSILON) -> BopMatrix:
    """Bag-of-patterns matrix: one bag-of-words column per channel."""
    x = np.asarray(channels, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("channels must be a non-empty list of equal-length series")
    return bop_from_indices(sax_indices(x, params, flat_epsilon), params)


def weight_matrix(m: BopMatrix) -> WeightMatrix:
    """TF-DF weighting: ``tf(count) * df(#channels containing the word, N)``.

    Zero counts stay exactly zero.
    """
    present = (m.counts > 0).sum(axis=1)
    w = tf(m.counts.astype(np.float64)) * df(present, m.n_channels)[:, None]
    return WeightMatrix(rows=m.rows, weights=np.asarray(w, dtype=np.float64), params=m.params)


def feature_vector_block(w: WeightMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Row means of the weight matrix, as ``(word_indices, values)``.

    The divisor is the total channel count, not the number of channels
    containing the word.
    """
    # sorted before summing so the result is bit-identical under channel permutation
    return w.rows, np.sort(w.weights, axis=1).sum(axis=1) / w.n_channels


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Sparse ``[current | voltage]`` feature vector of length ``2 * alpha ** gamma``.

    ``indices`` are positions in the full layout (voltage entries are offset by
    ``alpha ** gamma``) in ascending order.
    """

    indices: np.ndarray
    values: np.ndarray
    params: SaxParams

    @property
    def dim(self) -> int:
        return 2 * self.params.vocab_size

    def key(self, position: int) -> str:
        block, word = divmod(int(position), self.params.vocab_size)
        return f"{BLOCKS[block]}:{index_to_word(word, self.params.alpha, self.params.gamma)}"

    def to_dict(self) -> dict[str, float]:
        return {self.key(i): float(v) for i, v in zip(self.indices, self.values)}

    @classmethod
    def from_dict(cls, features: dict[str, float], params: SaxParams) -> "FeatureVector":
        pos = np.array([feature_key_to_position(k, params) for k in features], dtype=np.int64)
        vals = np.array(list(features.values()), dtype=np.float64)
        order = np.argsort(pos, kind="stable")
        return cls(indices=pos[order], values=vals[order], params=params)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def __eq__(self, other):
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return (
            self.params == other.params
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def feature_key_to_position(key: str, params: SaxParams) -> int:
    block, _, word = key.partition(":")
    if block not in BLOCKS or len(word) != params.gamma:
        raise ValueError(f"bad feature key {key!r}")
    return BLOCKS.index(block) * params.vocab_size + word_to_index(word, params.alpha)


def _block(channels: np.ndarray, params: SaxParams, flat_epsilon: float):
    return feature_vector_block(weight_matrix(bop_matrix(channels, params, flat_epsilon)))


def extract_features(
    record: EventRecord, params: SaxParams, flat_epsilon: float = FLAT_EPSILON
) -> FeatureVector:
    """Feature vector of one record: TF-DF row means of currents, then voltages."""
    i_rows, i_vals = _block(record.currents, params, flat_epsilon)
    v_rows, v_vals = _block(record.voltages, params, flat_epsilon)
    return FeatureVector(
        indices=np.concatenate([i_rows, v_rows + params.vocab_size]),
        values=np.concatenate([i_vals, v_vals]),
        params=params,
    )
