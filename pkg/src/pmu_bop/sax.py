"""Symbolic Aggregate approXimation over sliding windows.

A series of length ``n`` is cut into ``n - omega + 1`` overlapping windows.
Each window is z-normalized, reduced to ``gamma`` segment means (PAA) and each
mean is mapped to a letter by comparing it against equiprobable standard-normal
breakpoints. Consecutive duplicate words are kept (no numerosity reduction).

Words are exposed as strings, but the batch routines work with integer word
indices: the lexicographic rank of the word among all ``alpha ** gamma`` words,
i.e. the word read as a base-``alpha`` number with ``'a' == 0``.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "SaxParams",
    "FLAT_EPSILON",
    "znormalize",
    "paa",
    "paa_weights",
    "breakpoints",
    "symbolize",
    "sax_words",
    "sax_indices",
    "word_to_index",
    "index_to_word",
]

FLAT_EPSILON = 1e-8
LETTERS = string.ascii_lowercase
# word indices are int64
_MAX_VOCAB = 2**62


@dataclass(frozen=True)
class SaxParams:
    """Alphabet size, word size and sliding-window length."""

    alpha: int = 4
    gamma: int = 4
    omega: int = 25

    def __post_init__(self):
        for name in ("alpha", "gamma", "omega"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not 2 <= self.alpha <= 26:
            raise ValueError(f"alpha must be in [2, 26], got {self.alpha}")
        if self.omega < 2:
            raise ValueError(f"omega must be >= 2, got {self.omega}")
        if not 1 <= self.gamma <= self.omega:
            raise ValueError(f"gamma must be in [1, omega={self.omega}], got {self.gamma}")
        if self.alpha**self.gamma > _MAX_VOCAB:
            raise ValueError(f"alpha**gamma = {self.alpha}**{self.gamma} is too large to index")

    @property
    def vocab_size(self) -> int:
        """Number of distinct words, ``alpha ** gamma``."""
        return self.alpha**self.gamma

    def n_words(self, n: int) -> int:
        return n - self.omega + 1


def _check_finite(x: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{what} contains non-finite values")


def znormalize(window, flat_epsilon: float = FLAT_EPSILON) -> np.ndarray:
    """Zero-mean, unit (population) standard deviation copy of `window`.

    Windows whose standard deviation is below `flat_epsilon` map to all zeros.
    """
    x = np.asarray(window, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("window must be a non-empty 1-D sequence")
    if not flat_epsilon > 0:
        raise ValueError("flat_epsilon must be positive")
    _check_finite(x, "window")
    return _znorm_rows(x[np.newaxis, :], flat_epsilon)[0]


def _znorm_rows(x: np.ndarray, flat_epsilon: float) -> np.ndarray:
    # z-normalize along the last axis
    mu = x.mean(axis=-1, keepdims=True)
    centered = x - mu
    sigma = np.sqrt(np.mean(centered * centered, axis=-1, keepdims=True))
    flat = sigma < flat_epsilon
    out = centered / np.where(flat, 1.0, sigma)
    return np.where(flat, 0.0, out)


@lru_cache(maxsize=256)
def paa_weights(length: int, gamma: int) -> np.ndarray:
    """``(length, gamma)`` matrix mapping a window to its PAA segment means.

    Segment ``j`` covers ``[j * length / gamma, (j + 1) * length / gamma)``; a
    sample straddling a boundary contributes to both segments in proportion to
    its overlap. Working in units of ``1 / gamma`` keeps every weight an exact
    ratio ``overlap / length``.
    """
    if not 1 <= gamma <= length:
        raise ValueError(f"gamma must be in [1, {length}], got {gamma}")
    i = np.arange(length)[:, None]
    j = np.arange(gamma)[None, :]
    lo = np.maximum(i * gamma, j * length)
    hi = np.minimum((i + 1) * gamma, (j + 1) * length)
    w = np.clip(hi - lo, 0, None) / length
    w.flags.writeable = False
    return w


def paa(window, gamma: int) -> np.ndarray:
    """Piecewise aggregate approximation of `window` into `gamma` equal-width segment means."""
    x = np.asarray(window, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("window must be a non-empty 1-D sequence")
    if int(gamma) != gamma or not 1 <= gamma <= x.size:
        raise ValueError(f"gamma must be an integer in [1, {x.size}], got {gamma}")
    if gamma == x.size:
        return x.copy()
    return x @ paa_weights(x.size, int(gamma))


@lru_cache(maxsize=32)
def _breakpoints(alpha: int) -> tuple[float, ...]:
    nd = NormalDist()
    return tuple(nd.inv_cdf(i / alpha) for i in range(1, alpha))


def breakpoints(alpha: int) -> np.ndarray:
    """Standard-normal quantiles at ``i / alpha`` for ``i = 1 .. alpha - 1``.

    >>> breakpoints(4).round(2).tolist()
    [-0.67, 0.0, 0.67]
    """
    if isinstance(alpha, bool) or int(alpha) != alpha or not 2 <= alpha <= 26:
        raise ValueError(f"alpha must be an integer in [2, 26], got {alpha!r}")
    return np.array(_breakpoints(int(alpha)))


def _letters(values: np.ndarray, alpha: int) -> np.ndarray:
    # side="right" puts values equal to a breakpoint into the upper region
    return np.searchsorted(breakpoints(alpha), values, side="right")


def symbolize(paa_values, alpha: int) -> str:
    """Map each PAA value to a letter; ties at a breakpoint take the upper letter."""
    v = np.asarray(paa_values, dtype=np.float64).ravel()
    _check_finite(v, "paa_values")
    return "".join(LETTERS[k] for k in _letters(v, alpha))


def word_to_index(word: str, alpha: int) -> int:
    """Lexicographic rank of `word` among all words over the first `alpha` letters."""
    idx = 0
    for ch in word:
        k = ord(ch) - 97
        if not 0 <= k < alpha:
            raise ValueError(f"letter {ch!r} in {word!r} is outside the alphabet of size {alpha}")
        idx = idx * alpha + k
    return idx


def index_to_word(index: int, alpha: int, gamma: int) -> str:
    if not 0 <= index < alpha**gamma:
        raise ValueError(f"word index {index} out of range for alpha={alpha}, gamma={gamma}")
    out = []
    for _ in range(gamma):
        index, k = divmod(int(index), alpha)
        out.append(LETTERS[k])
    return "".join(reversed(out))


def sax_indices(channels, params: SaxParams, flat_epsilon: float = FLAT_EPSILON) -> np.ndarray:
    """Word indices for every sliding window of every channel.

    Parameters
    ----------
    channels : array_like, shape (n,) or (n_channels, n)
    params : SaxParams
    flat_epsilon : float

    Returns
    -------
    np.ndarray of int64, shape (n - omega + 1,) or (n_channels, n - omega + 1)
    """
    x = np.asarray(channels, dtype=np.float64)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[np.newaxis, :]
    if x.ndim != 2:
        raise ValueError(f"expected a 1-D series or 2-D channel array, got shape {x.shape}")
    n = x.shape[1]
    if params.omega > n:
        raise ValueError(f"window length omega={params.omega} exceeds series length n={n}")
    _check_finite(x, "series")

    windows = sliding_window_view(x, params.omega, axis=1)  # (C, W, omega)
    z = _znorm_rows(windows, flat_epsilon)
    if params.gamma == params.omega:
        seg = z
    else:
        seg = z @ paa_weights(params.omega, params.gamma)  # (C, W, gamma)
    letters = _letters(seg, params.alpha)
    place = params.alpha ** np.arange(params.gamma - 1, -1, -1, dtype=np.int64)
    idx = letters.astype(np.int64) @ place
    return idx[0] if squeeze else idx


def sax_words(series, params: SaxParams, flat_epsilon: float = FLAT_EPSILON) -> list[str]:
    """SAX word for every one of the ``n - omega + 1`` window positions of `series`."""
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("series must be 1-D")
    return [index_to_word(int(i), params.alpha, params.gamma) for i in sax_indices(x, params, flat_epsilon)]
