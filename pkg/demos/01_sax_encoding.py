"""
Turning a measurement window into SAX words
===========================================

A sliding window walks over the series one sample at a time. Each window is
z-normalized, squeezed to a few segment means (PAA) and each mean is mapped to a
letter by cutting the standard normal into equally likely bands.
"""

import numpy as np

from pmu_bop import SaxParams, breakpoints, paa, sax_words, znormalize

# The cut points for a four letter alphabet sit at the normal quartiles.
print("breakpoints(4):", np.round(breakpoints(4), 4))

# A voltage magnitude that dips and slowly recovers, sampled at 30 frames/s.
t = np.arange(45) / 30.0
v = 1.0 - 0.3 * np.exp(-4 * np.clip(t - 0.5, 0, None)) * (t >= 0.5)
v += 0.001 * np.random.default_rng(0).standard_normal(45)

# One window, step by step.
window = v[10:35]
z = znormalize(window)
print("window mean/std after z-norm:", round(z.mean(), 12), round(z.std(), 12))
print("PAA of that window:", np.round(paa(z, 4), 3))

# All 21 words of the record at the default alpha=4, gamma=4, window=25.
words = sax_words(v, SaxParams(alpha=4, gamma=4, omega=25))
print(len(words), "words:", " ".join(words))

# Scaling and shifting the signal leaves the words alone.
assert sax_words(120.0 * v + 7.0, SaxParams()) == words

# A perfectly flat window has no shape at all and maps to the middle letter.
print("flat series:", sax_words(np.full(30, 1.02), SaxParams(alpha=5, gamma=4, omega=25))[0])
