"""
Bag of patterns and TF-DF weighting
===================================

Each channel becomes a column of word counts. Words are then weighted by
``(1 + log10 count) * exp(k/N - 1)`` where ``k`` of the ``N`` channels contain
the word. A word seen on every channel keeps full weight; a word seen on one
channel drops to about 0.37 of its term frequency. Genuine grid events move
all channels together, so their shared words stand out.
"""

import numpy as np

from pmu_bop import BopMatrix, SaxParams, feature_vector_block, weight_matrix

params = SaxParams(alpha=3, gamma=2, omega=2)

# Two channels, nine possible words (aa, ab, ..., cc).
counts = np.array([[1, 0], [0, 1], [0, 1], [20, 19], [17, 18], [2, 1], [1, 2], [1, 0], [0, 0]])
m = BopMatrix.from_dense(counts, params)
w = weight_matrix(m)

print("word  counts   weights")
for word, c, row in zip(m.words, m.counts, w.weights):
    print(f"{word:>4}  {c[0]:>2} {c[1]:>2}   {row[0]:.4f} {row[1]:.4f}")

# The feature for a word is its mean weight across channels.
rows, values = feature_vector_block(w)
print("\nfeature block:")
for r, val in zip(rows, values):
    print(f"  {m.words[list(m.rows).index(r)]}: {val:.4f}")
