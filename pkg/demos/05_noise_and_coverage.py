"""
Robustness to noise and missing sensors
=======================================

The same cross-validation repeated with white noise added, and again with two
of the seven voltage measurement points (and their current channels) removed.
"""

from pmu_bop import Hyperparams, SaxParams, SynthConfig, add_awgn_dataset, gen_dataset, kfold_evaluate

params = SaxParams()
hp = Hyperparams()
d = gen_dataset(SynthConfig(seed=0).scaled(0.2))


def accuracy(dataset):
    return kfold_evaluate(dataset, params, "svm", hp, k=10, seed=0).accuracy


base = accuracy(d)
print(f"clean                 {100 * base:.1f}%")
for snr in (90, 60, 40, 20):
    print(f"{snr:>3} dB SNR            {100 * accuracy(add_awgn_dataset(d, snr, 1)):.1f}%")

kept = [0, 2, 3, 4, 6]
reduced = d.select_channels(kept, [j for j in range(28) if j // 4 in kept])
print(f"5 of 7 voltage points  {100 * accuracy(reduced):.1f}%")
