"""
Synthetic events and false data
===============================

The generator produces six labelled event classes on 7 voltage and 28 current
channels. Genuine events hit every channel with a channel-dependent strength.
False data touches only 2-5 channels with damped oscillations and leaves the
rest at steady state. The correlation across channels tells them apart.
"""

import numpy as np

from pmu_bop import EventLabel, SynthConfig, add_awgn, gen_event, gen_false_data

cfg = SynthConfig()


def mean_max_corr(rec):
    x = np.vstack([rec.voltages, rec.currents])
    dev = x - x[:, : cfg.pre_event_samples].mean(axis=1, keepdims=True)
    r = np.corrcoef(dev)
    np.fill_diagonal(r, -np.inf)
    return r.max(axis=1).mean()


for label in EventLabel.ordered():
    scores = [mean_max_corr(gen_event(label, cfg, s)) for s in range(20)]
    print(f"{label.title:<18} mean best cross-channel correlation {np.mean(scores):.3f}")

rec, touched = gen_false_data(cfg, 3, return_touched=True)
print("\nfalse data record touches channels", touched.tolist())

# Noise at 90 dB SNR is tiny compared to the events.
noisy = add_awgn(rec, 90.0, 0)
delta = np.vstack([noisy.voltages, noisy.currents]) - np.vstack([rec.voltages, rec.currents])
print("largest noise sample:", f"{np.abs(delta).max():.2e}")
