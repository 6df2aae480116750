"""Synthetic labelled PMU event records.

The generator does not simulate a power system. It produces magnitude windows
with the two properties the bag-of-patterns features rely on:

* a genuine event drives every channel with one shared waveform, scaled by a
  channel-dependent attenuation, so channels are strongly correlated;
* a false-data injection replaces a handful of channels with damped
  oscillations while the remaining channels stay at steady state.

Each channel has its own baseline magnitude and a small Gaussian jitter. Every
random draw derives from ``numpy.random.SeedSequence`` keyed by the record seed,
with one child stream per channel, so the steady-state part of a channel does
not depend on which event is layered on top of it.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, EventLabel, EventRecord

__all__ = [
    "DampingParams",
    "SynthConfig",
    "DEFAULT_COUNTS",
    "damped_oscillation",
    "steady_state",
    "gen_event",
    "gen_false_data",
    "add_awgn",
    "add_awgn_dataset",
    "gen_dataset",
    "record_seed",
]

DEFAULT_COUNTS = {
    EventLabel.FAULT: 935,
    EventLabel.GENERATION_LOSS: 115,
    EventLabel.LINE_TRIPPING: 163,
    EventLabel.LOAD_CHANGE: 420,
    EventLabel.SHUNT_SWITCHING: 120,
    EventLabel.FALSE_DATA: 600,
}

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DampingParams:
    """Damping rate `a` (1/s), angular frequency `b` (rad/s), phase `c` (rad), amplitude `k`."""

    a: float
    b: float
    c: float
    k: float

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError(f"damping rate a must be >= 0, got {self.a}")
        if not math.isfinite(self.k):
            raise ValueError("amplitude k must be finite")


def damped_oscillation(p: DampingParams, t):
    """``exp(-a t) * (k cos(b t + c) + k sin(b t + c))``, scalar or elementwise over `t`."""
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0):
        raise ValueError("t must be non-negative")
    phase = p.b * t_arr + p.c
    v = np.exp(-p.a * t_arr) * (p.k * np.cos(phase) + p.k * np.sin(phase))
    return float(v) if v.ndim == 0 else v


def _default_counts() -> dict[EventLabel, int]:
    return dict(DEFAULT_COUNTS)


@dataclass(frozen=True)
class SynthConfig:
    """Shape, class mix and template ranges for synthetic datasets.

    Ranges are ``(low, high)`` pairs sampled uniformly. Amplitude-like ranges are
    fractions of each channel's baseline magnitude.
    """

    n_samples: int = 45
    sample_rate_hz: float = 30.0
    pre_event_samples: int = 15
    n_voltage: int = 7
    n_current: int = 28
    counts: dict[EventLabel, int] = field(default_factory=_default_counts)
    seed: int = 0
    snr_db: float | None = None

    voltage_baseline: tuple[float, float] = (0.95, 1.05)
    current_baseline: tuple[float, float] = (0.2, 1.5)
    jitter: float = 1e-3
    attenuation: tuple[float, float] = (0.2, 1.0)

    # false-data injection
    damping_a: tuple[float, float] = (1.0, 5.0)
    damping_b: tuple[float, float] = (TWO_PI * 1.0, TWO_PI * 5.0)
    damping_c: tuple[float, float] = (0.0, TWO_PI)
    damping_k: tuple[float, float] = (0.05, 0.30)
    false_data_channels: tuple[int, int] = (2, 5)

    # genuine-event templates
    fault_depth: tuple[float, float] = (0.3, 0.7)
    fault_current_spike: tuple[float, float] = (1.0, 3.0)
    fault_duration_s: tuple[float, float] = (0.06, 0.2)
    step_small: tuple[float, float] = (0.005, 0.02)
    step_medium: tuple[float, float] = (0.02, 0.06)
    step_current: tuple[float, float] = (0.1, 0.4)
    settle_tau_s: tuple[float, float] = (0.05, 0.2)
    line_trip_subset: tuple[int, int] = (2, 6)

    def __post_init__(self):
        counts = {EventLabel.parse(k) if isinstance(k, str) else k: int(v) for k, v in self.counts.items()}
        object.__setattr__(self, "counts", counts)
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")
        if not 0 <= self.pre_event_samples < self.n_samples:
            raise ValueError("pre_event_samples must be in [0, n_samples)")
        if self.n_voltage < 1 or self.n_current < 1:
            raise ValueError("channel counts must be >= 1")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if any(v < 0 for v in counts.values()):
            raise ValueError("per-class counts must be >= 0")
        lo, hi = self.false_data_channels
        if not 1 <= lo <= hi:
            raise ValueError("false_data_channels must satisfy 1 <= low <= high")
        if self.snr_db is not None and math.isnan(self.snr_db):
            raise ValueError("snr_db must be a number or None")

    @property
    def n_channels(self) -> int:
        return self.n_voltage + self.n_current

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def replace(self, **changes) -> "SynthConfig":
        return dataclasses.replace(self, **changes)

    def scaled(self, factor: float) -> "SynthConfig":
        """Same config with every class count multiplied by `factor` and rounded."""
        return self.replace(counts={k: int(round(v * factor)) for k, v in self.counts.items()})

    def post_event_times(self) -> np.ndarray:
        """Seconds since onset for each post-event sample."""
        return np.arange(self.n_samples - self.pre_event_samples) / self.sample_rate_hz


def record_seed(seed: int, index: int, stream: int = 0) -> int:
    """Deterministic per-record seed derived from a dataset seed and record index."""
    ss = np.random.SeedSequence([int(seed), int(index), int(stream)])
    return int(ss.generate_state(1, np.uint64)[0])


def _channel_rngs(cfg: SynthConfig, rng_seed: int) -> list[np.random.Generator]:
    return [
        np.random.default_rng(np.random.SeedSequence(int(rng_seed), spawn_key=(0, j)))
        for j in range(cfg.n_channels)
    ]


def _event_rng(rng_seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(rng_seed), spawn_key=(1,)))


def _uniform(rng: np.random.Generator, bounds, size=None):
    lo, hi = bounds
    return rng.uniform(lo, hi, size)


def steady_state(cfg: SynthConfig, rng_seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel baselines plus jitter, as ``(channels, baselines)``.

    ``channels`` has shape ``(n_voltage + n_current, n_samples)`` with voltages
    first. Channel ``j`` only draws from its own random stream.
    """
    rows, bases = [], []
    for j, rng in enumerate(_channel_rngs(cfg, rng_seed)):
        bounds = cfg.voltage_baseline if j < cfg.n_voltage else cfg.current_baseline
        base = rng.uniform(*bounds)
        rows.append(base * (1.0 + cfg.jitter * rng.standard_normal(cfg.n_samples)))
        bases.append(base)
    return np.array(rows), np.array(bases)


def _split(cfg: SynthConfig, channels: np.ndarray, label: EventLabel, rng_seed: int) -> EventRecord:
    return EventRecord(
        label=label,
        voltages=channels[: cfg.n_voltage],
        currents=channels[cfg.n_voltage :],
        sample_rate_hz=cfg.sample_rate_hz,
        id=f"{label.value}-{rng_seed:020d}",
    )


def _random_damping(cfg: SynthConfig, rng: np.random.Generator, amplitude: float) -> DampingParams:
    return DampingParams(
        a=_uniform(rng, cfg.damping_a),
        b=_uniform(rng, cfg.damping_b),
        c=_uniform(rng, cfg.damping_c),
        k=amplitude,
    )


def _settle(t: np.ndarray, tau: float) -> np.ndarray:
    return 1.0 - np.exp(-t / tau)


def _templates(label: EventLabel, cfg: SynthConfig, rng: np.random.Generator):
    """Relative post-event deviations ``(voltage_shape, current_shape, current_signs, current_gain)``.

    Shapes are fractions of baseline. ``current_gain`` multiplies each current
    channel's attenuation (used to concentrate line trips on a few branches).
    """
    t = cfg.post_event_times()
    ones = np.ones(cfg.n_current)
    signs = ones

    if label is EventLabel.FAULT:
        duration = _uniform(rng, cfg.fault_duration_s)
        on = t < duration
        depth = _uniform(rng, cfg.fault_depth)
        spike = _uniform(rng, cfg.fault_current_spike)
        osc = damped_oscillation(
            DampingParams(a=rng.uniform(2.0, 6.0), b=rng.uniform(TWO_PI * 1.0, TWO_PI * 3.0),
                          c=rng.uniform(0, TWO_PI), k=rng.uniform(0.02, 0.06)),
            np.clip(t - duration, 0.0, None),
        )
        v = np.where(on, -depth, osc)
        i = np.where(on, spike, osc * 2.0)
        return v, i, signs, ones

    if label is EventLabel.GENERATION_LOSS:
        step = _uniform(rng, cfg.step_medium)
        osc = damped_oscillation(
            DampingParams(a=rng.uniform(0.3, 1.0), b=rng.uniform(TWO_PI * 0.7, TWO_PI * 1.3),
                          c=-math.pi / 4, k=step * rng.uniform(0.3, 0.6) / math.sqrt(2)),
            t,
        )
        v = -step + osc
        i = 3.0 * (step + osc)
        signs = rng.choice([-1.0, 1.0], size=cfg.n_current)
        return v, i, signs, ones

    if label is EventLabel.LOAD_CHANGE:
        tau = _uniform(rng, cfg.settle_tau_s)
        v = -_uniform(rng, cfg.step_small) * _settle(t, tau)
        i = _uniform(rng, cfg.step_medium) * _settle(t, tau)
        return v, i, signs, ones

    if label is EventLabel.LINE_TRIPPING:
        step = _uniform(rng, cfg.step_small)
        osc = damped_oscillation(
            DampingParams(a=rng.uniform(3.0, 6.0), b=rng.uniform(TWO_PI * 2.0, TWO_PI * 4.0),
                          c=rng.uniform(0, TWO_PI), k=step * rng.uniform(0.5, 1.0)),
            t,
        )
        v = -step + osc
        cur_step = _uniform(rng, cfg.step_current)
        i = cur_step + osc * cur_step / step
        lo, hi = cfg.line_trip_subset
        n_hot = int(rng.integers(min(lo, cfg.n_current), min(hi, cfg.n_current) + 1))
        gain = rng.uniform(0.05, 0.3, cfg.n_current)
        gain[rng.choice(cfg.n_current, size=n_hot, replace=False)] = 1.0
        signs = rng.choice([-1.0, 1.0], size=cfg.n_current)
        return v, i, signs, gain

    if label is EventLabel.SHUNT_SWITCHING:
        step = _uniform(rng, cfg.step_small)
        v = np.full_like(t, step)
        i = np.full_like(t, -_uniform(rng, cfg.step_medium))
        return v, i, signs, ones

    raise ValueError(f"no genuine-event template for {label}")


def gen_event(label: EventLabel, cfg: SynthConfig, rng_seed: int) -> EventRecord:
    """One record of class `label`.

    For genuine events every channel follows the class waveform after the
    onset, scaled by its own attenuation drawn from ``cfg.attenuation``.
    ``FALSE_DATA`` is delegated to :func:`gen_false_data`.
    """
    label = EventLabel.parse(label) if isinstance(label, str) else label
    if label is EventLabel.FALSE_DATA:
        return gen_false_data(cfg, rng_seed)
    channels, bases = steady_state(cfg, rng_seed)
    rng = _event_rng(rng_seed)
    v_shape, i_shape, signs, gain = _templates(label, cfg, rng)
    att = _uniform(rng, cfg.attenuation, cfg.n_channels)
    att[cfg.n_voltage :] *= gain
    pre = cfg.pre_event_samples
    nv = cfg.n_voltage
    channels[:nv, pre:] += (bases[:nv] * att[:nv])[:, None] * v_shape[None, :]
    channels[nv:, pre:] += (bases[nv:] * att[nv:] * signs)[:, None] * i_shape[None, :]
    return _split(cfg, channels, label, rng_seed)


def gen_false_data(cfg: SynthConfig, rng_seed: int, *, return_touched: bool = False):
    """A false-data record: damped oscillations injected on a few channels only.

    With ``return_touched=True`` also returns the sorted indices of the
    falsified channels (voltages first, then currents).
    """
    lo, hi = cfg.false_data_channels
    if hi > cfg.n_channels:
        raise ValueError(
            f"false-data subset size up to {hi} exceeds the {cfg.n_channels} available channels"
        )
    channels, bases = steady_state(cfg, rng_seed)
    rng = _event_rng(rng_seed)
    n_touched = int(rng.integers(lo, hi + 1))
    touched = np.sort(rng.choice(cfg.n_channels, size=n_touched, replace=False))
    t = cfg.post_event_times()
    pre = cfg.pre_event_samples
    for j in touched:
        p = _random_damping(cfg, rng, amplitude=bases[j] * _uniform(rng, cfg.damping_k))
        channels[j, pre:] += damped_oscillation(p, t)
    rec = _split(cfg, channels, EventLabel.FALSE_DATA, rng_seed)
    return (rec, touched) if return_touched else rec


def add_awgn(record: EventRecord, snr_db: float | None, rng_seed: int) -> EventRecord:
    """Add white Gaussian noise at `snr_db` relative to each channel's mean-square power.

    ``None`` or ``+inf`` leaves the record unchanged. Channels with zero power get no noise.
    """
    if snr_db is None or snr_db == math.inf:
        return record
    if not math.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, None or +inf, got {snr_db}")
    x = np.vstack([record.voltages, record.currents])
    power = np.mean(x * x, axis=1)
    sigma = np.sqrt(power / 10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(int(rng_seed))
    noisy = x + sigma[:, None] * rng.standard_normal(x.shape)
    nv = record.voltages.shape[0]
    return record.replace(voltages=noisy[:nv], currents=noisy[nv:])


def add_awgn_dataset(d: Dataset, snr_db: float | None, seed: int) -> Dataset:
    """Noise every record of `d`, each from its own derived seed."""
    return Dataset(tuple(add_awgn(r, snr_db, record_seed(seed, i, stream=1)) for i, r in enumerate(d)))


def gen_dataset(cfg: SynthConfig) -> Dataset:
    """Generate ``cfg.counts`` records per class, shuffled by ``cfg.seed``.

    If ``cfg.snr_db`` is set, noise is added to each record from a seed stream
    separate from the waveform stream.
    """
    labels = [lbl for lbl in EventLabel for _ in range(cfg.counts.get(lbl, 0))]
    records = []
    for i, lbl in enumerate(labels):
        rec = gen_event(lbl, cfg, record_seed(cfg.seed, i))
        if cfg.snr_db is not None:
            rec = add_awgn(rec, cfg.snr_db, record_seed(cfg.seed, i, stream=1))
        records.append(rec)
    order = np.random.default_rng(cfg.seed).permutation(len(records))
    return Dataset(tuple(records[k] for k in order))
