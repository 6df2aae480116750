"""Event records, datasets and the JSON-Lines dataset format."""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "EventLabel",
    "EventRecord",
    "Dataset",
    "DatasetError",
    "as_series",
    "load_dataset",
    "save_dataset",
    "dumps_dataset",
]


class DatasetError(ValueError):
    """Raised for malformed records or inconsistent datasets."""


class EventLabel(enum.Enum):
    """The six event classes, in canonical (confusion-matrix) order."""

    FALSE_DATA = "false_data"
    FAULT = "fault"
    GENERATION_LOSS = "generation_loss"
    LOAD_CHANGE = "load_change"
    LINE_TRIPPING = "line_tripping"
    SHUNT_SWITCHING = "shunt_switching"

    @property
    def index(self) -> int:
        return _LABEL_INDEX[self]

    @property
    def title(self) -> str:
        return self.value.replace("_", " ").title()

    @classmethod
    def ordered(cls) -> list["EventLabel"]:
        return list(cls)

    @classmethod
    def parse(cls, text: str) -> "EventLabel":
        try:
            return cls(text.strip().lower())
        except ValueError:
            valid = ", ".join(lbl.value for lbl in cls)
            raise DatasetError(f"unknown label {text!r} (expected one of {valid})") from None


_LABEL_INDEX = {lbl: i for i, lbl in enumerate(EventLabel)}


def as_series(samples, *, name: str = "series") -> np.ndarray:
    """Return `samples` as a read-only 1-D float64 array, checking it is finite and non-empty."""
    arr = np.array(samples, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DatasetError(f"{name} must be a non-empty 1-D sequence, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DatasetError(f"{name} contains non-finite samples")
    arr.flags.writeable = False
    return arr


def _as_channels(values, kind: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=np.float64)
    except ValueError:
        # ragged nested lists
        raise DatasetError(f"{kind} channels have unequal lengths") from None
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DatasetError(f"{kind} must be a non-empty list of equal-length channels, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DatasetError(f"{kind} contain non-finite samples")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class EventRecord:
    """A labelled multivariate window: voltage and current magnitude channels.

    ``voltages`` has shape ``(n_voltage, n)`` and ``currents`` ``(n_current, n)``;
    both are stored as read-only float64 arrays.
    """

    label: EventLabel
    voltages: np.ndarray
    currents: np.ndarray
    sample_rate_hz: float = 30.0
    id: str = ""

    def __post_init__(self):
        if not isinstance(self.label, EventLabel):
            object.__setattr__(self, "label", EventLabel.parse(str(self.label)))
        v = _as_channels(self.voltages, "voltages")
        c = _as_channels(self.currents, "currents")
        if v.shape[1] != c.shape[1]:
            raise DatasetError(
                f"voltage channels have {v.shape[1]} samples but current channels have {c.shape[1]}"
            )
        rate = float(self.sample_rate_hz)
        if not (np.isfinite(rate) and rate > 0):
            raise DatasetError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        object.__setattr__(self, "voltages", v)
        object.__setattr__(self, "currents", c)
        object.__setattr__(self, "sample_rate_hz", rate)
        object.__setattr__(self, "id", str(self.id))

    @property
    def n_samples(self) -> int:
        return self.voltages.shape[1]

    @property
    def shape(self) -> tuple[int, int, int]:
        """``(n_voltage, n_current, n_samples)``."""
        return self.voltages.shape[0], self.currents.shape[0], self.n_samples

    def replace(self, **changes) -> "EventRecord":
        kw = dict(
            label=self.label,
            voltages=self.voltages,
            currents=self.currents,
            sample_rate_hz=self.sample_rate_hz,
            id=self.id,
        )
        kw.update(changes)
        return EventRecord(**kw)

    def select_channels(self, voltage_idx, current_idx) -> "EventRecord":
        """Copy keeping only the given voltage and current channel indices, in the given order."""
        return self.replace(
            voltages=self.voltages[np.asarray(voltage_idx, dtype=np.int64)],
            currents=self.currents[np.asarray(current_idx, dtype=np.int64)],
        )

    def __eq__(self, other):
        if not isinstance(other, EventRecord):
            return NotImplemented
        return (
            self.label is other.label
            and self.id == other.id
            and self.sample_rate_hz == other.sample_rate_hz
            and np.array_equal(self.voltages, other.voltages)
            and np.array_equal(self.currents, other.currents)
        )

    __hash__ = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "label": self.label.value,
            "sample_rate_hz": self.sample_rate_hz,
            "voltages": self.voltages.tolist(),
            "currents": self.currents.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EventRecord":
        if not isinstance(obj, dict):
            raise DatasetError("record must be a JSON object")
        missing = {"label", "voltages", "currents"} - obj.keys()
        if missing:
            raise DatasetError(f"record is missing fields: {', '.join(sorted(missing))}")
        return cls(
            label=EventLabel.parse(str(obj["label"])),
            voltages=obj["voltages"],
            currents=obj["currents"],
            sample_rate_hz=obj.get("sample_rate_hz", 30.0),
            id=obj.get("id", ""),
        )


@dataclass(frozen=True)
class Dataset:
    """An ordered, shape-homogeneous collection of event records."""

    records: tuple[EventRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        records = tuple(self.records)
        if records:
            shape = records[0].shape
            for i, rec in enumerate(records):
                if rec.shape != shape:
                    raise DatasetError(
                        f"record {i} ({rec.id!r}) has shape {rec.shape}, expected {shape} "
                        "(voltage channels, current channels, samples)"
                    )
        object.__setattr__(self, "records", records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[EventRecord]:
        return iter(self.records)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Dataset(self.records[i])
        return self.records[i]

    @property
    def labels(self) -> list[EventLabel]:
        return [r.label for r in self.records]

    def label_counts(self) -> dict[EventLabel, int]:
        counts = {lbl: 0 for lbl in EventLabel}
        for r in self.records:
            counts[r.label] += 1
        return counts

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset(tuple(self.records[i] for i in indices))

    def select_channels(self, voltage_idx, current_idx) -> "Dataset":
        """Apply :meth:`EventRecord.select_channels` to every record."""
        return Dataset(tuple(r.select_channels(voltage_idx, current_idx) for r in self.records))


def dumps_dataset(d: Dataset) -> str:
    """JSON-Lines text for `d`, one record per line (empty string for an empty dataset)."""
    return "".join(json.dumps(rec.to_json(), allow_nan=False, separators=(",", ":")) + "\n" for rec in d)


def save_dataset(d: Dataset, path: str | os.PathLike) -> None:
    """Write `d` as JSON Lines.

    Floats are written with ``repr`` precision, so loading the file back gives
    bit-identical samples. Non-finite samples cannot occur in a valid record;
    ``allow_nan=False`` keeps that guarantee at the serialization boundary too.
    """
    text = dumps_dataset(d)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def load_dataset(path: str | os.PathLike) -> Dataset:
    """Read a JSON-Lines dataset written by :func:`save_dataset`.

    Blank lines are ignored. Errors name the 1-based line number.
    """
    records = []
    shape = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = EventRecord.from_json(json.loads(line))
            except (json.JSONDecodeError, DatasetError, TypeError) as exc:
                raise DatasetError(f"{os.fspath(path)}:{lineno}: {exc}") from exc
            if shape is None:
                shape = rec.shape
            elif rec.shape != shape:
                raise DatasetError(
                    f"{os.fspath(path)}:{lineno}: record shape {rec.shape} differs from {shape} "
                    "(voltage channels, current channels, samples)"
                )
            records.append(rec)
    return Dataset(tuple(records))
