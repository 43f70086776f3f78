"""Deterministic synthetic datasets and CSV dataset I/O.

Random numbers come from :class:`CounterRNG`, a counter-based SplitMix64
stream, so any port can reproduce the datasets bit for bit:

* ``key = (seed + stream * 0xD1B54A32D192ED03) mod 2**64``
* the k-th output (k = 0, 1, ...) is ``mix(key + (k + 1) * 0x9E3779B97F4A7C15)``
  where ``mix`` is the SplitMix64 finalizer
* a uniform is ``(out >> 11) * 2**-53`` in [0, 1)
* a normal consumes two uniforms u1, u2:
  ``sqrt(-2 log(1 - u1)) * cos(2 pi u2)``
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .core import CostBoostError, Dataset, InputError

GOLDEN = 0x9E3779B97F4A7C15
STREAM_STEP = 0xD1B54A32D192ED03
MASK64 = (1 << 64) - 1

KINDS = ("vj_counterexample", "vj_inverted", "gaussian_blobs", "uniform_random")


class DataFormatError(CostBoostError):
    """A dataset file is malformed."""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class SchemaError(DataFormatError):
    """A dataset file parses but violates the label or column schema."""


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class CounterRNG:
    """Counter-based SplitMix64 generator (see module docstring for the recurrence)."""

    def __init__(self, seed: int, stream: int = 0):
        self.key = (int(seed) + int(stream) * STREAM_STEP) & MASK64
        self.counter = 0

    def raw(self, count: int) -> np.ndarray:
        k = np.arange(self.counter + 1, self.counter + 1 + count, dtype=np.uint64)
        self.counter += count
        with np.errstate(over="ignore"):
            return _mix(np.uint64(self.key) + k * np.uint64(GOLDEN))

    def uniforms(self, count: int) -> np.ndarray:
        return (self.raw(count) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53

    def normals(self, count: int) -> np.ndarray:
        u = self.uniforms(2 * count).reshape(count, 2)
        return np.sqrt(-2.0 * np.log1p(-u[:, 0])) * np.cos(2.0 * math.pi * u[:, 1])


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of a synthetic dataset.

    vj_counterexample: positives in a Gaussian blob of std ``spread`` at the
    origin, negatives on a ring with radius uniform in ``[ring_inner,
    ring_outer]``.  vj_inverted swaps the labels.  gaussian_blobs: isotropic
    blobs of std ``spread`` centred at +/-``separation`` on every coordinate.
    uniform_random: features uniform on [0, 1)^``dims``.
    """

    kind: str = "vj_counterexample"
    n_pos: int = 30
    n_neg: int = 70
    seed: int = 0
    dims: int = 2
    spread: float = 0.6
    ring_inner: float = 2.0
    ring_outer: float = 3.0
    separation: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown synthetic kind {self.kind!r}")
        if self.n_pos < 1 or self.n_neg < 1:
            raise InputError("each class needs at least one example")
        if self.dims < 1:
            raise InputError("dims must be positive")
        if self.kind.startswith("vj") and self.dims != 2:
            raise InputError("the counterexample sets are two-dimensional")


def _ring_and_blob(spec: SynthSpec, rng: CounterRNG):
    blob = spec.spread * rng.normals(2 * spec.n_pos).reshape(spec.n_pos, 2)
    u = rng.uniforms(2 * spec.n_neg).reshape(spec.n_neg, 2)
    radius = spec.ring_inner + (spec.ring_outer - spec.ring_inner) * u[:, 0]
    angle = 2.0 * math.pi * u[:, 1]
    ring = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    return blob, ring


def generate(spec: SynthSpec) -> Dataset:
    """Build the dataset described by ``spec`` (positives first)."""
    rng = CounterRNG(spec.seed)
    if spec.kind in ("vj_counterexample", "vj_inverted"):
        blob, ring = _ring_and_blob(spec, rng)
        x = np.vstack([blob, ring])
        y = np.concatenate([np.ones(spec.n_pos, int), -np.ones(spec.n_neg, int)])
        ds = Dataset(x, y)
        return ds.swap_labels() if spec.kind == "vj_inverted" else ds
    if spec.kind == "gaussian_blobs":
        pos = spec.separation + spec.spread * rng.normals(spec.n_pos * spec.dims)
        neg = -spec.separation + spec.spread * rng.normals(spec.n_neg * spec.dims)
        x = np.vstack([pos.reshape(spec.n_pos, spec.dims), neg.reshape(spec.n_neg, spec.dims)])
    else:
        x = rng.uniforms((spec.n_pos + spec.n_neg) * spec.dims).reshape(-1, spec.dims)
    y = np.concatenate([np.ones(spec.n_pos, int), -np.ones(spec.n_neg, int)])
    return Dataset(x, y)


def random_dataset(n: int, d: int, seed: int, n_pos: Optional[int] = None) -> Dataset:
    """Uniform features with random labels; ``n_pos`` defaults to a seeded draw."""
    rng = CounterRNG(seed, stream=1)
    if n_pos is None:
        n_pos = 1 + int(rng.uniforms(1)[0] * (n - 1))
    return generate(SynthSpec("uniform_random", n_pos, n - n_pos, seed, dims=d))


def _parse_label(text: str, line: int) -> int:
    try:
        value = float(text.replace("\u2212", "-"))
    except ValueError:
        raise DataFormatError(f"label {text!r} is not a number", line) from None
    if value not in (-1.0, 1.0):
        raise SchemaError(f"label must be -1 or 1, got {text!r}", line)
    return int(value)


def read_csv(path) -> tuple[Dataset, Optional[np.ndarray]]:
    """Load ``f1,...,fd,label[,cost]``; returns the dataset and the costs (or None).

    Rows are reordered positives first; costs follow the same reordering.
    """
    path = Path(path)
    try:
        handle = path.open(newline="")
    except OSError as exc:
        raise DataFormatError(f"cannot open {path}: {exc.strerror}") from exc
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise DataFormatError("empty file", 1)
        header = [h.strip() for h in header]
        has_cost = bool(header) and header[-1] == "cost"
        n_feat = len(header) - (2 if has_cost else 1)
        expect = [f"f{i + 1}" for i in range(n_feat)]
        if n_feat < 1 or header[:n_feat] != expect or header[n_feat] != "label":
            raise SchemaError("header must be f1,...,fd,label[,cost]", 1)
        rows, labels, costs = [], [], []
        for line, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise DataFormatError(f"expected {len(header)} fields, got {len(rec)}", line)
            try:
                rows.append([float(v) for v in rec[:n_feat]])
            except ValueError:
                raise DataFormatError("non-numeric feature value", line) from None
            if not all(math.isfinite(v) for v in rows[-1]):
                raise SchemaError("feature values must be finite", line)
            labels.append(_parse_label(rec[n_feat].strip(), line))
            if has_cost:
                try:
                    c = float(rec[-1])
                except ValueError:
                    raise DataFormatError("non-numeric cost", line) from None
                if not (c > 0 and math.isfinite(c)):
                    raise SchemaError("costs must be positive", line)
                costs.append(c)
    if not rows:
        raise SchemaError("no data rows")
    try:
        ds = Dataset.from_unordered(np.array(rows), np.array(labels))
    except InputError as exc:
        raise SchemaError(str(exc)) from exc
    cost_arr = np.array(costs)[ds.permutation] if has_cost else None
    return ds, cost_arr


def load_csv(path) -> Dataset:
    return read_csv(path)[0]


def dataset_csv_text(dataset: Dataset, costs=None) -> str:
    header = [f"f{i + 1}" for i in range(dataset.d)] + ["label"]
    if costs is not None:
        header.append("cost")
    lines = [",".join(header)]
    for i in range(dataset.n):
        fields = [format(v, ".17g") for v in dataset.features[i]] + [str(int(dataset.labels[i]))]
        if costs is not None:
            fields.append(format(float(costs[i]), ".17g"))
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def save_csv(dataset: Dataset, path, costs=None) -> None:
    Path(path).write_text(dataset_csv_text(dataset, costs))
