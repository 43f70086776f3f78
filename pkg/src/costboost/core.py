"""Shared domain types: datasets, costs, weights, stumps and ensembles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np


class CostBoostError(Exception):
    """Base class for errors raised by this package."""


class InputError(CostBoostError, ValueError):
    """Invalid argument or malformed input."""


class DegenerateDistributionError(CostBoostError):
    """A class carries zero total weight."""


# voting rules
WEIGHTED_SUM = "weighted_sum"
CSB_COST_VOTE = "csb_cost_vote"
VOTING_RULES = (WEIGHTED_SUM, CSB_COST_VOTE)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Labelled examples stored positives first.

    ``permutation[k]`` is the row the k-th stored example had in the caller's
    original ordering; use :meth:`from_unordered` to build one from arbitrary
    rows.
    """

    features: np.ndarray
    labels: np.ndarray
    permutation: Optional[np.ndarray] = None

    def __post_init__(self):
        x = np.array(self.features, dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        y = np.array(self.labels, dtype=np.int64).ravel()
        if x.ndim != 2 or x.shape[0] != y.shape[0]:
            raise InputError("features must be an (n, d) matrix matching labels")
        if x.shape[0] < 2:
            raise InputError("a dataset needs at least two examples")
        if not np.isin(y, (-1, 1)).all():
            raise InputError("labels must be -1 or +1")
        if not np.isfinite(x).all():
            raise InputError("feature values must be finite")
        m = int((y == 1).sum())
        if m == 0 or m == y.shape[0]:
            raise InputError("both classes must be present")
        if not (y[:m] == 1).all():
            raise InputError("examples must be ordered positives first")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)
        perm = np.arange(y.shape[0]) if self.permutation is None else np.asarray(self.permutation)
        object.__setattr__(self, "permutation", perm)

    @classmethod
    def from_unordered(cls, features, labels) -> "Dataset":
        """Stable-sort rows so positives come first, remembering the permutation."""
        y = np.asarray(labels).ravel()
        order = np.argsort(-y, kind="stable")
        x = np.asarray(features, dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        return cls(x[order], y[order], permutation=order)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def m(self) -> int:
        return int((self.labels == 1).sum())

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def positive(self) -> np.ndarray:
        return self.labels == 1

    def swap_labels(self) -> "Dataset":
        """Exchange the roles of the two classes (re-sorted positives first)."""
        return Dataset.from_unordered(self.features, -self.labels)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.features.shape == other.features.shape
                and np.array_equal(self.features, other.features)
                and np.array_equal(self.labels, other.labels))

    __hash__ = None


@dataclass(frozen=True)
class CostSpec:
    """Misclassification costs: ``c_pos`` for positives, ``c_neg`` for negatives.

    ``example_costs`` optionally gives one positive cost per example (in
    dataset order) for the algorithms that accept example-level asymmetry.
    """

    c_pos: float = 1.0
    c_neg: float = 1.0
    example_costs: Optional[tuple] = None

    def __post_init__(self):
        if not (self.c_pos > 0 and self.c_neg > 0) or not (
                math.isfinite(self.c_pos) and math.isfinite(self.c_neg)):
            raise InputError(f"costs must be positive and finite, got ({self.c_pos}, {self.c_neg})")
        if self.example_costs is not None:
            costs = tuple(float(c) for c in self.example_costs)
            if not all(c > 0 and math.isfinite(c) for c in costs):
                raise InputError("example costs must be positive")
            object.__setattr__(self, "example_costs", costs)

    @property
    def gamma(self) -> float:
        """Normalized cost asymmetry C_P / (C_P + C_N)."""
        return self.c_pos / (self.c_pos + self.c_neg)

    @property
    def symmetric(self) -> bool:
        return self.c_pos == self.c_neg and self.example_costs is None

    def scaled(self, k: float) -> "CostSpec":
        costs = None if self.example_costs is None else tuple(k * c for c in self.example_costs)
        return CostSpec(k * self.c_pos, k * self.c_neg, costs)

    def class_costs(self, dataset: Dataset) -> np.ndarray:
        """Per-example cost vector: example costs when given, else the class cost."""
        if self.example_costs is not None:
            if len(self.example_costs) != dataset.n:
                raise InputError("example_costs length does not match the dataset")
            return np.array(self.example_costs, dtype=float)
        return np.where(dataset.positive, self.c_pos, self.c_neg).astype(float)


@dataclass
class WeightState:
    """A weight vector over examples; AdaBoostDB also keeps class accumulators."""

    weights: np.ndarray
    d_pos: Optional[np.ndarray] = None
    d_neg: Optional[np.ndarray] = None
    acc_pos: float = 1.0
    acc_neg: float = 1.0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if (self.weights < 0).any() or not np.isfinite(self.weights).all():
            raise InputError("weights must be finite and non-negative")

    def total(self) -> float:
        return math.fsum(self.weights)

    def normalize(self) -> "WeightState":
        s = math.fsum(self.weights)
        if s <= 0:
            raise DegenerateDistributionError("weights sum to zero")
        self.weights = self.weights / s
        return self


def normalized(w: np.ndarray) -> np.ndarray:
    """Divide by the compensated sum."""
    s = math.fsum(w)
    if not s > 0:
        raise DegenerateDistributionError("weights sum to zero")
    return w / s


def class_mass(weights: np.ndarray, m: int) -> tuple[float, float]:
    return math.fsum(weights[:m]), math.fsum(weights[m:])


def decompose_asymmetry(weights, m: int):
    """Split a normalized distribution into class mass and class-conditional parts.

    Returns ``(gamma, d_pos, d_neg)`` with ``gamma`` the positive mass and each
    of ``d_pos``/``d_neg`` summing to one over its class.
    """
    w = weights.weights if isinstance(weights, WeightState) else np.asarray(weights, dtype=float)
    pos, neg = class_mass(w, m)
    if pos <= 0 or neg <= 0:
        raise DegenerateDistributionError("a class carries zero weight")
    total = pos + neg
    gamma = pos / total
    return gamma, w[:m] / pos, w[m:] / neg


def compose_weights(cost_spec: CostSpec, d_pos, d_neg) -> WeightState:
    """Global distribution gamma * d_pos on positives, (1 - gamma) * d_neg on negatives."""
    d_pos = np.asarray(d_pos, dtype=float)
    d_neg = np.asarray(d_neg, dtype=float)
    for name, d in (("d_pos", d_pos), ("d_neg", d_neg)):
        if (d < 0).any() or abs(math.fsum(d) - 1.0) > 1e-9:
            raise InputError(f"{name} must be a probability distribution")
    gamma = cost_spec.gamma
    return WeightState(np.concatenate([gamma * d_pos, (1.0 - gamma) * d_neg]))


THRESHOLD = "threshold"
CONSTANT = "constant"


@dataclass(frozen=True)
class Stump:
    """Axis-aligned decision stump or a constant classifier.

    A threshold stump outputs ``polarity`` where ``x[feature] >= threshold``
    and ``-polarity`` elsewhere (sign of zero taken as +1).
    """

    kind: str
    feature_index: int = -1
    threshold: float = 0.0
    polarity: int = 1
    constant_sign: int = 1

    @classmethod
    def constant(cls, sign: int) -> "Stump":
        return cls(CONSTANT, constant_sign=int(sign))

    @classmethod
    def split(cls, feature: int, threshold: float, polarity: int) -> "Stump":
        return cls(THRESHOLD, int(feature), float(threshold), int(polarity))

    def predict(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if self.kind == CONSTANT:
            return np.full(x.shape[0], self.constant_sign, dtype=np.int64)
        side = np.where(x[:, self.feature_index] >= self.threshold, 1, -1)
        return self.polarity * side

    def to_dict(self) -> dict:
        if self.kind == CONSTANT:
            return {"kind": CONSTANT, "feature": None, "threshold": None,
                    "polarity": self.constant_sign}
        return {"kind": THRESHOLD, "feature": self.feature_index,
                "threshold": self.threshold, "polarity": self.polarity}

    @classmethod
    def from_dict(cls, d: dict) -> "Stump":
        if d["kind"] == CONSTANT:
            return cls.constant(d["polarity"])
        if d["kind"] != THRESHOLD or d["polarity"] not in (-1, 1):
            raise InputError(f"bad stump record {d!r}")
        return cls.split(d["feature"], d["threshold"], d["polarity"])


@dataclass(frozen=True)
class Member:
    alpha: float
    stump: Stump


@dataclass(frozen=True)
class Ensemble:
    members: tuple = ()
    threshold: float = 0.0
    voting: str = WEIGHTED_SUM
    cost_spec: CostSpec = field(default_factory=CostSpec)

    def __post_init__(self):
        if self.voting not in VOTING_RULES:
            raise InputError(f"unknown voting rule {self.voting!r}")
        object.__setattr__(self, "members", tuple(
            m if isinstance(m, Member) else Member(*m) for m in self.members))
        if not all(math.isfinite(m.alpha) for m in self.members):
            raise InputError("ensemble weights must be finite")

    def __len__(self):
        return len(self.members)

    @property
    def n_features(self) -> int:
        feats = [m.stump.feature_index for m in self.members if m.stump.kind == THRESHOLD]
        return max(feats) + 1 if feats else 0

    def vote_weights(self, h: np.ndarray) -> np.ndarray:
        """Per-member multiplier of ``alpha * h`` (1, or the class cost of the vote)."""
        if self.voting == WEIGHTED_SUM:
            return np.ones_like(h, dtype=float)
        return np.where(h > 0, self.cost_spec.c_pos, self.cost_spec.c_neg)

    def scores(self, x, upto: Optional[int] = None) -> np.ndarray:
        """Predictor value (or cost-weighted vote sum) for each row of ``x``."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        out = np.zeros(x.shape[0])
        for mem in self.members[:upto]:
            h = mem.stump.predict(x)
            out += mem.alpha * h * self.vote_weights(h)
        return out

    def decide(self, scores) -> np.ndarray:
        return np.where(np.asarray(scores) >= self.threshold, 1, -1)

    def predict_batch(self, x) -> np.ndarray:
        return self.decide(self.scores(x))

    def replace_threshold(self, phi: float) -> "Ensemble":
        return replace(self, threshold=float(phi))

    def truncated(self, t: int) -> "Ensemble":
        return Ensemble(self.members[:t], self.threshold, self.voting, self.cost_spec)


def predict(ensemble: Ensemble, x) -> tuple[int, float]:
    """Label and score for one feature vector; a score equal to the threshold is +1."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InputError("predict takes a single feature vector")
    if not ensemble.members:
        raise InputError("empty ensemble")
    need = ensemble.n_features
    if need and x.shape[0] < need:
        raise InputError(f"expected at least {need} features, got {x.shape[0]}")
    score = float(ensemble.scores(x)[0])
    return (1 if score >= ensemble.threshold else -1), score


@dataclass(frozen=True)
class RoundTrace:
    round: int
    epsilon: float
    alpha: float
    z: float
    bound: float
    train_error: float
    pos_error: float
    neg_error: float
    pos_mass: float
    stump_index: int = -1

    CSV_FIELDS = ("round", "epsilon", "alpha", "z", "bound", "train_error",
                  "pos_error", "neg_error", "pos_mass")

    def csv_row(self) -> list[str]:
        return [str(self.round)] + [format(float(getattr(self, k)), ".17g")
                                    for k in self.CSV_FIELDS[1:]]
