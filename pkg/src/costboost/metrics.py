"""Cost-sensitive error measures, exponential bounds and weight-asymmetry diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import CostSpec, Dataset, Ensemble, InputError

BOUND_VARIANTS = ("symmetric", "cga", "csa")


@dataclass(frozen=True)
class CostErrorReport:
    err_pos: float
    err_neg: float
    global_error: float
    raw: float

    def as_dict(self) -> dict:
        return {"err_pos": self.err_pos, "err_neg": self.err_neg,
                "global": self.global_error, "raw": self.raw}


def cost_error(ensemble: Ensemble, dataset: Dataset, cost_spec: CostSpec) -> CostErrorReport:
    """Per-class error rates combined with the normalized cost asymmetry."""
    wrong = ensemble.predict_batch(dataset.features) != dataset.labels
    m = dataset.m
    err_pos = float(wrong[:m].mean())
    err_neg = float(wrong[m:].mean())
    g = cost_spec.gamma
    return CostErrorReport(err_pos, err_neg, g * err_pos + (1.0 - g) * err_neg,
                           float(wrong.mean()))


def prefix_scores(ensemble: Ensemble, x) -> np.ndarray:
    """Predictor values after 0, 1, ..., T rounds: shape ``(T + 1, rows)``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((len(ensemble) + 1, x.shape[0]))
    for t, mem in enumerate(ensemble.members, start=1):
        h = mem.stump.predict(x)
        out[t] = out[t - 1] + mem.alpha * h * ensemble.vote_weights(h)
    return out


def exp_bound_trace(model, dataset: Dataset, variant: str = "symmetric",
                    weights: Optional[np.ndarray] = None) -> np.ndarray:
    """Exponential upper bound on the training error after each prefix of rounds.

    ``symmetric``: sum of w_i exp(-y_i f(x_i)) with w the initial distribution
    (uniform unless ``weights`` or the model says otherwise).  ``cga``: the
    same with mass gamma spread uniformly over positives and 1 - gamma over
    negatives.  ``csa``: uniform mass with each class cost inside its
    exponent.  Entry 0 is the empty predictor.
    """
    if variant not in BOUND_VARIANTS:
        raise InputError(f"unknown bound variant {variant!r}")
    ensemble = getattr(model, "ensemble", model)
    spec = ensemble.cost_spec
    y = dataset.labels
    m, n = dataset.m, dataset.n
    f = prefix_scores(ensemble, dataset.features)
    if variant == "symmetric":
        if weights is None:
            weights = getattr(model, "initial_weights", None)
        w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
        terms = w * np.exp(-y * f)
    elif variant == "cga":
        g = spec.gamma
        w = np.where(dataset.positive, g / m, (1.0 - g) / (n - m))
        terms = w * np.exp(-y * f)
    else:
        c = np.where(dataset.positive, spec.c_pos, spec.c_neg)
        terms = np.exp(-c * y * f) / n
    return np.array([math.fsum(row) for row in terms])


def error_trace(model, dataset: Dataset, variant: str = "symmetric",
                weights: Optional[np.ndarray] = None) -> np.ndarray:
    """The training error each bound in :func:`exp_bound_trace` dominates.

    ``symmetric``: initial-distribution-weighted error.  ``cga``: the
    cost-sensitive global error.  ``csa``: the plain error rate.  Decisions
    use the sign of the predictor (threshold 0).
    """
    ensemble = getattr(model, "ensemble", model)
    y = dataset.labels
    m, n = dataset.m, dataset.n
    wrong = np.where(prefix_scores(ensemble, dataset.features) >= 0, 1, -1) != y
    if variant == "symmetric":
        if weights is None:
            weights = getattr(model, "initial_weights", None)
        w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
    elif variant == "cga":
        g = ensemble.cost_spec.gamma
        w = np.where(dataset.positive, g / m, (1.0 - g) / (n - m))
    elif variant == "csa":
        w = np.full(n, 1.0 / n)
    else:
        raise InputError(f"unknown bound variant {variant!r}")
    return np.array([math.fsum(row) for row in wrong * w])


def prevalence_ratio(score, cost_spec: CostSpec, variant: str):
    """Positive-class loss over negative-class loss at the same score."""
    s = np.asarray(score, dtype=float)
    if variant == "cga":
        out = np.full(s.shape, cost_spec.c_pos / cost_spec.c_neg)
    elif variant == "csa":
        out = np.exp((cost_spec.c_neg - cost_spec.c_pos) * s)
    else:
        raise InputError(f"unknown prevalence variant {variant!r}")
    return float(out) if out.ndim == 0 else out


def weight_asymmetry_trace(model) -> np.ndarray:
    """Positive-class weight mass at the start of each round."""
    return np.array([r.pos_mass for r in model.trace])


def detect_asymmetry_swap(model, margin: float = 1.0) -> Optional[int]:
    """First round where the positive mass drops below ``gamma * margin``
    while the strong classifier already fits the training data.

    Returns the 1-based round or None.
    """
    g = model.ensemble.cost_spec.gamma
    fitted = False
    for r in model.trace:
        if fitted and r.pos_mass < g * margin:
            return r.round
        fitted = r.train_error == 0.0
    return None
