"""Decision-stump hypothesis pool and per-round selection.

Every candidate's misclassified mass is computed in one pass per feature over
presorted values, split by class: ``B`` (weight of misclassified positives)
and ``D`` (weight of misclassified negatives).  Each side of a threshold is
summed from its own end of the sorted order, so no error is formed by
subtracting two large partial sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import CostBoostError, Dataset, Stump

# Losses within this relative distance of the minimum count as tied.  Sums of
# equal weights taken over different index sets differ by a few ulps, and
# ties must still resolve to the lowest enumeration index.
TIE_RTOL = 1e-9


class SelectionError(CostBoostError):
    """No candidate produced a finite loss."""


@dataclass(frozen=True)
class _FeatureScan:
    order: np.ndarray        # argsort of the feature column
    cut: np.ndarray          # sorted positions ending each distinct-value group but the last
    first_candidate: int     # pool index of this feature's first stump


class StumpPool:
    """All stumps over the training data, in deterministic enumeration order.

    Per feature: one threshold between each pair of consecutive distinct
    values, ascending, polarity +1 before -1.  The constant +1 and -1
    classifiers close the list.
    """

    def __init__(self, dataset: Dataset):
        self.n = dataset.n
        self.m = dataset.m
        self.d = dataset.d
        self._positive = dataset.positive
        self.candidates: list[Stump] = []
        self._scans: list[_FeatureScan] = []
        x = dataset.features
        for j in range(self.d):
            col = x[:, j]
            order = np.argsort(col, kind="stable")
            vals = col[order]
            cut = np.flatnonzero(vals[1:] != vals[:-1])
            self._scans.append(_FeatureScan(order, cut, len(self.candidates)))
            for k in cut:
                lo, hi = vals[k], vals[k + 1]
                mid = 0.5 * (lo + hi)
                thr = mid if lo < mid else hi
                self.candidates.append(Stump.split(j, thr, 1))
                self.candidates.append(Stump.split(j, thr, -1))
        self.constant_pos = len(self.candidates)
        self.candidates.append(Stump.constant(1))
        self.candidates.append(Stump.constant(-1))

    def __len__(self):
        return len(self.candidates)

    def __getitem__(self, i: int) -> Stump:
        return self.candidates[i]

    def index(self, stump: Stump) -> int:
        return self.candidates.index(stump)

    def class_errors(self, weights) -> tuple[np.ndarray, np.ndarray]:
        """Misclassified positive mass ``B`` and negative mass ``D`` per candidate."""
        w = np.asarray(weights, dtype=float)
        if w.shape != (self.n,):
            raise ValueError(f"expected {self.n} weights, got shape {w.shape}")
        wp = np.where(self._positive, w, 0.0)
        wn = np.where(self._positive, 0.0, w)
        size = len(self.candidates)
        b = np.empty(size)
        dn = np.empty(size)
        for scan in self._scans:
            if scan.cut.size == 0:
                continue
            p_sorted = wp[scan.order]
            n_sorted = wn[scan.order]
            left_p = np.cumsum(p_sorted)[scan.cut]
            left_n = np.cumsum(n_sorted)[scan.cut]
            right_p = np.cumsum(p_sorted[::-1])[::-1][scan.cut + 1]
            right_n = np.cumsum(n_sorted[::-1])[::-1][scan.cut + 1]
            start = scan.first_candidate
            stop = start + 2 * scan.cut.size
            # polarity +1 says -1 on the left: positives left and negatives right are wrong
            b[start:stop:2] = left_p
            dn[start:stop:2] = right_n
            b[start + 1:stop:2] = right_p
            dn[start + 1:stop:2] = left_n
        pos_total = wp.sum()
        neg_total = wn.sum()
        b[self.constant_pos], dn[self.constant_pos] = 0.0, neg_total
        b[self.constant_pos + 1], dn[self.constant_pos + 1] = pos_total, 0.0
        return b, dn

    def errors(self, weights) -> np.ndarray:
        b, dn = self.class_errors(weights)
        return b + dn

    def predictions(self, x) -> np.ndarray:
        """Candidate outputs on the rows of ``x``: shape ``(len(pool), rows)``."""
        return np.stack([s.predict(x) for s in self.candidates])


def build_pool(dataset: Dataset) -> StumpPool:
    return StumpPool(dataset)


def weighted_error(stump: Stump, dataset: Dataset, weights) -> float:
    """Total weight of the examples ``stump`` misclassifies."""
    w = np.asarray(weights, dtype=float)
    wrong = stump.predict(dataset.features) != dataset.labels
    return float(w[wrong].sum())


LossFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def argmin_with_ties(losses: np.ndarray) -> int:
    """Lowest index whose loss is within ``TIE_RTOL`` of the finite minimum."""
    losses = np.asarray(losses, dtype=float)
    finite = np.isfinite(losses)
    if not finite.any():
        raise SelectionError("no candidate has a finite loss")
    best = losses[finite].min()
    limit = best + TIE_RTOL * abs(best)
    return int(np.flatnonzero(finite & (losses <= limit))[0])


def select_best(pool: StumpPool, weights, loss: Optional[LossFn] = None):
    """Pick the candidate minimizing ``loss(B, D)`` (default: weighted error).

    Returns ``(stump, loss_value, index)``.
    """
    b, dn = pool.class_errors(weights)
    values = b + dn if loss is None else np.asarray(loss(b, dn), dtype=float)
    i = argmin_with_ties(values)
    return pool[i], float(values[i]), i
