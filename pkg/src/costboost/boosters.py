"""The AdaBoost family: symmetric AdaBoost and its cost-sensitive variants.

Every trainer takes ``(config, dataset, pool)`` and returns a
:class:`TrainedModel` holding the ensemble and one :class:`RoundTrace` per
completed round.  Weights are renormalized every round in all variants; the
per-round ``z`` recorded in the trace is the normalizer of the update applied
to an already normalized distribution, so the running product of ``z`` equals
the initial-weight average of the accumulated update factors.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import (CSB_COST_VOTE, WEIGHTED_SUM, CostBoostError, CostSpec, Dataset,
                   Ensemble, InputError, Member, RoundTrace, class_mass, compose_weights,
                   decompose_asymmetry, normalized)
from .numerics import bisect_many, int_pow, positive_poly_roots
from .weaklearn import SelectionError, StumpPool, argmin_with_ties, build_pool

log = logging.getLogger(__name__)

ALGORITHMS = (
    "adaboost", "threshold_tuned", "asymboost", "adacost", "csb0", "csb1", "csb2",
    "adac1", "adac2", "adac3", "cs_adaboost", "adaboost_db", "cost_generalized",
)

# Bisection settings for the per-candidate alpha equations.  The tolerance is
# far below the 1e-12 guarantee so that the CSA and DB routes agree to ~1e-15.
ALPHA_BRACKET = 64.0
ALPHA_TOL = 1e-15
ALPHA_MAX_ITER = 200
DB_X_MAX = 2.0 ** 40


class TrainingError(CostBoostError):
    """Training could not proceed."""


@dataclass
class TrainConfig:
    algorithm: str
    rounds: int
    cost_spec: CostSpec = field(default_factory=CostSpec)
    initial_weights: Optional[np.ndarray] = None
    epsilon_clamp: float = 1e-12
    seed: int = 0
    validation_fraction: float = 0.3
    keep_weights: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InputError(f"unknown algorithm {self.algorithm!r}")
        if int(self.rounds) != self.rounds or self.rounds < 1:
            raise InputError("rounds must be a positive integer")
        self.rounds = int(self.rounds)
        if not 0 < self.epsilon_clamp < 0.5:
            raise InputError("epsilon_clamp must lie in (0, 0.5)")
        if self.algorithm == "adaboost_db":
            for c in (self.cost_spec.c_pos, self.cost_spec.c_neg):
                if c != int(c):
                    raise InputError("adaboost_db needs integer costs; scale rational costs first")

    def snapshot(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "rounds": self.rounds,
            "c_pos": self.cost_spec.c_pos,
            "c_neg": self.cost_spec.c_neg,
            "example_costs": self.cost_spec.example_costs is not None,
            "custom_initial_weights": self.initial_weights is not None,
            "epsilon_clamp": self.epsilon_clamp,
            "seed": self.seed,
            "validation_fraction": self.validation_fraction,
        }


@dataclass
class TrainedModel:
    ensemble: Ensemble
    trace: list
    algorithm: str
    config: TrainConfig
    initial_weights: np.ndarray
    weight_history: list = field(default_factory=list)
    stop_reason: Optional[str] = None

    @property
    def stump_indices(self) -> list:
        return [r.stump_index for r in self.trace]

    @property
    def alphas(self) -> list:
        return [r.alpha for r in self.trace]


def alpha_from_error(epsilon: float, clamp: float = 1e-12) -> float:
    """Goodness of a binary weak classifier with weighted error ``epsilon``."""
    e = min(max(epsilon, clamp), 1.0 - clamp)
    return 0.5 * math.log((1.0 - e) / e)


def bayes_threshold(cost_spec: CostSpec) -> float:
    """Threshold on the cost-insensitive predictor that gives the Bayes decision."""
    return math.log(cost_spec.c_neg / cost_spec.c_pos)


class _Progress:
    """Accumulates the ensemble and computes the per-round trace entries."""

    def __init__(self, dataset: Dataset, config: TrainConfig, initial: np.ndarray,
                 voting: str = WEIGHTED_SUM):
        self.dataset = dataset
        self.config = config
        self.initial = initial
        self.voting = voting
        self.scores = np.zeros(dataset.n)
        self.members: list[Member] = []
        self.trace: list[RoundTrace] = []
        self.bound = 1.0
        self.history: list[np.ndarray] = []
        c = config.cost_spec
        self._vote_cost = (c.c_pos, c.c_neg) if voting == CSB_COST_VOTE else (1.0, 1.0)

    def record(self, index: int, stump, alpha: float, h: np.ndarray, epsilon: float,
               z: float, pos_mass: float, weights: np.ndarray):
        if self.config.keep_weights:
            self.history.append(np.array(weights, copy=True))
        mult = np.where(h > 0, self._vote_cost[0], self._vote_cost[1])
        self.scores = self.scores + alpha * h * mult
        self.members.append(Member(float(alpha), stump))
        self.bound *= z
        y = self.dataset.labels
        m = self.dataset.m
        wrong = np.where(self.scores >= 0.0, 1, -1) != y
        self.trace.append(RoundTrace(
            round=len(self.trace) + 1,
            epsilon=float(epsilon),
            alpha=float(alpha),
            z=float(z),
            bound=float(self.bound),
            train_error=math.fsum(self.initial[wrong]),
            pos_error=float(wrong[:m].mean()),
            neg_error=float(wrong[m:].mean()),
            pos_mass=float(pos_mass),
            stump_index=int(index),
        ))

    def model(self, algorithm: str, stop_reason: Optional[str] = None) -> TrainedModel:
        ens = Ensemble(list(self.members), 0.0, self.voting, self.config.cost_spec)
        return TrainedModel(ens, self.trace, algorithm, self.config, self.initial,
                            self.history, stop_reason)


def _base_weights(config: TrainConfig, dataset: Dataset) -> np.ndarray:
    if config.initial_weights is None:
        return np.full(dataset.n, 1.0 / dataset.n)
    w = np.asarray(config.initial_weights, dtype=float)
    if w.shape != (dataset.n,) or (w < 0).any():
        raise InputError("initial_weights must be one non-negative weight per example")
    return normalized(w)


def _check_pool(pool: Optional[StumpPool], dataset: Dataset) -> StumpPool:
    if pool is None:
        return build_pool(dataset)
    if pool.n != dataset.n or pool.d != dataset.d:
        raise InputError("stump pool was built for a different dataset")
    return pool


def _predict_train(pool: StumpPool, index: int, dataset: Dataset) -> np.ndarray:
    return pool[index].predict(dataset.features)


def _error_driven_loop(config, dataset, pool, weights, algorithm, *, extra_factor=None,
                       voting=WEIGHTED_SUM):
    """Select by weighted error, alpha from the error, exponential reweighting.

    Shared by AdaBoost, AsymBoost (``extra_factor``) and Cost-Generalized
    AdaBoost, which differ only in initialization and the extra factor.
    """
    progress = _Progress(dataset, config, weights, voting)
    y = dataset.labels
    m = dataset.m
    for _ in range(config.rounds):
        eps_all = pool.errors(weights)
        i = argmin_with_ties(eps_all)
        eps = float(eps_all[i])
        alpha = alpha_from_error(eps, config.epsilon_clamp)
        h = _predict_train(pool, i, dataset)
        updated = weights * np.exp(-alpha * y * h)
        if extra_factor is not None:
            updated = updated * extra_factor
        z = math.fsum(updated)
        progress.record(i, pool[i], alpha, h, eps, z, math.fsum(weights[:m]), weights)
        weights = updated / z
    return progress.model(algorithm)


def train_adaboost(config: TrainConfig, dataset: Dataset, pool: Optional[StumpPool] = None):
    pool = _check_pool(pool, dataset)
    return _error_driven_loop(config, dataset, pool, _base_weights(config, dataset), "adaboost")


def train_cost_generalized(config: TrainConfig, dataset: Dataset,
                           pool: Optional[StumpPool] = None) -> TrainedModel:
    """AdaBoost started from cost-proportionate class-conditional weights.

    Within each class the starting distribution is uniform unless
    ``initial_weights`` or example costs say otherwise; the class totals are
    set to gamma and 1 - gamma.
    """
    pool = _check_pool(pool, dataset)
    m = dataset.m
    spec = config.cost_spec
    if config.initial_weights is not None:
        _, d_pos, d_neg = decompose_asymmetry(_base_weights(config, dataset), m)
    elif spec.example_costs is not None:
        c = spec.class_costs(dataset)
        d_pos, d_neg = normalized(c[:m]), normalized(c[m:])
    else:
        d_pos = np.full(m, 1.0 / m)
        d_neg = np.full(dataset.n - m, 1.0 / (dataset.n - m))
    weights = compose_weights(spec, d_pos, d_neg).weights
    return _error_driven_loop(config, dataset, pool, weights, "cost_generalized")


def train_asymboost(config: TrainConfig, dataset: Dataset, pool: Optional[StumpPool] = None):
    """Spread the asymmetry over the T rounds as a per-round factor (C_P/C_N)^(y/2T)."""
    pool = _check_pool(pool, dataset)
    spec = config.cost_spec
    ratio = spec.c_pos / spec.c_neg
    if ratio == 1.0:
        # every factor is exactly one; skip the extra renormalization pass
        return _error_driven_loop(config, dataset, pool, _base_weights(config, dataset),
                                  "asymboost")
    factor = np.where(dataset.positive, ratio ** (1.0 / (2 * config.rounds)),
                      ratio ** (-1.0 / (2 * config.rounds)))
    weights = normalized(_base_weights(config, dataset) * factor)
    return _error_driven_loop(config, dataset, pool, weights, "asymboost", extra_factor=factor)


def adacost_costs(cost_spec: CostSpec, dataset: Dataset) -> np.ndarray:
    if cost_spec.example_costs is not None:
        c = cost_spec.class_costs(dataset)
        if (c > 1).any():
            raise InputError("AdaCost example costs must lie in (0, 1]")
        return c
    g = cost_spec.gamma
    return np.where(dataset.positive, g, 1.0 - g)


def adacost_alpha(weights, y, h, cost, clamp: float = 1e-12):
    """Goodness and cost-adjustment factors for one selected classifier.

    Returns ``(alpha, beta)``; the correlation ``r`` is clamped to
    +/-(1 - clamp).
    """
    beta = np.where(h == y, 0.5 * (1.0 - cost), 0.5 * (1.0 + cost))
    limit = 1.0 - clamp
    r = min(max(math.fsum(weights * y * h * beta), -limit), limit)
    return 0.5 * math.log((1.0 + r) / (1.0 - r)), beta


def train_adacost(config: TrainConfig, dataset: Dataset, pool: Optional[StumpPool] = None):
    pool = _check_pool(pool, dataset)
    y = dataset.labels
    m = dataset.m
    cost = adacost_costs(config.cost_spec, dataset)
    weights = normalized(_base_weights(config, dataset) * cost)
    progress = _Progress(dataset, config, weights)
    for _ in range(config.rounds):
        eps_all = pool.errors(weights)
        i = argmin_with_ties(eps_all)
        h = _predict_train(pool, i, dataset)
        alpha, beta = adacost_alpha(weights, y, h, cost, config.epsilon_clamp)
        updated = weights * np.exp(-alpha * y * h * beta)
        z = math.fsum(updated)
        progress.record(i, pool[i], alpha, h, eps_all[i], z, math.fsum(weights[:m]), weights)
        weights = updated / z
    return progress.model("adacost")


def csb_update(weights, y, h, cost, alpha: float, variant: int) -> np.ndarray:
    """Unnormalized CSB reweighting: mistakes are multiplied by their cost.

    CSB1 adds exp(-y h) and CSB2 adds exp(-alpha y h); CSB0 and CSB1 ignore
    ``alpha``.
    """
    factor = np.where(h != y, cost, 1.0)
    if variant == 1:
        factor = factor * np.exp(-y * h)
    elif variant == 2:
        factor = factor * np.exp(-alpha * y * h)
    return weights * factor


def train_csb(config: TrainConfig, dataset: Dataset, pool: Optional[StumpPool] = None,
              variant: int = 2) -> TrainedModel:
    """CSB0/1/2: cost-proportionate start, cost factor on mistakes, cost-weighted vote."""
    if variant not in (0, 1, 2):
        raise InputError("CSB variant must be 0, 1 or 2")
    pool = _check_pool(pool, dataset)
    y = dataset.labels
    m = dataset.m
    cost = config.cost_spec.class_costs(dataset)
    weights = normalized(cost.copy())
    if config.initial_weights is not None:
        weights = normalized(_base_weights(config, dataset) * cost)
    progress = _Progress(dataset, config, weights, CSB_COST_VOTE)
    for _ in range(config.rounds):
        eps_all = pool.errors(weights)
        i = argmin_with_ties(eps_all)
        eps = float(eps_all[i])
        alpha = alpha_from_error(eps, config.epsilon_clamp)
        h = _predict_train(pool, i, dataset)
        updated = csb_update(weights, y, h, cost, alpha, variant)
        z = math.fsum(updated)
        progress.record(i, pool[i], alpha, h, eps, z, math.fsum(weights[:m]), weights)
        weights = updated / z
    return progress.model(f"csb{variant}")


def adac_costs(cost_spec: CostSpec, dataset: Dataset) -> np.ndarray:
    """Per-example costs in (0, 1]; class costs are divided by the larger one."""
    if cost_spec.example_costs is not None:
        c = cost_spec.class_costs(dataset)
        if (c > 1).any():
            raise InputError("AdaC example costs must lie in (0, 1]")
        return c
    top = max(cost_spec.c_pos, cost_spec.c_neg)
    return np.where(dataset.positive, cost_spec.c_pos / top, cost_spec.c_neg / top)


def adac_alpha(variant: int, w1: float, w2: Optional[float], eps: float) -> float:
    """Goodness from the cost-weighted mass ``w1`` (and ``w2`` with squared costs).

    ``eps`` is the cost-weighted error (squared costs for variant 3).
    """
    if variant == 1:
        return 0.5 * math.log((1.0 + w1 - 2.0 * eps) / (1.0 - w1 + 2.0 * eps))
    if variant == 2:
        return 0.5 * math.log((w1 - eps) / eps)
    return 0.5 * math.log((w1 + w2 - 2.0 * eps) / (w1 - w2 + 2.0 * eps))


def train_adac(config: TrainConfig, dataset: Dataset, pool: Optional[StumpPool] = None,
               variant: int = 1) -> TrainedModel:
    """AdaC1/2/3: the cost enters the update inside, outside, or on both sides of the exponent."""
    if variant not in (1, 2, 3):
        raise InputError("AdaC variant must be 1, 2 or 3")
    pool = _check_pool(pool, dataset)
    y = dataset.labels
    m = dataset.m
    c = adac_costs(config.cost_spec, dataset)
    clamp = config.epsilon_clamp
    weights = _base_weights(config, dataset)
    progress = _Progress(dataset, config, weights)
    for _ in range(config.rounds):
        w1 = math.fsum(c * weights)
        if variant == 3:
            w2 = math.fsum(c * c * weights)
            cand = pool.errors(c * c * weights)
            total = w2
        else:
            cand = pool.errors(c * weights)
            total = w1
        i = argmin_with_ties(cand)
        eps = min(max(float(cand[i]), clamp), total - clamp)
        alpha = adac_alpha(variant, w1, w2 if variant == 3 else None, eps)
        h = _predict_train(pool, i, dataset)
        if variant == 1:
            updated = weights * np.exp(-alpha * c * y * h)
        elif variant == 2:
            updated = c * weights * np.exp(-alpha * y * h)
        else:
            updated = c * weights * np.exp(-alpha * c * y * h)
        z = math.fsum(updated)
        plain = math.fsum(weights[h != y])
        progress.record(i, pool[i], alpha, h, plain, z, math.fsum(weights[:m]), weights)
        weights = updated / z
    return progress.model(f"adac{variant}")


def csa_g(alpha, c_pos, c_neg, b, dn, t_pos, t_neg):
    """Hyperbolic alpha equation, left side minus right side (increasing in alpha >= 0)."""
    # a zero mass contributes nothing even where cosh overflows
    with np.errstate(over="ignore", invalid="ignore"):
        lhs = (np.where(b > 0, 2.0 * c_pos * b * np.cosh(c_pos * alpha), 0.0)
               + np.where(dn > 0, 2.0 * c_neg * dn * np.cosh(c_neg * alpha), 0.0))
    return lhs - c_pos * t_pos * np.exp(-c_pos * alpha) - c_neg * t_neg * np.exp(-c_neg * alpha)


def csa_loss(alpha, c_pos, c_neg, b, dn, t_pos, t_neg):
    """Exponential loss of adding ``alpha * h`` given the class error masses."""
    ep, en = np.exp(c_pos * alpha), np.exp(c_neg * alpha)
    return b * (ep - 1.0 / ep) + t_pos / ep + dn * (en - 1.0 / en) + t_neg / en


def csa_alphas(c_pos, c_neg, b, dn, t_pos, t_neg, clamp=1e-12):
    """Solve the alpha equation for every candidate; NaN where no positive root exists.

    ``b``/``dn`` are arrays of misclassified positive/negative mass.  A
    candidate that misclassifies (almost) nothing gets both masses raised to
    ``clamp`` times its class mass, mirroring the error clamp of AdaBoost.
    """
    b = np.array(b, dtype=float, ndmin=1)
    dn = np.array(dn, dtype=float, ndmin=1)
    tiny = (b + dn) < clamp * (t_pos + t_neg)
    b[tiny] = clamp * t_pos
    dn[tiny] = clamp * t_neg
    admissible = c_pos * (2.0 * b - t_pos) + c_neg * (2.0 * dn - t_neg) < 0
    hi = np.full(b.shape, ALPHA_BRACKET / min(1.0, c_pos, c_neg))
    with np.errstate(over="ignore"):
        admissible &= csa_g(hi, c_pos, c_neg, b, dn, t_pos, t_neg) > 0
    alphas = np.full(b.shape, np.nan)
    idx = np.flatnonzero(admissible)
    if idx.size:
        bi, di = b[idx], dn[idx]

        def g(a, sub):
            with np.errstate(over="ignore"):
                return csa_g(a, c_pos, c_neg, bi[sub], di[sub], t_pos, t_neg)

        roots, ok = bisect_many(g, np.zeros(idx.size), hi[idx], tol=ALPHA_TOL,
                                max_iter=ALPHA_MAX_ITER)
        alphas[idx[ok]] = roots[ok]
    return alphas, b, dn


def train_cs_adaboost(config: TrainConfig, dataset: Dataset,
                      pool: Optional[StumpPool] = None) -> TrainedModel:
    """Cost-Sensitive AdaBoost: costs in the exponents, alpha from a hyperbolic equation."""
    pool = _check_pool(pool, dataset)
    y = dataset.labels
    m = dataset.m
    cp, cn = config.cost_spec.c_pos, config.cost_spec.c_neg
    class_cost = np.where(dataset.positive, cp, cn)
    weights = _base_weights(config, dataset)
    progress = _Progress(dataset, config, weights)
    for _ in range(config.rounds):
        t_pos, t_neg = class_mass(weights, m)
        b_raw, d_raw = pool.class_errors(weights)
        alphas, b, dn = csa_alphas(cp, cn, b_raw, d_raw, t_pos, t_neg, config.epsilon_clamp)
        with np.errstate(over="ignore", invalid="ignore"):
            losses = np.where(np.isnan(alphas), np.inf,
                              csa_loss(np.nan_to_num(alphas), cp, cn, b, dn, t_pos, t_neg))
        try:
            i = argmin_with_ties(losses)
        except SelectionError as exc:
            raise TrainingError(f"round {len(progress.trace) + 1}: {exc}") from exc
        alpha = float(alphas[i])
        h = _predict_train(pool, i, dataset)
        updated = weights * np.exp(-class_cost * alpha * y * h)
        z = math.fsum(updated)
        eps = b_raw[i] + d_raw[i]
        progress.record(i, pool[i], alpha, h, eps, z, t_pos, weights)
        if not (z > 0 and math.isfinite(z)):
            return progress.model("cs_adaboost", "weights degenerated")
        weights = updated / z
    return progress.model("cs_adaboost")


def db_polynomial(c_pos: int, c_neg: int, a, b, eps_pos, eps_neg):
    """Coefficients of the AdaBoostDB polynomial in x = exp(alpha).

    The stationarity condition is multiplied through by x**max(C_P, C_N), so
    with C_P >= C_N the exponents are 2C_P, C_P+C_N, C_P-C_N and 0; the other
    cost order needs no label swap.  Returns ``(exponents, coeffs)`` with one
    coefficient row per candidate.
    """
    k = max(c_pos, c_neg)
    a = np.asarray(a, dtype=float) * np.ones_like(np.asarray(eps_pos, dtype=float))
    b = np.asarray(b, dtype=float) * np.ones_like(np.asarray(eps_neg, dtype=float))
    terms = [
        (k + c_pos, a * eps_pos),
        (k - c_pos, -a * (1.0 - eps_pos)),
        (k + c_neg, b * eps_neg),
        (k - c_neg, -b * (1.0 - eps_neg)),
    ]
    exponents = sorted({e for e, _ in terms}, reverse=True)
    coeffs = np.zeros((np.size(eps_pos), len(exponents)))
    for e, c in terms:
        coeffs[:, exponents.index(e)] += np.ravel(c)
    return exponents, coeffs


def db_contributes(a, b, eps_pos, eps_neg):
    """Whether a candidate can lower the loss at all (its cost-weighted error is below 1/2)."""
    return a * np.asarray(eps_pos) + b * np.asarray(eps_neg) < 0.5


def train_adaboost_db(config: TrainConfig, dataset: Dataset,
                      pool: Optional[StumpPool] = None) -> TrainedModel:
    """AdaBoostDB: class subdistributions, accumulators and a polynomial root per candidate."""
    pool = _check_pool(pool, dataset)
    m = dataset.m
    cp, cn = int(config.cost_spec.c_pos), int(config.cost_spec.c_neg)
    clamp = config.epsilon_clamp
    initial = _base_weights(config, dataset)
    acc_pos, acc_neg = class_mass(initial, m)
    if acc_pos <= 0 or acc_neg <= 0:
        raise InputError("initial weights leave a class empty")
    d_pos = initial[:m] / acc_pos
    d_neg = initial[m:] / acc_neg
    progress = _Progress(dataset, config, initial)
    for _ in range(config.rounds):
        s_pos, s_neg = math.fsum(d_pos), math.fsum(d_neg)
        if not (s_pos > 0 and s_neg > 0):
            return progress.model("adaboost_db", "a class lost all its weight")
        acc_pos *= s_pos
        acc_neg *= s_neg
        d_pos = d_pos / s_pos
        d_neg = d_neg / s_neg
        # only the accumulator ratio matters; rescaling keeps it from under/overflowing
        total = acc_pos + acc_neg
        acc_pos, acc_neg = acc_pos / total, acc_neg / total
        a = cp * acc_pos / (cp * acc_pos + cn * acc_neg)
        b = cn * acc_neg / (cp * acc_pos + cn * acc_neg)

        eps_p_raw, eps_n_raw = pool.class_errors(np.concatenate([d_pos, d_neg]))
        eps_p, eps_n = eps_p_raw.copy(), eps_n_raw.copy()
        tiny = acc_pos * eps_p + acc_neg * eps_n < clamp
        eps_p[tiny] = clamp
        eps_n[tiny] = clamp
        contributes = db_contributes(a, b, eps_p, eps_n)
        losses = np.full(len(pool), np.inf)
        roots = np.full(len(pool), np.nan)
        idx = np.flatnonzero(contributes)
        if idx.size:
            exps, coeffs = db_polynomial(cp, cn, a, b, eps_p[idx], eps_n[idx])
            r, ok = positive_poly_roots(coeffs, exps, tol=ALPHA_TOL, x_max=DB_X_MAX)
            idx, r = idx[ok], r[ok]
            roots[idx] = r
            ep, en = eps_p[idx], eps_n[idx]
            losses[idx] = (acc_pos * (ep * int_pow(r, cp) + (1.0 - ep) * int_pow(r, -cp))
                           + acc_neg * (en * int_pow(r, cn) + (1.0 - en) * int_pow(r, -cn)))
        if not np.isfinite(losses).any():
            log.info("adaboost_db: no candidate meets the contribution condition; stopping")
            return progress.model("adaboost_db", "no contributing weak classifier")
        i = argmin_with_ties(losses)
        alpha = math.log(roots[i])
        h = _predict_train(pool, i, dataset)
        global_w = np.concatenate([acc_pos * d_pos, acc_neg * d_neg])
        new_pos = d_pos * np.exp(-cp * alpha * h[:m])
        new_neg = d_neg * np.exp(cn * alpha * h[m:])
        z = acc_pos * math.fsum(new_pos) + acc_neg * math.fsum(new_neg)
        eps = acc_pos * eps_p_raw[i] + acc_neg * eps_n_raw[i]
        progress.record(i, pool[i], alpha, h, eps, z, acc_pos, global_w)
        d_pos, d_neg = new_pos, new_neg
    return progress.model("adaboost_db")


def holdout_split(dataset: Dataset, fraction: float, seed: int):
    """Stratified deterministic split into ``(train, validation)``; ``None`` validation if too small."""
    from .datagen import CounterRNG

    if not 0 < fraction < 1:
        return dataset, None
    rng = CounterRNG(seed, stream=0x5EED)
    val = np.zeros(dataset.n, dtype=bool)
    m = dataset.m
    for lo, hi in ((0, m), (m, dataset.n)):
        count = hi - lo
        k = int(round(fraction * count))
        if count < 4 or k < 1 or k >= count:
            return dataset, None
        order = np.argsort(rng.uniforms(count), kind="stable")
        val[lo + order[:k]] = True
    x, y = dataset.features, dataset.labels
    return Dataset(x[~val], y[~val]), Dataset(x[val], y[val])


def cost_minimizing_threshold(scores, labels, cost_spec: CostSpec) -> float:
    """Threshold minimizing C_P * FNR + C_N * FPR for ``score >= threshold`` decisions.

    Candidates are the midpoints between consecutive distinct scores, 0 and
    +/- infinity; ties go to the smallest |threshold|, then the smaller one.
    """
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    n_pos = int((y == 1).sum())
    n_neg = y.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise InputError("threshold tuning needs both classes")
    vals = np.unique(scores)
    mids = 0.5 * (vals[:-1] + vals[1:])
    mids = np.where(vals[:-1] < mids, mids, vals[1:])
    cand = np.concatenate([[-np.inf], mids, [0.0, np.inf]])
    pred_pos = scores[None, :] >= cand[:, None]
    fn = ((~pred_pos) & (y == 1)).sum(axis=1)
    fp = (pred_pos & (y == -1)).sum(axis=1)
    cost = cost_spec.c_pos * fn / n_pos + cost_spec.c_neg * fp / n_neg
    best = cost.min()
    tied = np.flatnonzero(cost <= best + 1e-12 * max(1.0, abs(best)))
    return float(min(cand[tied], key=lambda p: (abs(p), p)))


def tune_threshold(model, validation: Dataset, cost_spec: CostSpec) -> Ensemble:
    """Move the decision threshold to the empirical cost minimizer on ``validation``."""
    ensemble = model.ensemble if isinstance(model, TrainedModel) else model
    if ensemble.voting != WEIGHTED_SUM:
        raise InputError("threshold tuning needs weighted_sum voting")
    if validation is None or validation.n == 0:
        raise InputError("empty validation set")
    phi = cost_minimizing_threshold(ensemble.scores(validation.features), validation.labels,
                                    cost_spec)
    return ensemble.replace_threshold(phi)


def train_threshold_tuned(config: TrainConfig, dataset: Dataset,
                          pool: Optional[StumpPool] = None) -> TrainedModel:
    """AdaBoost on a training split, threshold moved afterwards on the held-out split."""
    train_set, validation = holdout_split(dataset, config.validation_fraction, config.seed)
    if validation is None:
        log.warning("threshold_tuned: holdout too small, tuning on the training data")
        validation = dataset
    if train_set is not dataset:
        pool = None
    sym = replace(config, algorithm="adaboost", cost_spec=CostSpec())
    model = train_adaboost(sym, train_set, pool)
    ensemble = replace(tune_threshold(model, validation, config.cost_spec),
                       cost_spec=config.cost_spec)
    return TrainedModel(ensemble, model.trace, "threshold_tuned", config, model.initial_weights,
                        model.weight_history, model.stop_reason)


_TRAINERS = {
    "adaboost": train_adaboost,
    "threshold_tuned": train_threshold_tuned,
    "asymboost": train_asymboost,
    "adacost": train_adacost,
    "csb0": lambda c, d, p=None: train_csb(c, d, p, 0),
    "csb1": lambda c, d, p=None: train_csb(c, d, p, 1),
    "csb2": lambda c, d, p=None: train_csb(c, d, p, 2),
    "adac1": lambda c, d, p=None: train_adac(c, d, p, 1),
    "adac2": lambda c, d, p=None: train_adac(c, d, p, 2),
    "adac3": lambda c, d, p=None: train_adac(c, d, p, 3),
    "cs_adaboost": train_cs_adaboost,
    "adaboost_db": train_adaboost_db,
    "cost_generalized": train_cost_generalized,
}


def train(config: TrainConfig, dataset: Dataset, pool: Optional[StumpPool] = None) -> TrainedModel:
    """Dispatch on ``config.algorithm``."""
    return _TRAINERS[config.algorithm](config, dataset, pool)
