"""Closed-form minimizers of the pointwise exponential risks and isoline grids.

Given the posterior ``p = P(y=1|x)`` each boosting flavour has an optimal
real-valued predictor:

* symmetric:         f = 1/2 log(p / (1-p))
* cost-generalized:  f = 1/2 log(C_P p / (C_N (1-p)))
* cost-sensitive:    f = log(C_P p / (C_N (1-p))) / (C_P + C_N)

All three share the decision boundary C_P p = C_N (1-p) but only the first
two are invariant to scaling the costs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import CostSpec, InputError

RISK_VARIANTS = ("ab", "cga", "csa")
P_CLAMP = 1e-9


@dataclass(frozen=True)
class RiskPoint:
    p: float
    gamma: float
    f_value: float

    def __post_init__(self):
        if not (0 < self.p < 1 and 0 < self.gamma < 1 and math.isfinite(self.f_value)):
            raise InputError(f"invalid risk point {self}")


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InputError(f"posterior must lie strictly inside (0, 1), got {p}")
    return p


def f_ab(p: float) -> float:
    p = _check_p(p)
    return 0.5 * math.log(p / (1.0 - p))


def f_cga(p: float, cost_spec: CostSpec) -> float:
    p = _check_p(p)
    return 0.5 * math.log(cost_spec.c_pos * p / (cost_spec.c_neg * (1.0 - p)))


def f_csa(p: float, cost_spec: CostSpec) -> float:
    p = _check_p(p)
    cp, cn = cost_spec.c_pos, cost_spec.c_neg
    return math.log(cp * p / (cn * (1.0 - p))) / (cp + cn)


MINIMIZERS = {"ab": lambda p, spec: f_ab(p), "cga": f_cga, "csa": f_csa}


def optimal_predictor(p: float, cost_spec: CostSpec, variant: str) -> float:
    if variant not in MINIMIZERS:
        raise InputError(f"unknown risk variant {variant!r}")
    return MINIMIZERS[variant](p, cost_spec)


def risk(f: float, p: float, cost_spec: CostSpec, variant: str) -> float:
    """Conditional expected exponential loss of predicting ``f`` at posterior ``p``."""
    cp, cn = cost_spec.c_pos, cost_spec.c_neg
    if variant == "ab":
        return p * math.exp(-f) + (1.0 - p) * math.exp(f)
    if variant == "cga":
        return p * cp * math.exp(-f) + (1.0 - p) * cn * math.exp(f)
    if variant == "csa":
        return p * math.exp(-cp * f) + (1.0 - p) * math.exp(cn * f)
    raise InputError(f"unknown risk variant {variant!r}")


def costs_for_gamma(gamma: float) -> CostSpec:
    """Cost pair with normalized asymmetry ``gamma``, the cheaper class fixed at 1."""
    if not 0.0 < gamma < 1.0:
        raise InputError(f"gamma must lie strictly inside (0, 1), got {gamma}")
    if gamma >= 0.5:
        return CostSpec(gamma / (1.0 - gamma), 1.0)
    return CostSpec(1.0, (1.0 - gamma) / gamma)


def isoline_grid(variant: str, gammas: Sequence[float], ps: Sequence[float]) -> list:
    """Optimal predictor values, one row per ``p`` and one column per ``gamma``.

    Posteriors are clamped ``P_CLAMP`` away from 0 and 1.
    """
    if variant not in ("cga", "csa", "ab"):
        raise InputError(f"unknown grid variant {variant!r}")
    if len(gammas) == 0 or len(ps) == 0:
        raise InputError("empty grid")
    specs = [costs_for_gamma(g) for g in gammas]
    rows = []
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise InputError(f"posterior {p} outside [0, 1]")
        pc = min(max(float(p), P_CLAMP), 1.0 - P_CLAMP)
        rows.append([RiskPoint(pc, float(g), optimal_predictor(pc, spec, variant))
                     for g, spec in zip(gammas, specs)])
    return rows


@dataclass(frozen=True)
class MonotonicityWitness:
    p: float
    gamma_low: float
    gamma_high: float
    f_low: float
    f_high: float


def find_nonmonotone_witness(grid: list) -> Optional[MonotonicityWitness]:
    """A row where a larger gamma gives a smaller but still positive predictor."""
    for row in grid:
        ordered = sorted(row, key=lambda r: r.gamma)
        for a, b in zip(ordered, ordered[1:]):
            if a.gamma < b.gamma and a.f_value > b.f_value > 0:
                return MonotonicityWitness(a.p, a.gamma, b.gamma, a.f_value, b.f_value)
    return None


def scan_csa_witness(p_values: Iterable[float], positive_costs=(1, 2, 4, 8)):
    """Search cost pairs (C_P, 1) for a posterior where raising C_P lowers f_csa > 0."""
    costs = sorted(positive_costs)
    for p in p_values:
        vals = [f_csa(p, CostSpec(c, 1.0)) for c in costs]
        for (c1, v1), (c2, v2) in zip(zip(costs, vals), zip(costs[1:], vals[1:])):
            if v1 > v2 > 0:
                g1, g2 = c1 / (c1 + 1.0), c2 / (c2 + 1.0)
                return MonotonicityWitness(float(p), g1, g2, v1, v2)
    return None


def grid_csv(grid: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["p", "gamma", "f"])
    for row in grid:
        for pt in row:
            writer.writerow([format(pt.p, ".17g"), format(pt.gamma, ".17g"),
                             format(pt.f_value, ".17g")])
    return buf.getvalue()


def grid_values(grid: list) -> np.ndarray:
    return np.array([[pt.f_value for pt in row] for row in grid])
