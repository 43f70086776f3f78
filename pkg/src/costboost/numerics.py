"""Scalar root finding and minimization.

Bisection drives both the hyperbolic alpha equation of Cost-Sensitive
AdaBoost and the AdaBoostDB polynomial; golden-section search is kept as an
independent minimizer for verification.  Vectorized variants solve one
equation per weak-classifier candidate in a single numpy sweep and follow the
same per-element stopping rule as the scalar versions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .core import CostBoostError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class NonConvergenceError(CostBoostError):
    """Bisection ran out of iterations before reaching the tolerance."""

    def __init__(self, message: str, best: float):
        super().__init__(message)
        self.best = best


class NoRootError(CostBoostError):
    """No sign change could be bracketed."""


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")
        if self.f_lo * self.f_hi > 0:
            raise ValueError("bracket does not enclose a sign change")

    @classmethod
    def around(cls, f: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        return cls(lo, hi, f(lo), f(hi))


def bisect(f: Callable[[float], float], bracket: Bracket, tol: float = 1e-12,
           max_iter: int = 200) -> float:
    """Find a sign change of ``f`` inside ``bracket``.

    Stops when the interval is narrower than ``tol`` or when the midpoint can
    no longer be separated from an endpoint in floating point, so asking for
    more iterations than needed never moves the answer.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    lo, hi = bracket.lo, bracket.hi
    f_lo, f_hi = bracket.f_lo, bracket.f_hi
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    lo_neg = f_lo < 0
    for _ in range(max_iter):
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return mid
        f_mid = f(mid)
        if f_mid == 0:
            return mid
        if (f_mid < 0) == lo_neg:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    if hi - lo <= tol or not lo < mid < hi:
        return mid
    raise NonConvergenceError(
        f"bisection did not converge in {max_iter} iterations "
        f"(width {hi - lo:.3g})", best=mid)


def bisect_many(f: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray,
                tol: float = 1e-12, max_iter: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise bisection for increasing functions with ``f(lo) < 0 < f(hi)``.

    ``f(x, idx)`` evaluates the equations numbered ``idx`` at the points ``x``.
    Returns ``(roots, converged)``; entries that exhaust ``max_iter`` are
    flagged rather than raised.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    root = 0.5 * (lo + hi)
    active = np.ones(lo.shape, dtype=bool)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        done = (hi - lo <= tol) | ~((lo < mid) & (mid < hi))
        newly = active & done
        root[newly] = mid[newly]
        active &= ~done
        if not active.any():
            break
        idx = np.flatnonzero(active)
        vals = np.asarray(f(mid[idx], idx), dtype=float)
        zero = vals == 0
        root[idx[zero]] = mid[idx[zero]]
        active[idx[zero]] = False
        go_lo = vals < 0
        lo[idx[go_lo]] = mid[idx[go_lo]]
        go_hi = vals > 0
        hi[idx[go_hi]] = mid[idx[go_hi]]
        # NaN leaves the interval untouched; let it run out the budget
    mid = 0.5 * (lo + hi)
    done = (hi - lo <= tol) | ~((lo < mid) & (mid < hi))
    newly = active & done
    root[newly] = mid[newly]
    converged = ~(active & ~done)
    root[~converged] = mid[~converged]
    return root, converged


def int_pow(x, k: int):
    """``x**k`` for integer ``k`` by repeated squaring (negative ``k`` inverts)."""
    k = int(k)
    if k < 0:
        return 1.0 / int_pow(x, -k)
    result = np.ones_like(x, dtype=float) if isinstance(x, np.ndarray) else 1.0
    base = x
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


def poly_eval(coeffs: Mapping[int, float], x: float) -> float:
    """Evaluate ``sum(c * x**e)`` over integer exponents, skipping zero terms."""
    return sum(c * int_pow(x, e) for e, c in coeffs.items() if c != 0)


def _poly_sign_value(coeffs: Mapping[int, float], x: float) -> float:
    # For x > 1 divide through by x**max_exp so no power overflows; sign unchanged.
    if x <= 1.0:
        return poly_eval(coeffs, x)
    top = max(e for e, c in coeffs.items() if c != 0)
    return sum(c * int_pow(x, e - top) for e, c in coeffs.items() if c != 0)


def positive_poly_root(coeffs: Mapping[int, float], tol: float = 1e-12,
                       x_max: float = 1e6, max_iter: int = 400) -> float:
    """The unique positive root of a polynomial with one coefficient sign change.

    ``coeffs`` maps non-negative integer exponents to coefficients.  The
    bracket grows as 1, 2, 4, ... up to ``x_max``; ``tol`` is relative to the
    root magnitude (absolute below 1).
    """
    if not any(c != 0 for c in coeffs.values()):
        raise NoRootError("zero polynomial")
    if any(e < 0 for e in coeffs):
        raise ValueError("exponents must be non-negative")
    p = lambda x: _poly_sign_value(coeffs, x)  # noqa: E731
    p1 = p(1.0)
    if p1 == 0:
        return 1.0
    if p1 > 0:
        lo, hi = 0.5, 1.0
        while p(lo) > 0:
            lo *= 0.5
            if lo == 0.0:
                raise NoRootError("no negative value found on (0, 1)")
        if p(lo) == 0:
            return lo
    else:
        lo, hi = 1.0, 2.0
        while p(hi) < 0:
            lo, hi = hi, hi * 2.0
            if lo >= x_max:
                raise NoRootError(f"no sign change up to x = {x_max:g}")
        if p(hi) == 0:
            return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, mid) or not lo < mid < hi:
            return mid
        v = p(mid)
        if v == 0:
            return mid
        if v < 0:
            lo = mid
        else:
            hi = mid
    raise NonConvergenceError("polynomial root bisection did not converge", best=0.5 * (lo + hi))


def positive_poly_roots(coeffs: np.ndarray, exponents: np.ndarray, tol: float = 1e-12,
                        x_max: float = 1e6, max_iter: int = 400) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`positive_poly_root` for a batch sharing one exponent set.

    ``coeffs`` has shape ``(batch, k)``; every row must have a negative
    constant term (exponent 0) and a positive leading coefficient.  Returns
    ``(roots, ok)`` where ``ok`` is False for rows with no bracket below
    ``x_max`` or no convergence.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    exponents = [int(e) for e in exponents]
    top = max(exponents)

    def p(x, idx):
        big = x > 1.0
        out = np.zeros_like(x)
        for j, e in enumerate(exponents):
            c = coeffs[idx, j]
            # powers relative to the top exponent keep x > 1 from overflowing
            term_big = c * int_pow(np.where(big, x, 1.0), e - top)
            term_small = c * int_pow(np.where(big, 1.0, x), e)
            out += np.where(c != 0, np.where(big, term_big, term_small), 0.0)
        return out

    batch = coeffs.shape[0]
    all_idx = np.arange(batch)
    hi = np.ones(batch)
    ok = np.ones(batch, dtype=bool)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        vals = p(hi, all_idx)
        pending = vals < 0
        while pending.any():
            hi[pending] *= 2.0
            ok[pending & (hi > 2.0 * x_max)] = False
            pending &= ok
            if not pending.any():
                break
            idx = np.flatnonzero(pending)
            pending[idx] = p(hi[idx], idx) < 0
        lo = np.where(hi > 1.0, hi / 2.0, 0.0)

        roots = 0.5 * (lo + hi)
        active = ok.copy()
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            done = (hi - lo <= tol * np.maximum(1.0, mid)) | ~((lo < mid) & (mid < hi))
            newly = active & done
            roots[newly] = mid[newly]
            active &= ~done
            if not active.any():
                break
            idx = np.flatnonzero(active)
            v = p(mid[idx], idx)
            z = v == 0
            roots[idx[z]] = mid[idx[z]]
            active[idx[z]] = False
            lo[idx[v < 0]] = mid[idx[v < 0]]
            hi[idx[v > 0]] = mid[idx[v > 0]]
        ok &= ~active
    return roots, ok


def golden_minimize(f: Callable[[float], float], lo: float, hi: float,
                    tol: float = 1e-9, max_iter: int = 500) -> float:
    """Golden-section search for the minimizer of a unimodal ``f`` on ``[lo, hi]``."""
    if hi < lo:
        lo, hi = hi, lo
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    best = 0.5 * (a + b)
    f_best = f(best)
    # the minimum may sit on the boundary of the search interval
    for edge in (lo, hi):
        f_edge = f(edge)
        if f_edge < f_best:
            best, f_best = edge, f_edge
    return best
