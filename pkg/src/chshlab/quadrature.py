"""Adaptive composite Gauss-Legendre quadrature.

Intervals are bisected until an ``order``-point rule on the whole interval and
on its two halves agree.  Accepted pieces are summed in left-to-right order,
so the result is bit-stable for a given ``order``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

__all__ = ["QuadResult", "QuadratureError", "adaptive_gauss"]


class QuadResult(NamedTuple):
    value: float
    error: float


class QuadratureError(RuntimeError):
    def __init__(self, message: str, estimate: QuadResult):
        super().__init__(f"{message} (value={estimate.value!r}, error estimate={estimate.error:.3e})")
        self.estimate = estimate


@lru_cache(maxsize=16)
def _rule(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _gauss(f, lo, hi, order):
    x, w = _rule(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * float(np.dot(w, f(mid + half * x)))


def adaptive_gauss(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    atol: float = 1e-10,
    rtol: float = 1e-12,
    order: int = 10,
    max_intervals: int = 10_000,
) -> QuadResult:
    """Integrate the vectorized ``f`` over ``[lo, hi]``.

    A piece of width ``w`` is accepted once its two estimates differ by at most
    ``max(atol * w / (hi - lo), rtol * |piece|)``.  Raises
    :class:`QuadratureError` if more than ``max_intervals`` pieces would be
    needed.
    """
    if not hi > lo:
        raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
    span = hi - lo
    total = 0.0
    err = 0.0
    n_done = 0
    # stack holds (lo, hi, coarse estimate); pop from the end = leftmost first
    stack = [(lo, hi, _gauss(f, lo, hi, order))]
    while stack:
        a, b, coarse = stack.pop()
        m = 0.5 * (a + b)
        left = _gauss(f, a, m, order)
        right = _gauss(f, m, b, order)
        fine = left + right
        diff = abs(fine - coarse)
        if diff <= max(atol * (b - a) / span, rtol * abs(fine)) or m in (a, b):
            total += fine
            err += diff
            n_done += 1
        else:
            stack.append((m, b, right))
            stack.append((a, m, left))
        if n_done + len(stack) > max_intervals:
            partial = total + sum(s[2] for s in stack)
            raise QuadratureError("interval refinement limit exceeded", QuadResult(partial, float("inf")))
    return QuadResult(total, err)
