"""Shared numeric and execution helpers.

Two cross-cutting contracts live here:

* compensated reductions: every place where contributions are merged across
  work items (h-tuples, scenario cases) goes through :func:`fsum`, which is
  exactly rounded and therefore independent of summation order.  Combined
  with ordered result collection in :func:`pmap`, summary values are
  bit-identical for any thread count.
* budget guard: expensive operations estimate their cost up front and refuse
  to start when the estimate exceeds the configured budget (parameter or the
  ``WWLAB_BUDGET`` environment variable).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

DEFAULT_BUDGET = 2.0e10


class BudgetExceeded(RuntimeError):
    """An operation refused to start because its estimated cost is too high."""

    def __init__(self, estimate: float, budget: float, what: str = ""):
        tag = f" for {what}" if what else ""
        super().__init__(
            f"estimated cost {estimate:.4g} exceeds budget {budget:.4g}{tag}; "
            f"raise WWLAB_BUDGET or pass a larger budget to proceed"
        )
        self.estimate = float(estimate)
        self.budget = float(budget)


def current_budget(budget: float | None = None) -> float:
    if budget is not None:
        return float(budget)
    env = os.environ.get("WWLAB_BUDGET")
    if env:
        return float(env)
    return DEFAULT_BUDGET


def check_budget(estimate: float, budget: float | None = None, what: str = "") -> None:
    cap = current_budget(budget)
    if estimate > cap:
        raise BudgetExceeded(estimate, cap, what)


def fsum(values: Iterable[float]) -> float:
    """Exactly rounded sum of real floats (order independent)."""
    return math.fsum(values)


def fsum_complex(values: Iterable[complex]) -> complex:
    vals = list(values)
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


def fmean(values: Iterable[float]) -> float:
    vals = list(values)
    if not vals:
        raise ValueError("mean of empty sequence")
    return math.fsum(vals) / len(vals)


def pmap(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """Map ``fn`` over ``items`` preserving input order.

    With ``threads > 1`` a thread pool is used; results are still collected
    in input order, so downstream compensated reductions do not depend on
    scheduling.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(fn, items))
