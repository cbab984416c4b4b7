"""Budget guard and order-independent reductions."""

import numpy as np
import pytest

from wwlab._util import (
    BudgetExceeded,
    check_budget,
    current_budget,
    fmean,
    fsum_complex,
    pmap,
)


def test_check_budget_refuses_large_estimates():
    check_budget(10.0, budget=100.0)
    with pytest.raises(BudgetExceeded) as err:
        check_budget(1e12, budget=100.0, what="unit test")
    assert err.value.estimate == 1e12
    assert "unit test" in str(err.value)


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv("WWLAB_BUDGET", "123.5")
    assert current_budget() == 123.5
    # explicit argument still wins
    assert current_budget(7.0) == 7.0


def test_budget_flows_through_operations():
    from wwlab.averages import ww_average
    from wwlab.systems import cyclic_shift, random_mean_zero

    system = cyclic_shift(7)
    f = random_mean_zero(system, 0)
    with pytest.raises(BudgetExceeded):
        ww_average(system, f, 2, 64, budget=10.0)


def test_fsum_complex_is_order_independent():
    rng = np.random.default_rng(0)
    vals = (rng.standard_normal(500) * 10.0**rng.integers(-8, 8, 500)).astype(complex)
    vals += 1j * rng.standard_normal(500)
    a = fsum_complex(vals.tolist())
    b = fsum_complex(vals[::-1].tolist())
    assert a == b


def test_fmean_rejects_empty():
    assert fmean([1.0, 2.0, 3.0]) == 2.0
    with pytest.raises(ValueError):
        fmean([])


def test_pmap_preserves_order_across_thread_counts():
    items = list(range(40))
    serial = pmap(lambda x: x * x, items, threads=1)
    parallel = pmap(lambda x: x * x, items, threads=8)
    assert serial == parallel == [x * x for x in items]
