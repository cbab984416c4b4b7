"""Multiple recurrence norms, uniform maximization, and return times."""

import math

import numpy as np
import pytest

from wwlab.recurrence import (
    ExponentVector,
    companion_weights,
    intermediate_F,
    multiple_recurrence_average,
    polyphase_mrec_sup,
    return_times_average,
    uniform_mrec_bracket,
)
from wwlab.supbrackets import sup_modulated_average
from wwlab.systems import (
    character_observable,
    constant_observable,
    cyclic_shift,
    identity_system,
    random_mean_zero,
)


def test_exponent_vector_validation():
    assert ExponentVector((2, -1)).first_abs == 2
    with pytest.raises(ValueError):
        ExponentVector(())
    with pytest.raises(ValueError):
        ExponentVector((1, 0))
    with pytest.raises(ValueError):
        ExponentVector((3, 3))


def test_multiple_recurrence_matches_inline_sum():
    p, N = 6, 9
    system = cyclic_shift(p)
    f1 = random_mean_zero(system, 1)
    f2 = random_mean_zero(system, 2)
    x = np.arange(p)
    acc = np.zeros(p, dtype=np.complex128)
    for n in range(1, N + 1):
        acc += f1.values[(x + n) % p] * f2.values[(x - 2 * n) % p]
    avg = acc / N
    exps = ExponentVector((1, -2))
    got2 = multiple_recurrence_average(system, [f1, f2], exps, N)
    got1 = multiple_recurrence_average(system, [f1, f2], exps, N, norm_p=1)
    assert got2 == pytest.approx(math.sqrt(np.mean(np.abs(avg) ** 2)), rel=1e-12)
    assert got1 == pytest.approx(np.mean(np.abs(avg)), rel=1e-12)


def test_multiple_recurrence_validation():
    system = cyclic_shift(5)
    f = constant_observable(system)
    with pytest.raises(ValueError):
        multiple_recurrence_average(system, [f], ExponentVector((1, 2)), 4)
    with pytest.raises(ValueError):
        multiple_recurrence_average(system, [f], ExponentVector((1,)), 4, norm_p=3)


def test_companion_weights_unit():
    system = cyclic_shift(7)
    ones = constant_observable(system)
    W = companion_weights(system, [ones, ones], (1, 2), 5)
    assert W.shape == (5, 7)
    assert np.array_equal(W, np.ones((5, 7), dtype=np.complex128))


def test_return_times_dirichlet_modulus():
    # with unit base weights the average is the geometric sum of a character,
    # whose modulus is |sin(N pi / p)| / (N sin(pi / p)) at every y
    p, N = 7, 12
    systemY = cyclic_shift(p)
    g = character_observable(systemY, 1)
    systemX = identity_system(1)
    out = return_times_average(
        systemY, g, (0, 1), systemX, [constant_observable(systemX)],
        ExponentVector((1,)), 0, N,
    )
    expected = abs(math.sin(N * math.pi / p)) / (N * math.sin(math.pi / p))
    assert np.allclose(np.abs(out.values), expected, atol=1e-12)


def test_return_times_unit_weight_is_scalar_average():
    systemY = cyclic_shift(5)
    systemX = cyclic_shift(9)
    f = random_mean_zero(systemX, 3)
    N, x0 = 11, 4
    out = return_times_average(
        systemY, constant_observable(systemY), (1, 2), systemX, [f],
        ExponentVector((2,)), x0, N,
    )
    scalar = np.mean([f.values[(x0 + 2 * n) % 9] for n in range(1, N + 1)])
    assert np.allclose(out.values, scalar, atol=1e-12)


def test_return_times_polynomial_orbit_reduction():
    # a cubic with huge coefficients must behave like its residues mod p
    p = 5
    systemY = cyclic_shift(p)
    g = character_observable(systemY, 2)
    systemX = identity_system(1)
    big = return_times_average(
        systemY, g, (10**12, 0, 0, 10**9), systemX,
        [constant_observable(systemX)], ExponentVector((1,)), 0, 8,
    )
    small = return_times_average(
        systemY, g, (10**12 % p, 0, 0, 10**9 % p), systemX,
        [constant_observable(systemX)], ExponentVector((1,)), 0, 8,
    )
    assert np.allclose(big.values, small.values, atol=1e-12)


def test_uniform_bracket_invariants():
    system = cyclic_shift(8)
    f = random_mean_zero(system, 5)
    br = uniform_mrec_bracket(system, f, 1, 16)
    assert br.method == "alternating"
    assert br.lower <= br.upper + 1e-15
    assert br.width >= 0.0
    # trace of the squared objective is nondecreasing
    assert all(b >= a - 1e-12 for a, b in zip(br.trace, br.trace[1:]))
    for g in br.witnesses:
        assert np.max(np.abs(g)) <= 1.0 + 1e-9
    # upper endpoint is the L2 cap
    cap = math.sqrt(np.mean(np.abs(f.values) ** 2))
    assert br.upper == pytest.approx(max(cap, br.lower), rel=1e-12)


def test_uniform_bracket_brute_closes_gap():
    system = cyclic_shift(4)
    f = random_mean_zero(system, 7)
    brute = uniform_mrec_bracket(system, f, 1, 12, brute_force=True)
    assert brute.method == "brute"
    assert brute.lower == brute.upper
    # ascent restricted to the same sign class cannot beat enumeration
    ascent = uniform_mrec_bracket(system, f, 1, 12, real_signs=True, restarts=4)
    assert brute.lower >= ascent.lower - 1e-9


def test_uniform_bracket_rejects_bad_order():
    system = cyclic_shift(4)
    f = random_mean_zero(system, 1)
    with pytest.raises(ValueError):
        uniform_mrec_bracket(system, f, 0, 8)
    with pytest.raises(ValueError):
        uniform_mrec_bracket(system, f, 3, 8, brute_force=True)


def test_polyphase_degree_one_matches_pointwise_sups():
    p, N = 7, 20
    system = cyclic_shift(p)
    f = random_mean_zero(system, 8)
    br = polyphase_mrec_sup(system, [f], ExponentVector((1,)), 1, N)
    orbit = system.orbit_table(N)
    acc_lo = 0.0
    for x in range(p):
        s = sup_modulated_average(f.values[orbit[1 : N + 1, x]])
        acc_lo += s.lower**2 / p
    assert br.lower == pytest.approx(math.sqrt(acc_lo), rel=1e-10)
    assert br.upper >= br.lower


def test_intermediate_F_order_one_is_linear_sup():
    p, N = 5, 16
    system = cyclic_shift(p)
    f = random_mean_zero(system, 9)
    dom = intermediate_F(system, [f], ExponentVector((1,)), 1, N)
    floor = 1.0 / math.isqrt(N)
    assert dom.additive_floor == pytest.approx(floor, rel=1e-12)
    orbit = system.orbit_table(N)
    for x in range(p):
        s = sup_modulated_average(f.values[orbit[1 : N + 1, x]])
        assert dom.lower.values[x].real == pytest.approx(floor + s.lower, rel=1e-10)
    assert np.all(dom.lower.values.real <= dom.upper.values.real + 1e-12)


def test_intermediate_F_shift_range_scales_with_first_exponent():
    system = cyclic_shift(5)
    f = random_mean_zero(system, 2)
    dom = intermediate_F(system, [f], ExponentVector((3,)), 2, 64)
    assert dom.shift_range == math.isqrt(64) // 3
