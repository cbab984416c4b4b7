"""Finite systems, observables, partitions, and spectral data."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wwlab.systems import (
    Observable,
    Partition,
    build_system,
    character_observable,
    conditional_expectation,
    constant_observable,
    cyclic_shift,
    ghk_seminorm,
    identity_system,
    integrate,
    iterate,
    product_system,
    random_mean_zero,
    random_permutation,
    shift_observable,
    skew_product,
    spectral_coefficient,
    system_from_json,
    system_spec_to_json,
    tensor_observable,
    two_cell_parity_partition,
)


def test_cyclic_shift_orbit():
    system = cyclic_shift(7)
    assert system.size == 7
    assert iterate(system, 0, 1) == 1
    assert iterate(system, 6, 1) == 0
    assert iterate(system, 2, 7) == 2
    assert abs(system.weights.sum() - 1.0) < 1e-15


def test_measure_preservation():
    for system in (cyclic_shift(6), random_permutation(9, 4), skew_product(5)):
        assert np.allclose(system.weights[system.forward], system.weights)


def test_character_integrates_to_zero():
    system = cyclic_shift(11)
    f = character_observable(system, 3)
    assert abs(integrate(system, f)) < 1e-14
    assert abs(integrate(system, f, p=2) - 1.0) < 1e-14


def test_random_mean_zero_normalization():
    system = cyclic_shift(13)
    f = random_mean_zero(system, 5)
    assert abs(integrate(system, f)) < 1e-12
    assert abs(f.sup_norm - 1.0) < 1e-12


def test_shift_observable_composes():
    system = cyclic_shift(10)
    f = random_mean_zero(system, 1)
    once = shift_observable(system, shift_observable(system, f, 3), 4)
    direct = shift_observable(system, f, 7)
    assert np.array_equal(once.values, direct.values)


def test_product_system_and_tensor():
    a, b = cyclic_shift(3), cyclic_shift(4)
    prod = product_system(a, b)
    assert prod.size == 12
    f = character_observable(a, 1)
    g = character_observable(b, 1)
    fg = tensor_observable(f, g)
    assert len(fg) == 12
    # product weights multiply and the map moves both coordinates
    assert np.allclose(prod.weights, 1.0 / 12)


def test_system_json_round_trip():
    system = random_permutation(8, 2)
    back = system_from_json(system_spec_to_json(system))
    assert np.array_equal(back.forward, system.forward)
    assert np.allclose(back.weights, system.weights)


def test_build_system_rejects_unknown_kind():
    with pytest.raises(ValueError):
        build_system({"kind": "torus"})


def test_partition_labels_validated():
    with pytest.raises(ValueError):
        Partition((0, 2, 0))  # label 1 missing


def test_parity_partition_invariance():
    even = cyclic_shift(8)
    odd = cyclic_shift(9)
    assert two_cell_parity_partition(even).is_shift_invariant(even)
    assert not two_cell_parity_partition(odd).is_shift_invariant(odd)


def test_conditional_expectation_idempotent():
    system = cyclic_shift(12)
    part = two_cell_parity_partition(system)
    f = random_mean_zero(system, 3)
    proj = conditional_expectation(system, f, part)
    again = conditional_expectation(system, proj, part)
    assert np.allclose(proj.values, again.values)
    # projection preserves the integral
    assert abs(integrate(system, proj) - integrate(system, f)) < 1e-13


def test_conditional_expectation_contracts_l2():
    system = cyclic_shift(10)
    part = two_cell_parity_partition(system)
    f = random_mean_zero(system, 9)
    proj = conditional_expectation(system, f, part)
    assert integrate(system, proj, p=2) <= integrate(system, f, p=2) + 1e-12


def test_spectral_coefficient_of_character():
    # autocorrelation of a frequency-j character is the pure phase e(-jn/m)
    system = cyclic_shift(9)
    f = character_observable(system, 2)
    for n in range(4):
        expected = np.exp(-2j * np.pi * 2 * n / 9)
        assert abs(spectral_coefficient(system, f, n) - expected) < 1e-13


def test_ghk_seminorm_full_window_identity():
    p = 13
    system = cyclic_shift(p)
    f = random_mean_zero(system, 7)
    fhat = np.fft.fft(np.asarray(f.values)) / p
    expected = float(np.sum(np.abs(fhat) ** 4) ** 0.25)
    assert abs(ghk_seminorm(system, f, 2, p) - expected) < 1e-10


def test_ghk_seminorm_single_shift():
    system = cyclic_shift(7)
    f = random_mean_zero(system, 6)
    expected = abs(spectral_coefficient(system, f, 1)) ** 0.5
    assert abs(ghk_seminorm(system, f, 2, 1) - expected) < 1e-12


def test_ghk_seminorm_rejects_low_order():
    system = cyclic_shift(7)
    with pytest.raises(ValueError):
        ghk_seminorm(system, constant_observable(system), 1, 7)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 20), st.integers(0, 10**6))
def test_observable_sup_norm_bounds_values(size, seed):
    rng = np.random.default_rng(seed)
    f = Observable(rng.standard_normal(size) + 1j * rng.standard_normal(size))
    assert np.all(np.abs(f.values) <= f.sup_norm + 1e-12)
    assert integrate(identity_system(size), f, p=2) <= f.sup_norm + 1e-12
