import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_spectrum
from oracles import double_sum_log_selberg, euler_log_ruelle
from torzeta.errors import DivergenceError, InputError
from torzeta.spectrum import LengthSpectrum
from torzeta import zeta

# Frozen oracle values (one class l=1, theta=0)
LOG_RUELLE_ONE_S3 = -0.051069180942701596      # log(1 - e^{-3})
LOG_RUELLE_HALF_PI_K2_S3 = 0.04858735157374196  # log(1 + e^{-3})
LOG_SELBERG_ONE_S3 = -0.046064283287791570      # double-sum product oracle


def test_log_ruelle_single_factor(one_class):
    bv = zeta.log_ruelle(one_class, 0, 3)
    assert bv.value.real == pytest.approx(LOG_RUELLE_ONE_S3, abs=1e-15)
    assert abs(bv.value.imag) < 1e-17
    assert bv.abscissa == 2.0
    assert bv.tail_bound > 0


def test_log_ruelle_sign_flip():
    spec = LengthSpectrum.build([(1.0, math.pi / 2, 1)], 5)
    bv = zeta.log_ruelle(spec, 2, 3)
    assert bv.value.real == pytest.approx(LOG_RUELLE_HALF_PI_K2_S3, abs=1e-15)


def test_log_selberg_product_oracle(one_class):
    assert zeta.log_selberg(one_class, 0, 3).value.real == pytest.approx(LOG_SELBERG_ONE_S3, abs=1e-14)


def test_empty_spectrum_zero_with_tail(empty):
    for k in (-3, 0, 4):
        bv = zeta.log_ruelle(empty, k, 4)
        assert bv.value == 0
        # counting 0: C sigma e^{-(sigma-2)R} / (sigma - 2) / (1 - e^{-sigma R})
        R, C, sig = 5.0, 10.0, 4.0
        ref = sig * C * math.exp(-(sig - 2) * R) / (sig - 2) / (1 - math.exp(-sig * R))
        assert bv.tail_bound == pytest.approx(ref, rel=1e-14)
    assert zeta.log_selberg(empty, 1, 4).value == 0


def test_selberg_conjugation(one_class):
    spec = LengthSpectrum.build([(1.0, 0.7, 1), (1.9, 2.0, 2)], 5)
    a = zeta.log_selberg(spec, 1, 3.3).value
    b = zeta.log_selberg(spec, -1, 3.3).value
    assert a == pytest.approx(b.conjugate(), abs=1e-16)


def test_selberg_sym_parts():
    spec = random_spectrum(2, 200)
    s5 = zeta.log_selberg_sym(spec, 5, 3.0)
    assert abs(s5.value.imag) < 1e-14
    parts = zeta.log_selberg(spec, 5, 3.0).value + zeta.log_selberg(spec, -5, 3.0).value
    assert abs(s5.value - parts) < 1e-15
    assert zeta.log_selberg_sym(spec, 0, 3.0).value == 2 * zeta.log_selberg(spec, 0, 3.0).value


def test_divergence_error_names_point(one_class):
    with pytest.raises(DivergenceError, match="k=4") as ei:
        zeta.log_ruelle(one_class, 4, 2.0)
    assert ei.value.abscissa == 2.0
    with pytest.raises(DivergenceError):
        zeta.log_ruelle_rep_direct(one_class, (2, 0), 3.0)


def test_abscissa_override_certified():
    spec = random_spectrum(0, 100)
    bv = zeta.log_ruelle(spec, 1, 1.5, abscissa=1.0)
    assert bv.abscissa == 1.0
    # certified constant makes the bound cover the data actually present
    assert spec.growth_constant_for(1.0) * math.exp(spec.cutoff) >= spec.total_multiplicity
    with pytest.raises(InputError):
        zeta.log_ruelle(spec, 1, 3.0, abscissa=-1.0)


def _few_primitives(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    rows = [(float(rng.uniform(0.4, 2.5)), float(rng.uniform(0, 2 * math.pi)), int(rng.integers(1, 3)))
            for _ in range(n)]
    return rows, LengthSpectrum.build(rows, 3.0, growth_constant=100.0)


@pytest.mark.parametrize("seed", range(8))
def test_euler_product_oracle(seed):
    rows, spec = _few_primitives(seed)
    for k in (-3, 0, 2, 5):
        for s in (2.5, 3.0, 4 + 1.5j):
            assert abs(zeta.log_ruelle(spec, k, s).value - euler_log_ruelle(rows, k, s)) < 1e-13


@pytest.mark.parametrize("seed", range(8))
def test_selberg_double_sum_oracle(seed):
    rows, spec = _few_primitives(seed)
    for k in (-2, 0, 1, 4):
        for s in (2.5, 3.5 - 2j):
            assert abs(zeta.log_selberg(spec, k, s).value - double_sum_log_selberg(rows, k, s)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(-6, 6), st.floats(2.2, 6.0), st.floats(-5, 5), st.integers(0, 20))
def test_conjugation_symmetry(k, re, im, seed):
    spec = random_spectrum(seed, 150)
    s = complex(re, im)
    a = zeta.log_ruelle(spec, k, s.conjugate()).value
    b = zeta.log_ruelle(spec, -k, s).value
    assert abs(a - b.conjugate()) < 1e-14


@pytest.mark.parametrize("seed", range(5))
def test_tail_bound_sound(seed):
    spec = random_spectrum(seed, 400)
    short = spec.truncate(spec.systole + 0.6 * (spec.cutoff - spec.systole))
    for fn, k, s in ((zeta.log_ruelle, 3, 3.0), (zeta.log_selberg, -2, 2.6), (zeta.log_ruelle, 0, 2.4 + 3j)):
        full, part = fn(spec, k, s), fn(short, k, s)
        assert abs(full.value - part.value) <= part.tail_bound


def test_rep_trivial_and_m1(one_class):
    spec = random_spectrum(1, 200)
    assert zeta.log_ruelle_rep_direct(spec, (0, 0), 3.0).value == pytest.approx(zeta.log_ruelle(spec, 0, 3.0).value,
                                                                             abs=1e-16)
    rep = zeta.log_ruelle_rep_direct(spec, (1, 0), 4.0).value
    ref = zeta.log_ruelle(spec, 1, 3.5).value + zeta.log_ruelle(spec, -1, 4.5).value
    assert abs(rep - ref) < 1e-15
    b = zeta.log_ruelle_rep_chars(spec, 1, 4.0).value
    assert abs(b - ref) < 1e-15


@pytest.mark.parametrize("w, s", [((2, 2), 6.0), ((4, 0), 6.0), ((1, 0), 5.0), ((0, 0), 5.0), ((3, 1), 6 + 1j)])
def test_three_routes(w, s):
    spec = random_spectrum(4, 60)
    A = zeta.log_ruelle_rep_direct(spec, w, s)
    B = zeta.log_ruelle_rep_chars(spec, w, s)
    C = zeta.log_ruelle_rep_selberg(spec, w, s)
    assert abs(A.value - B.value) < 1e-12
    assert abs(A.value - C.value) < 1e-12


def test_opposite_sign_convention_fails():
    """The printed exponent (flipped signs) does not reproduce route A."""
    from torzeta import algebra

    spec = random_spectrum(3, 100)
    s = 5.0
    A = zeta.log_ruelle_rep_direct(spec, (1, 0), s).value
    flipped = sum(-d.sign * zeta.log_selberg(spec, d.q, s - float(d.lam)).value for d in algebra.weyl_data((1, 0)))
    assert abs(A - flipped) > 1e-3


def test_ruelle_selberg_examples(empty):
    spec = LengthSpectrum.build([(1.0, 0.9, 1)], 5)
    assert zeta.ruelle_selberg_residual(spec, 3, 3.5) < 1e-13
    assert zeta.ruelle_selberg_residual(empty, 0, 3.5) == 0
    big = random_spectrum(6, 100)
    for k in range(-4, 5):
        for s in (3.5, 4 + 2j):
            r, tail = zeta.ruelle_selberg_check(big, k, s)
            assert r <= tail + 1e-11


def test_ruelle_negated_examples(empty, one_class):
    assert zeta.ruelle_modulus_negated(empty, math.pi, 0, 3).value.real == pytest.approx(math.exp(-12), rel=1e-14)
    spec = LengthSpectrum.build([(1.0, 0.4, 1)], 5)
    ref = math.exp(-12 / math.pi) * abs(1 - np.exp(4j * 0.4) * math.exp(-3))
    assert zeta.ruelle_modulus_negated(spec, 1.0, 4, 3).value.real == pytest.approx(ref, rel=1e-14)
    same = zeta.ruelle_modulus_negated(spec, 0.0, 4, 3).value.real
    assert same == pytest.approx(math.exp(zeta.log_ruelle(spec, 4, 3).value.real), rel=1e-15)


def test_selberg_negated_examples(empty):
    assert zeta.selberg_modulus_negated(empty, math.pi, 0, 3).value.real == pytest.approx(math.exp(-9), rel=1e-13)
    f0 = zeta.selberg_functional_log_factor(1.0, 0, 3.0)
    f4 = zeta.selberg_functional_log_factor(1.0, 4, 3.0)
    assert f4 - f0 == pytest.approx(4 * math.pi * (16 * 3 / 4) / (4 * math.pi ** 2))
    # applying the relation and its inverse returns the starting value
    spec = random_spectrum(2, 100)
    v = zeta.selberg_modulus_negated(spec, 1.3, 2, 3.0).value.real
    back = v * math.exp(-zeta.selberg_functional_log_factor(1.3, 2, 3.0))
    assert back == pytest.approx(math.exp(zeta.log_selberg(spec, 2, 3.0).value.real), rel=1e-14)


def test_negated_needs_volume_and_real_s(one_class):
    with pytest.raises(InputError, match="requires volume"):
        zeta.ruelle_modulus_negated(one_class, None, 0, 3)
    with pytest.raises(InputError):
        zeta.ruelle_modulus_negated(one_class, 1.0, 0, 3 + 1j)


def test_required_cutoff_meets_tolerance():
    spec = random_spectrum(0, 200)
    R = zeta.required_cutoff(spec, 3.0, 1e-8)
    sig, C = 3.0, spec.growth_constant
    assert sig * C * math.exp(-(sig - 2) * R) / (sig - 2) <= 1.0000001e-8


def test_thread_count_invariance(large_synthetic):
    a = zeta.log_ruelle(large_synthetic, 4, 3.0, threads=1)
    for n in (2, 8):
        b = zeta.log_ruelle(large_synthetic, 4, 3.0, threads=n)
        assert a.value == b.value and a.tail_bound == b.tail_bound
