"""LTI filter engine: constructors, responses, transfer, convolution oracle."""

import math

import numpy as np
import pytest

from qpsk_costas.lti import (FilterEvalError, FilterState, LtiFilter,
                             convolution_solution, derivative, free_response,
                             impulse_response, make_first_order_lpf,
                             make_pi_loop_filter, output, transfer_eval)

TAU1, TAU2 = 20e-6, 4e-6
OMEGA_LPF = 1.2566e6


def test_pi_filter_realization():
    f = make_pi_loop_filter(TAU1, TAU2)
    assert f.a[0, 0] == 0.0
    assert f.b[0] == 1.0
    assert f.c[0] == pytest.approx(5e4)
    assert f.h == pytest.approx(0.2)


def test_pi_filter_transfer_hand_value():
    f = make_pi_loop_filter(TAU1, TAU2)
    # (tau2 s + 1)/(tau1 s) at s = 1e5 i  ->  (1 + 0.4i)/(2i) = 0.2 - 0.5i
    assert transfer_eval(f, 1e5j) == pytest.approx(0.2 - 0.5j, abs=1e-12)


def test_pi_filter_bad_tau():
    with pytest.raises(ValueError):
        make_pi_loop_filter(0.0, TAU2)
    with pytest.raises(ValueError):
        make_pi_loop_filter(TAU1, -1.0)


def test_lpf_transfer_values():
    f = make_first_order_lpf(OMEGA_LPF)
    assert transfer_eval(f, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert abs(transfer_eval(f, 1j * OMEGA_LPF)) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    f2 = make_first_order_lpf(6.2832e5)
    two_omega_ref = 5.0265e6
    expect = 1.0 / math.sqrt(1.0 + (two_omega_ref / 6.2832e5) ** 2)
    assert abs(transfer_eval(f2, 1j * two_omega_ref)) == pytest.approx(expect, rel=1e-9)


def test_lpf_literal_realization_gain():
    f = make_first_order_lpf(OMEGA_LPF, literal_realization=True)
    assert transfer_eval(f, 0.0) == pytest.approx(1.0 / OMEGA_LPF, rel=1e-12)


def test_output_and_derivative():
    pi = make_pi_loop_filter(TAU1, TAU2)
    assert output(pi, FilterState([0.4]), 0.0) == pytest.approx(2e4)
    assert output(pi, FilterState([0.0]), 0.0) == 0.0
    lpf = make_first_order_lpf(OMEGA_LPF)
    assert output(lpf, FilterState([30.0]), 0.0) == pytest.approx(30.0)
    assert derivative(lpf, FilterState([0.0]), 1.0)[0] == pytest.approx(OMEGA_LPF)
    assert derivative(pi, FilterState([5.0]), 0.0)[0] == 0.0
    assert derivative(pi, FilterState([0.0]), 2.0)[0] == 2.0


def test_output_linearity():
    rng = np.random.default_rng(7)
    f = LtiFilter(rng.normal(size=(2, 2)), rng.normal(size=2), rng.normal(size=2), 0.3)
    x1, x2 = rng.normal(size=2), rng.normal(size=2)
    u1, u2 = 1.7, -0.4
    a, b = 2.5, -1.25
    lhs = output(f, FilterState(a * x1 + b * x2), a * u1 + b * u2)
    rhs = a * output(f, FilterState(x1), u1) + b * output(f, FilterState(x2), u2)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_free_response():
    lpf = make_first_order_lpf(OMEGA_LPF)
    for t in (0.0, 1e-6, 5e-6):
        assert free_response(lpf, [30.0], t) == pytest.approx(30.0 * math.exp(-OMEGA_LPF * t))
    pi = make_pi_loop_filter(TAU1, TAU2)
    # pole at zero: the free response does not decay (Example 1's mechanism)
    assert free_response(pi, [0.4], 1.0) == pytest.approx(2e4)
    assert free_response(pi, [0.0], 0.5) == 0.0


def test_free_response_decay_bound():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(3, 3))
    a = a - (np.max(np.linalg.eigvals(a).real) + 0.5) * np.eye(3)
    f = LtiFilter(a, rng.normal(size=3), rng.normal(size=3), 0.0)
    x0 = rng.normal(size=3)
    lam = abs(np.max(np.linalg.eigvals(a).real)) / 2.0
    t_grid = np.linspace(0.0, 20.0, 200)
    vals = np.array([abs(free_response(f, x0, t)) for t in t_grid])
    c = 10.0 * np.max(vals)
    assert np.all(vals <= c * np.exp(-lam * t_grid) + 1e-12)


def test_impulse_response():
    lpf = make_first_order_lpf(OMEGA_LPF)
    for t in (0.0, 1e-6):
        assert impulse_response(lpf, t) == pytest.approx(OMEGA_LPF * math.exp(-OMEGA_LPF * t))
    pi = make_pi_loop_filter(TAU1, TAU2)
    assert impulse_response(pi, 0.0) == pytest.approx(1.0 / TAU1)
    assert impulse_response(pi, 0.123) == pytest.approx(1.0 / TAU1)


def test_transfer_eval_pole_raises():
    pi = make_pi_loop_filter(TAU1, TAU2)
    with pytest.raises(FilterEvalError):
        transfer_eval(pi, 0.0)


def test_transfer_matches_closed_forms_random_points():
    rng = np.random.default_rng(11)
    pi = make_pi_loop_filter(TAU1, TAU2)
    lpf = make_first_order_lpf(OMEGA_LPF)
    for _ in range(100):
        s = complex(rng.normal() * 1e5 + 1.0, rng.normal() * 1e5)
        want = (TAU2 * s + 1.0) / (TAU1 * s)
        got = transfer_eval(pi, s)
        assert abs(got - want) <= 1e-12 * max(1.0, abs(want))
        want = 1.0 / (s / OMEGA_LPF + 1.0)
        got = transfer_eval(lpf, s)
        assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


def test_convolution_trivial_cases():
    lpf = make_first_order_lpf(2.0)
    t = np.linspace(0.0, 5.0, 501)
    zero = convolution_solution(lpf, [0.0], np.zeros_like(t), t)
    assert np.max(np.abs(zero)) == 0.0
    step = convolution_solution(lpf, [0.0], np.ones_like(t), t)
    assert step[-1] == pytest.approx(1.0, abs=1e-4)
    pi = make_pi_loop_filter(TAU1, TAU2)
    t = np.linspace(0.0, 1e-4, 401)
    ramp = convolution_solution(pi, [0.0], np.ones_like(t), t)
    assert np.allclose(ramp, pi.h + t / TAU1, atol=1e-6 * (1 + np.max(np.abs(ramp))))


def test_convolution_vs_rk4_single_filter():
    from conftest import integrate_filter, piecewise_constant_input, random_stable_filter
    rng = np.random.default_rng(5)
    f = random_stable_filter(rng, 2)
    x0 = rng.normal(size=2)
    dt = 5e-4
    t = np.arange(2001) * dt
    levels, idx, u, smooth = piecewise_constant_input(rng, t.size, 100)
    y = integrate_filter(f, x0, idx, levels, u, dt)
    conv = convolution_solution(f, x0, u, t)
    assert np.max(np.abs(conv - y)[smooth]) <= 1e-6 * (1.0 + np.max(np.abs(y)))


def test_convolution_input_validation():
    lpf = make_first_order_lpf(1.0)
    with pytest.raises(ValueError):
        convolution_solution(lpf, [0.0], np.array([]), np.array([]))
    with pytest.raises(ValueError):
        convolution_solution(lpf, [0.0], np.zeros(3), np.array([0.0, 0.1, 0.3]))
