"""Config validation, data signals, serialization."""

import math

import numpy as np
import pytest

from qpsk_costas.core import DataSignalSpec, LoopConfig, data_eval, omega_delta_free, sign, validate
from qpsk_costas.lti import make_pi_loop_filter
from qpsk_costas.scenarios import OMEGA_REF, base_config


def test_sign_tie_break():
    assert sign(0.0) == 1.0
    assert sign(1e-300) == 1.0
    assert sign(-1e-300) == -1.0


def test_base_config_valid():
    assert validate(base_config()) == []


def test_validate_polarity():
    cfg = base_config().with_updates(detector_polarity=0)
    v = validate(cfg)
    assert len(v) == 1
    assert "detector_polarity" in v[0]


def test_validate_state_dimension():
    cfg = base_config().with_updates(x_lpf1_0=np.array([1.0, 2.0]))
    v = validate(cfg)
    assert len(v) == 1
    assert "x_lpf1_0" in v[0]


def test_validate_unstable_lpf():
    bad = make_pi_loop_filter(1.0, 0.0)  # pole at zero: not a valid LPF
    cfg = base_config().with_updates(lpf1=bad, x_lpf1_0=np.zeros(1))
    assert any("lpf1" in s and "stable" in s for s in validate(cfg))


def test_validate_lpf_feedthrough():
    from qpsk_costas.lti import LtiFilter
    leaky = LtiFilter(np.array([[-1.0]]), np.array([1.0]), np.array([1.0]), h=0.5)
    cfg = base_config().with_updates(lpf2=leaky)
    assert any("feedthrough" in s for s in validate(cfg))


def test_validate_data_specs():
    cfg = base_config().with_updates(m1_spec=DataSignalSpec("constant", value=0.5))
    assert any("m1_spec" in s for s in validate(cfg))
    cfg = base_config().with_updates(m2_spec=DataSignalSpec("square", omega_m=0.0))
    assert any("m2_spec" in s for s in validate(cfg))


def test_validate_is_pure():
    cfg = base_config().with_updates(detector_polarity=0)
    assert validate(cfg) == validate(cfg)


def test_data_eval_constant():
    assert data_eval(DataSignalSpec("constant", value=1.0), 1e-3) == 1.0
    assert data_eval(DataSignalSpec("constant", value=-1.0), 0.0) == -1.0


def test_data_eval_square():
    spec = DataSignalSpec("square", omega_m=2.7495e6)
    # sin(2.7495) > 0 at t = 1e-6
    assert data_eval(spec, 1e-6) == 1.0
    # tie-break at t = 0
    assert data_eval(spec, 0.0) == 1.0


def test_data_eval_square_never_zero_and_periodic():
    spec = DataSignalSpec("square", omega_m=2.7495e6)
    period = 2.0 * math.pi / spec.omega_m
    t = np.linspace(0.0, 5 * period, 2001)
    vals = np.array([data_eval(spec, ti) for ti in t])
    assert set(np.unique(vals)) <= {-1.0, 1.0}
    # periodicity away from switching instants
    for ti in np.linspace(period / 17, period, 40, endpoint=False):
        if abs(math.sin(spec.omega_m * ti)) < 1e-6:
            continue
        assert data_eval(spec, ti) == data_eval(spec, ti + period)


def test_omega_delta_free():
    cfg = base_config().with_updates(omega_vco_free=2.6314e6)
    assert omega_delta_free(cfg) == pytest.approx(-1.1813e5, rel=1e-3)
    cfg = base_config().with_updates(omega_vco_free=OMEGA_REF)
    assert omega_delta_free(cfg) == 0.0
    cfg = base_config().with_updates(omega_vco_free=OMEGA_REF + 1000.0)
    assert omega_delta_free(cfg) == pytest.approx(-1000.0)


def test_json_round_trip():
    cfg = base_config().with_updates(
        omega_vco_free=2.8283e6,
        x_lpf1_0=np.array([30.0]),
        m1_spec=DataSignalSpec("square", omega_m=2.7495e6),
        theta_delta_0=-math.pi / 4)
    clone = LoopConfig.from_json_dict(cfg.to_json_dict())
    assert clone.json_str() == cfg.json_str()
    assert clone.digest() == cfg.digest()


def test_digest_changes_with_config():
    a = base_config()
    b = a.with_updates(omega_vco_free=a.omega_vco_free + 1.0)
    assert a.digest() != b.digest()


def test_theta_delta_default():
    from qpsk_costas.dynamics import ModelVariant, initial_state
    cfg = base_config().with_updates(theta_vco_0=0.8854)
    st = initial_state(ModelVariant.AVERAGED_PHASE, cfg)
    assert st[-1] == pytest.approx(-0.8854)
    st = initial_state(ModelVariant.AVERAGED_PHASE,
                       cfg.with_updates(theta_delta_0=0.25))
    assert st[-1] == 0.25
