"""Right-hand sides for the three model fidelities and the VCO law.

State layouts (flat vectors):

    SIGNAL_SPACE:  [x1, x2, x, theta_vco]   (theta_ref(t) = omega_ref t)
    BASEBAND_LPF:  [x1, x2, x, theta_delta]
    AVERAGED_PHASE:[x, theta_delta]

x1, x2 are the low-pass filter states, x the loop-filter state.
"""

from enum import Enum

import numpy as np

from .core import LoopConfig, data_eval, omega_delta_free, sign
from .detector import baseband_qi, pd_piecewise, pd_quadrature


class ModelVariant(Enum):
    SIGNAL_SPACE = "signal_space"
    BASEBAND_LPF = "baseband_lpf"
    AVERAGED_PHASE = "averaged_phase"


def state_dim(variant: ModelVariant, cfg: LoopConfig) -> int:
    n = cfg.loop_filter.dim
    if variant is ModelVariant.AVERAGED_PHASE:
        return n + 1
    return cfg.lpf1.dim + cfg.lpf2.dim + n + 1


def vco_pd_gain(cfg: LoopConfig) -> float:
    """Gain on the direct (unfiltered) PD path into the VCO."""
    return cfg.loop_filter.h if cfg.vco_pd_gain is None else cfg.vco_pd_gain


def initial_state(variant: ModelVariant, cfg: LoopConfig) -> np.ndarray:
    """Flat initial state vector for a fidelity, assembled from the config."""
    if variant is ModelVariant.AVERAGED_PHASE:
        th0 = -cfg.theta_vco_0 if cfg.theta_delta_0 is None else cfg.theta_delta_0
        return np.concatenate([cfg.x_lf_0, [th0]])
    if variant is ModelVariant.SIGNAL_SPACE:
        tail = cfg.theta_vco_0
    else:
        tail = -cfg.theta_vco_0 if cfg.theta_delta_0 is None else cfg.theta_delta_0
    return np.concatenate([cfg.x_lpf1_0, cfg.x_lpf2_0, cfg.x_lf_0, [tail]])


def _split(state: np.ndarray, cfg: LoopConfig):
    n1, n2, n = cfg.lpf1.dim, cfg.lpf2.dim, cfg.loop_filter.dim
    return (state[:n1], state[n1:n1 + n2], state[n1 + n2:n1 + n2 + n],
            float(state[n1 + n2 + n]))


def rhs_signal_space(t: float, state: np.ndarray, cfg: LoopConfig) -> np.ndarray:
    """Physical model: actual branch signals including double-frequency terms."""
    x1, x2, x, theta_vco = _split(state, cfg)
    m1 = data_eval(cfg.m1_spec, t)
    m2 = data_eval(cfg.m2_spec, t)
    theta_ref = cfg.omega_ref * t
    carrier = m1 * np.cos(theta_ref) + m2 * np.sin(theta_ref)
    u1 = np.cos(theta_vco) * carrier
    u2 = np.sin(theta_vco) * carrier
    q = float(cfg.lpf1.c @ x1)
    i = float(cfg.lpf2.c @ x2)
    phi = cfg.detector_polarity * pd_quadrature(q, i)
    dx1 = cfg.lpf1.a @ x1 + cfg.lpf1.b * u1
    dx2 = cfg.lpf2.a @ x2 + cfg.lpf2.b * u2
    dx = cfg.loop_filter.a @ x + cfg.loop_filter.b * phi
    g = float(cfg.loop_filter.c @ x) + vco_pd_gain(cfg) * phi
    dth = cfg.omega_vco_free + cfg.k_vco * g
    return np.concatenate([dx1, dx2, dx, [dth]])


def rhs_baseband_lpf(t: float, state: np.ndarray, cfg: LoopConfig) -> np.ndarray:
    """Baseband model: double-frequency terms dropped, LPF dynamics kept."""
    x1, x2, x, theta_delta = _split(state, cfg)
    m1 = data_eval(cfg.m1_spec, t)
    m2 = data_eval(cfg.m2_spec, t)
    u1, u2 = baseband_qi(theta_delta, m1, m2)
    q = float(cfg.lpf1.c @ x1)
    i = float(cfg.lpf2.c @ x2)
    phi = cfg.detector_polarity * pd_quadrature(q, i)
    dx1 = cfg.lpf1.a @ x1 + cfg.lpf1.b * u1
    dx2 = cfg.lpf2.a @ x2 + cfg.lpf2.b * u2
    dx = cfg.loop_filter.a @ x + cfg.loop_filter.b * phi
    dth = (omega_delta_free(cfg) - cfg.k_vco * float(cfg.loop_filter.c @ x)
           - cfg.k_vco * vco_pd_gain(cfg) * phi)
    return np.concatenate([dx1, dx2, dx, [dth]])


def rhs_averaged(t: float, state: np.ndarray, cfg: LoopConfig) -> np.ndarray:
    """Averaged phase model: PD replaced by its piecewise characteristic."""
    n = cfg.loop_filter.dim
    x = state[:n]
    theta_delta = float(state[n])
    phi = cfg.detector_polarity * pd_piecewise(theta_delta)
    dx = cfg.loop_filter.a @ x + cfg.loop_filter.b * phi
    dth = (omega_delta_free(cfg) - cfg.k_vco * float(cfg.loop_filter.c @ x)
           - cfg.k_vco * vco_pd_gain(cfg) * phi)
    return np.concatenate([dx, [dth]])


RHS = {
    ModelVariant.SIGNAL_SPACE: rhs_signal_space,
    ModelVariant.BASEBAND_LPF: rhs_baseband_lpf,
    ModelVariant.AVERAGED_PHASE: rhs_averaged,
}


def vco_frequency(cfg: LoopConfig, g: float) -> float:
    """Instantaneous VCO frequency for a control input g."""
    return cfg.omega_vco_free + cfg.k_vco * g


def initial_vco_frequency(cfg: LoopConfig) -> float:
    """VCO frequency at t=0 from the configured initial filter states."""
    q0 = float(cfg.lpf1.c @ cfg.x_lpf1_0)
    i0 = float(cfg.lpf2.c @ cfg.x_lpf2_0)
    bracket = i0 * sign(q0) - q0 * sign(i0)
    g0 = (float(cfg.loop_filter.c @ cfg.x_lf_0)
          + vco_pd_gain(cfg) * cfg.detector_polarity * bracket)
    return vco_frequency(cfg, g0)
