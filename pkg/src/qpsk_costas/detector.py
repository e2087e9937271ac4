"""Phase-detector representations.

Three equivalent views of the QPSK Costas phase detector plus the
baseband quadrature approximation.  All limiters use sign(0) = +1.
"""

import numpy as np

from .core import sign

HALF_PI = np.pi / 2
QUARTER_PI = np.pi / 4

# peak PD output, attained at the branch boundaries
PD_PEAK = np.sqrt(2.0) / 2.0


def pd_quadrature(q: float, i: float) -> float:
    """phi = I sign(Q) - Q sign(I), the hardware PD from branch signals."""
    return i * sign(q) - q * sign(i)


def baseband_qi(theta_delta: float, m1: float, m2: float) -> tuple[float, float]:
    """Low-frequency approximation of the branch signals Q, I."""
    c, s = np.cos(theta_delta), np.sin(theta_delta)
    q = 0.5 * (m1 * c + m2 * s)
    i = 0.5 * (-m1 * s + m2 * c)
    return q, i


def pd_piecewise(theta_delta: float) -> float:
    """Piecewise +/-sin/+/-cos PD characteristic, pi/2-periodic.

    Branch boundaries at pi/4 + k pi/2 take the right-limit branch.
    Callers pass unwrapped theta_delta; wrapping is internal.
    """
    th = np.mod(theta_delta + QUARTER_PI, 2.0 * np.pi) - QUARTER_PI
    if th < QUARTER_PI:
        return -np.sin(th)
    if th < 3 * QUARTER_PI:
        return np.cos(th)
    if th < 5 * QUARTER_PI:
        return np.sin(th)
    return -np.cos(th)


def pd_piecewise_slope(theta_delta: float) -> float:
    """Derivative of pd_piecewise on the branch containing theta_delta."""
    th = np.mod(theta_delta + QUARTER_PI, 2.0 * np.pi) - QUARTER_PI
    if th < QUARTER_PI:
        return -np.cos(th)
    if th < 3 * QUARTER_PI:
        return -np.sin(th)
    if th < 5 * QUARTER_PI:
        return np.cos(th)
    return np.sin(th)


def pd_sin_form(theta_delta: float) -> float:
    """Closed sin/sign form of the PD characteristic.

    (1/sqrt 2) [sin(th + pi/4) sign(sin(th - pi/4))
                - sin(th - pi/4) sign(sin(th + pi/4))]
    """
    sp = np.sin(theta_delta + QUARTER_PI)
    sm = np.sin(theta_delta - QUARTER_PI)
    return (sp * sign(sm) - sm * sign(sp)) / np.sqrt(2.0)
