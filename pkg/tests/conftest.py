"""Shared helpers for the test suite."""

import numpy as np

from qpsk_costas.lti import FilterState, LtiFilter, output
from qpsk_costas.integrate import rk4_step


def random_stable_filter(rng, n: int) -> LtiFilter:
    """Random filter with eigenvalues in a bounded left-half-plane band."""
    a = rng.normal(size=(n, n))
    a *= 1.5 / max(1.0, np.max(np.abs(np.linalg.eigvals(a))))
    a -= (np.max(np.linalg.eigvals(a).real) + rng.uniform(0.3, 1.0)) * np.eye(n)
    return LtiFilter(a, rng.normal(size=n), rng.normal(size=n),
                     float(rng.normal()) * 0.3)


def piecewise_constant_input(rng, n_samples: int, steps_per_level: int):
    """Random +/-1 levels switching at grid nodes.

    Returns (levels, u): per-interval level indexable by step, and the
    node samples where each switch node carries the mean of the two
    adjacent levels -- the sampling convention under which trapezoid
    quadrature stays second-order accurate across the jump.
    """
    n_levels = n_samples // steps_per_level + 1
    levels = rng.choice([-1.0, 1.0], size=n_levels)
    idx = np.minimum(np.arange(n_samples) // steps_per_level, n_levels - 1)
    u = levels[idx].astype(float)
    smooth = np.ones(n_samples, dtype=bool)
    for k in range(steps_per_level, n_samples, steps_per_level):
        u[k] = 0.5 * (levels[idx[k - 1]] + levels[idx[k]])
        # the value at a jump instant is convention-dependent (the output
        # itself is discontinuous there); compare at continuity points
        smooth[k] = levels[idx[k - 1]] == levels[idx[k]]
    return levels, idx, u, smooth


def integrate_filter(f: LtiFilter, x0, idx, levels, u, dt: float) -> np.ndarray:
    """RK4 reference solution of the filter driven by the step input."""
    x = np.asarray(x0, dtype=float).copy()
    y = [output(f, FilterState(x), u[0])]
    for k in range(u.size - 1):
        uk = levels[idx[k]]   # constant over [t_k, t_{k+1})
        x = rk4_step(lambda t, s: f.a @ s + f.b * uk, k * dt, x, dt)
        y.append(output(f, FilterState(x), u[k + 1]))
    return np.asarray(y)
