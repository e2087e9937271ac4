"""State-space LTI filter engine.

Filters are (A, b, c, h) realizations:

    dx/dt = A x + b u,    y = c.x + h u

with an optional transfer-function tag (num, den) attached by the
built-in constructors so stability analysis can use the exact
symbolic numerator/denominator.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm


class FilterEvalError(ValueError):
    """Transfer function evaluated at an eigenvalue of A."""


@dataclass(frozen=True, eq=False)
class LtiFilter:
    a: np.ndarray  # (n, n)
    b: np.ndarray  # (n,)
    c: np.ndarray  # (n,)
    h: float = 0.0
    # polynomial coefficients (highest power first) of H(s) = num/den,
    # set by the built-in constructors, None for custom filters
    tf_num: tuple | None = field(default=None, compare=False)
    tf_den: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        c = np.asarray(self.c, dtype=float).ravel()
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "h", float(self.h))
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("A must be square")
        if b.shape != (n,) or c.shape != (n,):
            raise ValueError("b, c must match the dimension of A")

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "c": self.c.tolist(),
            "h": self.h,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "LtiFilter":
        return LtiFilter(np.array(d["a"], dtype=float),
                         np.array(d["b"], dtype=float),
                         np.array(d["c"], dtype=float),
                         float(d.get("h", 0.0)))


@dataclass
class FilterState:
    x: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float).ravel()


def make_pi_loop_filter(tau1: float, tau2: float) -> LtiFilter:
    """Proportional-integral loop filter (tau2 s + 1) / (tau1 s).

    Realized as dx/dt = u, y = x/tau1 + (tau2/tau1) u.
    """
    if tau1 <= 0:
        raise ValueError("tau1 must be positive")
    if tau2 < 0:
        raise ValueError("tau2 must be non-negative")
    return LtiFilter(np.array([[0.0]]), np.array([1.0]),
                     np.array([1.0 / tau1]), tau2 / tau1,
                     tf_num=(tau2, 1.0), tf_den=(tau1, 0.0))


def make_first_order_lpf(omega_lpf: float, literal_realization: bool = False) -> LtiFilter:
    """First-order low-pass filter 1 / (s/omega_lpf + 1), unit DC gain.

    With literal_realization=True the input gain is 1 instead of
    omega_lpf, which realizes 1/(s + omega_lpf) -- DC gain 1/omega_lpf.
    Kept only for fidelity experiments; the loop needs unit passband
    gain for the baseband Q/I approximations to hold.
    """
    if omega_lpf <= 0:
        raise ValueError("omega_lpf must be positive")
    b = 1.0 if literal_realization else omega_lpf
    return LtiFilter(np.array([[-omega_lpf]]), np.array([b]),
                     np.array([1.0]), 0.0,
                     tf_num=(b,), tf_den=(1.0, omega_lpf))


def output(f: LtiFilter, st: FilterState, u: float) -> float:
    """Filter output y = c.x + h u."""
    return float(f.c @ st.x + f.h * u)


def derivative(f: LtiFilter, st: FilterState, u: float) -> np.ndarray:
    """State derivative A x + b u."""
    return f.a @ st.x + f.b * u


def free_response(f: LtiFilter, x0, t: float) -> float:
    """Zero-input output c.exp(A t).x0."""
    x0 = np.asarray(x0, dtype=float).ravel()
    if f.dim == 1:
        return float(f.c[0] * np.exp(f.a[0, 0] * t) * x0[0])
    return float(f.c @ expm(f.a * t) @ x0)


def impulse_response(f: LtiFilter, t: float) -> float:
    """gamma(t) = c.exp(A t).b."""
    if f.dim == 1:
        return float(f.c[0] * np.exp(f.a[0, 0] * t) * f.b[0])
    return float(f.c @ expm(f.a * t) @ f.b)


def transfer_eval(f: LtiFilter, s: complex) -> complex:
    """H(s) = -c.(A - sI)^-1.b + h  (equivalently c.(sI - A)^-1.b + h)."""
    m = f.a - s * np.eye(f.dim)
    try:
        y = np.linalg.solve(m, f.b.astype(complex))
    except np.linalg.LinAlgError as e:
        raise FilterEvalError(f"s={s} is an eigenvalue of A") from e
    if not np.all(np.isfinite(y)):
        raise FilterEvalError(f"s={s} is an eigenvalue of A")
    # guard against solve() succeeding on a numerically singular pencil
    if abs(np.linalg.det(m)) == 0.0:
        raise FilterEvalError(f"s={s} is an eigenvalue of A")
    return complex(-(f.c.astype(complex) @ y) + f.h)


def convolution_solution(f: LtiFilter, x0, u: np.ndarray, t_grid: np.ndarray) -> np.ndarray:
    """Closed-form output via the convolution integral.

    y(t) = c.exp(A t).x0 + h u(t) + int_0^t gamma(t - tau) u(tau) dtau,
    with the integral evaluated by the trapezoid rule on the uniform
    grid.  Cross-validation oracle for ODE integration of the filter.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    u = np.asarray(u, dtype=float)
    if t_grid.size == 0:
        raise ValueError("empty time grid")
    if u.shape != t_grid.shape:
        raise ValueError("input samples must match the time grid")
    dt = np.diff(t_grid)
    if t_grid.size > 1 and not np.allclose(dt, dt[0], rtol=1e-9):
        raise ValueError("time grid must be uniform")
    n = t_grid.size
    x0 = np.asarray(x0, dtype=float).ravel()
    alpha = np.array([free_response(f, x0, t - t_grid[0]) for t in t_grid])
    gamma = np.array([impulse_response(f, t - t_grid[0]) for t in t_grid])
    out = alpha + f.h * u
    if n > 1:
        step = dt[0]
        for k in range(1, n):
            w = gamma[k::-1] * u[: k + 1]
            out[k] += step * (np.sum(w) - 0.5 * (w[0] + w[-1]))
    return out
