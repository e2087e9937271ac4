"""Fixed-step RK4 simulation with decimated trace recording."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import LoopConfig, validate
from .dynamics import ModelVariant, initial_state, vco_pd_gain


class IntegrationDivergedError(RuntimeError):
    """State vector went non-finite during integration."""


@dataclass(frozen=True)
class SimPlan:
    t_end: float
    dt: float
    decimation: int = 1
    variant: ModelVariant = ModelVariant.SIGNAL_SPACE

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end < self.dt:
            raise ValueError("t_end must be at least dt")
        if self.decimation < 1:
            raise ValueError("decimation must be >= 1")


@dataclass
class Trace:
    """Decimated time series of one run."""
    t: np.ndarray
    theta_delta: np.ndarray
    omega_vco: np.ndarray
    g: np.ndarray
    q: np.ndarray
    i: np.ndarray
    variant: ModelVariant = ModelVariant.SIGNAL_SPACE
    plan: SimPlan | None = None
    config_digest: str = ""

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    def to_csv(self, path) -> None:
        cols = (self.t, self.theta_delta, self.omega_vco, self.g, self.q, self.i)
        with open(path, "w") as fh:
            fh.write("t,theta_delta,omega_vco,g,q,i\n")
            for row in zip(*cols):
                fh.write(",".join("%.17g" % v for v in row) + "\n")


def _loop_rate_scale(cfg: LoopConfig) -> float:
    """Frequency scale of the closed averaged loop (for step-size choice)."""
    lf = cfg.loop_filter
    eig = float(np.max(np.abs(np.linalg.eigvals(lf.a))))
    direct = cfg.k_vco * abs(vco_pd_gain(cfg))
    natural = math.sqrt(cfg.k_vco * abs(float(lf.c @ lf.b)))
    return eig + direct + natural


def _data_rate_scale(cfg: LoopConfig) -> float:
    out = 0.0
    for spec in (cfg.m1_spec, cfg.m2_spec):
        if spec.kind == "square":
            out = max(out, spec.omega_m)
    return out


def default_dt(cfg: LoopConfig, variant: ModelVariant) -> float:
    """Step size resolving the fastest active dynamics with ~200 samples/period."""
    if variant is ModelVariant.SIGNAL_SPACE:
        omega_fast = 2.0 * cfg.omega_ref
        return min(2.0 * math.pi / (200.0 * omega_fast), 1e-7)
    slow = _loop_rate_scale(cfg)
    if variant is ModelVariant.BASEBAND_LPF:
        lpf = max(float(np.max(np.abs(np.linalg.eigvals(cfg.lpf1.a)))),
                  float(np.max(np.abs(np.linalg.eigvals(cfg.lpf2.a)))))
        omega_fast = max(lpf, slow, _data_rate_scale(cfg))
    else:
        omega_fast = max(slow, _data_rate_scale(cfg))
    return 2.0 * math.pi / (200.0 * omega_fast)


def default_decimation(t_end: float, dt: float, max_samples: int = 200_000) -> int:
    n_steps = int(math.ceil(t_end / dt))
    return max(1, int(math.ceil(n_steps / max_samples)))


def rk4_step(rhs, t: float, state: np.ndarray, dt: float) -> np.ndarray:
    """One classical 4-stage Runge-Kutta step of y' = rhs(t, y)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    k1 = rhs(t, state)
    k2 = rhs(t + 0.5 * dt, state + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, state + 0.5 * dt * k2)
    k4 = rhs(t + dt, state + dt * k3)
    out = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise IntegrationDivergedError(f"state went non-finite at t={t:g}")
    return out


def _data_params(spec):
    if spec.kind == "constant":
        return 0, spec.value, 0.0
    return 1, 1.0, spec.omega_m


def simulate(cfg: LoopConfig, plan: SimPlan) -> Trace:
    """Integrate one model fidelity from t=0 to plan.t_end.

    Deterministic: identical (cfg, plan) yield bit-identical traces, and
    decimated traces are exact subsamples of undecimated ones (recording
    never affects stepping).
    """
    violations = validate(cfg)
    if violations:
        raise ValueError("invalid config: " + "; ".join(violations))
    n_steps = int(math.ceil(plan.t_end / plan.dt - 1e-12))
    dec = plan.decimation
    if n_steps % dec:
        n_steps += dec - n_steps % dec
    n_rec = n_steps // dec + 1
    y0 = initial_state(plan.variant, cfg)

    kind = {ModelVariant.SIGNAL_SPACE: 0,
            ModelVariant.BASEBAND_LPF: 1,
            ModelVariant.AVERAGED_PHASE: 2}[plan.variant]
    m1k, m1v, m1o = _data_params(cfg.m1_spec)
    m2k, m2v, m2o = _data_params(cfg.m2_spec)
    rec = [np.empty(n_rec) for _ in range(6)]
    status = _kernels.run(
        kind, y0, plan.dt, n_steps, dec,
        cfg.lpf1.a, cfg.lpf1.b, cfg.lpf1.c,
        cfg.lpf2.a, cfg.lpf2.b, cfg.lpf2.c,
        cfg.loop_filter.a, cfg.loop_filter.b, cfg.loop_filter.c,
        vco_pd_gain(cfg), float(cfg.detector_polarity),
        cfg.omega_ref, cfg.omega_vco_free, cfg.k_vco,
        m1k, m1v, m1o, m2k, m2v, m2o,
        *rec)
    if status != 0:
        raise IntegrationDivergedError(
            f"integration diverged ({plan.variant.value}, dt={plan.dt:g})")
    t, th, om, g, q, i = rec
    return Trace(t, th, om, g, q, i, variant=plan.variant, plan=plan,
                 config_digest=cfg.digest())


def make_plan(cfg: LoopConfig, variant: ModelVariant, t_end: float,
              dt: float | None = None, decimation: int | None = None) -> SimPlan:
    """SimPlan with spec defaults filled in from the config."""
    dt = default_dt(cfg, variant) if dt is None else dt
    if dt <= 0:
        raise ValueError("dt must be positive")
    dec = default_decimation(t_end, dt) if decimation is None else decimation
    return SimPlan(t_end=t_end, dt=dt, decimation=dec, variant=variant)
