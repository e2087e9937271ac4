"""Equilibria, linearization, characteristic polynomial, lock detection."""

import math
from dataclasses import dataclass

import numpy as np

from .core import LoopConfig, omega_delta_free
from .detector import PD_PEAK, QUARTER_PI, pd_piecewise_slope
from .dynamics import rhs_averaged, vco_pd_gain
from .integrate import Trace
from .lti import transfer_eval

_BOUNDARY_TOL = 1e-9


class TraceTooShortError(ValueError):
    pass


@dataclass
class EquilibriumReport:
    kind: str                      # "nonsingular-A" | "integrator-filter"
    gamma: float | None            # detuning / DC loop gain; None for integrator filters
    theta_eq_set: list[float]      # rad, in [0, 2 pi)
    x_eq: list[np.ndarray]         # loop-filter state per theta_eq

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "gamma": self.gamma,
            "theta_eq_set": list(self.theta_eq_set),
            "x_eq": [x.tolist() for x in self.x_eq],
        }


@dataclass
class StabilityReport:
    theta_eq: float
    chi_coeffs: list[float]                # det(sI - J), highest power first
    chi_paper_coeffs: list[float] | None   # -N(s)(K cos - s) + M(s) K cos diagnostic
    roots: np.ndarray
    hurwitz: bool

    def to_json_dict(self) -> dict:
        return {
            "theta_eq": self.theta_eq,
            "chi_coeffs": list(self.chi_coeffs),
            "chi_paper_coeffs": (None if self.chi_paper_coeffs is None
                                 else list(self.chi_paper_coeffs)),
            "roots": [[r.real, r.imag] for r in self.roots],
            "hurwitz": self.hurwitz,
        }


@dataclass
class BandCheckReport:
    mag_passband: float
    phase_passband: float          # rad, phase of H at omega_low
    mag_stopband: float
    passband_ok: bool
    stopband_ok: bool

    @property
    def ok(self) -> bool:
        return self.passband_ok and self.stopband_ok

    def to_json_dict(self) -> dict:
        return {
            "mag_passband": self.mag_passband,
            "phase_passband": self.phase_passband,
            "mag_stopband": self.mag_stopband,
            "passband_ok": self.passband_ok,
            "stopband_ok": self.stopband_ok,
            "ok": self.ok,
        }


@dataclass
class LockVerdict:
    locked: bool
    mean_freq_error: float         # rad/s over trailing window
    theta_drift: float             # rad over trailing window
    window: float                  # s
    final_theta_mod: float         # theta_delta(t_end) mod pi/2
    eps_f: float
    eps_theta: float

    def to_json_dict(self) -> dict:
        return {
            "locked": self.locked,
            "mean_freq_error": self.mean_freq_error,
            "theta_drift": self.theta_drift,
            "window": self.window,
            "final_theta_mod": self.final_theta_mod,
            "eps_f": self.eps_f,
            "eps_theta": self.eps_theta,
        }

    @property
    def margin(self) -> float:
        """How far inside (or outside) the thresholds the verdict sits."""
        rf = abs(self.mean_freq_error) / self.eps_f
        rt = abs(self.theta_drift) / self.eps_theta
        worst = max(rf, rt)
        if self.locked:
            return math.inf if worst == 0 else 1.0 / worst
        return worst


def _is_integrator_filter(a: np.ndarray) -> bool:
    eigs = np.linalg.eigvals(a)
    scale = max(1.0, float(np.max(np.abs(eigs))))
    return bool(np.min(np.abs(eigs)) < 1e-9 * scale)


def _check_equilibrium(cfg: LoopConfig, x_eq: np.ndarray, theta_eq: float) -> None:
    state = np.concatenate([x_eq, [theta_eq]])
    d = rhs_averaged(0.0, state, cfg)
    tol = 1e-9 * max(1.0, abs(omega_delta_free(cfg)), cfg.k_vco * 1e-9)
    if np.max(np.abs(d)) > tol:
        raise RuntimeError(
            f"candidate equilibrium theta={theta_eq:g} does not zero the "
            f"averaged dynamics (residual {np.max(np.abs(d)):g})")


def equilibria(cfg: LoopConfig) -> EquilibriumReport:
    """Equilibrium points of the averaged phase model, in [0, 2 pi).

    Nonsingular loop-filter A: the PD output at equilibrium must equal
    gamma = omega_delta_free / (K_vco H(0)), solved in closed form per
    PD branch (arcsin plus its pi/2 translates).  Integrator-family
    filters (pole at 0, e.g. the PI filter): the PD output must vanish,
    so theta_eq = k pi/2 and the integrator state absorbs the detuning.
    """
    lf = cfg.loop_filter
    p = float(cfg.detector_polarity)
    k = cfg.k_vco
    odf = omega_delta_free(cfg)
    if _is_integrator_filter(lf.a):
        # A x = 0 along the null direction, c.x = omega_delta_free / K_vco
        _, s, vt = np.linalg.svd(lf.a)
        null = vt[-1]
        cv = float(lf.c @ null)
        if abs(cv) < 1e-12:
            raise ValueError("integrator direction invisible at the filter output")
        x_eq = null * (odf / (k * cv))
        thetas = [i * math.pi / 2 for i in range(4)]
        for th in thetas:
            _check_equilibrium(cfg, x_eq, th)
        return EquilibriumReport("integrator-filter", None, thetas,
                                 [x_eq.copy() for _ in thetas])
    h0 = transfer_eval(lf, 0.0).real
    denom = k * h0
    if abs(denom) < 1e-300:
        raise ValueError("zero DC loop gain: K_vco * H(0) vanishes")
    gamma = odf / denom
    if abs(gamma) >= PD_PEAK:
        return EquilibriumReport("nonsingular-A", gamma, [], [])
    # branch 1 solution of p * phi(theta) = gamma, phi = -sin on (-pi/4, pi/4)
    principal = -math.asin(gamma * p)
    a_inv_b = np.linalg.solve(lf.a, lf.b)
    x_eq = -a_inv_b * gamma  # A x + b (p phi) = 0 with p phi = gamma
    thetas = sorted((principal + i * math.pi / 2) % (2 * math.pi) for i in range(4))
    for th in thetas:
        _check_equilibrium(cfg, x_eq, th)
    return EquilibriumReport("nonsingular-A", gamma, thetas,
                             [x_eq.copy() for _ in thetas])


def _boundary_distance(theta: float) -> float:
    """Distance to the nearest PD branch boundary pi/4 + k pi/2."""
    d = (theta - QUARTER_PI) % (math.pi / 2)
    return min(d, math.pi / 2 - d)


def linearize(cfg: LoopConfig, theta_eq: float) -> np.ndarray:
    """Jacobian of the averaged dynamics at an equilibrium phase.

    Uses the analytic slope of the active PD branch; the h-feedthrough
    term is kept (it shows up in the theta row).
    """
    if _boundary_distance(theta_eq) < _BOUNDARY_TOL:
        raise ValueError(f"theta_eq={theta_eq:g} lies on a PD branch boundary")
    lf = cfg.loop_filter
    p = float(cfg.detector_polarity)
    slope = p * pd_piecewise_slope(theta_eq)
    n = lf.dim
    jac = np.zeros((n + 1, n + 1))
    jac[:n, :n] = lf.a
    jac[:n, n] = lf.b * slope
    jac[n, :n] = -cfg.k_vco * lf.c
    jac[n, n] = -cfg.k_vco * vco_pd_gain(cfg) * slope
    return jac


def char_poly(cfg: LoopConfig, theta_eq: float) -> tuple[list[float], list[float] | None]:
    """Characteristic polynomial at an equilibrium, two routes.

    Returns (jacobian_coeffs, paper_coeffs): det(sI - J) from the
    analytic Jacobian (ground truth, validated against finite
    differences), and the textbook-style formula
    -N(s)(K cos - s) + M(s) K cos built from the filter transfer
    function when its symbolic form is known (None otherwise).  The two
    are reported side by side, not reconciled: the published linearized
    display drops the feedthrough term and carries its own sign
    conventions.
    """
    jac = linearize(cfg, theta_eq)
    jac_coeffs = [float(v) for v in np.poly(jac)]
    lf = cfg.loop_filter
    if lf.tf_num is None or lf.tf_den is None:
        return jac_coeffs, None
    k = cfg.k_vco
    ct = math.cos(theta_eq)
    m_poly = np.poly1d(list(lf.tf_num))
    n_poly = np.poly1d(list(lf.tf_den))
    chi = -n_poly * np.poly1d([-1.0, k * ct]) + m_poly * (k * ct)
    return jac_coeffs, [float(v) for v in chi.coeffs]


def hurwitz(coeffs) -> bool:
    """True iff every root of the polynomial has negative real part."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size < 2:
        raise ValueError("polynomial degree must be at least 1")
    if coeffs[0] == 0.0:
        raise ValueError("leading coefficient must be nonzero")
    roots = np.roots(coeffs)
    scale = float(np.max(np.abs(roots))) if roots.size else 0.0
    return bool(np.all(roots.real < -1e-12 * scale))


def stability_reports(cfg: LoopConfig) -> list[StabilityReport]:
    """StabilityReport per interior-branch equilibrium of the averaged model."""
    rep = equilibria(cfg)
    out = []
    for th in rep.theta_eq_set:
        if _boundary_distance(th) < _BOUNDARY_TOL:
            continue
        jac_coeffs, paper_coeffs = char_poly(cfg, th)
        roots = np.roots(jac_coeffs)
        out.append(StabilityReport(th, jac_coeffs, paper_coeffs, roots,
                                   hurwitz(jac_coeffs)))
    return out


def lpf_band_check(f, omega_low: float, omega_high: float,
                   passband_window: tuple[float, float] = (0.9, 1.1),
                   stopband_max: float = 0.3) -> BandCheckReport:
    """Does the filter pass the beat band and kill the double-carrier band?"""
    if omega_low >= omega_high:
        raise ValueError("omega_low must be below omega_high")
    h_low = transfer_eval(f, 1j * omega_low)
    h_high = transfer_eval(f, 1j * omega_high)
    mag_low, mag_high = abs(h_low), abs(h_high)
    return BandCheckReport(
        mag_passband=mag_low,
        phase_passband=float(np.angle(h_low)),
        mag_stopband=mag_high,
        passband_ok=passband_window[0] <= mag_low <= passband_window[1],
        stopband_ok=mag_high <= stopband_max,
    )


def detect_lock(trace: Trace, cfg: LoopConfig,
                eps_f: float | None = None,
                eps_theta: float | None = None,
                window: float | None = None) -> LockVerdict:
    """Lock/no-lock verdict from the trailing window of a trace.

    Locked means the mean VCO frequency error and the phase drift over
    the window are both inside their thresholds.
    """
    duration = trace.duration
    if eps_f is None:
        eps_f = max(100.0, 1e-4 * cfg.omega_ref)
    if eps_theta is None:
        eps_theta = 0.2
    if window is None:
        window = 0.2 * duration
        odf = omega_delta_free(cfg)
        if odf != 0.0:
            window = max(window, min(100.0 / abs(odf), duration / 5.0))
    elif duration < 5.0 * window:
        raise TraceTooShortError(
            f"trace duration {duration:g}s is below 5x window {window:g}s")
    t_start = trace.t[-1] - window
    mask = trace.t >= t_start - 1e-15
    if np.count_nonzero(mask) < 2:
        raise TraceTooShortError("trailing window contains fewer than 2 samples")
    mean_freq_error = float(np.mean(cfg.omega_ref - trace.omega_vco[mask]))
    theta_tail = trace.theta_delta[mask]
    theta_drift = float(theta_tail[-1] - theta_tail[0])
    locked = abs(mean_freq_error) < eps_f and abs(theta_drift) < eps_theta
    return LockVerdict(
        locked=locked,
        mean_freq_error=mean_freq_error,
        theta_drift=theta_drift,
        window=window,
        final_theta_mod=float(trace.theta_delta[-1] % (math.pi / 2)),
        eps_f=eps_f,
        eps_theta=eps_theta,
    )
