"""Loop configuration, data signals, validation, JSON round-trip.

All frequencies are angular (rad/s) throughout the package.
"""

import hashlib
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .lti import LtiFilter


def sign(v: float) -> float:
    """Hard limiter with the package-wide tie-break sign(0) = +1."""
    return 1.0 if v >= 0.0 else -1.0


@dataclass(frozen=True, eq=False)
class DataSignalSpec:
    """Binary data stream: constant +/-1 or a square wave sign(sin(omega_m t))."""
    kind: str = "constant"           # "constant" | "square"
    value: float = 1.0               # used when kind == "constant"
    omega_m: float = 0.0             # rad/s, used when kind == "square"

    def to_json_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "value": self.value}
        return {"kind": "square", "omega_m": self.omega_m}

    @staticmethod
    def from_json_dict(d: dict) -> "DataSignalSpec":
        if d["kind"] == "constant":
            return DataSignalSpec("constant", value=float(d["value"]))
        return DataSignalSpec("square", omega_m=float(d["omega_m"]))


def data_eval(spec: DataSignalSpec, t: float) -> float:
    """Data signal value at time t, always +/-1 (sign(0) -> +1)."""
    if spec.kind == "constant":
        return spec.value
    return sign(np.sin(spec.omega_m * t))


@dataclass(frozen=True, eq=False)
class LoopConfig:
    """All parameters of one QPSK Costas loop instance."""
    omega_ref: float                 # carrier angular frequency
    omega_vco_free: float            # VCO free-running angular frequency
    k_vco: float                     # VCO gain, (rad/s)/unit
    loop_filter: LtiFilter
    lpf1: LtiFilter
    lpf2: LtiFilter
    m1_spec: DataSignalSpec = field(default_factory=DataSignalSpec)
    m2_spec: DataSignalSpec = field(default_factory=DataSignalSpec)
    theta_vco_0: float = 0.0
    detector_polarity: int = 1       # +1 or -1, multiplies the PD output
    x_lf_0: np.ndarray = None
    x_lpf1_0: np.ndarray = None
    x_lpf2_0: np.ndarray = None
    theta_delta_0: float | None = None   # for phase-domain fidelities; None -> -theta_vco_0
    # PD gain on the direct VCO path; None means the loop filter's
    # feedthrough h (the consistent reading of the VCO law), 1.0 gives
    # the literal signal-space print where the PD term enters with unit gain
    vco_pd_gain: float | None = None

    def __post_init__(self):
        for name, flt in (("x_lf_0", self.loop_filter),
                          ("x_lpf1_0", self.lpf1),
                          ("x_lpf2_0", self.lpf2)):
            v = getattr(self, name)
            v = np.zeros(flt.dim) if v is None else np.asarray(v, dtype=float).ravel()
            object.__setattr__(self, name, v)

    def with_updates(self, **kw) -> "LoopConfig":
        return replace(self, **kw)

    def to_json_dict(self) -> dict:
        return {
            "omega_ref": self.omega_ref,
            "omega_vco_free": self.omega_vco_free,
            "k_vco": self.k_vco,
            "theta_vco_0": self.theta_vco_0,
            "detector_polarity": self.detector_polarity,
            "loop_filter": self.loop_filter.to_json_dict(),
            "lpf1": self.lpf1.to_json_dict(),
            "lpf2": self.lpf2.to_json_dict(),
            "m1_spec": self.m1_spec.to_json_dict(),
            "m2_spec": self.m2_spec.to_json_dict(),
            "x_lf_0": self.x_lf_0.tolist(),
            "x_lpf1_0": self.x_lpf1_0.tolist(),
            "x_lpf2_0": self.x_lpf2_0.tolist(),
            "theta_delta_0": self.theta_delta_0,
            "vco_pd_gain": self.vco_pd_gain,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "LoopConfig":
        return LoopConfig(
            omega_ref=float(d["omega_ref"]),
            omega_vco_free=float(d["omega_vco_free"]),
            k_vco=float(d["k_vco"]),
            theta_vco_0=float(d.get("theta_vco_0", 0.0)),
            detector_polarity=int(d.get("detector_polarity", 1)),
            loop_filter=LtiFilter.from_json_dict(d["loop_filter"]),
            lpf1=LtiFilter.from_json_dict(d["lpf1"]),
            lpf2=LtiFilter.from_json_dict(d["lpf2"]),
            m1_spec=DataSignalSpec.from_json_dict(d["m1_spec"]),
            m2_spec=DataSignalSpec.from_json_dict(d["m2_spec"]),
            x_lf_0=np.array(d.get("x_lf_0", []), dtype=float) if d.get("x_lf_0") is not None else None,
            x_lpf1_0=np.array(d.get("x_lpf1_0", []), dtype=float) if d.get("x_lpf1_0") is not None else None,
            x_lpf2_0=np.array(d.get("x_lpf2_0", []), dtype=float) if d.get("x_lpf2_0") is not None else None,
            theta_delta_0=None if d.get("theta_delta_0") is None else float(d["theta_delta_0"]),
            vco_pd_gain=None if d.get("vco_pd_gain") is None else float(d["vco_pd_gain"]),
        )

    def json_str(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def digest(self) -> str:
        return hashlib.sha256(self.json_str().encode()).hexdigest()[:16]


def _validate_data_spec(spec: DataSignalSpec, name: str) -> list[str]:
    out = []
    if spec.kind == "constant":
        if spec.value not in (1.0, -1.0):
            out.append(f"{name}: constant value must be +1 or -1, got {spec.value}")
    elif spec.kind == "square":
        if spec.omega_m <= 0:
            out.append(f"{name}: square wave needs omega_m > 0, got {spec.omega_m}")
    else:
        out.append(f"{name}: unknown kind {spec.kind!r}")
    return out


def validate(cfg: LoopConfig) -> list[str]:
    """All invariant violations, one human-readable string each.

    A valid configuration yields an empty list; validation never raises.
    """
    v = []
    if cfg.omega_ref <= 0:
        v.append(f"omega_ref must be positive, got {cfg.omega_ref}")
    if cfg.k_vco <= 0:
        v.append(f"k_vco must be positive, got {cfg.k_vco}")
    if cfg.detector_polarity not in (1, -1):
        v.append(f"detector_polarity must be +1 or -1, got {cfg.detector_polarity}")
    for name, flt in (("lpf1", cfg.lpf1), ("lpf2", cfg.lpf2)):
        if flt.h != 0.0:
            v.append(f"{name} must have zero feedthrough, got h={flt.h}")
        eigs = np.linalg.eigvals(flt.a)
        if np.max(eigs.real) >= 0:
            v.append(f"{name} must be stable (all eigenvalues of A in the "
                     f"open left half plane), max Re eig = {np.max(eigs.real):g}")
    for name, x0, flt in (("x_lf_0", cfg.x_lf_0, cfg.loop_filter),
                          ("x_lpf1_0", cfg.x_lpf1_0, cfg.lpf1),
                          ("x_lpf2_0", cfg.x_lpf2_0, cfg.lpf2)):
        if x0.size != flt.dim:
            v.append(f"{name} has dimension {x0.size}, filter expects {flt.dim}")
    v += _validate_data_spec(cfg.m1_spec, "m1_spec")
    v += _validate_data_spec(cfg.m2_spec, "m2_spec")
    return v


def omega_delta_free(cfg: LoopConfig) -> float:
    """Free-running frequency detuning omega_ref - omega_vco_free."""
    return cfg.omega_ref - cfg.omega_vco_free
