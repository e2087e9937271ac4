"""QPSK Costas loop simulation and lock-analysis toolkit."""

from .core import DataSignalSpec, LoopConfig, data_eval, omega_delta_free, validate
from .detector import baseband_qi, pd_piecewise, pd_quadrature, pd_sin_form
from .dynamics import (ModelVariant, initial_vco_frequency, rhs_averaged,
                       rhs_baseband_lpf, rhs_signal_space, vco_frequency)
from .integrate import SimPlan, Trace, default_dt, make_plan, rk4_step, simulate
from .lti import (FilterState, LtiFilter, convolution_solution, free_response,
                  impulse_response, make_first_order_lpf, make_pi_loop_filter,
                  output, transfer_eval)
from .analysis import (detect_lock, equilibria, char_poly, hurwitz, linearize,
                       lpf_band_check, stability_reports)
from .scenarios import base_config, catalog, compare_models, run_all, run_scenario

__version__ = "0.1.0"
