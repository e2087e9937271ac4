"""Phase-detector representations and their exact identities."""

import math

import numpy as np
import pytest

from qpsk_costas.detector import (PD_PEAK, QUARTER_PI, baseband_qi,
                                  pd_piecewise, pd_piecewise_slope,
                                  pd_quadrature, pd_sin_form)

# 1e5-point grid avoiding the branch boundaries pi/4 + k pi/2
GRID = np.linspace(-2.0 * math.pi, 2.0 * math.pi, 100_000)
GRID = GRID[np.abs(np.mod(GRID - QUARTER_PI, math.pi / 2)) > 1e-6]
GRID = GRID[np.abs(np.mod(GRID - QUARTER_PI, math.pi / 2) - math.pi / 2) > 1e-6]


def test_pd_quadrature_values():
    assert pd_quadrature(0.5, 0.5) == 0.0
    assert pd_quadrature(0.547419, 0.447585) == pytest.approx(-0.099834, abs=1e-6)
    assert pd_quadrature(3.0, 4.2566) == pytest.approx(1.2566)


def test_baseband_qi_values():
    assert baseband_qi(0.0, 1.0, 1.0) == pytest.approx((0.5, 0.5))
    q, i = baseband_qi(0.1, 1.0, 1.0)
    assert (q, i) == pytest.approx((0.547419, 0.447585), abs=1e-6)
    q, i = baseband_qi(math.pi / 4, 1.0, 1.0)
    assert q == pytest.approx(math.sqrt(2) / 2)
    assert i == pytest.approx(0.0, abs=1e-15)


def test_pd_piecewise_branches():
    assert pd_piecewise(0.0) == 0.0
    assert pd_piecewise(0.1) == pytest.approx(-math.sin(0.1), abs=1e-15)
    assert pd_piecewise(math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert pd_piecewise(math.pi) == pytest.approx(0.0, abs=1e-12)
    # right-limit convention at the boundary: branch 2 (cos) applies at pi/4
    assert pd_piecewise(QUARTER_PI) == pytest.approx(PD_PEAK)
    assert pd_piecewise(-QUARTER_PI) == pytest.approx(math.sin(QUARTER_PI))


def test_sin_form_matches_piecewise():
    for th in GRID:
        assert abs(pd_sin_form(th) - pd_piecewise(th)) <= 1e-12


def test_quadrature_consistency_with_data_rotation():
    shifts = [0.0, math.pi / 2, math.pi, 3 * math.pi / 2]
    sample = GRID[::37]
    for m1 in (1.0, -1.0):
        for m2 in (1.0, -1.0):
            best = None
            for delta in shifts:
                err = max(abs(pd_quadrature(*baseband_qi(th, m1, m2))
                              - pd_piecewise(th + delta)) for th in sample)
                if best is None or err < best[0]:
                    best = (err, delta)
            assert best[0] <= 1e-12, f"m1={m1} m2={m2}: min err {best[0]}"
            if m1 == 1.0 and m2 == 1.0:
                assert best[1] == 0.0


def test_periodicity():
    for th in GRID[::11]:
        assert pd_piecewise(th) == pytest.approx(pd_piecewise(th + math.pi / 2), abs=1e-12)


def test_boundedness_and_peak():
    vals = np.array([pd_piecewise(th) for th in GRID])
    assert np.max(np.abs(vals)) <= PD_PEAK + 1e-15
    # the bound is attained (only) at branch boundaries
    assert abs(pd_piecewise(QUARTER_PI)) == pytest.approx(PD_PEAK)
    assert np.max(np.abs(vals)) < PD_PEAK  # grid avoids boundaries


def test_zero_set():
    for k in range(-4, 5):
        assert pd_piecewise(k * math.pi / 2) == pytest.approx(0.0, abs=1e-12)
    interior = GRID[np.abs(np.mod(GRID, math.pi / 2)) > 1e-3]
    interior = interior[np.abs(np.mod(interior, math.pi / 2) - math.pi / 2) > 1e-3]
    assert all(abs(pd_piecewise(th)) > 1e-4 for th in interior[::53])


def test_slope_is_branch_derivative():
    for th in GRID[::101]:
        eps = 1e-7
        fd = (pd_piecewise(th + eps) - pd_piecewise(th - eps)) / (2 * eps)
        assert pd_piecewise_slope(th) == pytest.approx(fd, abs=1e-6)
