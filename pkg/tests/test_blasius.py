import math

import numpy as np
import pytest

from torusburn.blasius import (
    BlasiusSolverError,
    default_solution,
    explosion_time,
    limit_profile,
    picard_iterates,
    rescaling_beta,
    rescaling_check,
    solve_blasius,
    volterra_residual,
)
from torusburn.constants import reference_T


def test_d1_closed_form():
    sol = solve_blasius(1, tolerance=1e-12)
    t = np.linspace(0, 1.45, 2001)
    assert np.max(np.abs(sol.derivative(0, t) - np.tan(t))) <= 1e-8
    assert np.max(np.abs(sol.derivative(1, t) - 1 / np.cos(t) ** 2)) <= 1e-8
    assert abs(sol.T_estimate - math.pi / 2) <= 1e-6
    assert abs(sol.T_estimate - math.pi / 2) <= sol.T_error_bound


def test_extrapolant_on_tan():
    eps = np.array([1e-2, 1e-3, 1e-4])
    t = math.pi / 2 - eps
    assert np.all(np.abs(t + 1 / np.tan(t) - math.pi / 2) < eps ** 2)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_solution_invariants(d):
    sol = default_solution(d)
    assert np.allclose(sol.values[:, 0], [0] * d + [1])
    yd = sol.values[-1]
    assert np.all(yd >= 1) and np.all(np.diff(yd) >= 0)
    assert sol.T_estimate > sol.t_last
    # (y^(d))'(0) = 2^d y(0) y^(d)(0) = 0
    h = 1e-4
    assert abs(sol.yd(h) - 1) / h < 1e-3


@pytest.mark.parametrize("d", [1, 2, 3])
def test_rescaling(d):
    assert rescaling_check(d) <= 1e-6


def test_beta():
    assert rescaling_beta(1) == pytest.approx(2 ** -0.5)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_volterra(d):
    sol = default_solution(d)
    grid = np.linspace(0, 0.8 * sol.T_estimate, 41)
    assert volterra_residual(sol, grid) <= 1e-6


def test_volterra_exact_d1():
    assert volterra_residual(lambda s: 1 / np.cos(s) ** 2, [0.0, 0.5, 1.0, 1.2], d=1) <= 1e-10
    assert volterra_residual(lambda s: np.ones_like(s) * 2, [0.5], d=1) > 0.1


@pytest.mark.parametrize("d", [1, 2, 3, 6])
def test_tolerance_refinement_within_bound(d):
    a = solve_blasius(d, tolerance=1e-10)
    b = solve_blasius(d, tolerance=5e-11)
    assert abs(a.T_estimate - b.T_estimate) <= a.T_error_bound


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_frozen_constants_reproduce(d):
    T, err = explosion_time(d)
    assert abs(T - reference_T(d)) <= err


def test_bad_inputs():
    with pytest.raises(ValueError):
        solve_blasius(0)
    with pytest.raises(ValueError):
        solve_blasius(7)
    with pytest.raises(BlasiusSolverError):
        solve_blasius(1, t_max=1.0)
    sol = default_solution(1)
    with pytest.raises(ValueError):
        sol.derivative(0, sol.t_last + 1)


def test_limit_profile():
    assert limit_profile(2, 0.0) == pytest.approx(1.0)
    t = np.linspace(0, 1.5, 50)
    assert np.max(np.abs(limit_profile(1, t) - np.cos(t) ** 2)) < 1e-7
    v = limit_profile(3, np.linspace(0, 0.95 * reference_T(3), 100))
    assert np.all(np.diff(v) <= 0) and np.all(v > 0)
    with pytest.raises(ValueError):
        limit_profile(1, math.pi / 2)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_picard_first_iterate_closed_form(d):
    it = picard_iterates(d, 2, 0.9 * reference_T(d))
    exact = np.exp(2 ** d * it.t ** (d + 1) / math.factorial(d + 1))
    # trapezoid is exact on the linear kernel; otherwise the Richardson estimate must cover the gap
    assert np.max(np.abs(it.values[1] - exact)) <= 1.05 * it.quadrature_error[1] + 1e-12 * exact[-1]
    assert np.max(np.abs(it.values[1] - exact) / exact) <= 1e-6
    assert np.all(it.values[:, 0] == 1) and np.all(it.values[0] == 1)


def test_picard_monotone_toward_tan_derivative():
    it = picard_iterates(1, 8, 1.2)
    vals = [float(it(p, 1.0)) for p in range(9)]
    assert vals == sorted(vals)
    target = 1 / math.cos(1.0) ** 2
    assert vals[-1] <= target + 1e-6 and target - vals[-1] < 0.05
    assert np.all(np.diff(it.values, axis=1) >= 0)


def test_picard_quadrature_error_shrinks():
    coarse = picard_iterates(2, 4, 1.5, grid_size=513)
    fine = picard_iterates(2, 4, 1.5, grid_size=4097)
    assert fine.quadrature_error[4] < coarse.quadrature_error[4] / 20
    assert abs(fine(4, 1.5) - coarse(4, 1.5)) < 4 * coarse.quadrature_error[4] + 1e-12


def test_picard_guards():
    with pytest.raises(ValueError):
        picard_iterates(1, 3, 1.6)
    with pytest.raises(ValueError):
        picard_iterates(1, 3, 1.0, grid_size=4096)
