"""The blow-up problem y^(d+1) = c * y * y^(d), with y = ... = y^(d-1) = 0 and y^(d) = 1 at t = 0.

With c = 2^d its explosion time T(d) is the limit of tau_n^rs / n^{d/(d+1)}, and
1/y^(d) is the limiting unburned fraction. With c = 1 it is the plain
generalised Blasius problem, whose explosion time S(d) satisfies T = beta * S
with beta = 2^{-d/(d+1)}.

Explosion time estimate
-----------------------
Integration cannot reach the singularity, so it stops once y^(d) exceeds a
threshold and extrapolates. Substituting y^(d) ~ A (T - t)^{-(d+1)} into the ODE
gives y ~ A / d! * (T - t)^{-1} and y^(d+1) ~ A (d+1) (T - t)^{-(d+2)}; matching
both sides forces A = (d+1)! / c, hence y(t) ~ (d+1) / (c (T - t)) and

    T ~ t + (d+1) / (c * y(t)).

For d = 1, c = 2 this is t + cot(t), which converges to pi/2 with error O((T-t)^3).
For d >= 3 the estimator approaches T with sign-changing oscillations (slowly
in log(T - t)), so one decade of growth can sit near a zero crossing and
understate the error. The reported error bound is therefore the spread of the
estimator over the last EXTRAPOLATION_DECADES decades of growth of y^(d), plus
the change in the estimate when the solver tolerance is loosened 16-fold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import solve_ivp

DEFAULT_THRESHOLD = 1e10
DEFAULT_TOLERANCE = 1e-10
MAX_DIMENSION = 6
EXTRAPOLATION_DECADES = 3


class BlasiusSolverError(ArithmeticError):
    """Step-size control failed or the blow-up threshold was not reached."""


@dataclass
class BlasiusSolution:
    """Trajectory of (y, y', ..., y^(d)) up to the blow-up threshold."""

    d: int
    coefficient: float
    t: np.ndarray
    values: np.ndarray
    T_estimate: float
    T_error_bound: float
    dense: Callable

    @property
    def t_last(self) -> float:
        return float(self.t[-1])

    def derivative(self, j: int, t) -> np.ndarray:
        """j-th derivative of y at t (dense output); t must lie in the solved range."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.t_last):
            raise ValueError(f"t outside solved range [0, {self.t_last}]")
        return self.dense(t)[j]

    def yd(self, t) -> np.ndarray:
        return self.derivative(self.d, t)


def _check_d(d: int) -> None:
    if int(d) != d or not 1 <= d <= MAX_DIMENSION:
        raise ValueError(f"d must be an integer in [1, {MAX_DIMENSION}], got {d!r}")


def _integrate(d: int, c: float, threshold: float, tolerance: float, t_max: float):
    def rhs(_t, u):
        du = np.empty_like(u)
        du[:-1] = u[1:]
        du[-1] = c * u[0] * u[-1]
        return du

    def reached(_t, u):
        return u[-1] - threshold

    reached.terminal = True
    reached.direction = 1

    u0 = np.zeros(d + 1)
    u0[-1] = 1.0
    sol = solve_ivp(
        rhs, (0.0, t_max), u0, method="DOP853", rtol=tolerance, atol=tolerance,
        events=reached, dense_output=True,
    )
    if sol.status == -1:
        raise BlasiusSolverError(f"integration failed for d={d}: {sol.message}")
    if sol.status != 1:
        raise BlasiusSolverError(
            f"y^(d) did not reach {threshold:g} before t={t_max} (d={d}, c={c})"
        )
    return sol


def _estimate(d: int, c: float, t: np.ndarray, values: np.ndarray, threshold: float) -> tuple[float, float]:
    y, yd = values[0], values[-1]
    window = (yd >= threshold / 10.0 ** EXTRAPOLATION_DECADES) & (y > 0)
    est = t[window] + (d + 1) / (c * y[window])
    T = float(est[-1])
    spread = float(np.max(np.abs(est - T))) if est.size > 1 else abs(T)
    return T, spread


def solve_blasius(
    d: int,
    blowup_threshold: float = DEFAULT_THRESHOLD,
    tolerance: float = DEFAULT_TOLERANCE,
    coefficient: Optional[float] = None,
    t_max: float = 50.0,
) -> BlasiusSolution:
    """Integrate to the blow-up threshold with adaptive Dormand-Prince 8(5,3) steps."""
    _check_d(d)
    c = float(2 ** d if coefficient is None else coefficient)
    if c <= 0:
        raise ValueError("coefficient must be positive")
    sol = _integrate(d, c, blowup_threshold, tolerance, t_max)
    T, spread = _estimate(d, c, sol.t, sol.y, blowup_threshold)
    coarse = _integrate(d, c, blowup_threshold, min(16 * tolerance, 1e-4), t_max)
    T_coarse, _ = _estimate(d, c, coarse.t, coarse.y, blowup_threshold)
    bound = spread + abs(T - T_coarse) + 8 * np.finfo(float).eps * T
    return BlasiusSolution(
        d=d, coefficient=c, t=sol.t, values=sol.y, T_estimate=T, T_error_bound=float(bound),
        dense=sol.sol,
    )


def explosion_time(
    d: int,
    blowup_threshold: float = DEFAULT_THRESHOLD,
    tolerance: float = DEFAULT_TOLERANCE,
    coefficient: Optional[float] = None,
) -> tuple[float, float]:
    """(T_estimate, error_bound) for the explosion time."""
    s = solve_blasius(d, blowup_threshold, tolerance, coefficient)
    return s.T_estimate, s.T_error_bound


def rescaling_beta(d: int) -> float:
    return 2.0 ** (-d / (d + 1))


def rescaling_check(
    d: int,
    blowup_threshold: float = DEFAULT_THRESHOLD,
    tolerance: float = DEFAULT_TOLERANCE,
    grid_points: int = 201,
) -> float:
    """max(|T - beta S|, sup_t |y(t) - beta^d x(t / beta)|) from two independent solves.

    y solves the problem with c = 2^d, x the one with c = 1; the sup runs over a
    uniform grid on [0, 0.8 T].
    """
    _check_d(d)
    scaled = solve_blasius(d, blowup_threshold, tolerance)
    plain = solve_blasius(d, blowup_threshold, tolerance, coefficient=1.0)
    beta = rescaling_beta(d)
    t = np.linspace(0.0, 0.8 * scaled.T_estimate, grid_points)
    gap = np.abs(scaled.derivative(0, t) - beta ** d * plain.derivative(0, t / beta))
    return float(max(abs(scaled.T_estimate - beta * plain.T_estimate), gap.max()))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def volterra_rhs(yd: Callable, d: int, t, coefficient: Optional[float] = None, panels: int = 16) -> np.ndarray:
    """exp(c / d! * int_0^t (t - s)^d y^(d)(s) ds) by composite Gauss-Legendre quadrature."""
    c = float(2 ** d if coefficient is None else coefficient)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(t)
    for idx, ti in enumerate(t):
        if ti == 0.0:
            out[idx] = 1.0
            continue
        edges = np.linspace(0.0, ti, panels + 1)
        half = np.diff(edges)[:, None] / 2
        s = (edges[:-1, None] + half + half * _GL_NODES[None, :]).ravel()
        w = (half * _GL_WEIGHTS[None, :]).ravel()
        integral = np.sum(w * (ti - s) ** d * yd(s))
        out[idx] = math.exp(c / math.factorial(d) * integral)
    return out


def volterra_residual(
    solution: Union[BlasiusSolution, Callable],
    grid,
    d: Optional[int] = None,
    coefficient: Optional[float] = None,
) -> float:
    """Sup over ``grid`` of |lhs - rhs| / lhs for the integral identity satisfied by y^(d).

    ``solution`` is a BlasiusSolution or a callable for y^(d) (then ``d`` is required).
    """
    if isinstance(solution, BlasiusSolution):
        d, coefficient, yd = solution.d, solution.coefficient, solution.yd
    else:
        if d is None:
            raise ValueError("d is required when passing a callable")
        yd = solution
    grid = np.asarray(grid, dtype=float)
    lhs = np.asarray(yd(grid), dtype=float)
    rhs = volterra_rhs(yd, d, grid, coefficient)
    return float(np.max(np.abs(lhs - rhs) / np.abs(lhs)))


@lru_cache(maxsize=None)
def default_solution(d: int) -> BlasiusSolution:
    return solve_blasius(d)


def limit_profile(d: int, t, solution: Optional[BlasiusSolution] = None) -> np.ndarray:
    """1 / y^(d)(t), the limiting unburned fraction at rescaled time t < T."""
    sol = solution if solution is not None else default_solution(d)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t >= sol.T_estimate):
        raise ValueError(f"t must lie in [0, T) with T = {sol.T_estimate:.10f}")
    if np.any(t > sol.t_last):
        raise ValueError(f"t beyond the solved range [0, {sol.t_last}]")
    return 1.0 / sol.yd(t)


@dataclass
class PicardIterates:
    """f_0 = 1 and f_{p+1}(t) = exp(c / d! * int_0^t (t - s)^d f_p(s) ds) on a uniform grid."""

    d: int
    p_max: int
    t: np.ndarray
    values: np.ndarray
    quadrature_error: np.ndarray

    def __call__(self, p: int, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.t[-1] * (1 + 1e-12)):
            raise ValueError(f"t outside [0, {self.t[-1]}]")
        return np.interp(t, self.t, self.values[p])


def _picard_levels(d: int, c: float, p_max: int, t: np.ndarray) -> np.ndarray:
    n = len(t)
    h = t[1] - t[0]
    kernel = np.arange(n, dtype=float) ** d
    scale = c / math.factorial(d) * h ** (d + 1)
    levels = [np.ones(n)]
    for _ in range(p_max):
        f = levels[-1]
        # trapezoid on the Toeplitz kernel (i - j)^d; the j = i endpoint term vanishes
        conv = np.convolve(f, kernel)[:n] - 0.5 * kernel * f[0]
        levels.append(np.exp(scale * conv))
    return np.array(levels)


def picard_iterates(
    d: int,
    p_max: int,
    t_end: float,
    grid_size: int = 4097,
    coefficient: Optional[float] = None,
    T: Optional[float] = None,
) -> PicardIterates:
    """Composite-trapezoid Picard iterates f_0, ..., f_{p_max} on [0, t_end].

    ``quadrature_error[p]`` is the Richardson estimate |f_p(h) - f_p(2h)| / 3 at the
    shared nodes. ``t_end`` must stay below the explosion time ``T`` (looked up when
    not given).
    """
    _check_d(d)
    if grid_size < 3 or grid_size % 2 == 0:
        raise ValueError("grid_size must be odd and >= 3")
    c = float(2 ** d if coefficient is None else coefficient)
    if T is None:
        if coefficient is None:
            from .constants import reference_T
            T = reference_T(d)
        else:
            T = explosion_time(d, coefficient=c)[0]
    if not 0 < t_end < T:
        raise ValueError(f"t_end must lie in (0, T) with T = {T:.10f}, got {t_end}")
    t = np.linspace(0.0, t_end, grid_size)
    fine = _picard_levels(d, c, p_max, t)
    coarse = _picard_levels(d, c, p_max, t[::2])
    err = np.abs(fine[:, ::2] - coarse).max(axis=1) / 3.0
    return PicardIterates(d=d, p_max=p_max, t=t, values=fine, quadrature_error=err)
