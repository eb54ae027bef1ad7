"""
Wavy latitude circles on S^2, theta(x) = x and phi(x) = phi0 + amp*cos(k*x),
and the solver that picks (phi0, amp) so the curve encloses area A* and has
length L*. Areas use composite Gauss-Legendre quadrature with 64*k panels.
Lengths are integrated adaptively, because the speed has a narrow dip
wherever the curve passes close to a pole.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import Infeasible, NoConvergence, PoleCollision

logger = logging.getLogger(__name__)

GAUSS_ORDER = 8
PANELS_PER_WOBBLE = 64
ISOPERIMETRIC_TOL = 1e-9
# matches the circle tolerance of the class search, scaled by (4*pi)^2
CIRCLE_TOL = 1e-9 * (4 * math.pi) ** 2
SOLVE_TOL = 1e-11
TARGET_TOL = 1e-8
# closest approach to a pole (radians) for any accepted curve
POLE_MARGIN = 1e-3
MAX_ITER = 200
FD_STEP = 1e-7
QUAD_TOL = 1e-12
QUAD_LIMIT = 500
LENGTH_ERR_TOL = 1e-10

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_ORDER)


@dataclass(frozen=True)
class SphereCurveParams:
    phi0: float
    amp: float
    k: int

    def phi(self, x):
        return self.phi0 + self.amp * np.cos(self.k * x)

    def dphi(self, x):
        return -self.amp * self.k * np.sin(self.k * x)

    def speed(self, x):
        """|C'(x)| = sqrt(theta'^2 sin^2 phi + phi'^2) with theta' = 1."""
        return np.sqrt(np.sin(self.phi(x)) ** 2 + self.dphi(x) ** 2)

    def pole_distance(self) -> float:
        """Smallest polar angle to either pole along the curve."""
        return min(self.phi0 - self.amp, math.pi - self.phi0 - self.amp)

    def avoids_poles(self) -> bool:
        return self.pole_distance() >= POLE_MARGIN


def gauss_legendre_nodes(a: float, b: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite rule on [a, b]."""
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    w = (half[:, None] * _WEIGHTS[None, :]).ravel()
    return x, w


def _panels(params: SphereCurveParams, panels: int | None) -> int:
    return panels if panels is not None else PANELS_PER_WOBBLE * max(params.k, 1)


def curve_area(params: SphereCurveParams, panels: int | None = None) -> float:
    """Area of the cap containing the north pole: integral of 1 - cos(phi) over [0, 2*pi)."""
    x, w = gauss_legendre_nodes(0.0, 2 * math.pi, _panels(params, panels))
    return float(np.dot(w, 1.0 - np.cos(params.phi(x))))


def curve_length(params: SphereCurveParams, panels: int | None = None) -> float:
    """
    Length of the curve. With ``panels`` the composite Gauss-Legendre rule is
    used as is; without, the length comes from adaptive_length.
    """
    if panels is not None:
        x, w = gauss_legendre_nodes(0.0, 2 * math.pi, panels)
        return float(np.dot(w, params.speed(x)))
    length, err = adaptive_length(params)
    if err > LENGTH_ERR_TOL:
        raise NoConvergence(f"length of {params} only known to {err:.3g}")
    return length


def adaptive_length(params: SphereCurveParams) -> tuple[float, float]:
    """
    Adaptive length over one half wobble [0, pi/k], scaled by 2k, with the
    error estimate. The extremes of cos(k*x) sit on the interval ends, so the
    bisection concentrates there.
    """
    k = max(params.k, 1)
    half, err = quad(params.speed, 0.0, math.pi / k,
                     epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=QUAD_LIMIT)
    return 2 * k * float(half), 2 * k * float(err)


def _full_period_length(params: SphereCurveParams) -> tuple[float, float]:
    # independent of the half-wobble symmetry: every extreme is a breakpoint
    k = max(params.k, 1)
    breaks = [j * math.pi / k for j in range(1, 2 * k)]
    length, err = quad(params.speed, 0.0, 2 * math.pi, points=breaks,
                       epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=QUAD_LIMIT * k)
    return float(length), float(err)


def _residual(phi0: float, amp: float, k: int, a_star: float, l_star: float) -> np.ndarray:
    params = SphereCurveParams(phi0, amp, k)
    return np.array([curve_area(params) - a_star, curve_length(params) - l_star])


def _check_solution(params: SphereCurveParams, a_star: float, l_star: float) -> SphereCurveParams:
    """
    Re-integrates the area at twice the panel count and the length over the
    full period, then enforces the target tolerance.
    """
    area = curve_area(params, 2 * _panels(params, None))
    length, err = _full_period_length(params)
    if err > LENGTH_ERR_TOL or abs(area - a_star) > TARGET_TOL or abs(length - l_star) > TARGET_TOL:
        raise NoConvergence(f"solution {params} misses targets: area {area} vs {a_star}, "
                            f"length {length} vs {l_star}")
    return params


def solve_curve(a_star: float, l_star: float, k: int) -> SphereCurveParams:
    """
    Finds (phi0, amp) with curve_area = a_star and curve_length = l_star.

    Three regimes: the isoperimetric equality case is a latitude circle; at
    a_star = 2*pi the curve is balanced about the equator (phi0 = pi/2) and
    only amp is solved for; otherwise a damped Newton iteration on both
    unknowns starts from the circle with the right area and amp = 0.1.
    """
    if k < 2:
        raise ValueError(f"wobble count must be >= 2, got {k}")
    if not 0 < a_star <= 2 * math.pi + ISOPERIMETRIC_TOL:
        raise Infeasible(f"area {a_star} outside (0, 2*pi]")
    gap = l_star ** 2 - a_star * (4 * math.pi - a_star)
    if gap < -ISOPERIMETRIC_TOL:
        raise Infeasible(f"L^2 < A(4*pi - A) for A = {a_star}, L = {l_star}")

    if abs(gap) <= CIRCLE_TOL:
        phi0 = math.acos(1 - a_star / (2 * math.pi))
        logger.debug(f"circle case: phi0 = {phi0}")
        return _check_solution(SphereCurveParams(phi0, 0.0, k), a_star, l_star)

    if abs(a_star - 2 * math.pi) <= ISOPERIMETRIC_TOL:
        return _check_solution(_solve_balanced(l_star, k), a_star, l_star)

    return _check_solution(_solve_newton(a_star, l_star, k), a_star, l_star)


def _solve_balanced(l_star: float, k: int) -> SphereCurveParams:
    """phi0 = pi/2: the area is 2*pi for every amp, the length grows with amp."""
    amp_max = math.pi / 2 - POLE_MARGIN

    def excess(amp):
        return curve_length(SphereCurveParams(math.pi / 2, amp, k)) - l_star

    if excess(amp_max) < 0:
        raise PoleCollision(f"length {l_star} needs a wobble within {POLE_MARGIN} of the poles with k = {k}")
    amp = brentq(excess, 0.0, amp_max, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER)
    logger.debug(f"balanced case: amp = {amp}")
    return SphereCurveParams(math.pi / 2, float(amp), k)


def _solve_newton(a_star: float, l_star: float, k: int) -> SphereCurveParams:
    x = np.array([math.acos(1 - a_star / (2 * math.pi)), 0.1])
    residual = _residual(x[0], x[1], k, a_star, l_star)
    for iteration in range(MAX_ITER):
        if np.max(np.abs(residual)) <= SOLVE_TOL:
            params = SphereCurveParams(float(x[0]), float(abs(x[1])), k)
            if not params.avoids_poles():
                raise PoleCollision(f"solution {params} touches a pole")
            logger.debug(f"Newton converged after {iteration} steps: {params}")
            return params
        jac = np.empty((2, 2))
        for j in range(2):
            step = np.zeros(2)
            step[j] = FD_STEP
            jac[:, j] = (_residual(*(x + step), k, a_star, l_star) - residual) / FD_STEP
        try:
            delta = np.linalg.solve(jac, residual)
        except np.linalg.LinAlgError as e:
            raise NoConvergence(f"singular Jacobian at {x}: {e}")
        damping = 1.0
        while damping > 1e-4:
            trial = x - damping * delta
            trial[1] = abs(trial[1])
            if trial[0] - trial[1] > 0 and trial[0] + trial[1] < math.pi:
                trial_residual = _residual(trial[0], trial[1], k, a_star, l_star)
                if np.linalg.norm(trial_residual) < np.linalg.norm(residual):
                    x, residual = trial, trial_residual
                    break
            damping /= 2
        else:
            full = x - delta
            if not SphereCurveParams(float(full[0]), float(abs(full[1])), k).avoids_poles():
                raise PoleCollision(f"Newton step from {x} leaves the pole-free region")
            raise NoConvergence(f"no descent step from {x} (residual {residual})")
    raise NoConvergence(f"Newton did not converge within {MAX_ITER} iterations")
