"""
Modular reduction of lattice parameters and the search for a conformal class
the Hopf-torus construction can realise.

A lattice Z + tau*Z is only defined up to PSL2(Z), so tau is first moved into
the standard fundamental domain, then an equivalent tau' is searched for whose
targets A* = 4*pi*Re tau' and L* = 4*pi*Im tau' satisfy the isoperimetric
inequality on the sphere. Matrices are stored as tuples (a, b, c, d) acting by
tau -> (a*tau + b) / (c*tau + d).
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ContractViolation, NoFeasibleClass

logger = logging.getLogger(__name__)

Matrix = tuple[int, int, int, int]

IDENTITY: Matrix = (1, 0, 0, 1)
FD_TOL = 1e-12
FEASIBLE_TOL = 1e-12
CIRCLE_TOL = 1e-9
DEFAULT_ENTRY_BOUND = 12
MAX_REDUCTION_STEPS = 10_000


@dataclass(frozen=True)
class Reduction:
    """Result of a fundamental-domain reduction: ``transform`` maps the input onto ``tau``."""
    tau: complex
    transform: Matrix


@dataclass(frozen=True)
class ExactReduction:
    """Exact reduction of tau given as (Re tau, (Im tau)^2), both rational."""
    re: Fraction
    im2: Fraction
    transform: Matrix

    @property
    def value(self) -> complex:
        return complex(float(self.re), math.sqrt(float(self.im2)))


@dataclass(frozen=True)
class EmbeddingClass:
    tau_prime: complex
    transform: Matrix
    mirrored: bool
    circle_flag: bool
    a_star: float
    l_star: float
    re_exact: Fraction | None = None
    im2_exact: Fraction | None = None


def compose(m: Matrix, n: Matrix) -> Matrix:
    """Matrix product m*n, i.e. apply n first."""
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def canonical(m: Matrix) -> Matrix:
    """PSL2 representative with c > 0, or c = 0 and d > 0."""
    a, b, c, d = m
    if c < 0 or (c == 0 and d < 0):
        return (-a, -b, -c, -d)
    return m


def apply_transform(m: Matrix, tau: complex, mirrored: bool = False) -> complex:
    if mirrored:
        tau = -tau.conjugate()
    a, b, c, d = m
    return (a * tau + b) / (c * tau + d)


def apply_exact(m: Matrix, re: Fraction, im2: Fraction, mirrored: bool = False) -> tuple[Fraction, Fraction]:
    """Moebius action on (Re tau, Im tau^2) in exact rational arithmetic."""
    if mirrored:
        re = -re
    a, b, c, d = m
    den = (c * re + d) ** 2 + c * c * im2
    new_re = ((a * re + b) * (c * re + d) + a * c * im2) / den
    return new_re, im2 / (den * den)


def _reduce(re, im2, tol):
    """
    T/S reduction on (Re tau, Im tau^2); works for floats (tol > 0) and Fractions (tol = 0).

    Re is normalised into (-1/2, 1/2] and points on the unit circle to Re >= 0.
    """
    gamma = IDENTITY
    half = Fraction(1, 2) if isinstance(re, Fraction) else 0.5
    for _ in range(MAX_REDUCTION_STEPS):
        shift = math.ceil(re - half - tol)
        if shift:
            re -= shift
            gamma = compose((1, -shift, 0, 1), gamma)
        r2 = re * re + im2
        if r2 < 1 - tol:
            re, im2 = -re / r2, im2 / (r2 * r2)
            gamma = compose((0, -1, 1, 0), gamma)
            continue
        if abs(r2 - 1) <= tol and re < -tol:
            re = -re
            gamma = compose((0, -1, 1, 0), gamma)
        return re, im2, canonical(gamma)
    raise ContractViolation("fundamental-domain reduction did not terminate", "modclass.reduce_to_fundamental")


def reduce_to_fundamental(tau: complex) -> Reduction:
    """Moves tau into |tau| >= 1, -1/2 < Re tau <= 1/2 with T and S steps."""
    if tau.imag <= 0:
        raise ValueError(f"tau must lie in the upper half plane, got {tau}")
    re, im2, gamma = _reduce(tau.real, tau.imag ** 2, FD_TOL)
    reduced = complex(re, math.sqrt(im2))
    logger.debug(f"reduced {tau} to {reduced} via {gamma}")
    return Reduction(tau=reduced, transform=gamma)


def reduce_exact(re: Fraction, im2: Fraction) -> ExactReduction:
    if im2 <= 0:
        raise ValueError("Im tau^2 must be positive")
    re, im2, gamma = _reduce(Fraction(re), Fraction(im2), 0)
    return ExactReduction(re=re, im2=im2, transform=gamma)


@lru_cache(maxsize=None)
def _sl2_matrices(bound: int) -> np.ndarray:
    """All canonical (a, b, c, d) with entries in [-bound, bound] and ad - bc = 1, lexicographic."""
    r = np.arange(-bound, bound + 1, dtype=np.int64)
    a, b, c, d = (g.ravel() for g in np.meshgrid(r, r, r, r, indexing="ij"))
    keep = (a * d - b * c == 1) & ((c > 0) | ((c == 0) & (d > 0)))
    return np.stack([a[keep], b[keep], c[keep], d[keep]], axis=1)


def find_embedding_class(tau_fd: complex, entry_bound: int = DEFAULT_ENTRY_BOUND,
                         exact: tuple[Fraction, Fraction] | None = None) -> EmbeddingClass:
    """
    Deterministic search for tau' = gamma(tau) (optionally after tau -> -conj(tau)) with
    0 < Re tau' <= 1/2 and Im tau'^2 >= Re tau' (1 - Re tau').

    Preference: circle classes, then larger Im tau', then the lexicographically
    smallest matrix, then unmirrored. ``exact`` = (Re, Im^2) of tau_fd carries
    rational values through to the result.
    """
    mats = _sl2_matrices(entry_bound)
    a, b, c, d = (mats[:, i].astype(float) for i in range(4))
    rows = []
    for mirrored in (False, True):
        tau = -tau_fd.conjugate() if mirrored else tau_fd
        tp = (a * tau + b) / (c * tau + d)
        re, im = tp.real, tp.imag
        gap = im * im - re * (1 - re)
        feasible = (re > FEASIBLE_TOL) & (re <= 0.5 + FEASIBLE_TOL) & (gap >= -FEASIBLE_TOL)
        for idx in np.flatnonzero(feasible):
            rows.append((not abs(gap[idx]) <= CIRCLE_TOL, -round(float(im[idx]), 9),
                         tuple(int(v) for v in mats[idx]), mirrored, complex(tp[idx])))
    if not rows:
        raise NoFeasibleClass(f"no feasible class for tau = {tau_fd} with entries bounded by {entry_bound}")
    # Ties on (circle, Im, matrix) come from Re tau = 0, where mirroring is the
    # identity. Unmirrored wins, so i*sqrt(2) reports mirrored=False, not True.
    not_circle, _, matrix, mirrored, tau_prime = min(rows, key=lambda row: row[:4])

    re_exact = im2_exact = None
    if exact is not None:
        re_exact, im2_exact = apply_exact(matrix, exact[0], exact[1], mirrored)
        tau_prime = complex(float(re_exact), math.sqrt(float(im2_exact)))
    cls = EmbeddingClass(
        tau_prime=tau_prime,
        transform=matrix,
        mirrored=mirrored,
        circle_flag=not not_circle,
        a_star=4 * math.pi * tau_prime.real,
        l_star=4 * math.pi * tau_prime.imag,
        re_exact=re_exact,
        im2_exact=im2_exact,
    )
    logger.info(f"embedding class for tau = {tau_fd}: tau' = {tau_prime} "
                f"(matrix {matrix}, mirrored={mirrored}, circle={cls.circle_flag})")
    return cls
