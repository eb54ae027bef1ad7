"""
The per-curve pipeline: trace of Frobenius, Weil number, lattice levels and
brute-force cross-checks, collected in a LiftReport. Also hosts the
multiplicative-group demo (roots of unity with the Frobenius arrows) and the
real locus of a reflection-stable lattice.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from utils import config_value, oracle_limit

from .cm_order import (
    QuadInt, Tau, frobenius_alpha, lattice_tau, level_structure, order_conductor, weil_counts,
)
from .errors import ContractViolation, TooManyPoints
from .finite_field import make_field, primitive_element
from .modclass import reduce_to_fundamental
from .weierstrass import CurveParams, count_points, torsion_counts

logger = logging.getLogger(__name__)

MAX_LEVEL = 8
TORSION_ORDERS = range(1, 13)
MAX_MULT_GROUP = 1_000_000
REAL_TOL = 1e-12

# The curves drawn in the gallery, keyed by the lattice they lift to.
GALLERY = {
    "square5": (3, 0, 5),
    "hex7": (0, 3, 7),
    "sqrt2_11": (1, 3, 11),
    "sqrt7_11": (5, 7, 11),
    "sqrt11_5": (1, 1, 5),
}


@dataclass(frozen=True)
class LevelRecord:
    n: int
    count: int
    d1: int
    d2: int
    oracle_checked: bool
    oracle_agrees: bool | None
    structure_checked: bool = False
    structure_agrees: bool | None = None


@dataclass
class LiftReport:
    curve: CurveParams
    a_p: int
    alpha: QuadInt
    tau: Tau
    ordinary: bool
    conductor: int
    levels: list[LevelRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def build_lift_report(curve: CurveParams, n_max: int, limit: int | None = None,
                      torsion_limit: int | None = None) -> LiftReport:
    """
    Runs the analytic pipeline for n = 1..n_max and checks it against the oracles.

    Counts come from N(alpha^n - 1) and are compared with brute-force counts
    wherever p^n is within the oracle limit; group structures are compared with
    the torsion scan (#E[m] = gcd(m, d1) gcd(m, d2) for m <= 12) wherever p^n is
    within ``torsion_limit``.
    """
    if not 1 <= n_max <= MAX_LEVEL:
        raise ValueError(f"n_max must lie in [1, {MAX_LEVEL}], got {n_max}")
    if limit is None:
        limit = oracle_limit()
    if torsion_limit is None:
        torsion_limit = int(config_value('oracle', 'torsion_limit', 0))

    frob = frobenius_alpha(curve, limit=limit)
    tau = lattice_tau(frob.alpha)
    conductor = order_conductor(frob.a_p, curve.p)
    report = LiftReport(curve=curve, a_p=frob.a_p, alpha=frob.alpha, tau=tau,
                        ordinary=frob.ordinary, conductor=conductor)
    if not frob.ordinary:
        report.warnings.append(f"supersingular curve (a_p = {frob.a_p}); lattice model kept, "
                               f"correctness rests on the oracle comparison")
    if conductor > 1:
        report.warnings.append(f"Z[alpha] has conductor {conductor} in its maximal order; "
                               f"group structures may differ from Z[alpha]/(alpha^n - 1)")

    counts = weil_counts(frob.a_p, curve.p, n_max)
    for n in range(1, n_max + 1):
        structure = level_structure(frob.alpha, n)
        if structure.count != counts[n - 1]:
            raise ContractViolation(f"level {n}: N(alpha^n - 1) = {structure.count} but the trace recurrence "
                                    f"gives {counts[n - 1]}", "lift.build_lift_report")
        q = curve.p ** n

        oracle_checked = q <= limit
        oracle_agrees = None
        if oracle_checked:
            brute = count_points(curve, n, limit=limit)
            oracle_agrees = brute == structure.count
            if not oracle_agrees:
                report.warnings.append(f"level {n}: brute-force count {brute} != lattice count {structure.count}")

        structure_checked = q <= min(torsion_limit, limit)
        structure_agrees = None
        if structure_checked:
            observed = torsion_counts(curve, n, TORSION_ORDERS, limit=limit)
            structure_agrees = all(observed[m] == math.gcd(m, structure.d1) * math.gcd(m, structure.d2)
                                   for m in TORSION_ORDERS)
            if not structure_agrees:
                report.warnings.append(f"level {n}: torsion scan disagrees with predicted "
                                       f"Z/{structure.d1} x Z/{structure.d2}")

        report.levels.append(LevelRecord(n=n, count=structure.count, d1=structure.d1, d2=structure.d2,
                                         oracle_checked=oracle_checked, oracle_agrees=oracle_agrees,
                                         structure_checked=structure_checked,
                                         structure_agrees=structure_agrees))
        logger.info(f"level {n}: count {structure.count}, Z/{structure.d1} x Z/{structure.d2}, "
                    f"oracle {'agrees' if oracle_agrees else 'n/a' if oracle_agrees is None else 'DISAGREES'}")

    for prev, cur in zip(report.levels[1:], report.levels[2:]):
        if cur.count <= prev.count:
            report.warnings.append(f"level counts not increasing at n = {cur.n}")
    for message in report.warnings:
        logger.warning(message)
    return report


# --- multiplicative group demo ---

@dataclass(frozen=True)
class MultGroup:
    """The (q-1)-th roots of unity standing in for the nonzero elements of F_q."""
    p: int
    n: int
    q: int
    points: np.ndarray
    arrows: tuple[tuple[int, int], ...]
    edges: tuple[tuple[int, int], ...]


def mult_group_points(p: int, n: int) -> MultGroup:
    """
    Roots of unity exp(2*pi*i*k/(q-1)); the Frobenius z -> z^p sends k to p*k mod (q-1)
    and the Cayley cycle steps k -> k+1.
    """
    ctx = make_field(p, n, allow_char3=True)
    order = ctx.q - 1
    if order > MAX_MULT_GROUP:
        raise TooManyPoints(f"F_{ctx.q} has {order} nonzero elements, above {MAX_MULT_GROUP}",
                            contract="lift.mult_group_points")
    k = np.arange(order)
    points = np.exp(2j * np.pi * k / order)
    arrows = tuple((int(i), int(p * i % order)) for i in k)
    edges = tuple((int(i), int((i + 1) % order)) for i in k)
    return MultGroup(p=p, n=n, q=ctx.q, points=points, arrows=arrows, edges=edges)


def arrow_order(group: MultGroup) -> int:
    """Order of the Frobenius arrow permutation."""
    perm = np.array([target for _, target in group.arrows])
    current, steps = perm.copy(), 1
    while not np.array_equal(current, np.arange(len(perm))):
        current, steps = perm[current], steps + 1
    return steps


def check_arrows_in_field(group: MultGroup) -> bool:
    """Confirms on actual field elements that (g^k)^p = g^(arrow(k)) for a primitive g."""
    ctx = make_field(group.p, group.n, allow_char3=True)
    g = primitive_element(ctx)
    powers = [ctx.one]
    for _ in range(group.q - 2):
        powers.append(ctx.mul(powers[-1], g))
    return all(ctx.pow(powers[k], ctx.p) == powers[target] for k, target in group.arrows)


# --- real locus ---

@dataclass(frozen=True)
class RealCircle:
    """The line Im z = offset, fixed pointwise by conjugation because z - conj(z) = m + n*tau."""
    offset: float
    height_fraction: Fraction
    witness: tuple[int, int]
    component: int


@dataclass(frozen=True)
class RealLocus:
    tau: complex
    reflection_stable: bool
    circles: tuple[RealCircle, ...] = ()


def real_locus(tau: complex) -> RealLocus:
    """
    Horizontal circles of C/(Z + tau Z) fixed by complex conjugation.

    After reduction the lattice is conjugation-stable iff Re tau is 0 or 1/2.
    Rectangular lattices have two fixed circles, Im z = 0 and Im z = Im(tau)/2.
    Rhombic lattices report Im z = 0 and Im z = Im(tau) (witness 2*tau - 1),
    which are the same circle of the torus and share a component label.
    """
    tau_fd = reduce_to_fundamental(tau).tau
    re, im = tau_fd.real, tau_fd.imag
    if abs(re) <= REAL_TOL:
        circles = (RealCircle(0.0, Fraction(0), (0, 0), 0),
                   RealCircle(im / 2, Fraction(1, 2), (0, 1), 1))
    elif abs(re - 0.5) <= REAL_TOL:
        circles = (RealCircle(0.0, Fraction(0), (0, 0), 0),
                   RealCircle(im, Fraction(1), (-1, 2), 0))
    else:
        logger.info(f"tau = {tau_fd} is not reflection stable")
        return RealLocus(tau=tau_fd, reflection_stable=False)
    return RealLocus(tau=tau_fd, reflection_stable=True, circles=circles)
