"""
Exact arithmetic in the order Z[alpha], alpha^2 = t*alpha - p, where alpha is
the Weil number of a curve over F_p. The F_{p^n}-points of the curve are
modelled by the points z of C/Lambda, Lambda = Z[alpha], with
(alpha^n - 1) z in Lambda; this module enumerates them with exact rational
coordinates and reads off the group structure from a Smith normal form.

Coordinates come in two bases. "alpha-coordinates" (a, b) mean a + b*alpha.
"tau-coordinates" (s, t) mean s + t*tau for the reduced lattice
Z + tau*Z = Lambda / (C*alpha + D), where (A, B, C, D) is the reduction matrix
taking alpha to tau.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
from sympy.core.intfunc import igcdex

from utils import config_value

from .errors import ArithmeticOverflow, ContractViolation, SingularMatrix, TooManyPoints
from .modclass import Matrix, reduce_exact
from .weierstrass import CurveParams, count_points

logger = logging.getLogger(__name__)

INT64_MAX = 2 ** 63 - 1
DEFAULT_MAX_POINTS = 1_000_000

IntMatrix = tuple[tuple[int, int], tuple[int, int]]
Coord = tuple[Fraction, Fraction]


def check_int64(value: int, what: str = "value") -> int:
    if abs(value) > INT64_MAX:
        raise ArithmeticOverflow(f"{what} = {value} leaves the signed 64-bit range")
    return value


@dataclass(frozen=True)
class QuadInt:
    """x + y*alpha in Z[alpha] with alpha^2 = t*alpha - p."""
    x: int
    y: int
    t: int
    p: int

    @classmethod
    def alpha(cls, t: int, p: int) -> "QuadInt":
        return cls(0, 1, t, p)

    def _lift(self, other) -> "QuadInt":
        if isinstance(other, QuadInt):
            if (other.t, other.p) != (self.t, self.p):
                raise ValueError("QuadInt operands live in different orders")
            return other
        return QuadInt(int(other), 0, self.t, self.p)

    def __add__(self, other):
        other = self._lift(other)
        return QuadInt(self.x + other.x, self.y + other.y, self.t, self.p)

    def __sub__(self, other):
        other = self._lift(other)
        return QuadInt(self.x - other.x, self.y - other.y, self.t, self.p)

    def __neg__(self):
        return QuadInt(-self.x, -self.y, self.t, self.p)

    def __mul__(self, other):
        other = self._lift(other)
        yy = self.y * other.y
        x = check_int64(self.x * other.x - self.p * yy, "QuadInt product")
        y = check_int64(self.x * other.y + other.x * self.y + self.t * yy, "QuadInt product")
        return QuadInt(x, y, self.t, self.p)

    __radd__ = __add__
    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not elements of the order")
        result, base = QuadInt(1, 0, self.t, self.p), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def conjugate(self) -> "QuadInt":
        # conj(alpha) = t - alpha
        return QuadInt(self.x + self.t * self.y, -self.y, self.t, self.p)

    def norm(self) -> int:
        return check_int64(self.x * self.x + self.t * self.x * self.y + self.p * self.y * self.y, "norm")

    def to_complex(self) -> complex:
        alpha = complex(self.t / 2, math.sqrt(4 * self.p - self.t * self.t) / 2)
        return self.x + self.y * alpha


@dataclass(frozen=True)
class FrobeniusData:
    a_p: int
    alpha: QuadInt
    ordinary: bool


@dataclass(frozen=True)
class Tau:
    """Reduced lattice parameter of Z[alpha], exact as (Re tau, Im tau^2)."""
    re_exact: Fraction
    im2_exact: Fraction
    alpha: QuadInt
    transform: Matrix

    @property
    def re(self) -> float:
        return float(self.re_exact)

    @property
    def im(self) -> float:
        return math.sqrt(float(self.im2_exact))

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def to_tau_coords(self, a, b) -> Coord:
        """alpha-coordinates to tau-coordinates."""
        A, B, C, D = self.transform
        return (A * a - B * b, -C * a + D * b)

    def alpha_action(self) -> IntMatrix:
        """Matrix of z -> alpha*z on tau-coordinates (columns are images of 1 and tau)."""
        A, B, C, D = self.transform
        t, p = self.alpha.t, self.alpha.p
        to_alpha = np.array([[D, B], [C, A]], dtype=object)
        from_alpha = np.array([[A, -B], [-C, D]], dtype=object)
        mult = np.array([[0, -p], [1, t]], dtype=object)
        m = from_alpha @ mult @ to_alpha
        return ((int(m[0, 0]), int(m[0, 1])), (int(m[1, 0]), int(m[1, 1])))

    def alpha_in_tau_basis(self) -> tuple[int, int]:
        """(x, y) with alpha = x + y*tau."""
        m = self.alpha_action()
        return m[0][0], m[1][0]


@dataclass(frozen=True)
class SmithForm:
    """left @ M @ right = diag(d1, d2) with d1 | d2, left and right unimodular."""
    d1: int
    d2: int
    left: IntMatrix
    right: IntMatrix


@dataclass(frozen=True)
class LevelStructure:
    n: int
    beta: QuadInt
    count: int
    d1: int
    d2: int
    snf: SmithForm


@dataclass(frozen=True)
class LatticeLevel:
    n: int
    beta: QuadInt
    count: int
    d1: int
    d2: int
    tau: Tau
    coords: tuple[Coord, ...]
    generators: tuple[Coord, ...]
    edges: tuple[tuple[int, int, int], ...] = field(default=())

    @property
    def points(self) -> list[complex]:
        tau = self.tau.value
        return [float(s) + float(t) * tau for s, t in self.coords]


def frobenius_alpha(curve: CurveParams, limit: int | None = None) -> FrobeniusData:
    """Trace of Frobenius from a brute count over F_p, and alpha with Im alpha > 0."""
    a_p = curve.p + 1 - count_points(curve, 1, limit=limit)
    if a_p * a_p > 4 * curve.p:
        raise ContractViolation(f"Hasse bound violated: a_p = {a_p}, p = {curve.p}", "cm_order.frobenius_alpha")
    ordinary = a_p % curve.p != 0
    if not ordinary:
        logger.warning(f"{curve.equation()} is supersingular (a_p = {a_p})")
    return FrobeniusData(a_p=a_p, alpha=QuadInt.alpha(a_p, curve.p), ordinary=ordinary)


def weil_counts(a_p: int, p: int, n_max: int) -> list[int]:
    """#E(F_{p^n}) for n = 1..n_max from a_k = a_p*a_{k-1} - p*a_{k-2}, a_0 = 2."""
    if a_p * a_p > 4 * p:
        raise ValueError(f"|a_p| = {abs(a_p)} exceeds the Hasse bound for p = {p}")
    alpha = QuadInt.alpha(a_p, p)
    prev, cur = 2, a_p
    counts = []
    for n in range(1, n_max + 1):
        if n > 1:
            prev, cur = cur, check_int64(a_p * cur - p * prev, f"a_{n}")
        count = check_int64(p ** n + 1 - cur, f"#E(F_{p}^{n})")
        norm = (alpha ** n - 1).norm()
        if norm != count:
            raise ContractViolation(f"N(alpha^{n} - 1) = {norm} but the recurrence gives {count}",
                                    "cm_order.weil_counts")
        counts.append(count)
    return counts


def multiplication_matrix(beta: QuadInt) -> IntMatrix:
    """Matrix of z -> beta*z on alpha-coordinates; columns are beta*1 and beta*alpha."""
    u, v, t, p = beta.x, beta.y, beta.t, beta.p
    return ((u, -p * v), (v, u + t * v))


def _as_tuple(m: np.ndarray) -> IntMatrix:
    return ((int(m[0, 0]), int(m[0, 1])), (int(m[1, 0]), int(m[1, 1])))


def snf_2x2(M) -> SmithForm:
    """
    Smith normal form of a nonsingular 2x2 integer matrix.

    Alternates row and column clearing with extended-gcd steps until the
    matrix is diagonal, then restores d1 | d2 by folding row 2 into row 1.
    """
    D = np.array(M, dtype=object).reshape(2, 2)
    if D[0, 0] * D[1, 1] - D[0, 1] * D[1, 0] == 0:
        raise SingularMatrix(f"matrix {M} is singular")
    U = np.eye(2, dtype=int).astype(object)
    V = np.eye(2, dtype=int).astype(object)
    while True:
        if D[1, 0] != 0:
            x, y, g = igcdex(D[0, 0], D[1, 0])
            R = np.array([[x, y], [-(D[1, 0] // g), D[0, 0] // g]], dtype=object)
            D, U = R @ D, R @ U
        if D[0, 1] != 0:
            x, y, g = igcdex(D[0, 0], D[0, 1])
            C = np.array([[x, -(D[0, 1] // g)], [y, D[0, 0] // g]], dtype=object)
            D, V = D @ C, V @ C
            continue
        if D[1, 0] == 0:
            if D[1, 1] % D[0, 0] == 0:
                break
            R = np.array([[1, 1], [0, 1]], dtype=object)
            D, U = R @ D, R @ U
    for i in range(2):
        if D[i, i] < 0:
            flip = np.eye(2, dtype=int).astype(object)
            flip[i, i] = -1
            D, U = flip @ D, flip @ U
    return SmithForm(d1=int(D[0, 0]), d2=int(D[1, 1]), left=_as_tuple(U), right=_as_tuple(V))


def order_conductor(t: int, p: int) -> int:
    """Index of Z[alpha] in the maximal order of Q(alpha): largest f with (t^2 - 4p)/f^2 a discriminant."""
    disc = t * t - 4 * p
    for f in range(math.isqrt(-disc), 0, -1):
        if disc % (f * f) == 0 and (disc // (f * f)) % 4 in (0, 1):
            return f
    return 1


def lattice_tau(alpha: QuadInt) -> Tau:
    """Reduces alpha = (t + i*sqrt(4p - t^2)) / 2 exactly into the fundamental domain."""
    red = reduce_exact(Fraction(alpha.t, 2), Fraction(4 * alpha.p - alpha.t * alpha.t, 4))
    return Tau(re_exact=red.re, im2_exact=red.im2, alpha=alpha, transform=red.transform)


def level_structure(alpha: QuadInt, n: int) -> LevelStructure:
    """beta = alpha^n - 1, its norm, and the elementary divisors of Z[alpha]/(beta)."""
    beta = alpha ** n - 1
    count = beta.norm()
    snf = snf_2x2(multiplication_matrix(beta))
    if snf.d1 * snf.d2 != count:
        raise ContractViolation(f"SNF {snf.d1} x {snf.d2} does not match N(beta) = {count}",
                                "cm_order.level_structure")
    return LevelStructure(n=n, beta=beta, count=count, d1=snf.d1, d2=snf.d2, snf=snf)


def _mod1(c: Coord) -> Coord:
    return (c[0] - math.floor(c[0]), c[1] - math.floor(c[1]))


def _apply(m, c):
    return (m[0][0] * c[0] + m[0][1] * c[1], m[1][0] * c[0] + m[1][1] * c[1])


def fixed_lattice(alpha: QuadInt, n: int, tau: Tau, max_points: int | None = None) -> LatticeLevel:
    """
    The points z of C/Lambda with (alpha^n - 1) z in Lambda, in tau-coordinates.

    With left @ M @ right = diag(d1, d2), they are right @ (j/d1, k/d2) for
    0 <= j < d1, 0 <= k < d2, listed lexicographically in (j, k).
    """
    if max_points is None:
        max_points = int(config_value('lattice', 'max_points', DEFAULT_MAX_POINTS))
    structure = level_structure(alpha, n)
    if structure.count > max_points:
        raise TooManyPoints(f"level {n} has {structure.count} points, above the cap {max_points}")
    V = structure.snf.right
    d1, d2 = structure.d1, structure.d2
    coords = []
    for j in range(d1):
        for k in range(d2):
            a, b = _apply(V, (Fraction(j, d1), Fraction(k, d2)))
            coords.append(_mod1(tau.to_tau_coords(a, b)))
    generator_vectors = [(Fraction(1, d1), Fraction(0)), (Fraction(0), Fraction(1, d2))]
    if d1 == 1:
        generator_vectors = generator_vectors[1:]
    generators = tuple(tau.to_tau_coords(*_apply(V, g)) for g in generator_vectors)
    level = LatticeLevel(n=n, beta=structure.beta, count=structure.count, d1=d1, d2=d2, tau=tau,
                         coords=tuple(coords), generators=generators)
    logger.info(f"level {n}: {level.count} points, structure Z/{d1} x Z/{d2}")
    return replace(level, edges=cayley_edges(level))


def cayley_edges(level: LatticeLevel) -> tuple[tuple[int, int, int], ...]:
    """(source, target, generator index) for every point and every generator."""
    index = {c: i for i, c in enumerate(level.coords)}
    edges = []
    for i, c in enumerate(level.coords):
        for tag, g in enumerate(level.generators):
            target = _mod1((c[0] + g[0], c[1] + g[1]))
            edges.append((i, index[target], tag))
    return tuple(edges)


def is_alpha_stable(level: LatticeLevel) -> bool:
    """True iff z -> alpha*z mod Lambda permutes the level's points (exact check)."""
    action = level.tau.alpha_action()
    images = {_mod1(_apply(action, c)) for c in level.coords}
    return images == set(level.coords)
