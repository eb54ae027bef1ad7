"""
Short Weierstrass curves y^2 = x^3 + ax + b over F_{p^n}: validation, the
chord-tangent group law, and the brute-force oracles (point counting and
torsion scans) every analytic claim elsewhere is checked against.
"""

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from sympy import isprime

from utils import oracle_limit

from .errors import CharTooSmall, FieldTooLarge, NonPrime, PointNotOnCurve, SingularCurve
from .finite_field import FieldCtx, FqElem, element_table, encode, make_field, vec_add, vec_mul, vec_scale

logger = logging.getLogger(__name__)

MAX_TORSION_M = 20


@dataclass(frozen=True)
class CurveParams:
    """y^2 = x^3 + a*x + b over F_p, coefficients reduced into [0, p)."""
    a: int
    b: int
    p: int

    @property
    def slug(self) -> str:
        return f"a{self.a}b{self.b}"

    def equation(self) -> str:
        terms = ["x^3"]
        if self.a:
            terms.append(f"{self.a}x" if self.a != 1 else "x")
        if self.b:
            terms.append(str(self.b))
        return f"y^2 = {' + '.join(terms)} (mod {self.p})"


@dataclass(frozen=True)
class CurvePoint:
    """Affine point, or the point at infinity when both coordinates are None."""
    x: FqElem | None = None
    y: FqElem | None = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None


INFINITY = CurvePoint()


def validate_curve(a: int, b: int, p: int) -> CurveParams:
    if not isprime(p):
        raise NonPrime(f"p = {p} is not prime", contract="weierstrass.validate_curve")
    if p < 5:
        raise CharTooSmall(f"characteristic {p} is not supported (need p >= 5)",
                           contract="weierstrass.validate_curve")
    a, b = a % p, b % p
    if (4 * a ** 3 + 27 * b ** 2) % p == 0:
        raise SingularCurve(f"4a^3 + 27b^2 = 0 mod {p} for a = {a}, b = {b}")
    return CurveParams(a=a, b=b, p=p)


def make_point(ctx: FieldCtx, x, y) -> CurvePoint:
    return CurvePoint(ctx.element(x), ctx.element(y))


def is_on_curve(curve: CurveParams, ctx: FieldCtx, P: CurvePoint) -> bool:
    if P.is_infinity:
        return True
    lhs = ctx.mul(P.y, P.y)
    x2 = ctx.mul(P.x, P.x)
    rhs = ctx.add(ctx.mul(ctx.add(x2, ctx.element(curve.a)), P.x), ctx.element(curve.b))
    return lhs == rhs


def _require_on_curve(curve: CurveParams, ctx: FieldCtx, *points: CurvePoint, contract: str):
    for P in points:
        if not is_on_curve(curve, ctx, P):
            raise PointNotOnCurve(f"{P} is not on {curve.equation()} over F_{ctx.q}", contract=contract)


def negate_point(ctx: FieldCtx, P: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return P
    return CurvePoint(P.x, ctx.neg(P.y))


def _add(curve: CurveParams, ctx: FieldCtx, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.x == Q.x:
        if ctx.add(P.y, Q.y).is_zero():
            return INFINITY
        # tangent: (3x^2 + a) / 2y
        num = ctx.add(ctx.mul(ctx.element(3), ctx.mul(P.x, P.x)), ctx.element(curve.a))
        lam = ctx.mul(num, ctx.inv(ctx.add(P.y, P.y)))
    else:
        lam = ctx.mul(ctx.sub(Q.y, P.y), ctx.inv(ctx.sub(Q.x, P.x)))
    x3 = ctx.sub(ctx.sub(ctx.mul(lam, lam), P.x), Q.x)
    y3 = ctx.sub(ctx.mul(lam, ctx.sub(P.x, x3)), P.y)
    return CurvePoint(x3, y3)


def add_points(curve: CurveParams, ctx: FieldCtx, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    _require_on_curve(curve, ctx, P, Q, contract="weierstrass.add_points")
    return _add(curve, ctx, P, Q)


def scalar_mul(curve: CurveParams, ctx: FieldCtx, m: int, P: CurvePoint) -> CurvePoint:
    """Double-and-add; negative m multiplies the negated point."""
    _require_on_curve(curve, ctx, P, contract="weierstrass.scalar_mul")
    if m < 0:
        m, P = -m, negate_point(ctx, P)
    result, addend = INFINITY, P
    while m:
        if m & 1:
            result = _add(curve, ctx, result, addend)
        addend = _add(curve, ctx, addend, addend)
        m >>= 1
    return result


def frobenius_point(ctx: FieldCtx, P: CurvePoint) -> CurvePoint:
    """(x, y) -> (x^p, y^p)."""
    if P.is_infinity:
        return P
    return CurvePoint(ctx.pow(P.x, ctx.p), ctx.pow(P.y, ctx.p))


def _check_oracle_range(ctx: FieldCtx, limit: int | None, contract: str):
    if limit is None:
        limit = oracle_limit()
    if ctx.q > limit:
        raise FieldTooLarge(f"F_{ctx.q} is beyond the brute-force oracle limit {limit}", contract=contract)


def _rhs_codes(curve: CurveParams, ctx: FieldCtx, xs: np.ndarray) -> np.ndarray:
    x2 = vec_mul(ctx, xs, xs)
    rhs = vec_add(ctx, vec_mul(ctx, x2, xs), vec_scale(ctx, xs, curve.a))
    rhs[:, 0] += curve.b
    return encode(ctx, rhs % ctx.p)


def count_points(curve: CurveParams, n: int, limit: int | None = None) -> int:
    """
    #E(F_{p^n}) by a quadratic-character scan, point at infinity included.

    Every x contributes the number of square roots of x^3 + ax + b, read off a
    histogram of all squares in the field.
    """
    ctx = make_field(curve.p, n)
    _check_oracle_range(ctx, limit, "weierstrass.count_points")
    xs = element_table(ctx)
    roots_per_value = np.bincount(encode(ctx, vec_mul(ctx, xs, xs)), minlength=ctx.q)
    total = 1 + int(roots_per_value[_rhs_codes(curve, ctx, xs)].sum())
    logger.debug(f"#E(F_{ctx.q}) = {total} for {curve.equation()}")
    return total


def curve_points(curve: CurveParams, ctx: FieldCtx, limit: int | None = None) -> list[CurvePoint]:
    """All points of E(F_q): Infinity first, then affine points ordered by (x, y) integer codes."""
    _check_oracle_range(ctx, limit, "weierstrass.curve_points")
    xs = element_table(ctx)
    squares = encode(ctx, vec_mul(ctx, xs, xs))
    order = np.argsort(squares, kind="stable")
    starts = np.searchsorted(squares[order], np.arange(ctx.q), side="left")
    ends = np.searchsorted(squares[order], np.arange(ctx.q), side="right")
    points = [INFINITY]
    for x_code, value in enumerate(_rhs_codes(curve, ctx, xs)):
        x = ctx.from_int(x_code)
        for y_code in order[starts[value]:ends[value]]:
            points.append(CurvePoint(x, ctx.from_int(int(y_code))))
    return points


def torsion_counts(curve: CurveParams, n: int, ms: Iterable[int], limit: int | None = None) -> dict[int, int]:
    """
    #E(F_{p^n})[m] for each m in ``ms`` by exhaustive scan.

    The order of every point is found by repeated addition (capped at max(ms)),
    then a point is m-torsion iff its order divides m.
    """
    ms = sorted(set(ms))
    if not ms or ms[0] < 1 or ms[-1] > MAX_TORSION_M:
        raise ValueError(f"torsion orders must lie in [1, {MAX_TORSION_M}], got {ms}")
    ctx = make_field(curve.p, n)
    _check_oracle_range(ctx, limit, "weierstrass.torsion_count")
    cap = ms[-1]
    orders = []
    for P in curve_points(curve, ctx, limit=ctx.q):
        Q, k = P, 1
        while not Q.is_infinity and k < cap:
            Q, k = _add(curve, ctx, Q, P), k + 1
        orders.append(k if Q.is_infinity else None)
    return {m: sum(1 for o in orders if o is not None and m % o == 0) for m in ms}


def torsion_count(curve: CurveParams, n: int, m: int, limit: int | None = None) -> int:
    return torsion_counts(curve, n, [m], limit=limit)[m]
