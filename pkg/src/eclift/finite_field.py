"""
Exact arithmetic in F_p and F_{p^n}, the substrate for the brute-force oracles.

Elements of F_{p^n} are coefficient vectors (little-endian in the generator x)
modulo the lexicographically smallest monic irreducible of degree n. Scalar
arithmetic goes through sympy's dense GF(p)[x] routines; the counting oracle
uses the vectorised helpers at the bottom of the module, which work on whole
tables of elements at once.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np
from sympy import isprime, primefactors
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_add, gf_gcdex, gf_irred_p_rabin, gf_mul, gf_neg, gf_pow_mod, gf_rem, gf_strip, gf_sub,
)

from .errors import CharTooSmall, ContractViolation, DivisionByZero, FieldTooLarge, NonPrime

logger = logging.getLogger(__name__)

MAX_FIELD_ORDER = 2 ** 31


@dataclass(frozen=True)
class FqElem:
    """An element of F_{p^n}: n residues mod p, coefficient of x^i at index i."""
    coeffs: tuple[int, ...]

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class FieldCtx:
    """F_{p^n} presented as F_p[x]/(modulus). ``modulus`` is little-endian and monic."""
    p: int
    n: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p ** self.n

    # --- construction helpers ---

    def element(self, coeffs: Sequence[int] | int) -> FqElem:
        """Builds an element from an integer (prime-field embedding) or a coefficient list."""
        if isinstance(coeffs, (int, np.integer)):
            coeffs = [int(coeffs)]
        values = [int(c) % self.p for c in coeffs]
        if len(values) > self.n:
            return self._from_gf(gf_rem(_gf(values), _gf(self.modulus), self.p, ZZ))
        return FqElem(tuple(values + [0] * (self.n - len(values))))

    @property
    def zero(self) -> FqElem:
        return FqElem((0,) * self.n)

    @property
    def one(self) -> FqElem:
        return self.element(1)

    def from_int(self, k: int) -> FqElem:
        """Element whose base-p digits (least significant first) are its coefficients."""
        digits = []
        for _ in range(self.n):
            k, r = divmod(k, self.p)
            digits.append(r)
        return FqElem(tuple(digits))

    def to_int(self, e: FqElem) -> int:
        return sum(c * self.p ** i for i, c in enumerate(e.coeffs))

    def elements(self) -> Iterator[FqElem]:
        for k in range(self.q):
            yield self.from_int(k)

    # --- arithmetic ---

    def add(self, a: FqElem, b: FqElem) -> FqElem:
        return FqElem(tuple((x + y) % self.p for x, y in zip(a.coeffs, b.coeffs)))

    def sub(self, a: FqElem, b: FqElem) -> FqElem:
        return FqElem(tuple((x - y) % self.p for x, y in zip(a.coeffs, b.coeffs)))

    def neg(self, a: FqElem) -> FqElem:
        return FqElem(tuple(-x % self.p for x in a.coeffs))

    def mul(self, a: FqElem, b: FqElem) -> FqElem:
        if self.n == 1:
            return FqElem(((a.coeffs[0] * b.coeffs[0]) % self.p,))
        prod = gf_mul(_gf(a.coeffs), _gf(b.coeffs), self.p, ZZ)
        return self._from_gf(gf_rem(prod, _gf(self.modulus), self.p, ZZ))

    def inv(self, a: FqElem) -> FqElem:
        if a.is_zero():
            raise DivisionByZero(f"inverse of zero in F_{self.q}")
        if self.n == 1:
            return FqElem((pow(a.coeffs[0], -1, self.p),))
        s, _, h = gf_gcdex(_gf(a.coeffs), _gf(self.modulus), self.p, ZZ)
        if h != [1]:
            raise DivisionByZero(f"{a} is not invertible modulo {self.modulus}")
        return self._from_gf(s)

    def pow(self, a: FqElem, e: int) -> FqElem:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.n == 1:
            return FqElem((pow(a.coeffs[0], e, self.p),))
        # gf_pow_mod is square-and-multiply on the residue ring
        return self._from_gf(gf_pow_mod(_gf(a.coeffs), e, _gf(self.modulus), self.p, ZZ))

    def _from_gf(self, f: list) -> FqElem:
        coeffs = [int(c) % self.p for c in reversed(f)]
        return FqElem(tuple(coeffs + [0] * (self.n - len(coeffs))))


def _gf(coeffs: Sequence[int]) -> list:
    """Little-endian coefficients to sympy's big-endian dense representation."""
    return gf_strip([int(c) for c in reversed(coeffs)])


@lru_cache(maxsize=None)
def make_field(p: int, n: int = 1, allow_char3: bool = False) -> FieldCtx:
    """
    Builds F_{p^n} with the lexicographically smallest monic irreducible modulus.

    Candidate moduli x^n + c_{n-1}x^{n-1} + ... + c_0 are scanned by the integer
    sum(c_i p^i) in increasing order and tested with Rabin's criterion. For n = 1
    the scan starts at x, so F_p is presented with modulus x.

    ``allow_char3`` admits p = 3 for the multiplicative-group demo only.
    """
    if not isprime(p):
        raise NonPrime(f"p = {p} is not prime")
    if p < 5 and not (allow_char3 and p == 3):
        raise CharTooSmall(f"characteristic {p} is not supported (need p >= 5)")
    if n < 1:
        raise FieldTooLarge(f"extension degree must be >= 1, got {n}")
    q = 1
    for _ in range(n):
        q *= p
        if q > MAX_FIELD_ORDER:
            raise FieldTooLarge(f"{p}^{n} exceeds the supported field order 2^31")

    for k in range(q):
        low = [(k // p ** i) % p for i in range(n)]
        candidate = tuple(low + [1])
        if gf_irred_p_rabin(_gf(candidate), p, ZZ):
            logger.debug(f"F_{p}^{n}: modulus coefficients {candidate}")
            return FieldCtx(p=p, n=n, modulus=candidate)
    raise ContractViolation(f"no irreducible polynomial of degree {n} over F_{p}", "finite_field.make_field")


def fq_arith(ctx: FieldCtx, op: str, operands: Sequence) -> FqElem:
    """Dispatches one field operation: add, sub, mul (binary), inv (unary), pow (element, int)."""
    if op == "add":
        return ctx.add(*operands)
    if op == "sub":
        return ctx.sub(*operands)
    if op == "mul":
        return ctx.mul(*operands)
    if op == "inv":
        (a,) = operands
        return ctx.inv(a)
    if op == "pow":
        a, e = operands
        return ctx.pow(a, int(e))
    raise ValueError(f"unknown field operation '{op}'")


def is_square(ctx: FieldCtx, e: FqElem) -> bool:
    """Euler's criterion: e = 0 or e^((q-1)/2) = 1."""
    if e.is_zero():
        return True
    return ctx.pow(e, (ctx.q - 1) // 2) == ctx.one


def frobenius(ctx: FieldCtx, e: FqElem) -> FqElem:
    return ctx.pow(e, ctx.p)


def primitive_element(ctx: FieldCtx) -> FqElem:
    """Smallest element (in integer encoding) generating the multiplicative group."""
    order = ctx.q - 1
    cofactors = [order // r for r in primefactors(order)]
    for k in range(1, ctx.q):
        g = ctx.from_int(k)
        if all(ctx.pow(g, c) != ctx.one for c in cofactors):
            return g
    raise ContractViolation(f"F_{ctx.q} has no primitive element", "finite_field.primitive_element")


# --- vectorised tables (rows are elements, columns are coefficients) ---

def element_table(ctx: FieldCtx) -> np.ndarray:
    """All q elements as a (q, n) int64 array, row k holding the digits of k."""
    k = np.arange(ctx.q, dtype=np.int64)
    powers = ctx.p ** np.arange(ctx.n, dtype=np.int64)
    return (k[:, None] // powers[None, :]) % ctx.p


def encode(ctx: FieldCtx, table: np.ndarray) -> np.ndarray:
    """Inverse of element_table: row coefficients back to integer codes."""
    powers = ctx.p ** np.arange(ctx.n, dtype=np.int64)
    return table @ powers


def vec_add(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a + b) % ctx.p


def vec_mul(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise product: schoolbook convolution, then reduction by the monic modulus."""
    n, p = ctx.n, ctx.p
    prod = np.zeros((a.shape[0], 2 * n - 1), dtype=np.int64)
    for i in range(n):
        prod[:, i:i + n] += a[:, i:i + 1] * b
        prod %= p
    mod_low = np.array(ctx.modulus[:n], dtype=np.int64)
    for d in range(2 * n - 2, n - 1, -1):
        lead = prod[:, d:d + 1]
        prod[:, d - n:d] -= lead * mod_low
        prod[:, d - n:d] %= p
        prod[:, d] = 0
    return prod[:, :n] % p


def vec_scale(ctx: FieldCtx, a: np.ndarray, c: int) -> np.ndarray:
    return (a * (int(c) % ctx.p)) % ctx.p
