"""
Exact check that the explicit lift of Frobenius on y^2 = x^3 + 3x reduces to
(x, y) -> (x^5, y^5) modulo the prime (-2 + i) of Z[i].

The lift is phi1(x) = N1(x) / D1(x) and phi2(x, y) = N2(x) / (D2(x) * y) with
Gaussian-integer coefficients. Reduction substitutes i -> 2 (the residue of i
mod -2 + i) and reduces mod 5.
"""

import logging
from dataclasses import dataclass

import sympy
from sympy import GF, ZZ_I, Poly, symbols

from .errors import BadResidue

logger = logging.getLogger(__name__)

x = symbols('x')
I = sympy.I

LIFT_PRIME = 5
I_RESIDUE = 2

# explicit lift of Frobenius, numerators and denominators kept apart
PHI1_NUM = x * (3 * (x**8 - 12 * x**6 - 138 * x**4 - 108 * x**2 + 81)
                + 4 * I * (x**8 + 18 * x**6 - 162 * x**2 - 81))
PHI1_DEN = (5 * x**4 + 6 * x**2 + 9) ** 2
PHI2_NUM = -x * (x**2 + 3) * (
    2 * (x**12 + 78 * x**10 + 999 * x**8 - 1404 * x**6 - 6561 * x**4 - 1458 * x**2 + 729)
    + I * (11 * x**12 - 42 * x**10 + 1809 * x**8 + 8964 * x**6 + 1053 * x**4 - 7290 * x**2 - 729))
PHI2_DEN = (5 * x**4 + 6 * x**2 + 9) ** 3
CURVE_RHS = x**3 + 3 * x


def gauss_poly(expr) -> Poly:
    """Polynomial in x over Z[i]."""
    return Poly(expr, x, domain=ZZ_I)


def fp_poly(coeffs: list[int], p: int) -> Poly:
    """Polynomial over F_p from big-endian integer coefficients, residues kept in [0, p)."""
    return Poly([c % p for c in coeffs], x, domain=GF(p, symmetric=False))


def reduce_mod_p(poly: Poly, i_image: int, p: int) -> Poly:
    """Substitutes i -> i_image and reduces the coefficients mod p."""
    if (i_image * i_image + 1) % p != 0:
        raise BadResidue(f"{i_image}^2 is not -1 mod {p}")
    coeffs = [int(sympy.re(c)) + int(sympy.im(c)) * i_image for c in poly.all_coeffs()]
    return fp_poly(coeffs, p)


def coefficients(poly: Poly) -> list[int]:
    """Big-endian coefficients as integers in [0, p)."""
    p = poly.get_modulus()
    return [int(c) % p for c in poly.all_coeffs()]


@dataclass(frozen=True)
class FrobeniusLiftCheck:
    phi1_ok: bool
    phi2_ok: bool
    phi1_num: Poly
    phi1_den: Poly
    phi2_num: Poly
    phi2_den: Poly
    phi2_target: Poly

    def to_dict(self) -> dict:
        return {
            "phi1_ok": self.phi1_ok,
            "phi2_ok": self.phi2_ok,
            "p": LIFT_PRIME,
            "i_image": I_RESIDUE,
            "phi1": {"num": str(self.phi1_num.as_expr()), "den": str(self.phi1_den.as_expr())},
            "phi2": {"num": str(self.phi2_num.as_expr()), "den": str(self.phi2_den.as_expr()),
                     "target": str(self.phi2_target.as_expr())},
        }


def verify_phi_reduction(i_image: int = I_RESIDUE, p: int = LIFT_PRIME) -> FrobeniusLiftCheck:
    """
    phi1 reduces to x^5 iff N1 = x^5 * D1 in F_5[x]. phi2 = R(x)/y reduces to y^5
    on the curve iff R = y^6 = (x^3 + 3x)^3, i.e. N2 = (x^3 + 3x)^3 * D2.
    """
    n1, d1 = (reduce_mod_p(gauss_poly(e), i_image, p) for e in (PHI1_NUM, PHI1_DEN))
    n2, d2 = (reduce_mod_p(gauss_poly(e), i_image, p) for e in (PHI2_NUM, PHI2_DEN))
    x_p = Poly(x ** p, x, domain=GF(p, symmetric=False))
    rhs = Poly(CURVE_RHS, x, domain=GF(p, symmetric=False))
    target = rhs ** ((p + 1) // 2) * d2

    phi1_ok = n1 == x_p * d1
    phi2_ok = n2 == target
    logger.info(f"phi1: ({n1.as_expr()}) / ({d1.as_expr()}) -> {'x^5' if phi1_ok else 'MISMATCH'}")
    if not phi2_ok:
        logger.warning(f"phi2 numerator {n2.as_expr()} differs from {target.as_expr()}")
    return FrobeniusLiftCheck(phi1_ok=phi1_ok, phi2_ok=phi2_ok, phi1_num=n1, phi1_den=d1,
                              phi2_num=n2, phi2_den=d2, phi2_target=target)
