"""
Offline acceptance suite behind ``main.py selftest``. Each check is a plain
function that raises AssertionError (or a library error) on failure; the
runner times every check and collects the results.
"""

import cmath
import logging
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cm_order import frobenius_alpha, lattice_tau, level_structure, weil_counts
from .emit import write_obj
from .errors import Infeasible
from .frob_check import coefficients, verify_phi_reduction
from .hopf_map import build_embedding_ctx, embed_point, generate_mesh, sphere_points
from .lift import GALLERY, arrow_order, build_lift_report, mult_group_points
from .modclass import find_embedding_class, reduce_to_fundamental
from .sphere_curve import curve_area, curve_length, solve_curve
from .weierstrass import count_points, torsion_counts, validate_curve

logger = logging.getLogger(__name__)

ORACLE_LIMIT = 200_000
GRID = 32
FD_STEP = 1e-5
TORSION_ORDERS = range(1, 13)
# divisible by every shear denominator of the classes below
MESH_NS = 96

# the three classes drawn with embedded tori: square, hexagonal and i*sqrt(2)
EMBEDDING_TAUS = {
    "clifford": 1j,
    "hexagonal": complex(0.5, math.sqrt(3) / 2),
    "sqrt2": complex(0, math.sqrt(2)),
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    seconds: float
    detail: str = ""


def _curve(name: str):
    return validate_curve(*GALLERY[name])


def check_point_counts():
    for name, n, expected in (("square5", 4, 640), ("hex7", 4, 2379)):
        curve = _curve(name)
        frob = frobenius_alpha(curve, limit=ORACLE_LIMIT)
        assert level_structure(frob.alpha, n).count == expected, f"{name}: norm count"
        assert count_points(curve, n, limit=ORACLE_LIMIT) == expected, f"{name}: brute count"


def check_group_structures():
    for name, n, expected in (("square5", 1, (1, 10)), ("square5", 2, (2, 10)), ("hex7", 2, (1, 39))):
        curve = _curve(name)
        structure = level_structure(frobenius_alpha(curve).alpha, n)
        assert (structure.d1, structure.d2) == expected, f"{name} n={n}: {structure.d1}, {structure.d2}"
        observed = torsion_counts(curve, n, TORSION_ORDERS, limit=ORACLE_LIMIT)
        for m in TORSION_ORDERS:
            assert observed[m] == math.gcd(m, expected[0]) * math.gcd(m, expected[1]), f"{name} n={n} m={m}"


def check_weil_numbers():
    omega = cmath.exp(2j * math.pi / 3)
    for name, expected in (("square5", -2 + 1j), ("hex7", -2 + omega)):
        alpha = frobenius_alpha(_curve(name)).alpha
        assert abs(alpha.to_complex() - expected) < 1e-12, f"{name}: alpha = {alpha.to_complex()}"
    tau = lattice_tau(frobenius_alpha(_curve("square5")).alpha)
    assert tau.alpha_in_tau_basis() == (-2, 1)


def check_norm_identity():
    for name in GALLERY:
        curve = _curve(name)
        frob = frobenius_alpha(curve)
        counts = weil_counts(frob.a_p, curve.p, 6)
        for n, count in enumerate(counts, start=1):
            assert level_structure(frob.alpha, n).count == count
            if curve.p ** n <= ORACLE_LIMIT:
                assert count_points(curve, n, limit=ORACLE_LIMIT) == count, f"{name} n={n}"


def check_derived_levels():
    curve = _curve("square5")
    alpha = frobenius_alpha(curve).alpha
    beta = alpha ** 5 - 1
    assert abs(beta.to_complex() - (37 + 41j)) < 1e-9
    assert level_structure(alpha, 5).count == 3050 == count_points(curve, 5, limit=ORACLE_LIMIT)
    structure = level_structure(alpha, 4)
    assert (structure.d1, structure.d2) == (8, 80)
    report = build_lift_report(curve, 4, limit=ORACLE_LIMIT, torsion_limit=ORACLE_LIMIT)
    assert all(level.structure_agrees for level in report.levels)


def check_mult_group():
    for n, expected in ((2, 8), (3, 26)):
        group = mult_group_points(3, n)
        assert len(group.points) == expected
        assert n % arrow_order(group) == 0


def _embedding_ctx(tau: complex, k: int = 3):
    cls = find_embedding_class(reduce_to_fundamental(tau).tau)
    curve = solve_curve(cls.a_star, cls.l_star, k)
    return build_embedding_ctx(curve, cls)


def check_embedding_numerics():
    for name, tau in EMBEDDING_TAUS.items():
        ctx = _embedding_ctx(tau)
        s = 2 * math.pi * np.arange(GRID) / GRID
        t = (ctx.l_tot / 2) * np.arange(GRID) / GRID
        ss, tt = (g.ravel() for g in np.meshgrid(s, t))

        h = sphere_points(ctx, ss, tt)
        assert np.max(np.abs(np.linalg.norm(h, axis=1) - 1)) <= 1e-9, f"{name}: unit norm"
        hs = (sphere_points(ctx, ss + FD_STEP, tt) - h) / FD_STEP
        ht = (sphere_points(ctx, ss, tt + FD_STEP) - h) / FD_STEP
        assert np.max(np.abs(np.linalg.norm(hs, axis=1) - 1)) <= 1e-4, f"{name}: |d_s|"
        assert np.max(np.abs(np.linalg.norm(ht, axis=1) - 1)) <= 1e-4, f"{name}: |d_t|"
        assert np.max(np.abs(np.sum(hs * ht, axis=1))) <= 1e-4, f"{name}: <d_s, d_t>"

        x = embed_point(ctx, ss, tt)
        xs = (embed_point(ctx, ss + FD_STEP, tt) - x) / FD_STEP
        xt = (embed_point(ctx, ss, tt + FD_STEP) - x) / FD_STEP
        E, F, G = np.sum(xs * xs, axis=1), np.sum(xs * xt, axis=1), np.sum(xt * xt, axis=1)
        assert np.max(np.abs(E - G) / E) <= 1e-3, f"{name}: |E - G| / E"
        assert np.max(np.abs(F) / E) <= 1e-3, f"{name}: |F| / E"

        assert abs(ctx.f_tot - ctx.cls.a_star / 2) <= 1e-8, f"{name}: twist"
        top = embed_point(ctx, s, np.full_like(s, ctx.l_tot / 2 - 1e-9))
        bottom = embed_point(ctx, s - ctx.f_tot, np.zeros_like(s))
        assert np.max(np.abs(top - bottom)) <= 1e-6, f"{name}: seam"


def check_curve_solver():
    for name, tau in EMBEDDING_TAUS.items():
        cls = find_embedding_class(reduce_to_fundamental(tau).tau)
        curve = solve_curve(cls.a_star, cls.l_star, 3)
        assert abs(curve_area(curve) - cls.a_star) <= 1e-8, f"{name}: area"
        assert abs(curve_length(curve) - cls.l_star) <= 1e-8, f"{name}: length"
        if name == "sqrt2":
            assert abs(curve.phi0 - math.acos(1 / 3)) <= 1e-9 and curve.amp == 0.0
    try:
        solve_curve(math.pi, 0.1, 3)
    except Infeasible:
        pass
    else:
        raise AssertionError("(pi, 0.1) did not raise Infeasible")


def check_frobenius_lift():
    result = verify_phi_reduction()
    assert coefficients(result.phi1_num) == [1, 0, 3, 0, 1, 0, 0, 0, 0, 0]
    assert coefficients(result.phi1_den) == [1, 0, 3, 0, 1]
    assert result.phi1_ok and result.phi2_ok


def check_mesh_validity():
    for name, tau in EMBEDDING_TAUS.items():
        ctx = _embedding_ctx(tau)
        mesh = generate_mesh(ctx, MESH_NS, 32)
        assert mesh.euler_characteristic() == 0, f"{name}: Euler characteristic"
        assert np.all(np.isfinite(mesh.vertices)), f"{name}: non-finite vertex"
        assert write_obj(mesh) == write_obj(generate_mesh(ctx, MESH_NS, 32)), f"{name}: OBJ not reproducible"


CHECKS: list[tuple[str, Callable[[], None]]] = [
    ("point counts 640 and 2379", check_point_counts),
    ("group structures Z/10, Z/2 x Z/10, Z/39", check_group_structures),
    ("Weil numbers -2+i and -2+omega", check_weil_numbers),
    ("norm identity on gallery curves", check_norm_identity),
    ("derived levels 3050 and (8, 80)", check_derived_levels),
    ("multiplicative group demo", check_mult_group),
    ("embedding numerics", check_embedding_numerics),
    ("curve solver", check_curve_solver),
    ("Frobenius lift reduction", check_frobenius_lift),
    ("mesh validity and determinism", check_mesh_validity),
]


def run_selftest(checks=None) -> list[CheckResult]:
    results = []
    for name, check in checks or CHECKS:
        start = time.perf_counter()
        try:
            check()
            passed, detail = True, ""
        except Exception as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
            logger.error(f"check '{name}' failed: {detail}")
        results.append(CheckResult(name=name, passed=passed, seconds=time.perf_counter() - start, detail=detail))
    return results
