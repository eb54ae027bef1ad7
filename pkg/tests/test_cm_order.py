import random
from fractions import Fraction

import pytest
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from eclift.cm_order import (
    QuadInt, SmithForm, check_int64, fixed_lattice, frobenius_alpha, is_alpha_stable, lattice_tau, level_structure,
    multiplication_matrix, order_conductor, snf_2x2, weil_counts,
)
from eclift.errors import ArithmeticOverflow, ContractViolation, SingularMatrix, TooManyPoints
from eclift.weierstrass import validate_curve


def test_frobenius_alpha_gaussian(square5):
    frob = frobenius_alpha(square5)
    assert frob.a_p == -4
    assert frob.ordinary
    assert frob.alpha.to_complex() == pytest.approx(-2 + 1j)


def test_frobenius_alpha_eisenstein(hex7):
    frob = frobenius_alpha(hex7)
    assert frob.a_p == -5
    tau = lattice_tau(frob.alpha)
    assert (tau.re_exact, tau.im2_exact) == (Fraction(1, 2), Fraction(3, 4))
    # alpha = -3 + tau = -2 + omega
    assert tau.alpha_in_tau_basis() == (-3, 1)


def test_supersingular_flag():
    frob = frobenius_alpha(validate_curve(1, 0, 7))
    assert frob.a_p == 0
    assert not frob.ordinary


def test_quadint_arithmetic():
    alpha = QuadInt.alpha(-4, 5)
    assert alpha * alpha == alpha * -4 - 5
    assert (alpha ** 5 - 1).to_complex() == pytest.approx(37 + 41j)
    assert (alpha ** 5 - 1).norm() == 3050
    assert alpha.conjugate().to_complex() == pytest.approx(-2 - 1j)


def test_quadint_orders_must_match():
    with pytest.raises(ValueError):
        QuadInt.alpha(-4, 5) + QuadInt.alpha(-5, 7)


def test_int64_guard():
    with pytest.raises(ArithmeticOverflow):
        check_int64(2 ** 63)
    with pytest.raises(ArithmeticOverflow):
        QuadInt(3 * 10 ** 18, 0, 0, 5) * 4


def test_weil_counts_square5():
    assert weil_counts(-4, 5, 5) == [10, 20, 130, 640, 3050]


def test_weil_counts_hasse():
    with pytest.raises(ValueError):
        weil_counts(5, 5, 2)


@pytest.mark.parametrize("n, expected", [(1, (1, 10)), (2, (2, 10)), (4, (8, 80)), (5, (1, 3050))])
def test_level_structure_square5(square5, n, expected):
    structure = level_structure(frobenius_alpha(square5).alpha, n)
    assert (structure.d1, structure.d2) == expected
    assert structure.count == expected[0] * expected[1]


def test_level_structure_hex7(hex7):
    alpha = frobenius_alpha(hex7).alpha
    assert level_structure(alpha, 2).d2 == 39
    assert level_structure(alpha, 4).count == 2379


@pytest.mark.parametrize("beta", [(3, 4), (37, 41), (-7, 24), (12, -6), (0, 9)])
def test_snf_matches_sympy(beta):
    M = multiplication_matrix(QuadInt(beta[0], beta[1], -4, 5))
    snf = snf_2x2(M)
    expected = smith_normal_form(Matrix(M), domain=ZZ)
    assert sorted((snf.d1, snf.d2)) == sorted(abs(expected[i, i]) for i in range(2))
    assert snf.d2 % snf.d1 == 0
    product = Matrix(snf.left) * Matrix(M) * Matrix(snf.right)
    assert product == Matrix([[snf.d1, 0], [0, snf.d2]])
    assert abs(Matrix(snf.left).det()) == 1 and abs(Matrix(snf.right).det()) == 1


def test_snf_singular():
    with pytest.raises(SingularMatrix):
        snf_2x2(((2, 4), (1, 2)))


@pytest.mark.parametrize("t, p, conductor", [(-4, 5, 1), (-5, 7, 1), (0, 7, 2), (2, 5, 2), (-6, 11, 1), (-4, 11, 2)])
def test_order_conductor(t, p, conductor):
    assert order_conductor(t, p) == conductor


def test_fixed_lattice_square5(square5):
    alpha = frobenius_alpha(square5).alpha
    tau = lattice_tau(alpha)
    level = fixed_lattice(alpha, 1, tau)
    assert level.count == 10 and len(level.coords) == 10
    assert level.coords[0] == (0, 0)
    assert len(set(level.coords)) == 10
    assert all(0 <= s < 1 and 0 <= t < 1 for s, t in level.coords)
    assert all(c.denominator in (1, 2, 5, 10) for pt in level.coords for c in pt)
    assert is_alpha_stable(level)
    # one generator for a cyclic group, one edge per point
    assert len(level.generators) == 1
    assert len(level.edges) == 10


def test_fixed_lattice_edges_form_single_cycle(hex7):
    alpha = frobenius_alpha(hex7).alpha
    level = fixed_lattice(alpha, 2, lattice_tau(alpha))
    nxt = {source: target for source, target, _ in level.edges}
    seen, i = set(), 0
    while i not in seen:
        seen.add(i)
        i = nxt[i]
    assert len(seen) == 39


def test_fixed_lattice_cap(square5):
    alpha = frobenius_alpha(square5).alpha
    with pytest.raises(TooManyPoints):
        fixed_lattice(alpha, 4, lattice_tau(alpha), max_points=100)


def _random_unimodular(rng: random.Random) -> Matrix:
    U = Matrix.eye(2)
    for _ in range(rng.randint(1, 6)):
        shear = rng.randint(-4, 4)
        U = U * (Matrix([[1, shear], [0, 1]]) if rng.random() < 0.5 else Matrix([[1, 0], [shear, 1]]))
    if rng.random() < 0.5:
        U = Matrix([[0, 1], [1, 0]]) * U
    return U


@pytest.mark.parametrize("seed", range(10))
def test_snf_invariant_under_unimodular_change_of_basis(seed):
    rng = random.Random(seed)
    for _ in range(20):
        M = Matrix([[rng.randint(-60, 60) for _ in range(2)] for _ in range(2)])
        if M.det() == 0:
            continue
        snf = snf_2x2(tuple(tuple(int(v) for v in M.row(i)) for i in range(2)))
        N = _random_unimodular(rng) * M * _random_unimodular(rng)
        moved = snf_2x2(tuple(tuple(int(v) for v in N.row(i)) for i in range(2)))
        assert (moved.d1, moved.d2) == (snf.d1, snf.d2)
        assert snf.d1 > 0 and snf.d2 % snf.d1 == 0
        assert snf.d1 * snf.d2 == abs(M.det())


def test_hasse_violation_is_a_contract_violation(square5, monkeypatch):
    monkeypatch.setattr("eclift.cm_order.count_points", lambda curve, n, limit=None: 0)
    with pytest.raises(ContractViolation) as info:
        frobenius_alpha(square5)
    assert info.value.contract == "cm_order.frobenius_alpha"


def test_level_structure_checks_smith_form(square5, monkeypatch):
    identity = ((1, 0), (0, 1))
    monkeypatch.setattr("eclift.cm_order.snf_2x2", lambda M: SmithForm(1, 1, identity, identity))
    with pytest.raises(ContractViolation) as info:
        level_structure(frobenius_alpha(square5).alpha, 2)
    assert info.value.contract == "cm_order.level_structure"
