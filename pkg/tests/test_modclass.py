import math
from fractions import Fraction

import pytest

from eclift.errors import NoFeasibleClass
from eclift.modclass import (
    apply_exact, apply_transform, canonical, compose, find_embedding_class, reduce_exact, reduce_to_fundamental,
)

SQRT3 = math.sqrt(3)


@pytest.mark.parametrize("tau, expected", [
    (1j, 1j),
    (complex(3.2, 1.0), complex(0.2, 1.0)),
    (0.5j, 2j),
    (complex(-2.5, SQRT3 / 2), complex(0.5, SQRT3 / 2)),
    (complex(-0.5, SQRT3 / 2), complex(0.5, SQRT3 / 2)),
    (complex(0.1, 0.3), None),
])
def test_reduce_to_fundamental(tau, expected):
    red = reduce_to_fundamental(tau)
    z = red.tau
    assert -0.5 < z.real <= 0.5 + 1e-12
    assert abs(z) >= 1 - 1e-12
    assert apply_transform(red.transform, tau) == pytest.approx(z, abs=1e-12)
    a, b, c, d = red.transform
    assert a * d - b * c == 1
    if expected is not None:
        assert z == pytest.approx(expected, abs=1e-12)


def test_reduce_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        reduce_to_fundamental(complex(0.2, -1))


def test_reduce_exact_matches_float():
    red = reduce_exact(Fraction(-5, 2), Fraction(3, 4))
    assert (red.re, red.im2) == (Fraction(1, 2), Fraction(3, 4))
    assert apply_exact(red.transform, Fraction(-5, 2), Fraction(3, 4)) == (red.re, red.im2)


def test_compose_and_canonical():
    S, T = (0, -1, 1, 0), (1, 1, 0, 1)
    assert compose(S, S) == (-1, 0, 0, -1)
    assert canonical(compose(S, S)) == (1, 0, 0, 1)
    assert compose(T, T) == (1, 2, 0, 1)


def test_square_lattice_reaches_clifford_circle():
    cls = find_embedding_class(1j)
    assert cls.tau_prime == pytest.approx(complex(0.5, 0.5))
    assert cls.circle_flag
    assert cls.a_star == pytest.approx(2 * math.pi)
    assert cls.l_star == pytest.approx(2 * math.pi)


def test_sqrt2_class():
    cls = find_embedding_class(complex(0, math.sqrt(2)), exact=(Fraction(0), Fraction(2)))
    assert cls.circle_flag
    assert not cls.mirrored
    assert (cls.re_exact, cls.im2_exact) == (Fraction(1, 3), Fraction(2, 9))
    assert cls.a_star == pytest.approx(4 * math.pi / 3)


@pytest.mark.parametrize("im", [1.0, math.sqrt(2), math.sqrt(7), 2.5, math.sqrt(11)])
def test_imaginary_axis_ties_resolve_unmirrored(im):
    tau = complex(0, im)
    cls = find_embedding_class(tau)
    assert not cls.mirrored
    # mirroring fixes tau, so the mirrored candidate carries the same matrix and tau'
    assert apply_transform(cls.transform, tau, True) == pytest.approx(cls.tau_prime)


def test_hexagonal_class_is_itself():
    cls = find_embedding_class(complex(0.5, SQRT3 / 2))
    assert cls.tau_prime == pytest.approx(complex(0.5, SQRT3 / 2))
    assert not cls.circle_flag
    assert cls.a_star == pytest.approx(2 * math.pi)
    assert cls.l_star == pytest.approx(2 * math.pi * SQRT3)


def test_sqrt7_class_is_circle():
    cls = find_embedding_class(complex(0, math.sqrt(7)), exact=(Fraction(0), Fraction(7)))
    assert cls.circle_flag
    assert (cls.re_exact, cls.im2_exact) == (Fraction(1, 8), Fraction(7, 64))


def test_selected_class_is_feasible_and_equivalent():
    tau = complex(0.5, math.sqrt(11) / 2)
    cls = find_embedding_class(tau)
    re, im = cls.tau_prime.real, cls.tau_prime.imag
    assert 0 < re <= 0.5
    assert im * im >= re * (1 - re) - 1e-12
    assert apply_transform(cls.transform, tau, cls.mirrored) == pytest.approx(cls.tau_prime)
    assert cls.l_star ** 2 >= cls.a_star * (4 * math.pi - cls.a_star) - 1e-9


def test_selection_is_deterministic():
    assert find_embedding_class(complex(0.2, 1.3)) == find_embedding_class(complex(0.2, 1.3))


def test_no_feasible_class_with_tiny_bound():
    with pytest.raises(NoFeasibleClass):
        find_embedding_class(complex(0, 3.0), entry_bound=0)
