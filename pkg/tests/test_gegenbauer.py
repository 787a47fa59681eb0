from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import ctilde_reference
from sbo.exactfield import I, GaussRational, gamma_factor
from sbo.gegenbauer import GegenbauerSpec, ctilde, even_kernel, g_operator, gegenbauer_tilde, s_operator
from sbo.linalg import proportionality
from sbo.polyalg import UniPoly
from sbo.suites import MU_GRID, appendix_suite

mus = st.fractions(min_value=-8, max_value=8, max_denominator=6)
ells = st.integers(min_value=0, max_value=16)


def test_explicit_list():
    mu = Fraction(3, 7)
    z = {ell: ctilde(mu, ell, variable="z") for ell in range(5)}
    assert z[0] == UniPoly.constant(1)
    assert z[1] == UniPoly.monomial(1, 2)
    assert z[2] == UniPoly({2: 2 * (mu + 1), 0: -1})
    assert z[3] == UniPoly({3: Fraction(4, 3) * (mu + 2), 1: -2})
    assert z[4] == UniPoly({4: Fraction(2, 3) * (mu + 2) * (mu + 3), 2: -2 * (mu + 2), 0: Fraction(1, 2)})


def test_imaginary_substitution():
    mu = Fraction(-5, 2)
    assert ctilde(mu, 2) == UniPoly({2: -2 * (mu + 1), 0: -1})
    assert ctilde(mu, -1).is_zero()
    assert gegenbauer_tilde(GegenbauerSpec(mu, 3), "it").parity == "odd"
    with pytest.raises(ValueError):
        gegenbauer_tilde(GegenbauerSpec(mu, 3), "w")


@pytest.mark.parametrize("mu", [Fraction(1, 3), Fraction(-5, 2), Fraction(7, 4), Fraction(-1, 2), Fraction(2, 9)])
@pytest.mark.parametrize("ell", range(0, 11))
def test_against_classical_gegenbauer(mu, ell):
    assert ctilde(mu, ell, variable="z") == UniPoly(ctilde_reference(mu, ell))


@given(mus, ells)
def test_leading_term_never_vanishes(mu, ell):
    c = ctilde(mu, ell, variable="z")
    half = ell // 2
    # lowest-degree coefficient: (-1)^[l/2] / [l/2]! * 2^(l - 2[l/2])
    assert c.coeff(ell - 2 * half) == GaussRational(Fraction((-1) ** half * 2 ** (ell - 2 * half), factorial(half)))


def test_operator_examples():
    assert s_operator(GegenbauerSpec(Fraction(2), 0), UniPoly.constant(1)).is_zero()
    assert s_operator(GegenbauerSpec(Fraction(0), 2), UniPoly.monomial(2)) == UniPoly.constant(-2)
    assert g_operator(GegenbauerSpec(Fraction(5), 0), UniPoly.constant(1)).is_zero()
    # G_2^1 z^3 = (1-z^2) 6z - 3 z 3z^2 + 2*4 z^3 = 6z - 7z^3
    assert g_operator(GegenbauerSpec(Fraction(1), 2), UniPoly.monomial(3)) == UniPoly({1: 6, 3: -7})


@given(mus, ells)
def test_gegenbauer_solves_both_forms(mu, ell):
    spec = GegenbauerSpec(mu, ell)
    assert g_operator(spec, ctilde(mu, ell, variable="z")).is_zero()
    assert s_operator(spec, ctilde(mu, ell)).is_zero()


@given(mus, st.integers(min_value=-3, max_value=12), st.integers(min_value=0, max_value=8))
def test_s_equals_g_under_z_equals_it(mu, ell, n):
    spec = GegenbauerSpec(mu, ell)
    f = UniPoly.monomial(n)
    assert s_operator(spec, f.substitute_scale(I)) == g_operator(spec, f).substitute_scale(I)


def test_even_kernel_examples():
    basis = even_kernel(GegenbauerSpec(Fraction(1, 2), 4))
    assert len(basis) == 1 and proportionality(basis, [ctilde(Fraction(1, 2), 4, variable="z")]) is not None
    basis = even_kernel(GegenbauerSpec(Fraction(-1), 2))
    assert len(basis) == 1 and proportionality(basis, [UniPoly.constant(-1)]) is not None
    basis = even_kernel(GegenbauerSpec(Fraction(4, 9), 0))
    assert len(basis) == 1 and proportionality(basis, [UniPoly.constant(1)]) is not None
    with pytest.raises(ValueError):
        even_kernel(GegenbauerSpec(Fraction(1), -1))


@given(mus, ells)
def test_derivative_identity(mu, ell):
    assert ctilde(mu, ell).ddt() == ctilde(mu + 1, ell - 1).scale(2 * I * gamma_factor(mu, ell))


@given(mus, ells)
def test_euler_identity_holds_with_factor_two(mu, ell):
    c = ctilde(mu, ell)
    assert c.euler_t() - c.scale(ell) == ctilde(mu + 1, ell - 2).scale(2)


def test_euler_identity_without_factor_fails_from_ell_two():
    # l = 2: (theta - 2)(-2(mu+1)t^2 - 1) = 2, while C~_0^(mu+1) = 1
    mu = Fraction(1, 3)
    c = ctilde(mu, 2)
    assert c.euler_t() - c.scale(2) == UniPoly.constant(2)
    assert ctilde(mu + 1, 0) == UniPoly.constant(1)
    for ell in (0, 1):
        c = ctilde(mu, ell)
        assert c.euler_t() - c.scale(ell) == ctilde(mu + 1, ell - 2)


@given(mus, ells)
def test_three_term_relation(mu, ell):
    lhs = ctilde(mu, ell).scale(mu + ell) + ctilde(mu + 1, ell - 2)
    assert lhs == ctilde(mu + 1, ell).scale(mu + (ell + 1) // 2)


def test_appendix_suite_with_corrected_euler_passes():
    res = appendix_suite(mus=MU_GRID[:5], ell_max=8, d_max=3, n_max=5, euler_factor=2)
    assert res.passed, res.failures[:5]


def test_appendix_suite_reports_the_printed_euler_identity():
    res = appendix_suite(mus=MU_GRID[:2], ell_max=4, d_max=1, n_max=2)
    assert not res.passed
    assert res.failures and all(f.startswith("euler") for f in res.failures)
