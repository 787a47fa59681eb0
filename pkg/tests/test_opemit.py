import json
import re
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbo.exactfield import GaussRational
from sbo.fsystem import SymbolMap, assemble_psi
from sbo.odesolver import closed_solution
from sbo.opemit import (
    DiffOperator, MalformedOperatorError, PolySection, apply_operator, build_sbo, c_tilde_operator, dual_operator,
    emit, emit_latex, order, parse_operator, symbol_to_operator,
)
from sbo.polyalg import Q2, ZETA1, ZETA3, TriPoly, zeta_plus

X1, X2, X3 = TriPoly.var(0), TriPoly.var(1), TriPoly.var(2)
lams = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def _squash(s: str) -> str:
    return re.sub(r"[\s{}]", "", s)


def test_c_tilde_operator_examples():
    lam = Fraction(2, 5)
    assert c_tilde_operator(lam, lam).symbols == {0: TriPoly.constant(1)}
    assert c_tilde_operator(lam, lam + 1).symbols == {0: ZETA3.scale(2)}
    # nu = lam + 2: 2 lam d3^2 + Laplacian
    assert c_tilde_operator(lam, lam + 2).symbols == {0: (ZETA3 * ZETA3).scale(2 * lam) + Q2}
    for bad in (lam - 1, lam + Fraction(1, 2)):
        with pytest.raises(ValueError):
            c_tilde_operator(lam, bad)


def test_n1_operators_by_hand():
    lam = Fraction(1, 3)
    zp, zm = zeta_plus(1), zeta_plus(-1)
    # a = 0: restriction onto u_0 (m = 1) or u_2 (m = -1)
    assert build_sbo(lam, lam, 1, 1).symbols == {0: TriPoly.constant(1)}
    assert build_sbo(lam, lam, 1, -1).symbols == {2: TriPoly.constant(1)}
    # a = 1: lam C~_{lam+1,lam+2} (x) u0 + 2 gamma(lam-1,1) d/dzbar (x) u1; the u2 term has negative degree
    assert build_sbo(lam, lam + 1, 1, 1).symbols == {0: ZETA3.scale(2 * lam), 1: zp}
    # a = 2: gamma(lam-1, 2) = lam, 2 d/dzbar = d1 + i d2 and C~_{lam+1,lam+3} = 2(lam+1) d3^2 + Laplacian
    assert build_sbo(lam, lam + 2, 1, 1).symbols == {
        0: ((ZETA3 * ZETA3).scale(2 * (lam + 1)) + Q2).scale(lam),
        1: (ZETA3 * zp).scale(2 * lam),
        2: zp * zp,
    }
    assert build_sbo(lam, lam + 2, 1, -1).symbols == {
        0: zm * zm,
        1: (ZETA3 * zm).scale(-2 * lam),
        2: ((ZETA3 * ZETA3).scale(2 * (lam + 1)) + Q2).scale(lam),
    }


def test_n1_latex():
    lam = Fraction(1, 3)
    got = emit_latex(build_sbo(lam, lam + 1, 1, 1))
    want = (r"\mathrm{Rest}_{x_3=0} \circ \frac{2}{3} \frac{\partial}{\partial x_3} \otimes u_0^\vee"
            r" + \mathrm{Rest}_{x_3=0} \circ 2 \frac{\partial}{\partial \overline{z}} \otimes u_1^\vee")
    assert _squash(got) == _squash(want)
    got = emit_latex(build_sbo(lam, lam, 1, -1))
    assert _squash(got) == _squash(r"\mathrm{Rest}_{x_3=0} \otimes u_2^\vee")
    got = emit_latex(build_sbo(lam, lam + 2, 1, -1))
    assert r"4 \frac{\partial^{2}}{\partial z^{2}} \otimes u_{0}^\vee" in got
    assert r"\Delta_{\mathbb{R}^2}" in got and " + -" not in got and r"\circ -" not in got
    assert r" - \mathrm{Rest}_{x_3=0} \circ \frac{4}{3}" in got
    assert emit_latex(DiffOperator(1, {})) == "0"


def test_build_sbo_rejects_bad_parameters():
    with pytest.raises(ValueError):
        build_sbo(1, Fraction(3, 2), 1, 1)
    with pytest.raises(ValueError):
        build_sbo(1, 3, 2, 1)


@settings(max_examples=40, deadline=None)
@given(lams, st.integers(0, 6), st.integers(0, 3))
def test_order_equals_nu_minus_lambda(lam, a, N):
    for m in (N, -N):
        D = build_sbo(lam, lam + a, N, m)
        if D.is_zero():
            D = build_sbo(lam, lam + a, N, m, renormalized=True)
        assert order(D) == a


@settings(max_examples=40, deadline=None)
@given(lams, st.integers(0, 5), st.integers(0, 2))
def test_dual_operator_swaps_m(lam, a, N):
    plus, minus = build_sbo(lam, lam + a, N, N), build_sbo(lam, lam + a, N, -N)
    assert dual_operator(plus) == minus
    assert dual_operator(minus) == plus


def test_symbol_to_operator_matches_build_sbo():
    lam = Fraction(3, 7)
    for N, a in ((1, 2), (2, 3), (0, 4)):
        psi = assemble_psi(lam, a, N, N, "+", closed_solution(lam, a, N).entries)
        S, D = symbol_to_operator(lam, lam + a, psi), build_sbo(lam, lam + a, N, N)
        ratio = {}
        for s in D.symbols:
            e, c = next(iter(D.symbols[s].coeffs.items()))
            ratio[s] = S.symbols[s].coeff(e) / c
        [r] = set(ratio.values())
        assert S == D.scale(r)
    with pytest.raises(ValueError):
        symbol_to_operator(lam, lam + 1, SymbolMap(0, (ZETA1 * ZETA1,)))


def test_apply_operator_examples():
    lam = Fraction(1, 3)
    D = build_sbo(lam, lam + 1, 1, 1)  # 2/3 d3 (x) u0 + (d1 + i d2) (x) u1
    f = PolySection(1, (X3, X1, TriPoly()))
    assert apply_operator(D, f) == TriPoly.constant(Fraction(5, 3))
    f = PolySection(1, (X3 * X3 + X1, X2 * X3, X1))
    # 2/3 * 2 x3 + i x3, then x3 = 0
    assert apply_operator(D, f).is_zero()
    D0 = c_tilde_operator(lam, lam + 2)
    assert apply_operator(D0, PolySection(0, (X1 * X1 + X3 * X3,))) == TriPoly.constant(2 + 4 * lam)
    with pytest.raises(ValueError):
        apply_operator(D0, f)


def test_apply_operator_is_linear():
    lam = Fraction(-2, 3)
    D = build_sbo(lam, lam + 3, 2, -2)
    f = PolySection(2, (X1 ** 3, X2 * X3 * X3, X3 ** 3, X1 * X2 * X3, X2 ** 3 + X3))
    g = PolySection(2, (X3 ** 3, X1 ** 2 * X3, X2, X1 * X1 * X2, X3 * X3 * X1))
    c = GaussRational(2, -1)
    fg = PolySection(2, tuple(p.scale(c) + q for p, q in zip(f.components, g.components)))
    assert apply_operator(D, fg) == apply_operator(D, f).scale(c) + apply_operator(D, g)


@settings(max_examples=30, deadline=None)
@given(lams, st.integers(0, 4), st.integers(0, 2), st.sampled_from([1, -1]))
def test_operator_json_round_trip(lam, a, N, sign):
    D = build_sbo(lam, lam + a, N, sign * N)
    assert DiffOperator.from_json(D.to_json()) == D
    assert parse_operator(emit(D)) == D


def test_section_json_round_trip():
    f = PolySection(1, (X1, X2 * X3, TriPoly()))
    assert PolySection.from_json(json.loads(json.dumps(f.to_json()))) == f
    with pytest.raises(ValueError):
        PolySection(1, (X1,))


def test_malformed_operator_json():
    for text in ("{", "[]", '{"N": 1}', '{"N": 1, "terms": [{"coef": "1", "orders": [1, 0], "covector": 0}]}',
                 '{"N": 1, "terms": [{"coef": "1", "orders": [0, 0, 0], "covector": 5}]}',
                 '{"N": 1, "terms": [{"orders": [0, 0, 0], "covector": 0}]}'):
        with pytest.raises(MalformedOperatorError):
            parse_operator(text)
    with pytest.raises(ValueError):
        emit(build_sbo(1, 1, 0, 0), "pdf")
