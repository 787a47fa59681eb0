"""Independent reference computations used by the tests.

These go through sympy (exact gamma functions, classical Gegenbauer
polynomials, falling factorials), never through the sbo implementation.
"""

from fractions import Fraction

import sympy as sp

from sbo.exactfield import GaussRational
from sbo.polyalg import UniPoly

z, t = sp.symbols("z t")


def to_fraction(x) -> Fraction:
    # exact simplification only; nsimplify guesses from floats
    x = sp.sympify(x)
    if not x.is_Rational:
        x = sp.simplify(x)
    if not x.is_Rational:
        raise ValueError(f"{x} is not rational")
    return Fraction(int(x.p), int(x.q))


def gamma_ratio(x, n) -> Fraction:
    """Gamma(x+n)/Gamma(x): simplified symbolically in y, then evaluated at y = x."""
    x = Fraction(x)
    y = sp.Symbol("y")
    expr = sp.gammasimp(sp.gamma(y + n) / sp.gamma(y))
    return to_fraction(expr.subs(y, sp.Rational(x.numerator, x.denominator)))


def ctilde_reference(mu: Fraction, ell: int) -> dict[int, Fraction]:
    """Coefficients of C~_ell^mu(z) = Gamma(mu)/Gamma(mu+[(ell+1)/2]) C_ell^mu(z), generic mu only."""
    m = sp.Rational(mu.numerator, mu.denominator)
    classical = sp.expand(sp.gegenbauer(ell, m, z))
    r = gamma_ratio(mu, (ell + 1) // 2)
    factor = sp.Rational(r.denominator, r.numerator)
    poly = sp.Poly(sp.expand(classical * factor), z)
    return {int(mon[0]): to_fraction(c) for mon, c in zip(poly.monoms(), poly.coeffs())}


def falling(x, n: int):
    return sp.ff(x, n)


def coeff_M_reference(n, k, d, s, N, a) -> Fraction:
    num = (2 ** (n - 2 * d) * sp.factorial(n - 2 * k - 1) * falling(s + n - d - 1, n - d - k)
           * falling(sp.Rational(2 * N - s + a - 2 * k, 2), n - d - k))
    den = (sp.factorial(d - k) * sp.factorial(n - 2 * d - 1) * sp.factorial(n - d - k)
           * falling(2 * N - s - 2 * k, n - 2 * k))
    return to_fraction(num / den)


def unipoly_from_sympy(expr, var=t) -> UniPoly:
    poly = sp.Poly(sp.expand(expr), var)
    out = {}
    for (deg,), c in zip(poly.monoms(), poly.coeffs()):
        re, im = sp.re(c), sp.im(c)
        out[int(deg)] = GaussRational(to_fraction(re), to_fraction(im))
    return UniPoly(out)
