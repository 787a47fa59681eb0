"""Exact scalars: rationals, Gaussian rationals and Gamma-ratio bookkeeping.

Every Gamma ratio that appears in the operator formulas is an integer shift
Gamma(x + n) / Gamma(x), so it is evaluated as a finite product of linear
factors.  No gamma function is ever called.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

Rational = Fraction
Number = Union[int, Fraction, "GaussRational"]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


class GammaPoleError(ZeroDivisionError):
    """A reciprocal linear factor vanished: an uncancelled Gamma pole."""


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse "P/Q" (or "P") into a Fraction.  Raises ValueError otherwise."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class GaussRational:
    """An element re + i*im of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re: int | Fraction = 0, im: int | Fraction = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational is immutable")

    @staticmethod
    def coerce(x: Number) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return GaussRational(x, 0)
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussRational")

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GaussRational(self.re * other, self.im * other)
        if not isinstance(other, GaussRational):
            return NotImplemented
        return GaussRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(i)")
        return GaussRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(i)")
            return GaussRational(self.re / other, self.im / other)
        if not isinstance(other, GaussRational):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, GaussRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"GaussRational({format_rational(self.re)}, {format_rational(self.im)})"

    def __str__(self):
        if self.im == 0:
            return format_rational(self.re)
        if self.re == 0:
            return f"{format_rational(self.im)}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{format_rational(self.re)}{sign}{format_rational(abs(self.im))}*i"

    def to_json(self) -> dict:
        return {"re": format_rational(self.re), "im": format_rational(self.im)}

    @staticmethod
    def from_json(obj) -> "GaussRational":
        if isinstance(obj, dict):
            if set(obj) - {"re", "im"}:
                raise ValueError(f"unexpected keys in Gaussian rational: {sorted(obj)}")
            return GaussRational(parse_rational(obj.get("re", "0")), parse_rational(obj.get("im", "0")))
        return GaussRational(parse_rational(obj), 0)


ZERO = GaussRational(0, 0)
ONE = GaussRational(1, 0)
I = GaussRational(0, 1)


def i_power(n: int) -> GaussRational:
    """i**n for any integer n."""
    return (ONE, I, -ONE, -I)[n % 4]


# -- Gamma-ratio bookkeeping --------------------------------------------------


def gamma_factor(mu: Fraction | int, ell: int) -> Fraction:
    """gamma(mu, ell): 1 for odd ell, mu + ell/2 for even ell.

    For ell < 0 the extension gamma(mu - k, ell + 2k) gives the same value for
    every admissible k, so the parity formula is used for all integers.
    """
    if ell % 2:
        return Fraction(1)
    return Fraction(mu) + Fraction(ell, 2)


def pochhammer_gamma_ratio(x: Fraction | int, n: int) -> Fraction:
    """Gamma(x + n) / Gamma(x) as a finite product of linear factors."""
    x = Fraction(x)
    result = Fraction(1)
    if n >= 0:
        for i in range(n):
            result *= x + i
        return result
    for i in range(1, -n + 1):
        factor = x - i
        if factor == 0:
            raise GammaPoleError(f"Gamma pole: factor x-{i} vanishes at x={x}")
        result /= factor
    return result


def _check_k(N: int, k: int) -> None:
    if N < 0 or not 0 <= k <= 2 * N:
        raise ValueError(f"k must lie in 0..2N, got k={k}, N={N}")


def coeff_A(lam: Fraction | int, a: int, N: int, k: int, renormalized: bool = False) -> Fraction:
    """The constant A_k of the operator D^{N,N}.

    Branch 0 <= a <= N divides by Gamma(lam+N-1), branch a > N divides by
    Gamma(lam+N-1+[(a-2N+1)/2]).  With ``renormalized=True`` the first branch
    is used for every a < 2N; this only differs for N < a < 2N, where the
    literal constants can share a common vanishing factor.
    """
    if a < 0:
        raise ValueError("a must be a natural number")
    _check_k(N, k)
    lam = Fraction(lam)
    base = lam + N - 1
    top = (a - k + 1) // 2
    if a <= N or (renormalized and a < 2 * N):
        return pochhammer_gamma_ratio(base, top)
    low = (a - 2 * N + 1) // 2
    return pochhammer_gamma_ratio(base + low, top - low)


def big_gamma(lam: Fraction | int, a: int, N: int, j: int, sign: str) -> Fraction:
    """Gamma_j^+ or Gamma_j^- as the displayed product of gamma factors."""
    if not 0 <= j <= N:
        raise ValueError(f"j must lie in 0..N, got {j}")
    lam = Fraction(lam)
    result = Fraction(1)
    if sign == "+":
        for ell in range(a + j - N, a):
            result *= gamma_factor(lam + N - 1, ell)
    elif sign == "-":
        for ell in range(a + j - N - 2, a - 2):
            result *= gamma_factor(lam, ell)
    else:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return result


def degenerate_lambdas(a: int, N: int) -> list[tuple[Fraction, str, int]]:
    """The values of lambda where Gamma_0^+ or Gamma_0^- vanishes.

    Returns (lambda, "+"|"-", s) triples: gamma(lam+N-1, a-s) = 0 for "+",
    gamma(lam, a-s-2) = 0 for "-", with s in 1..N and a-s even.
    """
    out = []
    for s in range(1, N + 1):
        if (a - s) % 2 == 0:
            out.append((Fraction(1 - N) - Fraction(a - s, 2), "+", s))
            out.append((Fraction(s + 2 - a, 2), "-", s))
    return out
