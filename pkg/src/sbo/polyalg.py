"""Exact polynomials over Q(i).

UniPoly is a polynomial in t with a declared parity; TriPoly is a polynomial
in (zeta1, zeta2, zeta3), also used for polynomials in (x1, x2, x3).
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Mapping

from .exactfield import ZERO, GaussRational, Number

PARITIES = ("even", "odd")


class ParityGateError(ValueError):
    """A polynomial is not an element of the requested Pol_b[t]_even."""


def _gr(x) -> GaussRational:
    return GaussRational.coerce(x)


def _combine_parity(p: str | None, q: str | None) -> str | None:
    if p is None or q is None:
        return None
    return "even" if p == q else "odd"


class UniPoly:
    """Polynomial in t with coefficients in Q(i) and an optional declared parity."""

    __slots__ = ("coeffs", "parity")

    def __init__(self, coeffs: Mapping[int, Number] | None = None, parity: str | None = None):
        if parity is not None and parity not in PARITIES:
            raise ValueError(f"parity must be 'even', 'odd' or None, got {parity!r}")
        clean: dict[int, GaussRational] = {}
        for deg, c in (coeffs or {}).items():
            if not isinstance(deg, int) or deg < 0:
                raise ValueError(f"invalid degree {deg!r}")
            c = _gr(c)
            if not c.is_zero():
                clean[deg] = c
        if parity is not None:
            want = 0 if parity == "even" else 1
            bad = [d for d in clean if d % 2 != want]
            if bad:
                raise ParityGateError(f"declared {parity} polynomial has degrees {sorted(bad)}")
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "parity", parity)

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    # construction
    @staticmethod
    def zero(parity: str | None = None) -> "UniPoly":
        return UniPoly({}, parity)

    @staticmethod
    def constant(c: Number) -> "UniPoly":
        return UniPoly({0: c}, "even")

    @staticmethod
    def monomial(deg: int, c: Number = 1) -> "UniPoly":
        return UniPoly({deg: c}, PARITIES[deg % 2])

    @staticmethod
    def t() -> "UniPoly":
        return UniPoly.monomial(1)

    # inspection
    def degree(self) -> int:
        """Degree, or -1 for the zero polynomial."""
        return max(self.coeffs) if self.coeffs else -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, deg: int) -> GaussRational:
        return self.coeffs.get(deg, ZERO)

    def actual_parity(self) -> str | None:
        """Parity read off the stored degrees (None if mixed or zero)."""
        pars = {d % 2 for d in self.coeffs}
        if len(pars) != 1:
            return None
        return PARITIES[pars.pop()]

    def with_parity(self, parity: str | None) -> "UniPoly":
        return UniPoly(self.coeffs, parity)

    def in_pol_even(self, b: int) -> bool:
        """Membership in Pol_b[t]_even = span{t^(b-2j)}; the zero space for b < 0."""
        if self.is_zero():
            return True
        if b < 0:
            return False
        return all(d <= b and (b - d) % 2 == 0 for d in self.coeffs)

    def check_pol_even(self, b: int) -> "UniPoly":
        if not self.in_pol_even(b):
            raise ParityGateError(f"polynomial of degrees {sorted(self.coeffs)} is not in Pol_{b}[t]_even")
        if self.parity is not None and b >= 0 and not self.is_zero() and self.parity != PARITIES[b % 2]:
            raise ParityGateError(f"declared parity {self.parity} does not match b={b}")
        return self

    # arithmetic
    def _sum_parity(self, other: "UniPoly") -> str | None:
        if self.is_zero() and self.parity is None:
            return other.parity
        if other.is_zero() and other.parity is None:
            return self.parity
        if self.parity == other.parity:
            return self.parity
        return None

    def __add__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly.constant(other)
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, ZERO) + c
        return UniPoly(out, self._sum_parity(other))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly({d: -c for d, c in self.coeffs.items()}, self.parity)

    def __sub__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Number) -> "UniPoly":
        c = _gr(c)
        if c.is_zero():
            return UniPoly({}, self.parity)
        return UniPoly({d: v * c for d, v in self.coeffs.items()}, self.parity)

    def __mul__(self, other):
        if isinstance(other, UniPoly):
            out: dict[int, GaussRational] = {}
            for d1, c1 in self.coeffs.items():
                for d2, c2 in other.coeffs.items():
                    out[d1 + d2] = out.get(d1 + d2, ZERO) + c1 * c2
            return UniPoly(out, _combine_parity(self.parity, other.parity))
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, GaussRational)):
            return self == UniPoly.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def substitute_scale(self, c: Number) -> "UniPoly":
        """p(c*t)."""
        c = _gr(c)
        return UniPoly({d: v * c ** d for d, v in self.coeffs.items()}, self.parity)

    # calculus
    def ddt(self) -> "UniPoly":
        out = {d - 1: c * d for d, c in self.coeffs.items() if d > 0}
        par = None if self.parity is None else PARITIES[1 - PARITIES.index(self.parity)]
        return UniPoly(out, par)

    def euler_t(self) -> "UniPoly":
        return UniPoly({d: c * d for d, c in self.coeffs.items()}, self.parity)

    def integrate(self) -> "UniPoly":
        """Antiderivative with zero constant term."""
        out = {d + 1: c / (d + 1) for d, c in self.coeffs.items()}
        par = None if self.parity is None else PARITIES[1 - PARITIES.index(self.parity)]
        return UniPoly(out, par)

    # io
    def __repr__(self):
        if not self.coeffs:
            return "UniPoly(0)"
        terms = [f"({c})*t^{d}" for d, c in sorted(self.coeffs.items(), reverse=True)]
        return "UniPoly(" + " + ".join(terms) + ")"

    def to_json(self) -> list:
        return [[d, c.to_json()] for d, c in sorted(self.coeffs.items(), reverse=True)]

    @staticmethod
    def from_json(obj, parity: str | None = None) -> "UniPoly":
        if not isinstance(obj, list):
            raise ValueError("UniPoly JSON must be a list of [degree, coefficient] pairs")
        out: dict[int, GaussRational] = {}
        for item in obj:
            if not isinstance(item, list) or len(item) != 2 or not isinstance(item[0], int) or isinstance(item[0], bool):
                raise ValueError(f"bad UniPoly term {item!r}")
            if item[0] in out:
                raise ValueError(f"repeated degree {item[0]}")
            out[item[0]] = GaussRational.from_json(item[1])
        return UniPoly(out, parity)


def ddt(f: UniPoly) -> UniPoly:
    return f.ddt()


def euler_t(f: UniPoly) -> UniPoly:
    return f.euler_t()


Exponent = tuple[int, int, int]


class TriPoly:
    """Polynomial in three variables with coefficients in Q(i)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Exponent, Number] | None = None):
        clean: dict[Exponent, GaussRational] = {}
        for e, c in (coeffs or {}).items():
            e = tuple(e)
            if len(e) != 3 or any((not isinstance(x, int)) or x < 0 for x in e):
                raise ValueError(f"invalid exponent {e!r}")
            c = _gr(c)
            if not c.is_zero():
                clean[e] = clean.get(e, ZERO) + c
                if clean[e].is_zero():
                    del clean[e]
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("TriPoly is immutable")

    @staticmethod
    def zero() -> "TriPoly":
        return TriPoly()

    @staticmethod
    def constant(c: Number) -> "TriPoly":
        return TriPoly({(0, 0, 0): c})

    @staticmethod
    def var(index: int) -> "TriPoly":
        e = [0, 0, 0]
        e[index] = 1
        return TriPoly({tuple(e): 1})

    @staticmethod
    def monomial(e: Exponent, c: Number = 1) -> "TriPoly":
        return TriPoly({tuple(e): c})

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, e: Exponent) -> GaussRational:
        return self.coeffs.get(tuple(e), ZERO)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=-1)

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degs = {sum(e) for e in self.coeffs}
        if not degs:
            return True
        if len(degs) != 1:
            return False
        return degree is None or degs == {degree}

    def __add__(self, other):
        if not isinstance(other, TriPoly):
            try:
                other = TriPoly.constant(other)
            except TypeError:
                return NotImplemented
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, ZERO) + c
        return TriPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return TriPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, TriPoly):
            other = TriPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Number) -> "TriPoly":
        c = _gr(c)
        if c.is_zero():
            return TriPoly()
        return TriPoly({e: v * c for e, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, TriPoly):
            out: dict[Exponent, GaussRational] = {}
            for e1, c1 in self.coeffs.items():
                for e2, c2 in other.coeffs.items():
                    e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                    out[e] = out.get(e, ZERO) + c1 * c2
            return TriPoly(out)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = TriPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, TriPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, GaussRational)):
            return self == TriPoly.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def diff(self, index: int, times: int = 1) -> "TriPoly":
        out: dict[Exponent, GaussRational] = {}
        for e, c in self.coeffs.items():
            n = e[index]
            if n < times:
                continue
            factor = 1
            for i in range(times):
                factor *= n - i
            new = list(e)
            new[index] = n - times
            out[tuple(new)] = c * factor
        return TriPoly(out)

    def flip_sign(self, index: int) -> "TriPoly":
        """Substitute var_index -> -var_index."""
        return TriPoly({e: (-c if e[index] % 2 else c) for e, c in self.coeffs.items()})

    def conjugate_coeffs(self) -> "TriPoly":
        return TriPoly({e: c.conjugate() for e, c in self.coeffs.items()})

    def set_zero(self, index: int) -> "TriPoly":
        """Restriction var_index = 0."""
        return TriPoly({e: c for e, c in self.coeffs.items() if e[index] == 0})

    def __repr__(self):
        if not self.coeffs:
            return "TriPoly(0)"
        terms = [f"({c})*z^{e}" for e, c in sorted(self.coeffs.items(), reverse=True)]
        return "TriPoly(" + " + ".join(terms) + ")"

    def to_json(self) -> list:
        return [[list(e), c.to_json()] for e, c in sorted(self.coeffs.items(), reverse=True)]

    @staticmethod
    def from_json(obj) -> "TriPoly":
        if not isinstance(obj, list):
            raise ValueError("TriPoly JSON must be a list of [[e1,e2,e3], coefficient] pairs")
        out: dict[Exponent, GaussRational] = {}
        for item in obj:
            if not isinstance(item, list) or len(item) != 2:
                raise ValueError(f"bad TriPoly term {item!r}")
            e = item[0]
            if (not isinstance(e, list) or len(e) != 3
                    or any(not isinstance(x, int) or isinstance(x, bool) or x < 0 for x in e)):
                raise ValueError(f"bad exponent {e!r}")
            if tuple(e) in out:
                raise ValueError(f"repeated exponent {e!r}")
            out[tuple(e)] = GaussRational.from_json(item[1])
        return TriPoly(out)


ZETA1 = TriPoly.var(0)
ZETA2 = TriPoly.var(1)
ZETA3 = TriPoly.var(2)
Q2 = ZETA1 * ZETA1 + ZETA2 * ZETA2


def euler_zeta(p: TriPoly) -> TriPoly:
    return TriPoly({e: c * sum(e) for e, c in p.coeffs.items()})


def laplace_zeta(p: TriPoly) -> TriPoly:
    return p.diff(0, 2) + p.diff(1, 2) + p.diff(2, 2)


def zeta_plus(sign: int = 1) -> TriPoly:
    """zeta1 + i*zeta2 (sign=+1) or zeta1 - i*zeta2 (sign=-1)."""
    return TriPoly({(1, 0, 0): 1, (0, 1, 0): GaussRational(0, sign)})


def _q2_power_terms(j: int) -> list[tuple[int, int, int]]:
    return [(2 * i, 2 * (j - i), comb(j, i)) for i in range(j + 1)]


def t_map(b: int, g: UniPoly) -> TriPoly:
    """T_b g: t^(b-2j) -> (zeta1^2+zeta2^2)^j zeta3^(b-2j)."""
    g.check_pol_even(b)
    out: dict[Exponent, GaussRational] = {}
    for d, c in g.coeffs.items():
        j = (b - d) // 2
        for e1, e2, binom in _q2_power_terms(j):
            e = (e1, e2, d)
            out[e] = out.get(e, ZERO) + c * binom
    return TriPoly(out)


def t_inverse(b: int, p: TriPoly) -> UniPoly:
    """The unique g in Pol_b[t]_even with T_b g = p."""
    if p.is_zero():
        return UniPoly.zero(PARITIES[b % 2] if b >= 0 else None)
    if b < 0 or not p.is_homogeneous(b):
        raise ParityGateError(f"polynomial is not homogeneous of degree {b}")
    by_d: dict[int, dict[tuple[int, int], GaussRational]] = {}
    for (e1, e2, e3), c in p.coeffs.items():
        by_d.setdefault(e3, {})[(e1, e2)] = c
    out: dict[int, GaussRational] = {}
    for d, part in by_d.items():
        if (b - d) % 2:
            raise ParityGateError("monomial is not a function of zeta1^2+zeta2^2 and zeta3")
        j = (b - d) // 2
        lead = part.get((2 * j, 0), ZERO)
        expected = {(e1, e2): lead * binom for e1, e2, binom in _q2_power_terms(j)}
        expected = {k: v for k, v in expected.items() if not v.is_zero()}
        if expected != part:
            raise ParityGateError("polynomial is not in the image of T_b")
        out[d] = lead
    return UniPoly(out, PARITIES[b % 2])


def divide_exact(p: TriPoly, c: Number) -> TriPoly:
    """Exact quotient of p by (zeta1 + c*zeta2); raises ValueError on a remainder."""
    c = _gr(c)
    root = TriPoly.monomial((0, 1, 0), -c)  # zeta1 = -c zeta2
    rows: dict[int, TriPoly] = {}
    for (e1, e2, e3), v in p.coeffs.items():
        rows[e1] = rows.get(e1, TriPoly()) + TriPoly.monomial((0, e2, e3), v)
    if not rows:
        return TriPoly()
    n = max(rows)
    quotient: dict[int, TriPoly] = {}
    carry = TriPoly()
    for power in range(n, 0, -1):
        carry = rows.get(power, TriPoly()) + root * carry if power != n else rows[n]
        quotient[power - 1] = carry
    remainder = rows.get(0, TriPoly()) + root * carry if n > 0 else rows.get(0, TriPoly())
    if not remainder.is_zero():
        raise ValueError("polynomial is not divisible by the linear form")
    out = TriPoly()
    for power, q in quotient.items():
        out = out + q * TriPoly.monomial((power, 0, 0))
    return out
