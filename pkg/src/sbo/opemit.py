"""Differential operators D_{lambda,nu}^{N,+-N}: construction, application, serialization.

An operator is stored in real partials d/dx1, d/dx2, d/dx3.  The complex
derivatives only appear when printing: (d1 + i d2) = 2 d/dzbar.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .exactfield import ONE, GaussRational, coeff_A
from .fsystem import SymbolMap, psi_degree, rotation_generator
from .gegenbauer import ctilde
from .polyalg import Q2, ZETA3, ParityGateError, TriPoly, divide_exact, t_inverse, zeta_plus

Orders = tuple[int, int, int]


class MalformedOperatorError(ValueError):
    pass


def _natural_gap(lam, nu) -> int:
    diff = Fraction(nu) - Fraction(lam)
    if diff.denominator != 1 or diff < 0:
        raise ValueError(f"nu - lambda = {diff} is not a natural number")
    return int(diff)


@dataclass(frozen=True)
class DiffOperator:
    """sum of coefficient * d^orders (.)_{covector}, optionally followed by x3 = 0.

    `symbols` maps a covector index to the TriPoly symbol of the scalar operator
    acting on that component (zeta_j standing for d/dx_j).
    """

    big_n: int
    symbols: dict = field(default_factory=dict)
    restriction: bool = True

    def __post_init__(self):
        clean = {}
        for s, p in self.symbols.items():
            if not 0 <= s <= 2 * self.big_n:
                raise MalformedOperatorError(f"covector index {s} outside 0..{2 * self.big_n}")
            if not p.is_zero():
                clean[int(s)] = p
        object.__setattr__(self, "symbols", dict(sorted(clean.items())))

    @staticmethod
    def from_terms(big_n: int, terms, restriction: bool = True) -> "DiffOperator":
        symbols: dict[int, TriPoly] = {}
        for coef, orders, cov in terms:
            mono = TriPoly.monomial(tuple(orders), coef)
            symbols[cov] = symbols.get(cov, TriPoly()) + mono
        return DiffOperator(big_n, symbols, restriction)

    @property
    def terms(self) -> list[tuple[GaussRational, Orders, int]]:
        out = []
        for s, p in self.symbols.items():
            for e, c in sorted(p.coeffs.items(), reverse=True):
                out.append((c, e, s))
        return out

    def is_zero(self) -> bool:
        return not self.symbols

    def scale(self, c) -> "DiffOperator":
        return DiffOperator(self.big_n, {s: p.scale(c) for s, p in self.symbols.items()}, self.restriction)

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        if self.big_n != other.big_n or self.restriction != other.restriction:
            raise ValueError("operators act between different spaces")
        out = dict(self.symbols)
        for s, p in other.symbols.items():
            out[s] = out[s] + p if s in out else p
        return DiffOperator(self.big_n, out, self.restriction)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return (self.big_n, self.restriction, self.symbols) == (other.big_n, other.restriction, other.symbols)

    def __hash__(self):
        return hash((self.big_n, self.restriction, tuple(self.symbols.items())))

    def to_json(self) -> dict:
        return {
            "N": self.big_n,
            "restriction": self.restriction,
            "terms": [{"coef": c.to_json(), "orders": list(e), "covector": s} for c, e, s in self.terms],
        }

    @staticmethod
    def from_json(obj) -> "DiffOperator":
        if not isinstance(obj, dict) or "N" not in obj or "terms" not in obj:
            raise MalformedOperatorError("operator JSON needs keys 'N' and 'terms'")
        try:
            terms = []
            for t in obj["terms"]:
                orders = tuple(int(x) for x in t["orders"])
                if len(orders) != 3 or min(orders) < 0:
                    raise MalformedOperatorError(f"bad orders {t['orders']!r}")
                terms.append((GaussRational.from_json(t["coef"]), orders, int(t["covector"])))
            return DiffOperator.from_terms(int(obj["N"]), terms, bool(obj.get("restriction", True)))
        except (KeyError, TypeError) as exc:
            raise MalformedOperatorError(f"malformed operator term: {exc}") from exc


@dataclass(frozen=True)
class PolySection:
    big_n: int
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) != 2 * self.big_n + 1:
            raise ValueError(f"expected {2 * self.big_n + 1} components, got {len(comps)}")
        object.__setattr__(self, "components", comps)

    def to_json(self) -> dict:
        return {"N": self.big_n, "components": [c.to_json() for c in self.components]}

    @staticmethod
    def from_json(obj) -> "PolySection":
        if not isinstance(obj, dict) or "N" not in obj or "components" not in obj:
            raise ValueError("section JSON needs keys 'N' and 'components'")
        return PolySection(int(obj["N"]), tuple(TriPoly.from_json(c) for c in obj["components"]))


def order(D: DiffOperator) -> int:
    """Total order; -1 for the zero operator."""
    return max((sum(e) for _, e, _ in D.terms), default=-1)


# -- construction ------------------------------------------------------------------


def _ctilde_symbol(mu: Fraction, ell: int) -> TriPoly:
    """(I_ell C~_ell^mu)(-(zeta1^2+zeta2^2), zeta3): z^(ell-2k) -> (-Q2)^k zeta3^(ell-2k)."""
    if ell < 0:
        return TriPoly()
    out = TriPoly()
    minus_q = -Q2
    for d, c in ctilde(mu, ell, variable="z").coeffs.items():
        out = out + (minus_q ** ((ell - d) // 2) * ZETA3 ** d).scale(c)
    return out


def c_tilde_operator(lam, nu) -> DiffOperator:
    """Rest_{x3=0} o (I C~_{nu-lam}^{lam-1})(-Laplacian_{R^2}, d/dx3), acting on a scalar."""
    lam = Fraction(lam)
    ell = _natural_gap(lam, nu)
    return DiffOperator(0, {0: _ctilde_symbol(lam - 1, ell)})


def build_sbo(lam, nu, N: int, m: int, renormalized: bool = False) -> DiffOperator:
    """D^{N,N} = sum_k A_k C~_{lam+N, nu+N-k} (d1 + i d2)^k (x) u_k^v, and
    D^{N,-N} = sum_k (-1)^k A_k C~_{lam+N, nu+N-k} (d1 - i d2)^k (x) u_{2N-k}^v."""
    lam = Fraction(lam)
    a = _natural_gap(lam, nu)
    if N < 0 or abs(m) != N:
        raise ValueError("build_sbo needs m = +-N")
    sign = 1 if m >= 0 else -1
    symbols = {}
    for k in range(2 * N + 1):
        if a - k < 0:
            continue
        A = coeff_A(lam, a, N, k, renormalized=renormalized)
        if A == 0:
            continue
        coef = A if sign > 0 else A * (-1) ** k
        sym = (_ctilde_symbol(lam + N - 1, a - k) * zeta_plus(sign) ** k).scale(coef)
        symbols[k if sign > 0 else 2 * N - k] = sym
    return DiffOperator(N, symbols)


def dual_operator(D: DiffOperator) -> DiffOperator:
    """Covector s -> (-1)^s covector 2N-s together with i -> -i."""
    N = D.big_n
    return DiffOperator(N, {2 * N - s: p.conjugate_coeffs().scale((-1) ** s) for s, p in D.symbols.items()},
                        D.restriction)


def symbol_to_operator(lam, nu, psi: SymbolMap) -> DiffOperator:
    """zeta_j -> d/dx_j, component s paired with u_s^v, followed by x3 = 0."""
    a = _natural_gap(lam, nu)
    deg = psi_degree(psi)
    if deg is not None and deg != a:
        raise ValueError(f"symbol has degree {deg}, expected {a}")
    return DiffOperator(psi.big_n, {s: p for s, p in enumerate(psi.components)})


def apply_operator(D: DiffOperator, f: PolySection) -> TriPoly:
    if f.big_n != D.big_n:
        raise ValueError(f"section has {2 * f.big_n + 1} components, operator expects {2 * D.big_n + 1}")
    out = TriPoly()
    for c, (d1, d2, d3), s in D.terms:
        g = f.components[s]
        if g.is_zero():
            continue
        out = out + g.diff(0, d1).diff(1, d2).diff(2, d3).scale(c)
    return out.set_zero(2) if D.restriction else out


# -- emission ----------------------------------------------------------------------


def _latex_scalar(c: GaussRational) -> str:
    def frac(x: Fraction) -> str:
        if x.denominator == 1:
            return str(x.numerator)
        sign = "-" if x < 0 else ""
        return f"{sign}\\frac{{{abs(x.numerator)}}}{{{x.denominator}}}"

    if c.im == 0:
        return frac(c.re)
    if c.re == 0:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return frac(c.im) + "i"
    return f"\\left({frac(c.re)} {'+' if c.im > 0 else '-'} {frac(abs(c.im))}i\\right)"


def _with_coef(c: GaussRational, body: str) -> str:
    if c == ONE:
        return body or "1"
    if c == -ONE:
        return "-" + (body or "1")
    s = _latex_scalar(c)
    return f"{s} {body}".strip()


def _join(pieces: list[str]) -> str:
    out = pieces[0]
    for piece in pieces[1:]:
        out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return out


def _partial(var: str, k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return f"\\frac{{\\partial}}{{\\partial {var}}}"
    return f"\\frac{{\\partial^{{{k}}}}}{{\\partial {var}^{{{k}}}}}"


def _raw_latex(p: TriPoly) -> str:
    pieces = []
    for e, c in sorted(p.coeffs.items(), reverse=True):
        body = " ".join(x for x in (_partial("x_1", e[0]), _partial("x_2", e[1]), _partial("x_3", e[2])) if x)
        pieces.append(_with_coef(c, body))
    return _join(pieces)


def _weight(p: TriPoly) -> int | None:
    """SO(2)-weight w with (zeta1 d2 - zeta2 d1) p = i w p, if p has one."""
    rot = rotation_generator(p)
    e, c = next(iter(p.coeffs.items()))
    ratio = rot.coeff(e) / c
    if not ratio.re == 0 or ratio.im.denominator != 1:
        return None
    w = int(ratio.im)
    return w if rot == p.scale(GaussRational(0, w)) else None


def _grouped_latex(p: TriPoly) -> str | None:
    """c * P(Laplacian, d/dx3) * (2 d/dzbar)^k, or the d/dz analogue, when p has that shape."""
    if not p.is_homogeneous():
        return None
    w = _weight(p)
    if w is None:
        return None
    q = p
    root = GaussRational(0, 1 if w > 0 else -1)
    for _ in range(abs(w)):
        try:
            q = divide_exact(q, root)
        except ValueError:
            return None
    try:
        g = t_inverse(q.total_degree(), q)
    except ParityGateError:
        return None
    b = q.total_degree()
    inner = []
    for d, c in sorted(g.coeffs.items(), reverse=True):
        j = (b - d) // 2
        lap = "" if j == 0 else ("\\Delta_{\\mathbb{R}^2}" if j == 1 else f"\\Delta_{{\\mathbb{{R}}^2}}^{{{j}}}")
        body = " ".join(x for x in (lap, _partial("x_3", d)) if x)
        inner.append((c, body))
    k = abs(w)
    zvar = "\\overline{z}" if w > 0 else "z"
    scale = GaussRational(2 ** k)
    dz = _partial(zvar, k)
    if len(inner) == 1:
        c, body = inner[0]
        return _with_coef(c * scale, " ".join(x for x in (body, dz) if x))
    poly = _join([_with_coef(c, body) for c, body in inner])
    return _with_coef(scale, " ".join(x for x in (f"\\left({poly}\\right)", dz) if x))


def emit_latex(D: DiffOperator) -> str:
    if D.is_zero():
        return "0"
    pieces = []
    for s, p in D.symbols.items():
        body = _grouped_latex(p)
        if body is None:
            body = _raw_latex(p)
            body = f"\\left({body}\\right)" if len(p.coeffs) > 1 else body
        rest = "\\mathrm{Rest}_{x_3=0}" if D.restriction else ""
        if body == "1":
            op = rest or "1"
        elif body == "-1":
            op = "-" + (rest or "1")
        elif rest and body.startswith("-"):
            op = f"-{rest} \\circ {body[1:].lstrip()}"
        else:
            op = f"{rest} \\circ {body}" if rest else body
        pieces.append(f"{op} \\otimes u_{{{s}}}^\\vee")
    return _join(pieces)


def emit(D: DiffOperator, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(D.to_json(), sort_keys=True)
    if fmt == "latex":
        return emit_latex(D)
    raise ValueError(f"unknown format {fmt!r}")


def parse_operator(text: str) -> DiffOperator:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedOperatorError(f"operator is not valid JSON: {exc}") from exc
    return DiffOperator.from_json(obj)
