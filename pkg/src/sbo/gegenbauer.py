"""Renormalized Gegenbauer polynomials and the operators S and G."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .exactfield import ZERO, GaussRational, i_power, pochhammer_gamma_ratio
from .linalg import nullspace
from .polyalg import PARITIES, UniPoly


@dataclass(frozen=True)
class GegenbauerSpec:
    mu: Fraction
    ell: int

    def __post_init__(self):
        object.__setattr__(self, "mu", Fraction(self.mu))
        if not isinstance(self.ell, int):
            raise TypeError("ell must be an integer")


def _coefficients(mu: Fraction, ell: int) -> dict[int, Fraction]:
    """Coefficients of C~_ell^mu(z) in the variable z."""
    out = {}
    half = ell // 2
    base = mu + (ell + 1) // 2
    for k in range(half + 1):
        ratio = pochhammer_gamma_ratio(base, half - k)
        c = ratio * Fraction((-1) ** k * 2 ** (ell - 2 * k), factorial(k) * factorial(ell - 2 * k))
        out[ell - 2 * k] = c
    return out


def gegenbauer_tilde(spec: GegenbauerSpec, variable: str = "z") -> UniPoly:
    """C~_ell^mu(z), or C~_ell^mu(it) as a polynomial in t for variable="it"."""
    if spec.ell < 0:
        return UniPoly.zero()
    coeffs = _coefficients(spec.mu, spec.ell)
    parity = PARITIES[spec.ell % 2]
    if variable == "z":
        return UniPoly(coeffs, parity)
    if variable == "it":
        return UniPoly({d: i_power(d) * c for d, c in coeffs.items()}, parity)
    raise ValueError(f"variable must be 'z' or 'it', got {variable!r}")


def ctilde(mu, ell: int, variable: str = "it") -> UniPoly:
    return gegenbauer_tilde(GegenbauerSpec(Fraction(mu), ell), variable)


def s_operator(spec: GegenbauerSpec, f: UniPoly) -> UniPoly:
    """S_ell^mu f = -(1+t^2) f'' - (1+2mu) t f' + ell(ell+2mu) f."""
    mu, ell = spec.mu, spec.ell
    out: dict[int, GaussRational] = {}
    for d, c in f.coeffs.items():
        diag = ell * (ell + 2 * mu) - d * (d - 1) - (1 + 2 * mu) * d
        out[d] = out.get(d, ZERO) + c * diag
        if d >= 2:
            out[d - 2] = out.get(d - 2, ZERO) - c * (d * (d - 1))
    return UniPoly(out, f.parity)


def g_operator(spec: GegenbauerSpec, f: UniPoly) -> UniPoly:
    """G_ell^mu f = (1-z^2) f'' - (2mu+1) z f' + ell(ell+2mu) f."""
    mu, ell = spec.mu, spec.ell
    out: dict[int, GaussRational] = {}
    for d, c in f.coeffs.items():
        diag = ell * (ell + 2 * mu) - d * (d - 1) - (1 + 2 * mu) * d
        out[d] = out.get(d, ZERO) + c * diag
        if d >= 2:
            out[d - 2] = out.get(d - 2, ZERO) + c * (d * (d - 1))
    return UniPoly(out, f.parity)


def even_kernel(spec: GegenbauerSpec) -> list[UniPoly]:
    """Basis of {f in Pol_ell[z]_even : G_ell^mu f = 0} by exact nullspace."""
    ell = spec.ell
    if ell < 0:
        raise ValueError("even_kernel needs ell >= 0")
    degrees = list(range(ell, -1, -2))
    parity = PARITIES[ell % 2]
    columns = [g_operator(spec, UniPoly.monomial(d)) for d in degrees]
    rows = [[col.coeff(d) for col in columns] for d in degrees]
    basis = nullspace(rows, len(degrees))
    return [UniPoly(dict(zip(degrees, vec)), parity) for vec in basis]


def s_even_kernel(spec: GegenbauerSpec) -> list[UniPoly]:
    """Basis of {g in Pol_ell[t]_even : S_ell^mu g = 0} by exact nullspace."""
    ell = spec.ell
    if ell < 0:
        raise ValueError("s_even_kernel needs ell >= 0")
    degrees = list(range(ell, -1, -2))
    parity = PARITIES[ell % 2]
    columns = [s_operator(spec, UniPoly.monomial(d)) for d in degrees]
    rows = [[col.coeff(d) for col in columns] for d in degrees]
    return [UniPoly(dict(zip(degrees, vec)), parity) for vec in nullspace(rows, len(degrees))]
