"""Symbol maps psi and the F-system residual.

A symbol map is a list of 2N+1 polynomials psi_s in (zeta1, zeta2, zeta3),
the coefficients of psi in the dual basis u_0^v, ..., u_2N^v.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .exactfield import ZERO, GaussRational, I
from .gegenbauer import GegenbauerSpec, s_operator
from .polyalg import Q2, ZETA1, ZETA2, TriPoly, UniPoly, divide_exact, euler_zeta, laplace_zeta, t_map, zeta_plus


class DegreeMismatchError(ValueError):
    """nu - lambda is not a natural number equal to the degree of psi."""


@dataclass(frozen=True)
class SymbolMap:
    big_n: int
    components: tuple[TriPoly, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) != 2 * self.big_n + 1:
            raise ValueError(f"expected {2 * self.big_n + 1} components, got {len(comps)}")
        object.__setattr__(self, "components", comps)

    @staticmethod
    def zero(N: int) -> "SymbolMap":
        return SymbolMap(N, tuple(TriPoly() for _ in range(2 * N + 1)))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: "SymbolMap") -> "SymbolMap":
        if self.big_n != other.big_n:
            raise ValueError("N mismatch")
        return SymbolMap(self.big_n, tuple(x + y for x, y in zip(self.components, other.components)))

    def scale(self, c) -> "SymbolMap":
        return SymbolMap(self.big_n, tuple(x.scale(c) for x in self.components))

    def to_json(self) -> dict:
        return {"N": self.big_n, "components": [c.to_json() for c in self.components]}

    @staticmethod
    def from_json(obj) -> "SymbolMap":
        if not isinstance(obj, dict) or "N" not in obj or "components" not in obj:
            raise ValueError("SymbolMap JSON needs keys 'N' and 'components'")
        return SymbolMap(int(obj["N"]), tuple(TriPoly.from_json(c) for c in obj["components"]))


@dataclass(frozen=True)
class GenDescriptor:
    k: int
    sign: str
    source_index: int
    monomial: TriPoly


def k_set(N: int, m: int) -> list[int]:
    """K_{N,m} = {|m-l|, |m+l| : l = 0..N}, sorted."""
    if N < 0 or abs(m) < N:
        raise ValueError(f"need |m| >= N >= 0, got N={N}, m={m}")
    return sorted({abs(m - l) for l in range(N + 1)} | {abs(m + l) for l in range(N + 1)})


def _check_sign(m: int, N: int, sign: str) -> None:
    if sign == "+" and m < N:
        raise ValueError("sign '+' needs m >= N")
    if sign == "-" and m > -N:
        raise ValueError("sign '-' needs m <= -N")
    if sign not in "+-" or len(sign) != 1:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def source_index(N: int, m: int, k: int, sign: str) -> int:
    return k - m + N if sign == "+" else N - m - k


def generator_h(N: int, m: int, k: int, sign: str) -> GenDescriptor:
    """h_k^{sign}: pairs u_{source_index} with (zeta1 +- i zeta2)^k."""
    _check_sign(m, N, sign)
    if k not in k_set(N, m):
        raise ValueError(f"k={k} is not in K_(N={N}, m={m})")
    mono = zeta_plus(1 if sign == "+" else -1) ** k
    return GenDescriptor(k, sign, source_index(N, m, k, sign), mono)


def assemble_psi(lam, a: int, N: int, m: int, sign: str, g: Mapping[int, UniPoly]) -> SymbolMap:
    """psi = sum_k (T_{a-k} g_k) h_k^{sign}."""
    _check_sign(m, N, sign)
    keys = k_set(N, m)
    extra = set(g) - set(keys)
    if extra:
        raise ValueError(f"keys {sorted(extra)} are not in K_(N,m)")
    comps = [TriPoly() for _ in range(2 * N + 1)]
    for k in keys:
        gk = g.get(k, UniPoly.zero())
        if gk.is_zero():
            continue
        gen = generator_h(N, m, k, sign)
        comps[gen.source_index] = t_map(a - k, gk) * gen.monomial
    return SymbolMap(N, tuple(comps))


def dsigma_matrix(N: int, gen: str) -> list[list[GaussRational]]:
    """d sigma^{2N+1}(2X_{l,1}) in the basis u_0..u_2N.

    2X_{3,1} has -s below the diagonal and 2N-s above it in row s.
    """
    size = 2 * N + 1
    mat = [[ZERO] * size for _ in range(size)]
    if gen == "2X11":
        return mat
    if gen == "2X21":
        for s in range(size):
            mat[s][s] = GaussRational(0, 2 * (s - N))
        return mat
    if gen == "2X31":
        for s in range(size):
            if s >= 1:
                mat[s][s - 1] = GaussRational(-s)
            if s + 1 < size:
                mat[s][s + 1] = GaussRational(2 * N - s)
        return mat
    raise ValueError(f"unknown generator {gen!r}")


def _scalar_part(lam: Fraction, p: TriPoly) -> TriPoly:
    d1 = p.diff(0)
    return d1.scale(2 * lam) + euler_zeta(d1).scale(2) - ZETA1 * laplace_zeta(p)


def m_scalar(lam, a: int, psi: SymbolMap) -> SymbolMap:
    """(2 lam d1 + 2 E d1 - zeta1 Laplacian) applied to every component."""
    lam = Fraction(lam)
    return SymbolMap(psi.big_n, tuple(_scalar_part(lam, p) for p in psi.components))


def m_vect(psi: SymbolMap) -> SymbolMap:
    """sum_{s'} sum_l d sigma(2X_{l,1})_{s s'} d/dzeta_l psi_{s'}."""
    N = psi.big_n
    mats = [dsigma_matrix(N, g) for g in ("2X11", "2X21", "2X31")]
    size = 2 * N + 1
    out = []
    for s in range(size):
        acc = TriPoly()
        for sp in range(size):
            p = psi.components[sp]
            if p.is_zero():
                continue
            for var, mat in enumerate(mats):
                c = mat[s][sp]
                if not c.is_zero():
                    acc = acc + p.diff(var).scale(c)
        out.append(acc)
    return SymbolMap(N, tuple(out))


def psi_degree(psi: SymbolMap) -> int | None:
    """Common homogeneity degree of the nonzero components (None if psi = 0)."""
    degs = set()
    for p in psi.components:
        if p.is_zero():
            continue
        if not p.is_homogeneous():
            raise DegreeMismatchError("component is not homogeneous")
        degs.add(p.total_degree())
    if len(degs) > 1:
        raise DegreeMismatchError(f"components have different degrees {sorted(degs)}")
    return degs.pop() if degs else None


def fsystem_residual(lam, nu, N: int, m: int, psi: SymbolMap) -> SymbolMap:
    """M_s^scalar + M_s^vect; zero exactly on solutions of the F-system."""
    lam, nu = Fraction(lam), Fraction(nu)
    diff = nu - lam
    if diff.denominator != 1 or diff < 0:
        raise DegreeMismatchError(f"nu - lambda = {diff} is not a natural number")
    if psi.big_n != N:
        raise ValueError("N mismatch")
    deg = psi_degree(psi)
    if deg is not None and deg != diff:
        raise DegreeMismatchError(f"psi has degree {deg} but nu - lambda = {diff}")
    a = int(diff)
    return m_scalar(lam, a, psi) + m_vect(psi)


def rotation_generator(p: TriPoly) -> TriPoly:
    """zeta1 d/dzeta2 - zeta2 d/dzeta1."""
    return ZETA1 * p.diff(1) - ZETA2 * p.diff(0)


def so2_weight_check(N: int, m: int, psi: SymbolMap) -> bool:
    """Infinitesimal SO(2)-equivariance: every psi_s has weight m - (N - s).

    (zeta1 d2 - zeta2 d1) acts on (zeta1 + i zeta2)^k by i*k, so psi_s must be
    an eigenvector with eigenvalue i*(m - N + s).
    """
    if psi.big_n != N:
        return False
    for s, p in enumerate(psi.components):
        if rotation_generator(p) != p.scale(GaussRational(0, m - N + s)):
            return False
    return True


def phi_involution(psi: SymbolMap) -> SymbolMap:
    """Component s of the image is (-1)^s psi_{2N-s}(zeta1, -zeta2, zeta3)."""
    N = psi.big_n
    comps = []
    for s in range(2 * N + 1):
        p = psi.components[2 * N - s].flip_sign(1)
        comps.append(-p if s % 2 else p)
    return SymbolMap(N, tuple(comps))


def _tb(b: int, f: UniPoly) -> TriPoly:
    if b < 0:
        if not f.is_zero():
            raise ValueError(f"nonzero polynomial sent to T_{b}")
        return TriPoly()
    return t_map(b, f)


def closed_form_blocks(lam, a: int, N: int, m: int, k: int, g: Mapping[int, UniPoly]) -> tuple[TriPoly, TriPoly, TriPoly, TriPoly]:
    """The invariant polynomials p1..p4 of the k-th coefficient M_{k-m+N}."""
    lam = Fraction(lam)
    zero = UniPoly.zero()
    gk = g.get(k, zero)
    dnext = g.get(k + 1, zero).ddt()
    dprev = g.get(k - 1, zero).ddt()
    sg = s_operator(GegenbauerSpec(lam - 1, a - k), gk)
    theta = gk.scale(a - k) - gk.euler_t()  # (a-k-theta) g_k
    c_next = N - k + m
    p1 = _tb(a - k - 2, sg + dnext.scale(c_next))
    p2 = _tb(a - k - 2, theta.scale(2 * (m - k)) - dnext.scale(c_next))
    p3 = _tb(a - k - 2, (sg + theta.scale(2 * (k - m)) + dnext.scale(2 * c_next)).scale(I))
    p4 = _tb(a - k, gk.scale(2 * k * (lam + a - 1 + m - k)) - dprev.scale(N + k - m))
    return p1, p2, p3, p4


def m_closed_form(lam, a: int, N: int, m: int, g: Mapping[int, UniPoly]) -> SymbolMap:
    """M_s(psi) through the block formula in T_{a-k-2} and T_{a-k}."""
    if m < N:
        raise ValueError("the block formula is stated for m >= N")
    comps = []
    for k in range(m - N, m + N + 1):
        p1, p2, p3, p4 = closed_form_blocks(lam, a, N, m, k, g)
        bracket = ZETA1 * ZETA1 * p1 + ZETA2 * ZETA2 * p2 + ZETA1 * ZETA2 * p3 + p4
        if k >= 1:
            comps.append(zeta_plus(1) ** (k - 1) * bracket)
        else:
            comps.append(divide_exact(bracket, I))
    return SymbolMap(N, tuple(comps))


def invariant_conditions(p1: TriPoly, p2: TriPoly, p3: TriPoly, p4: TriPoly) -> tuple[bool, bool]:
    """Truth of (i) zeta1^2 p1 + zeta2^2 p2 + zeta1 zeta2 p3 + p4 = 0 and of
    (ii) p1 = p2, p3 = 0, Q2 p1 + p4 = 0."""
    cond_i = (ZETA1 * ZETA1 * p1 + ZETA2 * ZETA2 * p2 + ZETA1 * ZETA2 * p3 + p4).is_zero()
    cond_ii = p1 == p2 and p3.is_zero() and (Q2 * p1 + p4).is_zero()
    return cond_i, cond_ii


def weight_basis(a: int, weight: int) -> list[TriPoly]:
    """Homogeneous degree-a polynomials of SO(2)-weight `weight`:
    (zeta1 + i zeta2)^p (zeta1 - i zeta2)^q zeta3^r with p - q = weight."""
    out = []
    for q in range(a + 1):
        p = q + weight
        r = a - p - q
        if p < 0 or r < 0:
            continue
        out.append(zeta_plus(1) ** p * zeta_plus(-1) ** q * TriPoly.var(2) ** r)
    return out


def solution_space(lam, a: int, N: int, m: int) -> list[SymbolMap]:
    """Basis of the F-system solutions of degree a with SO(2)-weight m, by exact
    nullspace over the weight-adapted monomials.  Uses no Gegenbauer ansatz."""
    from .linalg import nullspace

    lam = Fraction(lam)
    layout = []
    for s in range(2 * N + 1):
        for p in weight_basis(a, m - N + s):
            layout.append((s, p))
    columns = []
    for s, p in layout:
        comps = [TriPoly() for _ in range(2 * N + 1)]
        comps[s] = p
        columns.append(fsystem_residual(lam, lam + a, N, m, SymbolMap(N, tuple(comps))))
    keys = sorted({(s, e) for col in columns for s, comp in enumerate(col.components) for e in comp.coeffs})
    rows = [[col.components[s].coeff(e) for col in columns] for s, e in keys]
    basis = []
    for vec in nullspace(rows, len(layout)):
        comps = [TriPoly() for _ in range(2 * N + 1)]
        for (s, p), c in zip(layout, vec):
            if not c.is_zero():
                comps[s] = comps[s] + p.scale(c)
        basis.append(SymbolMap(N, tuple(comps)))
    return basis
