"""The ODE system Xi(lambda, a, N, m) for the coefficients g_k.

Two independent routes to its solutions live here: brute-force exact
nullspace of the assembled linear system, and the closed form
g_k = i^(N+k) A_k C~_{a-k}^{lambda+N-1}(it) (m = N).  The three-phase
recurrence verifier replays the phase structure of the existence proof and
checks each intermediate claim on the way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Mapping

from .exactfield import (
    ONE, ZERO, GaussRational, big_gamma, coeff_A, format_rational,
    gamma_factor, i_power, pochhammer_gamma_ratio,
)
from .fsystem import assemble_psi, fsystem_residual, phi_involution, so2_weight_check, solution_space
from .gegenbauer import GegenbauerSpec, ctilde, s_even_kernel, s_operator
from .linalg import nullspace as _nullspace
from .linalg import proportionality
from .polyalg import PARITIES, UniPoly


class VerificationFailure(AssertionError):
    """A claimed identity or branch prediction did not hold."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def _parity_of(b: int) -> str | None:
    return PARITIES[b % 2] if b >= 0 else None


@dataclass(frozen=True)
class GVector:
    big_n: int
    m: int
    a: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        keys = list(range(self.m - self.big_n, self.m + self.big_n + 1))
        clean = {}
        for k in keys:
            gk = self.entries.get(k, UniPoly.zero())
            gk.check_pol_even(self.a - k)
            clean[k] = gk
        extra = set(self.entries) - set(keys)
        if extra:
            raise ValueError(f"unexpected keys {sorted(extra)}")
        object.__setattr__(self, "entries", clean)

    def keys(self) -> list[int]:
        return list(range(self.m - self.big_n, self.m + self.big_n + 1))

    def values(self) -> list[UniPoly]:
        return [self.entries[k] for k in self.keys()]

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.entries.values())

    def scale(self, c) -> "GVector":
        return GVector(self.big_n, self.m, self.a, {k: g.scale(c) for k, g in self.entries.items()})

    def to_json(self) -> dict:
        return {"N": self.big_n, "m": self.m, "a": self.a,
                "g": [[k, self.entries[k].to_json()] for k in self.keys()]}

    @staticmethod
    def from_json(obj) -> "GVector":
        N, m, a = int(obj["N"]), int(obj["m"]), int(obj["a"])
        entries = {int(k): UniPoly.from_json(p) for k, p in obj["g"]}
        return GVector(N, m, a, entries)


@dataclass(frozen=True)
class FVector:
    """f_j = g_{m-j} for j = -N..N; f_j lies in Pol_{a-m+j}[t]_even."""

    big_n: int
    a: int
    entries: dict = field(default_factory=dict)
    m: int | None = None

    def __post_init__(self):
        if self.m is None:
            object.__setattr__(self, "m", self.big_n)
        clean = {}
        for j in range(-self.big_n, self.big_n + 1):
            clean[j] = self.entries.get(j, UniPoly.zero())
        extra = set(self.entries) - set(clean)
        if extra:
            raise ValueError(f"unexpected indices {sorted(extra)}")
        object.__setattr__(self, "entries", clean)

    def get(self, j: int) -> UniPoly:
        return self.entries.get(j, UniPoly.zero())

    def values(self) -> list[UniPoly]:
        return [self.entries[j] for j in range(-self.big_n, self.big_n + 1)]

    def to_json(self) -> dict:
        return {"N": self.big_n, "m": self.m, "a": self.a,
                "f": [[j, self.entries[j].to_json()] for j in range(-self.big_n, self.big_n + 1)]}


def tilde_reverse(g: GVector) -> FVector:
    """f_j = g_{m-j}."""
    return FVector(g.big_n, g.a, {j: g.entries[g.m - j] for j in range(-g.big_n, g.big_n + 1)}, g.m)


def tilde_unreverse(f: FVector) -> GVector:
    return GVector(f.big_n, f.m, f.a, {f.m - j: p for j, p in f.entries.items()})


# -- the operators L and R -----------------------------------------------------


def _S(ell: int, mu: Fraction, f: UniPoly) -> UniPoly:
    return s_operator(GegenbauerSpec(mu, ell), f)


def _b_core(coef: Fraction, j: int, lam: Fraction, f: UniPoly) -> UniPoly:
    """2(coef + j(lam - 1 + theta)) f."""
    return f.scale(2 * (coef + j * (lam - 1))) + f.euler_t().scale(2 * j)


def op_L(j: int, kind: str, sign: str, lam, a: int, N: int, m: int, f: FVector) -> UniPoly:
    lam = Fraction(lam)
    if not 0 <= j <= N:
        raise ValueError(f"j must lie in 0..N, got {j}")
    if kind == "B" and j == 0:
        return UniPoly.zero()
    get = f.get
    if kind == "A" and sign == "+":
        return _S(a + m - j, lam + j - 1, get(j)) - get(j + 1).ddt().scale(2 * (N - j))
    if kind == "A" and sign == "-":
        return _S(a - m - j, lam + j - 1, get(-j)) + get(-j - 1).ddt().scale(2 * (N - j))
    if kind == "B" and sign == "+":
        return (_b_core(-m * (lam + a - 1), j, lam, get(j)) + get(j + 1).ddt().scale(N - j)
                + get(j - 1).ddt().scale(N + j))
    if kind == "B" and sign == "-":
        return (_b_core(m * (lam + a - 1), j, lam, get(-j)) - get(-j + 1).ddt().scale(N + j)
                - get(-j - 1).ddt().scale(N - j))
    raise ValueError(f"bad kind/sign {kind!r}/{sign!r}")


def op_R(k: int, which: int, lam, a: int, N: int, m: int, g: GVector) -> UniPoly:
    lam = Fraction(lam)
    zero = UniPoly.zero()
    gk = g.entries.get(k, zero)
    dnext = g.entries.get(k + 1, zero).ddt()
    sg = _S(a - k, lam - 1, gk)
    if which == 1:
        theta = gk.scale(a - k) - gk.euler_t()
        return sg - theta.scale(2 * (m - k)) + dnext.scale(2 * (N - k + m))
    if which == 2:
        dprev = g.entries.get(k - 1, zero).ddt()
        return (sg + gk.scale(2 * k * (lam + a - 1 + m - k)) - dprev.scale(N + k - m)
                + dnext.scale(N - k + m))
    raise ValueError("which must be 1 or 2")


EQUATIONS = [("A", "+"), ("A", "-"), ("B", "+"), ("B", "-")]


def all_L(lam, a: int, N: int, m: int, f: FVector) -> dict[tuple[str, str, int], UniPoly]:
    out = {}
    for kind, sign in EQUATIONS:
        for j in range(0 if kind == "A" else 1, N + 1):
            out[(kind, sign, j)] = op_L(j, kind, sign, lam, a, N, m, f)
    return out


def all_R(lam, a: int, N: int, m: int, g: GVector) -> dict[tuple[int, int], UniPoly]:
    return {(k, w): op_R(k, w, lam, a, N, m, g) for k in g.keys() for w in (1, 2)}


# -- linear system and nullspace ---------------------------------------------------


@dataclass(frozen=True)
class LinearSystem:
    matrix: list
    unknown_layout: list
    row_labels: list
    lam: Fraction
    a: int
    big_n: int
    m: int

    @property
    def ncols(self) -> int:
        return len(self.unknown_layout)


def unknown_layout(a: int, N: int, m: int) -> list[tuple[int, int]]:
    """Columns sorted by (k ascending, degree descending)."""
    return [(k, d) for k in range(m - N, m + N + 1) for d in range(a - k, -1, -2)]


def build_linear_system(lam, a: int, N: int, m: int) -> LinearSystem:
    """Coefficient matrix of all L_j^{A,B,+-}(g~) = 0 in the unknown coefficients of g."""
    lam = Fraction(lam)
    if a < 0 or N < 0:
        raise ValueError("a and N must be natural numbers")
    if m < N:
        raise ValueError("the system is stated for m >= N")
    layout = unknown_layout(a, N, m)
    columns = []
    for k, d in layout:
        g = GVector(N, m, a, {k: UniPoly.monomial(d)})
        columns.append(all_L(lam, a, N, m, tilde_reverse(g)))
    # L_j^{., +-} lands in Pol_{a-m+-j}; one row per degree up to that bound
    labels = []
    for kind, sign in EQUATIONS:
        for j in range(0 if kind == "A" else 1, N + 1):
            bound = max(a - m + (j if sign == "+" else -j), 0)
            for deg in range(bound, -1, -1):
                labels.append((kind, sign, j, deg))
    rows = [[col[(kind, sign, j)].coeff(deg) for col in columns] for kind, sign, j, deg in labels]
    for col in columns:
        for (kind, sign, j), poly in col.items():
            if poly.degree() > max(a - m + (j if sign == "+" else -j), 0):
                raise AssertionError(f"equation {(kind, sign, j)} exceeds its degree bound")
    return LinearSystem(rows, layout, labels, lam, a, N, m)


def nullspace(sys: LinearSystem) -> list[list[GaussRational]]:
    return _nullspace(sys.matrix, sys.ncols)


def vector_to_gvector(sys: LinearSystem, vec) -> GVector:
    entries: dict[int, dict[int, GaussRational]] = {}
    for (k, d), c in zip(sys.unknown_layout, vec):
        entries.setdefault(k, {})[d] = c
    g = {k: UniPoly(coeffs, _parity_of(sys.a - k)) for k, coeffs in entries.items()}
    return GVector(sys.big_n, sys.m, sys.a, g)


def kernel_gvectors(lam, a: int, N: int, m: int) -> list[GVector]:
    sys = build_linear_system(lam, a, N, m)
    return [vector_to_gvector(sys, v) for v in nullspace(sys)]


# -- closed form -------------------------------------------------------------------


def closed_solution(lam, a: int, N: int, renormalized: bool = False) -> GVector:
    """g_k = i^(N+k) A_k C~_{a-k}^{lam+N-1}(it), zero when a - k < 0."""
    lam = Fraction(lam)
    if a < 0 or N < 0:
        raise ValueError("a and N must be natural numbers")
    entries = {}
    for k in range(2 * N + 1):
        if a - k < 0:
            entries[k] = UniPoly.zero()
            continue
        A = coeff_A(lam, a, N, k, renormalized=renormalized)
        entries[k] = ctilde(lam + N - 1, a - k).scale(i_power(N + k) * A)
    return GVector(N, N, a, entries)


def coeff_M(n: int, k: int, d: int, s: int, N: int, a: int) -> Fraction:
    """M(n, k, d), built from falling factorials."""
    if n < 0 or k < 0 or d < k:
        raise ValueError(f"index out of range: n={n}, k={k}, d={d}")
    if n % 2 == 0 and d == n // 2:
        if k > n // 2:
            raise ValueError(f"index out of range: n={n}, k={k}, d={d}")
        return Fraction(1) if k == n // 2 else Fraction(0)
    if not (k <= (n - 1) // 2 and d <= (n - 1) // 2):
        raise ValueError(f"index out of range: n={n}, k={k}, d={d}")

    def falling(x: Fraction, ell: int) -> Fraction:
        out = Fraction(1)
        for i in range(ell):
            out *= x - i
        return out

    num = (Fraction(2) ** (n - 2 * d) * factorial(n - 2 * k - 1) * falling(Fraction(s + n - d - 1), n - d - k)
           * falling(Fraction(2 * N - s + a - 2 * k, 2), n - d - k))
    den = (factorial(d - k) * factorial(n - 2 * d - 1) * factorial(n - d - k)
           * falling(Fraction(2 * N - s - 2 * k), n - 2 * k))
    if den == 0:
        raise ZeroDivisionError("M(n,k,d) denominator vanishes")
    return num / den


def p_polynomial(n: int, s: int, N: int, a: int, constants: Mapping[int, GaussRational]) -> UniPoly:
    """P_{n+s-N}(t) = sum_k c_{N-s-2k} sum_{d=k}^{[n/2]} M(n,k,d) (it)^(n-2d)."""
    out = UniPoly.zero()
    for k in range(n // 2 + 1):
        c = constants.get(N - s - 2 * k, ZERO)
        if GaussRational.coerce(c).is_zero():
            continue
        inner = UniPoly.zero()
        for d in range(k, n // 2 + 1):
            inner = inner + UniPoly.monomial(n - 2 * d, coeff_M(n, k, d, s, N, a) * i_power(n - 2 * d))
        out = out + inner.scale(c)
    return out


def relation_79(n: int, s: int, N: int, a: int, constants: Mapping[int, GaussRational],
                printed_index: bool = False) -> list[GaussRational]:
    """Left-hand sides of the constraint family on c_{N-s}, c_{N-s-2}, ...; one per ell.

    The closing term carries c_{N-s-2(ell+1)}, the index that comes out of
    comparing coefficients of t^(n-2ell-2).  ``printed_index=True`` uses
    c_{N-s-(ell+1)} instead, the form in which the relation is usually quoted.
    """
    def c(idx: int) -> GaussRational:
        return GaussRational.coerce(constants.get(idx, ZERO))

    def M(nn: int, k: int, d: int) -> Fraction:
        try:
            return coeff_M(nn, k, d, s, N, a)
        except ValueError:
            return Fraction(0)

    out = []
    for ell in range((n - 2) // 2 + 1):
        total = ZERO
        for k in range(ell + 1):
            term = (2 * M(n, k, ell + 1) * (ell + 1) * (2 * N - s - a - 2 * (ell + 1))
                    + M(n, k, ell) * (n - 2 * ell) * (n - 2 * ell - 1)
                    - 2 * M(n - 1, k, ell) * (n + s) * (n - 2 * ell - 1))
            total = total + c(N - s - 2 * k) * term
        last = N - s - (ell + 1) if printed_index else N - s - 2 * (ell + 1)
        total = total + c(last) * (2 * M(n, ell + 1, ell + 1) * (ell + 1) * (2 * N - s - a - 2 * (ell + 1)))
        out.append(total)
    return out


# -- three-phase recurrence verifier -----------------------------------------------


class _Lin:
    """A polynomial whose coefficients are linear forms in named parameters."""

    def __init__(self, parts: Mapping[str, UniPoly] | None = None):
        self.parts = {p: u for p, u in (parts or {}).items() if not u.is_zero()}

    def map(self, fn: Callable[[UniPoly], UniPoly]) -> "_Lin":
        return _Lin({p: fn(u) for p, u in self.parts.items()})

    def __add__(self, other: "_Lin") -> "_Lin":
        out = dict(self.parts)
        for p, u in other.parts.items():
            out[p] = out[p] + u if p in out else u
        return _Lin(out)

    def __sub__(self, other: "_Lin") -> "_Lin":
        return self + other.map(lambda u: -u)

    def part(self, name: str) -> UniPoly:
        return self.parts.get(name, UniPoly.zero())

    def forms(self) -> dict[int, dict[str, GaussRational]]:
        out: dict[int, dict[str, GaussRational]] = {}
        for p, u in self.parts.items():
            for d, c in u.coeffs.items():
                out.setdefault(d, {})[p] = c
        return out

    def evaluate(self, values: Mapping[str, GaussRational]) -> UniPoly:
        out = UniPoly.zero()
        for p, u in self.parts.items():
            v = values.get(p, ZERO)
            if not v.is_zero():
                out = out + u.scale(v)
        return out


class _Ledger:
    """Parameters, accumulated linear constraints and the step that pinned each one."""

    def __init__(self):
        self.params: list[str] = []
        self.rows: list[dict[str, GaussRational]] = []
        self.zero_since: dict[str, str] = {}
        self.basis: list[dict[str, GaussRational]] = []

    def new(self, name: str) -> str:
        self.params.append(name)
        self._solve("introduce " + name)
        return name

    def impose(self, label: str, forms: Mapping[int, Mapping[str, GaussRational]]) -> None:
        for form in forms.values():
            if any(not c.is_zero() for c in form.values()):
                self.rows.append(dict(form))
        self._solve(label)

    def _solve(self, label: str) -> None:
        idx = {p: n for n, p in enumerate(self.params)}
        matrix = [[row.get(p, ZERO) for p in self.params] for row in self.rows]
        vecs = _nullspace(matrix, len(self.params))
        self.basis = [{p: v[idx[p]] for p in self.params} for v in vecs]
        for p in self.params:
            if p not in self.zero_since and all(b[p].is_zero() for b in self.basis):
                self.zero_since[p] = label

    def is_zero(self, name: str) -> bool:
        return all(b[name].is_zero() for b in self.basis)

    def dimension(self) -> int:
        return len(self.basis)


def _gate(f: _Lin, bound: int) -> dict[int, dict[str, GaussRational]]:
    """Coefficient forms that must vanish for f to lie in Pol_bound[t]_even."""
    return {d: form for d, form in f.forms().items() if bound < 0 or d > bound or (bound - d) % 2}


def _phase1_kernel(mu: Fraction, ell: int, diag: dict) -> UniPoly:
    basis = s_even_kernel(GegenbauerSpec(mu, ell))
    ref = ctilde(mu, ell)
    if len(basis) != 1 or proportionality([basis[0]], [ref]) is None:
        raise VerificationFailure(f"S-kernel for (mu={mu}, ell={ell}) is not spanned by C~(it)", diag)
    return ref


def _gamma_quotient(x: Fraction, p: int, q: int) -> Fraction | None:
    """Gamma(x + p) / Gamma(x + q) as a finite number, None at a pole."""
    if p >= q:
        return pochhammer_gamma_ratio(x + q, p - q)
    den = pochhammer_gamma_ratio(x + p, q - p)
    return None if den == 0 else 1 / den


def _tp(a: int, N: int, j: int) -> int:
    return (a + j - N + 1) // 2


def _tm(a: int, N: int, j: int) -> int:
    return (a - j - N + 1) // 2


def shape_plus(lam, a: int, N: int, j: int, ref: int) -> UniPoly | None:
    """(-i)^j Gamma(mu + [(a+j-N+1)/2]) / Gamma(mu + [(a+ref-N+1)/2]) C~_{a+j-N}^mu(it)."""
    mu = Fraction(lam) + N - 1
    if a + j - N < 0:
        return UniPoly.zero()
    q = _gamma_quotient(mu, _tp(a, N, j), _tp(a, N, ref))
    if q is None:
        return None
    return ctilde(mu, a + j - N).scale(i_power(-j) * q)


def shape_minus(lam, a: int, N: int, j: int, ref: int) -> UniPoly | None:
    """i^j Gamma(mu + [(a-j-N+1)/2]) / Gamma(mu + [(a-ref-N+1)/2]) C~_{a-j-N}^mu(it)."""
    mu = Fraction(lam) + N - 1
    if a - j - N < 0:
        return UniPoly.zero()
    q = _gamma_quotient(mu, _tm(a, N, j), _tm(a, N, ref))
    if q is None:
        return None
    return ctilde(mu, a - j - N).scale(i_power(j) * q)


@dataclass
class _Seed:
    """A parameter whose contribution follows a Gegenbauer shape from index ref on."""

    name: str
    side: str
    ref: int
    kappa: GaussRational

    def expected(self, lam, a: int, N: int, j: int) -> UniPoly | None:
        fn = shape_plus if self.side == "+" else shape_minus
        shape = fn(lam, a, N, j, self.ref)
        return None if shape is None else shape.scale(self.kappa)


def _make_seed(name: str, side: str, ref: int, seed_poly: UniPoly, lam, a: int, N: int, diag: dict) -> _Seed:
    fn = shape_plus if side == "+" else shape_minus
    kappa = proportionality([seed_poly], [fn(lam, a, N, ref, ref)])
    if kappa is None:
        raise VerificationFailure(f"seed {name} at index {side}{ref} is not a Gegenbauer multiple", diag)
    return _Seed(name, side, ref, kappa)


def _anchor(f: _Lin, seeds: list[_Seed], lam, a: int, N: int, j: int) -> _Lin:
    """Fix the free constant in the seeded parts of an antiderivative.

    Integration constants are measured against the Gegenbauer shape: each
    seeded part takes the constant term of its predicted polynomial, so that a
    surviving integration constant is a genuine deviation from that shape.
    """
    parts = dict(f.parts)
    for seed in seeds:
        expected = seed.expected(lam, a, N, j)
        if expected is None:
            continue
        u = f.part(seed.name)
        shift = expected.coeff(0) - u.coeff(0)
        if not shift.is_zero():
            parts[seed.name] = u + UniPoly.constant(shift)
    return _Lin(parts)


def degenerate_index(lam, a: int, N: int, sign: str) -> int | None:
    """The s for which the Gamma_0^{sign} factor vanishes, restricted to the range
    where it affects a nonzero f_j; None when there is no such s."""
    lam = Fraction(lam)
    if sign == "+":
        for s in range(1, min(N, a) + 1):
            if gamma_factor(lam + N - 1, a - s) == 0:
                return s
        return None
    if a <= N:
        return None
    for s in range(max(1, 2 * N - a), N + 1):
        if gamma_factor(lam, a - s - 2) == 0:
            return s
    return None


def recurrence_solution(lam, a: int, N: int, printed_index: bool = False) -> tuple[FVector, dict]:
    """Solve Xi(lam, a, N, N) phase by phase and check every intermediate claim.

    Phase 1 takes f_{+-N} from the one-dimensional kernels of S.  Phase 2
    integrates (B_j^{+-}) for f_{+-(j-1)}, introducing one constant each time,
    then imposes the parity/degree gate and (A_{j-1}^{+-}).  Phase 3 matches the
    two expressions of f_0.  Returns the normalized solution and a diagnostics
    dict; raises VerificationFailure when a predicted structure is not met.
    """
    lam = Fraction(lam)
    if a < 0 or N < 0:
        raise ValueError("a and N must be natural numbers")
    mu = lam + N - 1
    case = "a>=2N" if a >= 2 * N else ("N<a<2N" if a > N else "a<=N")
    s_plus = degenerate_index(lam, a, N, "+")
    s_minus = degenerate_index(lam, a, N, "-")
    branch = "gamma_plus_zero" if s_plus is not None else ("gamma_minus_zero" if s_minus is not None else "generic")
    diag: dict = {
        "lambda": format_rational(lam), "a": a, "N": N, "case": case, "branch": branch,
        "gamma0_plus": format_rational(big_gamma(lam, a, N, 0, "+")),
        "gamma0_minus": format_rational(big_gamma(lam, a, N, 0, "-")),
        "s_plus": s_plus, "s_minus": s_minus,
    }
    ledger = _Ledger()
    zero = _Lin()

    # Phase 1
    qp = ledger.new("q+")
    plus_f = {N: _Lin({qp: _phase1_kernel(mu, a, diag)})}
    plus_seeds = [_make_seed(qp, "+", N, plus_f[N].part(qp), lam, a, N, diag)]
    minus_f = {N: zero}
    minus_seeds: list[_Seed] = []
    qm = None
    if a >= 2 * N and a > N:
        qm = ledger.new("q-")
        minus_f[N] = _Lin({qm: _phase1_kernel(mu, a - 2 * N, diag)})
        minus_seeds.append(_make_seed(qm, "-", N, minus_f[N].part(qm), lam, a, N, diag))

    # Phase 2, + side
    rebase = None
    for j in range(N, 0, -1):
        fj, fj1 = plus_f[j], plus_f.get(j + 1, zero)
        rhs = (fj.map(lambda u: _b_core(Fraction(-N) * (lam + a - 1), j, lam, u))
               + fj1.map(lambda u: u.ddt().scale(N - j)))
        new = _anchor(rhs.map(lambda u: u.integrate().scale(Fraction(-1, N + j))), plus_seeds, lam, a, N, j - 1)
        name = ledger.new(f"c+{j - 1}")
        unit = UniPoly.constant(i_power(-(N - j + 1)))
        new = new + _Lin({name: unit})
        if s_plus is not None and j - 1 == N - s_plus:
            rebase = _make_seed(name, "+", j - 1, unit, lam, a, N, diag)
            plus_seeds.append(rebase)
        ledger.impose(f"gate+{j - 1}", _gate(new, a - N + j - 1))
        a_eq = new.map(lambda u: _S(a + N - j + 1, lam + j - 2, u)) - fj.map(lambda u: u.ddt().scale(2 * (N - j + 1)))
        ledger.impose(f"A+{j - 1}", a_eq.forms())
        plus_f[j - 1] = new

    # Phase 2, - side (absent for a <= N, where every f_{-j} with j >= 1 vanishes)
    p_checks = []
    if a > N:
        for j in range(N, 0, -1):
            fj, fj1 = minus_f[j], minus_f.get(j + 1, zero)
            rhs = (fj.map(lambda u: _b_core(Fraction(N) * (lam + a - 1), j, lam, u))
                   - fj1.map(lambda u: u.ddt().scale(N - j)))
            new = _anchor(rhs.map(lambda u: u.integrate().scale(Fraction(1, N + j))), minus_seeds, lam, a, N, j - 1)
            unit = UniPoly.constant(i_power(-(N - j + 1)))
            if a < 2 * N and j - 1 == a - N:
                # first index that may be nonzero: its constant is the free q_N^-
                qm = ledger.new("q-")
                minus_seeds.append(_make_seed(qm, "-", j - 1, unit, lam, a, N, diag))
                new = new + _Lin({qm: unit})
            else:
                name = ledger.new(f"c-{j - 1}")
                new = new + _Lin({name: unit})
            ledger.impose(f"gate-{j - 1}", _gate(new, a - N - (j - 1)))
            a_eq = new.map(lambda u: _S(a - N - j + 1, lam + j - 2, u)) + fj.map(lambda u: u.ddt().scale(2 * (N - j + 1)))
            ledger.impose(f"A-{j - 1}", a_eq.forms())
            minus_f[j - 1] = new
            if branch == "gamma_minus_zero" and j - 1 <= N - s_minus:
                p_checks.append(_check_minus_structure(ledger, new, j - 1, s_minus, lam, a, N, minus_seeds,
                                                       printed_index, diag))
    diag["p_structure_steps"] = p_checks
    diag["dimension_before_phase3"] = ledger.dimension()

    # Phase 3
    if a > N:
        ledger.impose("phase3", (plus_f[0] - minus_f[0]).forms())
    diag["dimension"] = ledger.dimension()
    if ledger.dimension() != 1:
        raise VerificationFailure(f"solution space has dimension {ledger.dimension()}, expected 1", diag)
    sol = ledger.basis[0]
    values = {j: plus_f[j].evaluate(sol) for j in range(0, N + 1)}
    for j in range(1, N + 1):
        values[-j] = minus_f[j].evaluate(sol) if a > N else UniPoly.zero()

    seed_names = {sd.name for sd in plus_seeds + minus_seeds}
    constants = []
    for p in ledger.params:
        if p in seed_names:
            continue
        val = sol[p]
        constants.append({"name": p, "resolved_by": ledger.zero_since.get(p, "free"), "final": val.to_json()})
        if not val.is_zero():
            raise VerificationFailure(f"integration constant {p} survives with value {val}", diag)
    diag["constants"] = constants
    diag["q_plus_forced_zero"] = ledger.is_zero(qp)
    diag["q_plus_resolved_by"] = ledger.zero_since.get(qp)
    diag["rebase_index"] = rebase.ref if rebase else None

    # Gegenbauer shapes on both sides
    if branch == "gamma_plus_zero":
        if not ledger.is_zero(qp):
            raise VerificationFailure("q_N^+ is not forced to 0 although Gamma_0^+ = 0", diag)
        nonzero = [j for j in range(N - s_plus + 1, N + 1) if not values[j].is_zero()]
        if nonzero:
            raise VerificationFailure(f"f_j does not vanish for j in {nonzero}", diag)
        if values[N - s_plus].degree() > 0:
            raise VerificationFailure("the rebased f_{N-s} is not constant", diag)
        diag["vanishing_f"] = list(range(N - s_plus + 1, N + 1))
    for j in range(0, N + 1):
        expected = UniPoly.zero()
        for seed in plus_seeds:
            e = seed.expected(lam, a, N, j)
            if e is not None:
                expected = expected + e.scale(sol[seed.name])
        if values[j] != expected:
            raise VerificationFailure(f"f_{j} does not follow the Gegenbauer shape", diag)
    for j in range(1, N + 1):
        expected = UniPoly.zero()
        for seed in minus_seeds:
            e = seed.expected(lam, a, N, j) if j <= seed.ref else None
            if e is not None:
                expected = expected + e.scale(sol[seed.name])
        if values[-j] != expected:
            raise VerificationFailure(f"f_-{j} does not follow the Gegenbauer shape", diag)

    f_out, norm = _normalize(values, lam, a, N)
    diag["normalization"] = norm
    diag.update(_q_tilde_report(f_out, lam, a, N, norm))
    return FVector(N, a, f_out), diag


def _check_minus_structure(ledger: _Ledger, fmj: _Lin, j: int, s: int, lam: Fraction, a: int, N: int,
                           seeds: list[_Seed], printed_index: bool, diag: dict) -> dict:
    """i^(N-j) f_{-j} is the seeded Gegenbauer part plus P_{-j}, for every point of the
    current solution space, and the constants obey the constraint family."""
    n = N - s - j
    for sol in ledger.basis:
        lhs = fmj.evaluate(sol).scale(i_power(N - j))
        expected = UniPoly.zero()
        for seed in seeds:
            e = seed.expected(lam, a, N, j)
            if e is not None:
                expected = expected + e.scale(sol[seed.name] * i_power(N - j))
        consts = {idx: sol.get(f"c-{idx}", ZERO) for idx in range(N)}
        expected = expected + p_polynomial(n, s, N, a, consts)
        if lhs != expected:
            raise VerificationFailure(f"f_-{j} does not have the Gegenbauer + P form", diag)
        if any(not r.is_zero() for r in relation_79(n, s, N, a, consts, printed_index)):
            raise VerificationFailure(f"constants at f_-{j} violate the constraint family", diag)
    return {"j": j, "n": n, "dimension": ledger.dimension()}


def _normalize(values: dict[int, UniPoly], lam: Fraction, a: int, N: int) -> tuple[dict[int, UniPoly], str]:
    """Scale so that q~_N^+ = 1 in the normalized + side expression."""
    for j in range(0, N + 1):
        if a > N:
            shape = shape_plus(lam, a, N, j, 0)
        else:
            mu = lam + N - 1
            shape = ctilde(mu, a + j - N).scale(i_power(-j) * pochhammer_gamma_ratio(mu, _tp(a, N, j))) \
                if a + j - N >= 0 else UniPoly.zero()
        if shape is None or shape.is_zero():
            continue
        scale = proportionality([values[j]], [shape])
        if scale is None:
            if values[j].is_zero():
                continue
            raise VerificationFailure(f"f_{j} is not a multiple of its normalized shape")
        kind = "q_tilde_plus" if a > N else "q_tilde_plus_small_a"
        return {k: p.scale(scale.inverse()) for k, p in values.items()}, kind
    for j in range(-N, N + 1):
        p = values[j]
        if not p.is_zero():
            lead = p.coeff(p.degree())
            return {k: q.scale(lead.inverse()) for k, q in values.items()}, "leading_coefficient"
    raise VerificationFailure("solution vanishes identically")


def _q_tilde_report(values: dict[int, UniPoly], lam: Fraction, a: int, N: int, norm: str) -> dict:
    """Recover (q~_N^-, q~_N^+) from the normalized expressions and test their relation."""
    mu = lam + N - 1
    report: dict = {}
    if norm == "leading_coefficient":
        report["relation_q"] = "degenerate"
        return report
    if a <= N:
        ok = all(
            values[j] == ctilde(mu, a + j - N).scale(i_power(-j) * pochhammer_gamma_ratio(mu, _tp(a, N, j)))
            for j in range(N - a, N + 1)
        )
        report["normalized_plus_formula"] = ok
        report["relation_q"] = "not_applicable"
        if not ok:
            raise VerificationFailure("small-a normalized expression does not hold")
        return report
    plus_ok = all(values[j] == shape_plus(lam, a, N, j, 0) for j in range(0, N + 1))
    report["normalized_plus_formula"] = plus_ok
    report["q_tilde_plus"] = ONE.to_json()
    if not plus_ok:
        raise VerificationFailure("normalized + side expression does not hold")
    low = (a - 2 * N + 1) // 2
    q_minus = None
    shapes = {}
    for j in range(1, N + 1):
        if a - j - N < 0:
            continue
        shapes[j] = ctilde(mu, a - j - N).scale(i_power(j) * pochhammer_gamma_ratio(mu + low, _tm(a, N, j) - low))
    for j, shape in shapes.items():
        if shape.is_zero():
            continue
        q_minus = proportionality([values[-j]], [shape])
        if q_minus is None and values[-j].is_zero():
            q_minus = ZERO
        break
    if q_minus is None:
        report["q_tilde_minus"] = None
        report["relation_q"] = "degenerate" if shapes else "no_minus_side"
        return report
    minus_ok = all(values[-j] == shape.scale(q_minus) for j, shape in shapes.items())
    report["q_tilde_minus"] = q_minus.to_json()
    report["normalized_minus_formula"] = minus_ok
    if not minus_ok:
        report["relation_q"] = "degenerate"
        return report
    holds = q_minus * pochhammer_gamma_ratio(mu + low, _tp(a, N, 0) - low) == ONE
    report["relation_q"] = "holds" if holds else "fails"
    if not holds:
        raise VerificationFailure("the Gamma-ratio relation between q~_N^- and q~_N^+ fails", report)
    return report


# -- classification ------------------------------------------------------------------


def natural_difference(lam, nu) -> int | None:
    diff = Fraction(nu) - Fraction(lam)
    if diff.denominator != 1 or diff < 0:
        return None
    return int(diff)


def classify_report(lam, nu, N: int, m: int) -> dict:
    """dim Diff for |m| = N with the cross-checks that back it."""
    lam, nu = Fraction(lam), Fraction(nu)
    if abs(m) != N:
        raise ValueError("classification is stated for |m| = N")
    a = natural_difference(lam, nu)
    report: dict = {"lambda": format_rational(lam), "nu": format_rational(nu), "N": N, "m": m}
    if a is None:
        report.update(dimension=0, reason="nu - lambda is not a natural number")
        return report
    kernel = kernel_gvectors(lam, a, N, N)
    report["a"] = a
    s_plus, s_minus = degenerate_index(lam, a, N, "+"), degenerate_index(lam, a, N, "-")
    report["branch"] = ("gamma_plus_zero" if s_plus is not None
                        else "gamma_minus_zero" if s_minus is not None else "generic")
    report["nullspace_dimension_m_plus"] = len(kernel)
    if len(kernel) != 1:
        raise VerificationFailure(f"nullspace dimension {len(kernel)} at m = N", report)
    g = kernel[0]
    psi = assemble_psi(lam, a, N, N, "+", g.entries)
    if not fsystem_residual(lam, nu, N, N, psi).is_zero():
        raise VerificationFailure("kernel vector does not solve the F-system", report)
    if m == -N:
        image = phi_involution(psi)
        if not so2_weight_check(N, -N, image) or not fsystem_residual(lam, nu, N, -N, image).is_zero():
            raise VerificationFailure("the involution does not map solutions to solutions", report)
        dim_minus = len(solution_space(lam, a, N, -N))
        report["fsystem_dimension_m_minus"] = dim_minus
        if dim_minus != 1:
            raise VerificationFailure(f"F-system dimension {dim_minus} at m = -N", report)
    report["dimension"] = 1
    return report


def classify(lam, nu, N: int, m: int) -> int:
    return classify_report(lam, nu, N, m)["dimension"]
