"""Request handlers shared by the HTTP service and the local CLI path.

Handlers take plain JSON-like values and return JSON-ready dicts.  Malformed
input raises ValueError; a failed cross-check raises VerificationFailure.
"""

from __future__ import annotations

from .exactfield import degenerate_lambdas, format_rational, parse_rational
from .odesolver import (
    VerificationFailure, classify_report, closed_solution, kernel_gvectors, natural_difference,
    recurrence_solution, tilde_unreverse,
)
from .opemit import DiffOperator, PolySection, apply_operator, build_sbo, emit_latex, order
from .suites import run_suites

METHODS = ("nullspace", "recurrence", "closed")
FORMATS = ("json", "latex")


def _natural(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        try:
            value = int(str(value), 10)
        except ValueError:
            raise ValueError(f"{name} must be an integer, got {value!r}") from None
    if value < 0:
        raise ValueError(f"{name} must be a natural number, got {value}")
    return value


def _integer(value, name: str) -> int:
    if isinstance(value, bool):
        raise ValueError(f"{name} must be an integer")
    try:
        return int(str(value), 10)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {value!r}") from None


def _pm(N: int, m: int) -> None:
    if abs(m) != N:
        raise ValueError(f"m must be +N or -N, got N={N}, m={m}")


def verify(suite: str = "all", quick: bool = False, euler_factor: int = 1) -> dict:
    results = run_suites(suite, quick=quick, euler_factor=euler_factor)
    return {"passed": all(r.passed for r in results), "suites": [r.to_json() for r in results]}


def classify(lam, nu, N, m) -> dict:
    lam, nu = parse_rational(lam), parse_rational(nu)
    N, m = _natural(N, "N"), _integer(m, "m")
    _pm(N, m)
    return classify_report(lam, nu, N, m)


def solve(lam, a, N, m, method: str = "nullspace") -> dict:
    lam = parse_rational(lam)
    a, N, m = _natural(a, "a"), _natural(N, "N"), _integer(m, "m")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if method == "nullspace":
        if m < N:
            raise ValueError("the nullspace solver needs m >= N")
        basis = kernel_gvectors(lam, a, N, m)
        branch = {"method": "nullspace", "exploratory": m > N}
        return {"dimension": len(basis), "basis": [g.to_json() for g in basis], "branch": branch}
    if m != N:
        raise ValueError(f"method {method!r} is defined for m = N only")
    if method == "closed":
        g = closed_solution(lam, a, N)
        renormalized = g.is_zero()
        if renormalized:
            g = closed_solution(lam, a, N, renormalized=True)
        branch = {"method": "closed", "renormalized": renormalized}
        return {"dimension": 1, "basis": [g.to_json()], "branch": branch}
    f, diag = recurrence_solution(lam, a, N)
    diag = dict(diag, method="recurrence")
    return {"dimension": diag["dimension"], "basis": [tilde_unreverse(f).to_json()], "branch": diag}


def emit_operator(lam, nu, N, m, fmt: str = "json") -> dict:
    lam, nu = parse_rational(lam), parse_rational(nu)
    N, m = _natural(N, "N"), _integer(m, "m")
    _pm(N, m)
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    if natural_difference(lam, nu) is None:
        raise ValueError("nu - lambda must be a natural number")
    D = build_sbo(lam, nu, N, m)
    renormalized = False
    if D.is_zero():
        D = build_sbo(lam, nu, N, m, renormalized=True)
        renormalized = True
    body = D.to_json() if fmt == "json" else emit_latex(D)
    return {"format": fmt, "operator": body, "order": order(D), "renormalized": renormalized}


def apply(operator: dict, section: dict) -> dict:
    D = DiffOperator.from_json(operator)
    try:
        f = PolySection.from_json(section)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed section: {exc}") from exc
    p = apply_operator(D, f)
    return {"polynomial": p.to_json(), "variables": ["x1", "x2"]}


def _range(spec, name: str) -> range:
    if isinstance(spec, int) and not isinstance(spec, bool):
        return range(spec, spec + 1)
    if isinstance(spec, list) and len(spec) == 2:
        lo, hi = _natural(spec[0], name), _natural(spec[1], name)
        return range(lo, hi + 1)
    raise ValueError(f"{name} must be an integer or an inclusive [lo, hi] pair")


def scan(grid: dict) -> dict:
    """Classification over lambdas x a-range x N-range (x both signs of m).

    Grid keys: lambdas (list of "P/Q"), a, N (int or [lo, hi]), optional m ("plus",
    "minus", "both") and include_degenerate (bool, adds every Gamma-degenerate lambda).
    """
    if not isinstance(grid, dict):
        raise ValueError("grid must be a table")
    unknown = set(grid) - {"lambdas", "a", "N", "m", "include_degenerate"}
    if unknown:
        raise ValueError(f"unknown grid keys {sorted(unknown)}")
    if not isinstance(grid.get("lambdas"), list) or not grid["lambdas"]:
        raise ValueError("grid needs a non-empty 'lambdas' list")
    lambdas = [parse_rational(x) for x in grid["lambdas"]]
    a_range, n_range = _range(grid.get("a"), "a"), _range(grid.get("N"), "N")
    signs = {"plus": (1,), "minus": (-1,), "both": (1, -1)}.get(grid.get("m", "both"))
    if signs is None:
        raise ValueError("m must be 'plus', 'minus' or 'both'")
    with_degenerate = bool(grid.get("include_degenerate", False))

    points, failures = [], 0
    for N in n_range:
        for a in a_range:
            lams = list(lambdas)
            if with_degenerate:
                lams += [lam for lam, _, _ in degenerate_lambdas(a, N) if lam not in lams]
            for lam in lams:
                for sign in signs:
                    m = sign * N
                    if N == 0 and sign < 0 and 1 in signs:
                        continue
                    try:
                        points.append(classify_report(lam, lam + a, N, m))
                    except VerificationFailure as exc:
                        failures += 1
                        points.append({"lambda": format_rational(lam), "a": a, "N": N, "m": m,
                                       "error": str(exc), "diagnostics": exc.diagnostics})
    return {"points": points, "count": len(points), "failures": failures}

