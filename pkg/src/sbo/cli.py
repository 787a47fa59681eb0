"""Command line client.

Every subcommand runs in-process by default; with --server URL the request
goes to a running `sbo serve` instead.  Exit codes: 0 success, 1 verification
failure, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

import tomli

from . import __version__, service
from .odesolver import VerificationFailure

EXIT_OK, EXIT_FAILED, EXIT_MALFORMED = 0, 1, 2

# options whose value may start with "-" (negative rationals such as -1/2)
_VALUE_OPTIONS = ("--lambda", "--nu", "--m", "--a", "--N")


class _Malformed(Exception):
    pass


def _rejoin_negative_values(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _Malformed(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise _Malformed(f"{path} is not valid JSON: {exc}") from exc


def _read_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomli.load(fh)
    except OSError as exc:
        raise _Malformed(f"cannot read {path}: {exc.strerror}") from exc
    except tomli.TOMLDecodeError as exc:
        raise _Malformed(f"{path} is not valid TOML: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sbo", description="Exact construction and verification of the "
                                "symmetry breaking operators D_{lambda,nu}^{N,+-N}.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--server", metavar="URL", help="send the request to a running sbo service")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the property suites")
    v.add_argument("--suite", default="all", choices=["appendix", "fsystem", "ode", "duality", "all"])
    v.add_argument("--quick", action="store_true", help="small grids, for smoke testing")
    v.add_argument("--euler-factor", type=int, default=1,
                   help="constant on the right of the Euler identity (1 as usually stated, 2 holds)")

    c = sub.add_parser("classify", help="dimension of the operator space with cross-checks")
    c.add_argument("--lambda", dest="lam", required=True)
    c.add_argument("--nu", required=True)
    c.add_argument("--N", required=True)
    c.add_argument("--m", required=True)

    s = sub.add_parser("solve", help="solve the ODE system for g")
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--a", required=True)
    s.add_argument("--N", required=True)
    s.add_argument("--m", required=True)
    s.add_argument("--method", default="nullspace", choices=list(service.METHODS))

    e = sub.add_parser("emit", help="print the operator")
    e.add_argument("--lambda", dest="lam", required=True)
    e.add_argument("--nu", required=True)
    e.add_argument("--N", required=True)
    e.add_argument("--m", required=True)
    e.add_argument("--format", default="json", choices=list(service.FORMATS))

    a = sub.add_parser("apply", help="apply an operator to a polynomial section")
    a.add_argument("--operator", required=True, help="operator JSON file (as printed by emit)")
    a.add_argument("--section", required=True, help="section JSON file {N, components}")

    g = sub.add_parser("scan", help="batch classification over a TOML grid")
    g.add_argument("--grid", required=True)

    sv = sub.add_parser("serve", help="run the HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    return p


def _request(args) -> tuple[str, dict]:
    cmd = args.command
    if cmd == "verify":
        return "verify", {"suite": args.suite, "quick": args.quick, "euler_factor": args.euler_factor}
    if cmd == "classify":
        return "classify", {"lambda": args.lam, "nu": args.nu, "N": args.N, "m": args.m}
    if cmd == "solve":
        return "solve", {"lambda": args.lam, "a": args.a, "N": args.N, "m": args.m, "method": args.method}
    if cmd == "emit":
        return "emit", {"lambda": args.lam, "nu": args.nu, "N": args.N, "m": args.m, "format": args.format}
    if cmd == "apply":
        return "apply", {"operator": _read_json(args.operator), "section": _read_json(args.section)}
    if cmd == "scan":
        return "scan", {"grid": _read_toml(args.grid)}
    raise AssertionError(cmd)


def _local(endpoint: str, body: dict) -> dict:
    if endpoint == "verify":
        return service.verify(body["suite"], quick=body["quick"], euler_factor=body["euler_factor"])
    if endpoint == "classify":
        return service.classify(body["lambda"], body["nu"], body["N"], body["m"])
    if endpoint == "solve":
        return service.solve(body["lambda"], body["a"], body["N"], body["m"], body["method"])
    if endpoint == "emit":
        return service.emit_operator(body["lambda"], body["nu"], body["N"], body["m"], body["format"])
    if endpoint == "apply":
        return service.apply(body["operator"], body["section"])
    return service.scan(body["grid"])


def _remote(url: str, endpoint: str, body: dict) -> tuple[int, dict]:
    import httpx

    for key in ("N", "a", "m"):
        if key in body:
            try:
                body[key] = int(body[key])
            except ValueError:
                raise _Malformed(f"{key} must be an integer, got {body[key]!r}") from None
    try:
        resp = httpx.post(f"{url.rstrip('/')}/{endpoint}", json=body, timeout=None)
    except httpx.HTTPError as exc:
        raise _Malformed(f"cannot reach {url}: {exc}") from exc
    return resp.status_code, resp.json()


def _exit_for(endpoint: str, result: dict) -> int:
    if endpoint == "verify" and not result["passed"]:
        return EXIT_FAILED
    if endpoint == "scan" and result["failures"]:
        return EXIT_FAILED
    return EXIT_OK


def _print(endpoint: str, result: dict) -> None:
    if endpoint == "emit" and result["format"] == "latex":
        print(result["operator"])
    elif endpoint == "verify":
        for suite in result["suites"]:
            mark = "PASS" if suite["passed"] else "FAIL"
            print(f"{mark} {suite['name']}: {suite['checks']} checks, {suite['failure_count']} failed, "
                  f"{suite['seconds']}s")
            for label in suite["failures"][:5]:
                print(f"    {label}")
    else:
        print(json.dumps(result, indent=2))


def main(argv: list[str] | None = None) -> int:
    argv = _rejoin_negative_values(list(sys.argv[1:] if argv is None else argv))
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("sbo.api:app", host=args.host, port=args.port)
        return EXIT_OK
    try:
        endpoint, body = _request(args)
        if args.server:
            status, result = _remote(args.server, endpoint, body)
            if status == 400:
                print(f"error: {result.get('detail')}", file=sys.stderr)
                return EXIT_MALFORMED
            if status == 409:
                print(f"verification failure: {result.get('detail')}", file=sys.stderr)
                print(json.dumps(result.get("diagnostics"), indent=2), file=sys.stderr)
                return EXIT_FAILED
            if status != 200:
                print(f"error: service answered {status}", file=sys.stderr)
                return EXIT_MALFORMED
        else:
            result = _local(endpoint, body)
    except _Malformed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        print(json.dumps(exc.diagnostics, indent=2, default=str), file=sys.stderr)
        return EXIT_FAILED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    _print(endpoint, result)
    return _exit_for(endpoint, result)


if __name__ == "__main__":
    sys.exit(main())
