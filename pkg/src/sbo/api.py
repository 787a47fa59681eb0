"""HTTP front end.  Malformed input is 400, a failed cross-check is 409."""

from __future__ import annotations

from typing import Any, Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__, service
from .odesolver import VerificationFailure

RATIONAL = r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$"

app = FastAPI(title="sbo", version=__version__)


class VerifyRequest(BaseModel):
    suite: Literal["appendix", "fsystem", "ode", "duality", "all"] = "all"
    quick: bool = False
    euler_factor: int = 1


class VerifyResponse(BaseModel):
    passed: bool
    suites: list[dict[str, Any]]


class ClassifyRequest(BaseModel):
    lam: str = Field(alias="lambda", pattern=RATIONAL)
    nu: str = Field(pattern=RATIONAL)
    N: int = Field(ge=0)
    m: int


class SolveRequest(BaseModel):
    lam: str = Field(alias="lambda", pattern=RATIONAL)
    a: int = Field(ge=0)
    N: int = Field(ge=0)
    m: int
    method: Literal["nullspace", "recurrence", "closed"] = "nullspace"


class SolveResponse(BaseModel):
    dimension: int
    basis: list[dict[str, Any]]
    branch: dict[str, Any]


class EmitRequest(BaseModel):
    lam: str = Field(alias="lambda", pattern=RATIONAL)
    nu: str = Field(pattern=RATIONAL)
    N: int = Field(ge=0)
    m: int
    format: Literal["json", "latex"] = "json"


class EmitResponse(BaseModel):
    format: str
    operator: Any
    order: int
    renormalized: bool


class ApplyRequest(BaseModel):
    operator: dict[str, Any]
    section: dict[str, Any]


class ApplyResponse(BaseModel):
    polynomial: list
    variables: list[str]


class ScanRequest(BaseModel):
    grid: dict[str, Any]


class ScanResponse(BaseModel):
    points: list[dict[str, Any]]
    count: int
    failures: int


@app.exception_handler(ValueError)
async def _malformed(request: Request, exc: ValueError):
    return JSONResponse(status_code=400, content={"error": "malformed input", "detail": str(exc)})


@app.exception_handler(RequestValidationError)
async def _invalid(request: Request, exc: RequestValidationError):
    detail = "; ".join(f"{'.'.join(str(x) for x in e['loc'])}: {e['msg']}" for e in exc.errors())
    return JSONResponse(status_code=400, content={"error": "malformed input", "detail": detail})


@app.exception_handler(VerificationFailure)
async def _failed(request: Request, exc: VerificationFailure):
    return JSONResponse(status_code=409, content={"error": "verification failure", "detail": str(exc),
                                                  "diagnostics": exc.diagnostics})


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest):
    return service.verify(req.suite, quick=req.quick, euler_factor=req.euler_factor)


@app.post("/classify")
def classify(req: ClassifyRequest) -> dict[str, Any]:
    return service.classify(req.lam, req.nu, req.N, req.m)


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest):
    return service.solve(req.lam, req.a, req.N, req.m, req.method)


@app.post("/emit", response_model=EmitResponse)
def emit(req: EmitRequest):
    return service.emit_operator(req.lam, req.nu, req.N, req.m, req.format)


@app.post("/apply", response_model=ApplyResponse)
def apply(req: ApplyRequest):
    return service.apply(req.operator, req.section)


@app.post("/scan", response_model=ScanResponse)
def scan(req: ScanRequest):
    return service.scan(req.grid)
