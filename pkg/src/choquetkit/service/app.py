"""FastAPI application exposing the package over HTTP."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import ChoquetKitError, WindowError
from . import handlers, schemas

app = FastAPI(
    title="choquetkit",
    description=(
        "Choquet integration against non-additive capacities, "
        "Kantorovich-Choquet operator evaluation, and verification suites."
    ),
    version="0.1.0",
)


@app.exception_handler(ChoquetKitError)
async def _input_fault(_request: Request, exc: ChoquetKitError) -> JSONResponse:
    payload: dict = {"detail": str(exc), "error_type": type(exc).__name__}
    if isinstance(exc, WindowError):
        payload["required_b"] = exc.required_b
    offset = getattr(exc, "offset", None)
    if offset is not None:
        payload["offset"] = offset
    return JSONResponse(status_code=422, content=payload)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/integrate", response_model=schemas.IntegrateResponse)
def integrate(req: schemas.IntegrateRequest) -> schemas.IntegrateResponse:
    return handlers.run_integrate(req)


@app.post("/operator", response_model=schemas.OperatorResponse)
def operator(req: schemas.OperatorRequest) -> schemas.OperatorResponse:
    return handlers.run_operator(req)


@app.post("/korovkin", response_model=schemas.KorovkinResponse)
def korovkin(req: schemas.KorovkinRequest) -> schemas.KorovkinResponse:
    return handlers.run_korovkin(req)


@app.post("/properties", response_model=schemas.PropertiesResponse)
def properties(req: schemas.PropertiesRequest) -> schemas.PropertiesResponse:
    return handlers.run_properties(req)


@app.post("/capacity", response_model=schemas.CapacityResponse)
def capacity(req: schemas.CapacityRequest) -> schemas.CapacityResponse:
    return handlers.run_capacity(req)
