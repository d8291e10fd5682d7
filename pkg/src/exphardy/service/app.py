"""FastAPI wrapper around the command handlers.

One POST endpoint per command, all returning canonically serialized JSON
(sorted keys, 17-significant-digit floats) so that responses for identical
requests are byte-identical.  Validation failures map to 422 with a
machine-readable error object; domain errors (thresholds, inadmissible
data, non-convergence) map to 422 as well, carrying the error class name.
"""

from __future__ import annotations

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from pydantic import ValidationError

from ..errors import ComputationError
from ..reports import SCHEMA_VERSION, dumps
from . import models
from .handlers import (
    handle_bliss,
    handle_constants,
    handle_deficit,
    handle_extremal,
    handle_minimize,
    handle_moser,
    handle_onofri,
    handle_shoot,
    handle_sweep,
    handle_verify,
)


def _json(payload: dict, status_code: int = 200) -> Response:
    return Response(
        content=dumps(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _error_payload(kind: str, message: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "error": {"type": kind, "message": message},
    }


def create_app() -> FastAPI:
    app = FastAPI(
        title="exphardy",
        description=(
            "Verification service for sharp exponential-weight Hardy-type "
            "inequalities, their extremal family, and the Onofri inequality"
        ),
        version="0.1.0",
    )

    @app.exception_handler(ComputationError)
    async def computation_error(_: Request, exc: ComputationError) -> Response:
        return _json(_error_payload(type(exc).__name__, str(exc)), status_code=422)

    @app.exception_handler(RequestValidationError)
    async def validation_error(_: Request, exc: RequestValidationError) -> Response:
        return _json(_error_payload("ValidationError", str(exc)), status_code=422)

    @app.exception_handler(ValidationError)
    async def pydantic_error(_: Request, exc: ValidationError) -> Response:
        return _json(_error_payload("ValidationError", str(exc)), status_code=422)

    @app.get("/health")
    def health() -> Response:
        return _json({"schema_version": SCHEMA_VERSION, "status": "ok"})

    @app.post("/constants")
    def constants(req: models.ConstantsRequest) -> Response:
        return _json(handle_constants(req))

    @app.post("/deficit")
    def deficit(req: models.DeficitRequest) -> Response:
        return _json(handle_deficit(req))

    @app.post("/extremal")
    def extremal(req: models.ExtremalRequest) -> Response:
        return _json(handle_extremal(req))

    @app.post("/minimize")
    def minimize(req: models.MinimizeRequest) -> Response:
        return _json(handle_minimize(req))

    @app.post("/shoot")
    def shoot(req: models.ShootRequest) -> Response:
        return _json(handle_shoot(req))

    @app.post("/onofri")
    def onofri(req: models.OnofriRequest) -> Response:
        return _json(handle_onofri(req))

    @app.post("/bliss")
    def bliss(req: models.BlissRequest) -> Response:
        return _json(handle_bliss(req))

    @app.post("/moser")
    def moser(req: models.MoserRequest) -> Response:
        return _json(handle_moser(req))

    @app.post("/sweep")
    def sweep(req: models.SweepRequest) -> Response:
        return _json(handle_sweep(req))

    @app.post("/verify")
    def verify(req: models.VerifyRequest) -> Response:
        return _json(handle_verify(req))

    return app


app = create_app()
