"""HTTP compile service for the live-preview playground.

Stateless: every request parses and evaluates its own source in a worker
thread under a cooperative deadline, so a slow or failing compile never
leaks into another request. Include statements are rejected here (the
service has no project root to resolve them against).
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import __version__
from .dsl import EvaluationTimeout, Severity, evaluate, parse
from .pipeline import glyph_to_svg

DEFAULT_MAX_SOURCE_BYTES = 256 * 1024
MAX_TIMEOUT_MS = 5000


class CompileRequest(BaseModel):
    source: str
    overrides: dict[str, float] = Field(default_factory=dict)
    debug: bool = False
    timeout_ms: int = Field(default=MAX_TIMEOUT_MS, ge=1, le=MAX_TIMEOUT_MS)


class DiagnosticOut(BaseModel):
    severity: str
    message: str
    line: int
    col: int


class ParamOut(BaseModel):
    name: str
    value: float


class CompileResponse(BaseModel):
    svg: str | None = None
    diagnostics: list[DiagnosticOut] = Field(default_factory=list)
    elapsed_ms: int = 0
    params: list[ParamOut] = Field(default_factory=list)


def _diag_out(diagnostics) -> list[DiagnosticOut]:
    return [DiagnosticOut(severity=d.severity.value, message=d.message,
                          line=d.span.line, col=d.span.col)
            for d in diagnostics]


def compile_request(req: CompileRequest) -> CompileResponse:
    """Parse + evaluate + render, bounded by the request's time budget."""
    started = time.monotonic()
    deadline = started + req.timeout_ms / 1000.0

    def elapsed() -> int:
        return int((time.monotonic() - started) * 1000)

    result = parse(req.source, "<playground>")
    if not result.ok:
        return CompileResponse(diagnostics=_diag_out(result.diagnostics),
                               elapsed_ms=elapsed())
    try:
        glyph = evaluate(result.program, req.overrides, deadline=deadline)
    except EvaluationTimeout:
        return CompileResponse(
            diagnostics=[DiagnosticOut(
                severity="error",
                message=f"evaluation exceeded the {req.timeout_ms} ms budget",
                line=1, col=1)],
            elapsed_ms=elapsed())
    diagnostics = _diag_out(result.diagnostics + glyph.diagnostics)
    params = [ParamOut(name=n, value=v) for n, v in glyph.params]
    if any(d.severity == Severity.ERROR.value for d in diagnostics):
        return CompileResponse(diagnostics=diagnostics, params=params,
                               elapsed_ms=elapsed())
    svg = glyph_to_svg(glyph.outlines, debug=req.debug,
                       center_paths=glyph.center_paths)
    return CompileResponse(svg=svg, diagnostics=diagnostics, params=params,
                           elapsed_ms=elapsed())


def create_app(static_dir: str | None = None,
               max_source_bytes: int = DEFAULT_MAX_SOURCE_BYTES) -> FastAPI:
    app = FastAPI(title="paraglyph playground service", version=__version__)
    pool = ThreadPoolExecutor(max_workers=os.cpu_count() or 4)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"detail": "malformed request body"})

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/compile", response_model=CompileResponse,
              response_model_exclude_none=False)
    def compile_endpoint(req: CompileRequest):
        if len(req.source.encode("utf-8")) > max_source_bytes:
            return JSONResponse(
                status_code=413,
                content={"detail": f"source exceeds {max_source_bytes} bytes"})
        # The worker honours the deadline cooperatively; the future timeout
        # is a backstop so the response always returns on schedule.
        future = pool.submit(compile_request, req)
        try:
            response = future.result(timeout=req.timeout_ms / 1000.0 + 1.0)
        except FutureTimeout:
            response = CompileResponse(
                diagnostics=[DiagnosticOut(
                    severity="error",
                    message=f"evaluation exceeded the {req.timeout_ms} ms "
                            "budget", line=1, col=1)],
                elapsed_ms=req.timeout_ms)
        status = 200 if response.svg is not None else 422
        return JSONResponse(status_code=status,
                            content=response.model_dump())

    if static_dir and os.path.isdir(static_dir):
        # Mounted last so the API routes above keep precedence.
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            from importlib import resources
            builtin = resources.files("paraglyph.playground") / "index.html"
            return HTMLResponse(builtin.read_text("utf-8"))

    return app
