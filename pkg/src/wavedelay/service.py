"""HTTP service exposing runs, sweeps, and the validation suite.

The service is stateless: each request carries a full run
configuration, the response carries the complete numeric results
(energy trace, profiles, fit), and persistence is the client's job.
Floats survive the JSON round trip exactly (shortest-repr encoding), so
a client writing CSVs produces byte-identical files to a local run.
"""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .experiments import (
    RunConfig,
    RunResult,
    SweepResult,
    run_single,
    run_sweep,
    validate,
)

Case = Literal["boundary", "internal", "pointwise"]
Stepper = Literal["explicit", "implicit"]


class RunRequest(BaseModel):
    case: Case
    mu: float = 0.0
    n_cells: int = Field(default=100, ge=4)
    cfl: float = Field(default=1.0, gt=0.0)
    periods: int = Field(default=200, ge=1)
    stepper: Stepper = "explicit"
    ic: str = "default"
    damping: str = "1"
    i0: int | None = None
    i1: int | None = None
    snapshot_times: list[float] | None = None
    fit_window: tuple[float, float] | None = None

    def to_config(self) -> RunConfig:
        return RunConfig(
            case=self.case,
            mu=self.mu,
            n_cells=self.n_cells,
            cfl=self.cfl,
            periods=self.periods,
            stepper=self.stepper,
            ic=self.ic,
            damping=self.damping,
            i0=self.i0,
            i1=self.i1,
            snapshot_times=tuple(self.snapshot_times) if self.snapshot_times else None,
            fit_window=self.fit_window,
        )


class SweepRequest(RunRequest):
    mu_list: list[float] = Field(min_length=1)
    workers: int = Field(default=1, ge=1)


class ParamsModel(BaseModel):
    case: str
    ell: float
    n_cells: int
    dx: float
    cfl: float
    dt: float
    s: float
    delay: float
    k_delay: int
    m_total: int
    t_final: float
    mu: float
    i0: int | None
    i1: int | None
    j0: int | None


class TraceModel(BaseModel):
    step: list[int]
    t: list[float]
    e_kinetic: list[float]
    e_potential: list[float]
    e_total: list[float]


class ProfileModel(BaseModel):
    requested_time: float
    time: float
    level: int
    x: list[float]
    u: list[float]


class FitModel(BaseModel):
    omega: float
    intercept: float
    residual: float
    window: tuple[float, float]


class ConfigModel(BaseModel):
    case: str
    mu: float
    n_cells: int
    cfl: float
    periods: int
    stepper: str
    ic: str
    damping: str
    snapshot_times: list[float] | None
    fit_window: tuple[float, float] | None


class RunResponse(BaseModel):
    label: str
    config: ConfigModel
    params: ParamsModel
    trace: TraceModel
    profiles: list[ProfileModel]
    blow_up_step: int | None
    fit: FitModel | None


class SweepRowModel(BaseModel):
    mu: float
    omega: float | None
    residual: float | None
    final_energy: float | None
    blow_up_step: int | None


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]
    runs: list[RunResponse]


class CheckModel(BaseModel):
    name: str
    passed: bool
    detail: str


class ValidationResponse(BaseModel):
    passed: bool
    checks: list[CheckModel]


class HealthResponse(BaseModel):
    status: str
    version: str


def _run_response(result: RunResult) -> RunResponse:
    p = result.params
    cfg = result.config
    return RunResponse(
        label=cfg.label(),
        config=ConfigModel(
            case=cfg.case,
            mu=cfg.mu,
            n_cells=cfg.n_cells,
            cfl=cfg.cfl,
            periods=cfg.periods,
            stepper=cfg.stepper,
            ic=cfg.ic,
            damping=cfg.damping,
            snapshot_times=list(cfg.snapshot_times) if cfg.snapshot_times else None,
            fit_window=cfg.fit_window,
        ),
        params=ParamsModel(
            case=p.case,
            ell=p.ell,
            n_cells=p.n_cells,
            dx=p.dx,
            cfl=p.cfl,
            dt=p.dt,
            s=p.s,
            delay=p.delay,
            k_delay=p.k_delay,
            m_total=p.m_total,
            t_final=p.t_final,
            mu=p.mu,
            i0=p.i0,
            i1=p.i1,
            j0=p.j0,
        ),
        trace=TraceModel(
            step=result.trace.step,
            t=result.trace.t,
            e_kinetic=result.trace.e_kinetic,
            e_potential=result.trace.e_potential,
            e_total=result.trace.e_total,
        ),
        profiles=[
            ProfileModel(
                requested_time=prof.requested_time,
                time=prof.time,
                level=prof.level,
                x=prof.x.tolist(),
                u=prof.u.tolist(),
            )
            for prof in result.profiles
        ],
        blow_up_step=result.blow_up_step,
        fit=None
        if result.fit is None
        else FitModel(
            omega=result.fit.omega,
            intercept=result.fit.intercept,
            residual=result.fit.residual,
            window=result.fit.window,
        ),
    )


def _sweep_response(sweep: SweepResult) -> SweepResponse:
    return SweepResponse(
        rows=[
            SweepRowModel(
                mu=row.mu,
                omega=row.omega,
                residual=row.residual,
                final_energy=row.final_energy,
                blow_up_step=row.blow_up_step,
            )
            for row in sweep.rows
        ],
        runs=[_run_response(r) for r in sweep.runs],
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="wavedelay",
        description="1D wave equation with delayed damping: runs, sweeps, diagnostics",
        version=__version__,
    )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/runs", response_model=RunResponse)
    def runs(request: RunRequest) -> RunResponse:
        try:
            result = run_single(request.to_config())
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return _run_response(result)

    @app.post("/sweeps", response_model=SweepResponse)
    def sweeps(request: SweepRequest) -> SweepResponse:
        try:
            sweep = run_sweep(request.to_config(), request.mu_list, request.workers)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return _sweep_response(sweep)

    @app.post("/validation", response_model=ValidationResponse)
    def validation() -> ValidationResponse:
        report = validate()
        return ValidationResponse(
            passed=report.passed,
            checks=[
                CheckModel(name=c.name, passed=c.passed, detail=c.detail)
                for c in report.checks
            ],
        )

    return app


app = create_app()
