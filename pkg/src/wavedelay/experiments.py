"""Run orchestration, parameter sweeps, CSV persistence, and self-checks.

A run executes the free phase then the delayed phase of one scheme,
recording the discrete energy at every step and solution profiles at
requested times.  Sweeps repeat a run over a list of feedback
coefficients and tabulate the fitted exponential rates.  Numeric output
uses shortest round-trip decimals, so re-parsing a written trace
reproduces the in-memory values bit for bit.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .boundary import BoundaryScheme
from .core import FvMesh, SimParams, build_params
from .energy import (
    DecayFit,
    EnergyTrace,
    energy_boundary,
    energy_internal,
    energy_pointwise,
    fit_decay_rate,
)
from .internal import InternalScheme
from .oracle import build_recurrence, initial_vector, oracle_run
from .pointwise import PointwiseScheme

# ---------------------------------------------------------------------------
# initial conditions

#: Named initial data (u0, u1) from the reference experiments.  The
#: boundary/pointwise default satisfies u0(0) = 0 and u0'(ell) = 0, the
#: internal default vanishes at both ends.
IC_PRESETS: dict[str, tuple[str, str]] = {
    "boundary-default": ("x**2 - 2*x", "-(x**2 - 2*x)"),
    "internal-default": ("x*(x - 1)", "-(x*(x - 1))"),
    "pointwise-default": ("x**2 - 2*x", "-(x**2 - 2*x)"),
    "zero": ("0", "0"),
}

_EXPR_NAMES = {
    "pi": np.pi,
    "e": np.e,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sign": np.sign,
    "minimum": np.minimum,
    "maximum": np.maximum,
    "where": np.where,
}


def expr_fn(expr: str):
    """Compile an arithmetic expression in x into a callable.

    Only plain arithmetic and the whitelisted numpy names are available;
    this is a convenience for run configs, not a sandbox.
    """
    code = compile(expr, "<ic-expr>", "eval")
    for name in code.co_names:
        if name not in _EXPR_NAMES and name != "x":
            raise ValueError(f"unknown name {name!r} in expression {expr!r}")

    def fn(x: float) -> float:
        return float(eval(code, {"__builtins__": {}}, {**_EXPR_NAMES, "x": x}))

    return fn


def resolve_ic(ic: str, case: str) -> tuple[str, str]:
    """Resolve an IC spec to (u0 expression, u1 expression)."""
    if ic == "default":
        ic = f"{case}-default"
    if ic in IC_PRESETS:
        return IC_PRESETS[ic]
    if "|" in ic:
        u0_expr, u1_expr = ic.split("|", 1)
        return u0_expr.strip(), u1_expr.strip()
    raise ValueError(
        f"unknown initial condition {ic!r}; use a preset name or 'u0expr|u1expr'"
    )


# ---------------------------------------------------------------------------
# run configuration and results


@dataclass(frozen=True)
class RunConfig:
    """One simulation run, CSV-ready."""

    case: str
    mu: float = 0.0
    n_cells: int = 100
    cfl: float = 1.0
    periods: int = 200
    stepper: str = "explicit"
    ic: str = "default"
    damping: str = "1"  # weight expression on the internal interval
    i0: int | None = None
    i1: int | None = None
    snapshot_times: tuple[float, ...] | None = None  # default (0, T_f)
    fit_window: tuple[float, float] | None = None  # default (T, T_f)

    def label(self) -> str:
        tag = f"{self.case}_mu{self.mu:g}"
        if self.stepper != "explicit":
            tag += f"_{self.stepper}"
        return tag


@dataclass(frozen=True)
class Profile:
    """Solution snapshot at one time level (nodes for FD, centers for FV)."""

    requested_time: float
    time: float
    level: int
    x: np.ndarray
    u: np.ndarray


@dataclass
class RunResult:
    config: RunConfig
    params: SimParams
    trace: EnergyTrace
    profiles: list[Profile]
    blow_up_step: int | None
    fit: DecayFit | None


def build_run_params(cfg: RunConfig) -> SimParams:
    i0, i1 = cfg.i0, cfg.i1
    if cfg.case == "internal":
        if i0 is None:
            i0 = cfg.n_cells // 4
        if i1 is None:
            i1 = 3 * cfg.n_cells // 4
    if cfg.stepper not in ("explicit", "implicit"):
        raise ValueError(f"unknown stepper {cfg.stepper!r}")
    if cfg.stepper == "implicit" and cfg.case == "pointwise":
        raise ValueError("the pointwise scheme has no implicit variant")
    return build_params(
        cfg.case,
        n_cells=cfg.n_cells,
        cfl=cfg.cfl,
        periods=cfg.periods,
        mu=cfg.mu,
        i0=i0,
        i1=i1,
    )


def make_scheme(cfg: RunConfig, p: SimParams):
    u0_expr, u1_expr = resolve_ic(cfg.ic, cfg.case)
    u0, u1 = expr_fn(u0_expr), expr_fn(u1_expr)
    if cfg.case == "boundary":
        return BoundaryScheme.from_initial_data(u0, u1, p)
    if cfg.case == "internal":
        return InternalScheme.from_initial_data(u0, u1, p, d=expr_fn(cfg.damping))
    return PointwiseScheme.from_initial_data(u0, u1, p)


def _energy_of(scheme, p: SimParams) -> tuple[float, float, float]:
    if p.case == "boundary":
        return energy_boundary(scheme.state, p)
    if p.case == "internal":
        return energy_internal(scheme.state, p)
    return energy_pointwise(scheme.state, scheme.mesh, p)


def _snapshot_levels(cfg: RunConfig, p: SimParams) -> dict[int, float]:
    """Map requested snapshot times to time-level indices."""
    times = cfg.snapshot_times
    if times is None:
        times = (0.0, p.t_final)
    levels: dict[int, float] = {}
    for t in times:
        m = int(round(t / p.dt))
        if not (0 <= m <= p.m_total):
            raise ValueError(f"snapshot time {t} outside [0, {p.t_final}]")
        levels[m] = t
    return levels


def run_single(cfg: RunConfig) -> RunResult:
    """Execute one run: free phase, delayed phase, energies, snapshots.

    A non-finite state aborts the run and keeps the partial trace (the
    growth experiments rely on the partial data); the abort step is
    reported as ``blow_up_step``.
    """
    p = build_run_params(cfg)
    scheme = make_scheme(cfg, p)
    explicit = cfg.stepper == "explicit"
    x = p.nodes() if cfg.case != "pointwise" else p.cell_centers()
    want = _snapshot_levels(cfg, p)

    profiles: list[Profile] = []

    def grab(level: int, u: np.ndarray) -> None:
        if level in want:
            profiles.append(
                Profile(want[level], level * p.dt, level, x.copy(), u.copy())
            )

    trace = EnergyTrace()
    e_k, e_p, _ = _energy_of(scheme, p)
    trace.append(0, 0.0, e_k, e_p)
    grab(0, scheme.state.u_curr)
    grab(1, scheme.state.u_next)

    blow_up_step = None
    # growth experiments overflow on purpose; silence the expected warnings
    with np.errstate(over="ignore", invalid="ignore"):
        while scheme.state.step < p.m_total - 1:
            if explicit:
                scheme.step()
            else:
                scheme.step_implicit()
            n = scheme.state.step
            e_k, e_p, e_tot = _energy_of(scheme, p)
            # energies overflow before the state does (they are squares)
            if not (np.isfinite(scheme.state.u_next).all() and np.isfinite(e_tot)):
                blow_up_step = n
                break
            trace.append(n, n * p.dt, e_k, e_p)
            grab(n + 1, scheme.state.u_next)

    fit = None
    window = cfg.fit_window or (p.delay, p.t_final)
    t_arr = trace.times()
    mask = (t_arr >= window[0]) & (t_arr <= window[1])
    if mask.sum() >= 2 and np.all(trace.totals()[mask] > 0.0):
        fit = fit_decay_rate(trace, window)

    return RunResult(cfg, p, trace, profiles, blow_up_step, fit)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepRow:
    mu: float
    omega: float | None
    residual: float | None
    final_energy: float | None
    blow_up_step: int | None


@dataclass
class SweepResult:
    rows: list[SweepRow]
    runs: list[RunResult]


def parse_mu_list(spec: str) -> list[float]:
    """Parse 'A:B:STEP' (inclusive, half-step tolerance) or 'a,b,c'."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError("range must be start:stop:step")
        a, b, step = (float(s) for s in parts)
        if step <= 0:
            raise ValueError("step must be positive")
        count = int(math.floor((b - a) / step + 0.5)) + 1
        if count < 1:
            raise ValueError("empty mu range")
        return [round(a + i * step, 12) for i in range(count)]
    values = [float(s) for s in spec.split(",") if s.strip()]
    if not values:
        raise ValueError("empty mu list")
    return values


def run_sweep(cfg: RunConfig, mu_list: list[float], workers: int = 1) -> SweepResult:
    """One independent run per mu; a blown-up run is data, not an error."""
    if not mu_list:
        raise ValueError("mu list is empty")
    configs = [replace(cfg, mu=mu) for mu in mu_list]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(run_single, configs))
    else:
        runs = [run_single(c) for c in configs]
    rows = []
    for mu, run in zip(mu_list, runs):
        e = run.trace.e_total
        rows.append(
            SweepRow(
                mu=mu,
                omega=run.fit.omega if run.fit else None,
                residual=run.fit.residual if run.fit else None,
                final_energy=e[-1] if e else None,
                blow_up_step=run.blow_up_step,
            )
        )
    return SweepResult(rows=rows, runs=runs)


# ---------------------------------------------------------------------------
# persistence

_ENERGY_HEADER = "step,t,e_kinetic,e_potential,e_total"
_PROFILE_HEADER = "x,u"
_SUMMARY_HEADER = "mu,omega,residual,final_energy,blow_up_step"


def _fmt(value) -> str:
    """Shortest round-trip decimal; empty field for missing values."""
    if value is None:
        return ""
    return repr(float(value)) if isinstance(value, float) else str(value)


def write_energy_csv(path: Path, step, t, e_kinetic, e_potential, e_total) -> None:
    lines = [_ENERGY_HEADER]
    for row in zip(step, t, e_kinetic, e_potential, e_total):
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_energy_csv(path: Path) -> dict[str, list]:
    lines = path.read_text(encoding="utf-8").strip().split("\n")
    if lines[0] != _ENERGY_HEADER:
        raise ValueError(f"unexpected energy CSV header: {lines[0]!r}")
    cols: dict[str, list] = {name: [] for name in _ENERGY_HEADER.split(",")}
    for line in lines[1:]:
        vals = line.split(",")
        cols["step"].append(int(vals[0]))
        for name, v in zip(("t", "e_kinetic", "e_potential", "e_total"), vals[1:]):
            cols[name].append(float(v))
    return cols


def write_profile_csv(path: Path, x, u) -> None:
    lines = [_PROFILE_HEADER]
    for xi, ui in zip(x, u):
        lines.append(f"{_fmt(float(xi))},{_fmt(float(ui))}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _params_dict(p: SimParams) -> dict:
    return {
        "case": p.case,
        "ell": p.ell,
        "n_cells": p.n_cells,
        "dx": p.dx,
        "cfl": p.cfl,
        "dt": p.dt,
        "s": p.s,
        "delay": p.delay,
        "k_delay": p.k_delay,
        "m_total": p.m_total,
        "t_final": p.t_final,
        "mu": p.mu,
        "i0": p.i0,
        "i1": p.i1,
        "j0": p.j0,
    }


def write_run(result: RunResult, out_dir: Path) -> dict[str, object]:
    """Write energy CSV, profile CSVs, and the JSON run manifest.

    Returns the manifest dictionary (also written to disk).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = result.config.label()
    tr = result.trace
    energy_path = out_dir / f"{base}_energy.csv"
    write_energy_csv(energy_path, tr.step, tr.t, tr.e_kinetic, tr.e_potential, tr.e_total)

    profile_files = []
    for prof in result.profiles:
        name = f"{base}_profile_t{prof.requested_time:g}.csv"
        write_profile_csv(out_dir / name, prof.x, prof.u)
        profile_files.append(
            {
                "file": name,
                "requested_time": prof.requested_time,
                "time": prof.time,
                "level": prof.level,
            }
        )

    manifest = {
        "config": {
            "case": result.config.case,
            "mu": result.config.mu,
            "n_cells": result.config.n_cells,
            "cfl": result.config.cfl,
            "periods": result.config.periods,
            "stepper": result.config.stepper,
            "ic": result.config.ic,
            "damping": result.config.damping,
            "snapshot_times": list(result.config.snapshot_times or ()) or None,
            "fit_window": list(result.config.fit_window) if result.config.fit_window else None,
        },
        "params": _params_dict(result.params),
        "energy_file": energy_path.name,
        "profile_files": profile_files,
        "blow_up_step": result.blow_up_step,
        "fit": None
        if result.fit is None
        else {
            "omega": result.fit.omega,
            "intercept": result.fit.intercept,
            "residual": result.fit.residual,
            "window": list(result.fit.window),
        },
    }
    manifest_path = out_dir / f"{base}_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest


def write_sweep(sweep: SweepResult, out_dir: Path) -> Path:
    """Write each run's files plus the sweep summary table."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for run in sweep.runs:
        write_run(run, out_dir)
    lines = [_SUMMARY_HEADER]
    for row in sweep.rows:
        lines.append(
            ",".join(
                (
                    _fmt(float(row.mu)),
                    _fmt(row.omega if row.omega is None else float(row.omega)),
                    _fmt(row.residual if row.residual is None else float(row.residual)),
                    _fmt(row.final_energy if row.final_energy is None else float(row.final_energy)),
                    _fmt(row.blow_up_step),
                )
            )
        )
    path = out_dir / "summary.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# validation report


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class ValidationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [
            f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}" for c in self.checks
        ]


def _check_conservation(case: str) -> list[CheckResult]:
    out = []
    for cfl in (0.5, 1.0):
        cfg = RunConfig(case=case, mu=0.0, n_cells=16, cfl=cfl, periods=1)
        result = run_single(cfg)
        e = np.asarray(result.trace.e_total)
        ref = max(float(e[0]), 1.0)
        per_step = float(np.max(np.abs(np.diff(e)))) / ref
        cumulative = float(np.max(np.abs(e - e[0]))) / ref
        ok = per_step <= 1e-12 and cumulative <= 1e-10
        out.append(
            CheckResult(
                f"free-phase conservation [{case}, cfl={cfl}]",
                ok,
                f"per-step drift {per_step:.2e}, cumulative {cumulative:.2e}",
            )
        )
    return out


def _check_oracle(case: str) -> CheckResult:
    rng = np.random.default_rng(20240 + hash(case) % 1000)
    kw = dict(i0=2, i1=6) if case == "internal" else {}
    p = build_params(case, n_cells=8, cfl=1.0, periods=14, mu=0.7, **kw)
    if case == "pointwise":
        vals0 = rng.normal(size=p.n_cells)
        vals1 = rng.normal(size=p.n_cells)
        u0 = lambda x: 0.0 if x == 0.0 else float(vals0[int(round(x / p.dx - 0.5))])
        u1 = lambda x: float(np.interp(x, p.cell_centers(), vals1))
        scheme = PointwiseScheme.from_initial_data(u0, u1, p)
        scheme.step()  # ghost sample becomes available
    else:
        vals0 = rng.normal(size=p.n_cells + 1)
        vals0[0] = 0.0
        if case == "internal":
            vals0[-1] = 0.0
        vals1 = rng.normal(size=p.n_cells + 1)
        u0 = lambda x: float(vals0[int(round(x / p.dx))])
        u1 = lambda x: float(vals1[int(round(x / p.dx))])
        cls = BoundaryScheme if case == "boundary" else InternalScheme
        scheme = cls.from_initial_data(u0, u1, p)
    free = build_recurrence(case, p, "free")
    delayed = build_recurrence(case, p, "delayed")
    z0, n0 = initial_vector(scheme)
    steps = 200
    traj = oracle_run(free, delayed, z0, n0, steps, p)
    dev = 0.0
    for i in range(steps):
        scheme.step()
        dev = max(dev, float(np.max(np.abs(scheme.state.u_next - traj[i + 1]))))
    return CheckResult(
        f"oracle equivalence [{case}]", dev <= 1e-12, f"sup deviation {dev:.2e}"
    )


def _check_flux_identities() -> list[CheckResult]:
    rng = np.random.default_rng(7)
    p = build_params("pointwise", n_cells=16, cfl=1.0, periods=1, mu=1.3)
    scheme = PointwiseScheme.from_initial_data(lambda x: 0.0, lambda x: 0.0, p)
    worst_trans = worst_iface = worst_flux = 0.0
    for _ in range(50):
        u = rng.normal(size=p.n_cells)
        v = float(rng.normal())
        f_minus, f_plus = scheme.interface_fluxes(v, u)
        worst_trans = max(worst_trans, abs(-f_minus + f_plus - p.mu * v))
        mid = scheme.interface_value(v, u)
        left = float(u[p.j0 - 1] - 0.5 * p.dx * f_minus)
        right = float(u[p.j0] + 0.5 * p.dx * f_plus)
        worst_iface = max(worst_iface, abs(mid - left), abs(mid - right))
        fluxes = scheme.fluxes_free(u)
        redundant = [scheme.mesh.alpha[j] * -(u[j] - u[j - 1]) for j in range(1, p.n_cells)]
        worst_flux = max(
            worst_flux, float(np.max(np.abs(fluxes[1:-1] - np.asarray(redundant))))
        )
    return [
        CheckResult(
            "pointwise transmission identity", worst_trans <= 1e-14, f"max |resid| {worst_trans:.2e}"
        ),
        CheckResult(
            "pointwise interface-value consistency",
            worst_iface <= 1e-14,
            f"max |resid| {worst_iface:.2e}",
        ),
        CheckResult(
            "pointwise flux continuity", worst_flux == 0.0, f"max |resid| {worst_flux:.2e}"
        ),
    ]


def _check_cfl_instability() -> CheckResult:
    cfg = RunConfig(case="boundary", mu=0.0, n_cells=100, cfl=1.05, periods=10)
    result = run_single(cfg)
    e = np.asarray(result.trace.e_total)
    t = result.trace.times()
    mask = t < 20.0
    grew = bool(np.any(e[mask] > 10.0 * e[0])) or result.blow_up_step is not None
    return CheckResult(
        "explicit instability at CFL=1.05",
        grew,
        f"max energy ratio {np.max(e[mask]) / e[0]:.2e}"
        + (f", blow-up at step {result.blow_up_step}" if result.blow_up_step else ""),
    )


def validate() -> ValidationReport:
    """Run the invariant suite: conservation, oracle, fluxes, CFL bound."""
    report = ValidationReport()
    for case in ("boundary", "internal", "pointwise"):
        report.checks.extend(_check_conservation(case))
    for case in ("boundary", "internal", "pointwise"):
        report.checks.append(_check_oracle(case))
    report.checks.extend(_check_flux_identities())
    report.checks.append(_check_cfl_instability())
    return report
