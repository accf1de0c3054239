"""Command-line client for the simulation service.

The CLI speaks HTTP to the service and owns all file output.  Without
``--server-url`` it mounts the application in-process (same wire
format, no network), so batch use needs no running server.

Exit codes: 0 success, 1 configuration error, 2 numerical blow-up in
``run``.  Blow-up inside ``sweep`` is recorded as data, not an error.
"""

from __future__ import annotations

import asyncio
import sys
from pathlib import Path

import click
import httpx

from .experiments import parse_mu_list, write_energy_csv, write_profile_csv
import json

EXIT_CONFIG_ERROR = 1
EXIT_BLOW_UP = 2


def _client(server_url: str | None) -> httpx.AsyncClient:
    if server_url:
        return httpx.AsyncClient(base_url=server_url, timeout=None)
    from .service import app  # deferred: fastapi startup cost only when needed

    transport = httpx.ASGITransport(app=app)
    return httpx.AsyncClient(transport=transport, base_url="http://wavedelay.local", timeout=None)


def _post(server_url: str | None, path: str, payload: dict) -> dict:
    async def go() -> httpx.Response:
        async with _client(server_url) as client:
            return await client.post(path, json=payload)

    response = asyncio.run(go())
    if response.status_code in (400, 422):
        click.echo(f"configuration error: {response.text}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    response.raise_for_status()
    return response.json()


def _write_run_files(run: dict, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    base = run["label"]
    tr = run["trace"]
    write_energy_csv(
        out_dir / f"{base}_energy.csv",
        tr["step"],
        tr["t"],
        tr["e_kinetic"],
        tr["e_potential"],
        tr["e_total"],
    )
    profile_files = []
    for prof in run["profiles"]:
        name = f"{base}_profile_t{prof['requested_time']:g}.csv"
        write_profile_csv(out_dir / name, prof["x"], prof["u"])
        profile_files.append(
            {
                "file": name,
                "requested_time": prof["requested_time"],
                "time": prof["time"],
                "level": prof["level"],
            }
        )
    manifest = {
        "config": run["config"],
        "params": run["params"],
        "energy_file": f"{base}_energy.csv",
        "profile_files": profile_files,
        "blow_up_step": run["blow_up_step"],
        "fit": run["fit"],
    }
    (out_dir / f"{base}_manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )


def _common_payload(case, mu, n, cfl, periods, stepper, ic, damping, i0, i1, snapshot_times, fit_window) -> dict:
    payload = {
        "case": case,
        "mu": mu,
        "n_cells": n,
        "cfl": cfl,
        "periods": periods,
        "stepper": stepper,
        "ic": ic,
        "damping": damping,
        "i0": i0,
        "i1": i1,
    }
    if snapshot_times:
        payload["snapshot_times"] = [float(s) for s in snapshot_times.split(",")]
    if fit_window:
        lo, hi = fit_window.split(":")
        payload["fit_window"] = [float(lo), float(hi)]
    return payload


_case_option = click.option(
    "--case",
    required=True,
    type=click.Choice(["boundary", "internal", "pointwise"]),
    help="Which delayed-damping problem to run.",
)
_shared = [
    click.option("--n", default=100, show_default=True, help="Number of spatial subdivisions."),
    click.option("--cfl", default=1.0, show_default=True, help="Requested CFL number (dt snaps down)."),
    click.option("--periods", default=200, show_default=True, help="Final time in delay periods, T_f = periods*T."),
    click.option("--stepper", default="explicit", type=click.Choice(["explicit", "implicit"]), show_default=True),
    click.option("--ic", default="default", show_default=True, help="IC preset name or 'u0expr|u1expr'."),
    click.option("--damping", default="1", show_default=True, help="Internal case: weight d(x) expression on I."),
    click.option("--i0", default=None, type=int, help="Internal case: left damping node index."),
    click.option("--i1", default=None, type=int, help="Internal case: right damping node index."),
    click.option("--snapshot-times", default=None, help="Comma list of profile times (default: 0 and T_f)."),
    click.option("--fit-window", default=None, help="Decay-fit window 'tlo:thi' (default: T to T_f)."),
    click.option("--out", default="runs", show_default=True, help="Output directory."),
    click.option("--server-url", default=None, help="Remote service URL (default: in-process)."),
]


def _apply(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn

    return wrap


@click.group()
def main() -> None:
    """1D wave equation with delayed damping: runs, sweeps, checks."""


@main.command()
@_case_option
@click.option("--mu", default=0.0, show_default=True, help="Delay-feedback coefficient.")
@_apply(_shared)
def run(case, mu, n, cfl, periods, stepper, ic, damping, i0, i1, snapshot_times, fit_window, out, server_url) -> None:
    """Execute one run and write its energy trace, profiles, manifest."""
    payload = _common_payload(case, mu, n, cfl, periods, stepper, ic, damping, i0, i1, snapshot_times, fit_window)
    data = _post(server_url, "/runs", payload)
    _write_run_files(data, Path(out))
    if data["fit"]:
        click.echo(f"{data['label']}: omega = {data['fit']['omega']:+.6f} (residual {data['fit']['residual']:.2e})")
    if data["blow_up_step"] is not None:
        click.echo(f"numerical blow-up at step {data['blow_up_step']}", err=True)
        sys.exit(EXIT_BLOW_UP)
    click.echo(f"wrote {data['label']}_* to {out}")


@main.command()
@_case_option
@click.option("--mu-list", required=True, help="Range 'A:B:STEP' or comma list of mu values.")
@click.option("--workers", default=1, show_default=True, help="Parallel worker processes.")
@_apply(_shared)
def sweep(case, mu_list, workers, n, cfl, periods, stepper, ic, damping, i0, i1, snapshot_times, fit_window, out, server_url) -> None:
    """One run per mu; per-run files plus a summary table."""
    try:
        mus = parse_mu_list(mu_list)
    except ValueError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    payload = _common_payload(case, 0.0, n, cfl, periods, stepper, ic, damping, i0, i1, snapshot_times, fit_window)
    payload["mu_list"] = mus
    payload["workers"] = workers
    data = _post(server_url, "/sweeps", payload)
    out_dir = Path(out)
    for run_data in data["runs"]:
        _write_run_files(run_data, out_dir)
    from .experiments import SweepResult, SweepRow, write_sweep

    rows = [SweepRow(**row) for row in data["rows"]]
    write_sweep(SweepResult(rows=rows, runs=[]), out_dir)
    for row in data["rows"]:
        omega = "n/a" if row["omega"] is None else f"{row['omega']:+.6f}"
        blown = "" if row["blow_up_step"] is None else f"  blow-up at step {row['blow_up_step']}"
        click.echo(f"mu = {row['mu']:g}: omega = {omega}{blown}")
    click.echo(f"wrote {len(data['runs'])} runs and summary.csv to {out}")


@main.command()
@click.option("--server-url", default=None, help="Remote service URL (default: in-process).")
def validate(server_url) -> None:
    """Run the invariant suite and print one line per check."""
    data = _post(server_url, "/validation", {})
    for check in data["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        click.echo(f"{status}  {check['name']}: {check['detail']}")
    click.echo("all checks passed" if data["passed"] else "some checks FAILED")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port) -> None:
    """Launch the HTTP service."""
    import uvicorn

    uvicorn.run("wavedelay.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
