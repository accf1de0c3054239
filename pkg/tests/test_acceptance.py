"""Acceptance criteria, one test per criterion, printed pass/fail lines.

Run with ``pytest tests/test_acceptance.py -s`` to see one line per
criterion.  Criteria 8b and 8c (pointwise critical case: energy
constancy to 1e-6 and the equal-at-20/opposite-at-22 profile parity)
are implemented exactly as specified and fail by design: the
conservative critical dynamics of the midpoint-feedback scheme are
anti-periodic over two delay windows, which forces the opposite parity
(u(20) = -u0, u(22) = +u0, verified under mesh refinement) and an O(dx)
instantaneous energy oscillation.  The companion test
``test_criterion_8_critical_behavior_observed`` pins the verified
behavior.  Analysis notes live outside the package.
"""

import numpy as np
import pytest

from wavedelay import (
    BoundaryScheme,
    InternalScheme,
    PointwiseScheme,
    build_params,
    energy_implicit_variant,
    periodicity_check,
)
from wavedelay.experiments import RunConfig, expr_fn, resolve_ic, run_single, run_sweep
from wavedelay.oracle import build_recurrence, initial_vector, oracle_run

from conftest import cell_fn, nodal_fn

MU_OPT = 3.0 - 2.0 * np.sqrt(2.0)


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"criterion {criterion} {'PASS' if ok else 'FAIL'}: {detail}")


def u0_reference(case: str, p) -> np.ndarray:
    expr, _ = resolve_ic("default", case)
    fn = expr_fn(expr)
    xs = p.cell_centers() if case == "pointwise" else p.nodes()
    vals = np.array([fn(x) for x in xs])
    if case != "pointwise":
        vals[0] = 0.0
    return vals


def drift_stats(e: np.ndarray) -> tuple[float, float]:
    ref = max(float(e[0]), 1.0)
    per_step = float(np.max(np.abs(np.diff(e)))) / ref
    cumulative = float(np.max(np.abs(e - e[0]))) / ref
    return per_step, cumulative


# -- sweeps shared between criteria (session-scoped: they dominate runtime)


@pytest.fixture(scope="module")
def boundary_sweep():
    mus = [round(0.05 * i, 10) for i in range(1, 20)]
    return mus, run_sweep(RunConfig(case="boundary"), mus)


@pytest.fixture(scope="module")
def internal_sweep():
    mus = [round(0.2 + 0.1 * i, 10) for i in range(15)] + [1.7, 1.8, -0.5, -1.0]
    return mus, run_sweep(RunConfig(case="internal"), mus)


@pytest.fixture(scope="module")
def pointwise_sweep():
    mus = [round(0.2 + 0.1 * i, 10) for i in range(17)] + [2.5, 3.0, -0.5]
    return mus, run_sweep(RunConfig(case="pointwise"), mus)


def test_criterion_1_free_phase_conservation():
    worst = []
    for case in ("boundary", "internal", "pointwise"):
        for n in (8, 100):
            for cfl in (0.5, 1.0):
                result = run_single(
                    RunConfig(case=case, mu=0.0, n_cells=n, cfl=cfl, periods=1)
                )
                per_step, cumulative = drift_stats(np.asarray(result.trace.e_total))
                worst.append((case, n, cfl, per_step, cumulative))
    bad = [w for w in worst if w[3] > 1e-12 or w[4] > 1e-10]
    top = max(worst, key=lambda w: w[3])
    report(
        "1",
        not bad,
        f"12 configurations; worst per-step drift {top[3]:.2e} "
        f"({top[0]}, N={top[1]}, CFL={top[2]}), tolerances 1e-12/1e-10",
    )
    assert not bad, f"conservation violated: {bad}"


def test_criterion_2_long_run_conservation():
    worst = 0.0
    for case in ("boundary", "internal", "pointwise"):
        result = run_single(RunConfig(case=case, mu=0.0, periods=200))
        _, cumulative = drift_stats(np.asarray(result.trace.e_total))
        worst = max(worst, cumulative)
    report("2", worst <= 1e-8, f"T_f=400, all schemes; worst cumulative drift {worst:.2e} <= 1e-8")
    assert worst <= 1e-8


def test_criterion_3_oracle_equivalence():
    rng = np.random.default_rng(31415)
    worst = {}
    for case, mu in (("boundary", 0.5), ("internal", 0.8), ("pointwise", 2.0)):
        kw = dict(i0=2, i1=6) if case == "internal" else {}
        p = build_params(case, n_cells=8, cfl=1.0, periods=14, mu=mu, **kw)
        if case == "pointwise":
            scheme = PointwiseScheme.from_initial_data(
                cell_fn(rng.normal(size=8), p.dx), cell_fn(rng.normal(size=8), p.dx), p
            )
            scheme.step()
        else:
            vals0 = rng.normal(size=9)
            vals0[0] = 0.0
            if case == "internal":
                vals0[-1] = 0.0
            cls = BoundaryScheme if case == "boundary" else InternalScheme
            scheme = cls.from_initial_data(
                nodal_fn(vals0, p.dx), nodal_fn(rng.normal(size=9), p.dx), p
            )
        free = build_recurrence(case, p, "free")
        delayed = build_recurrence(case, p, "delayed")
        z0, start = initial_vector(scheme)
        traj = oracle_run(free, delayed, z0, start, 200, p)
        dev = 0.0
        for i in range(200):
            scheme.step()
            dev = max(dev, float(np.max(np.abs(scheme.state.u_next - traj[i + 1]))))
        worst[case] = dev
    ok = all(d <= 1e-12 for d in worst.values())
    report(
        "3",
        ok,
        "200 steps spanning both phases, N=8, random data; "
        + ", ".join(f"{c}: {d:.1e}" for c, d in worst.items()),
    )
    assert ok, worst


def test_criterion_4_boundary_decay_profile(boundary_sweep):
    mus, sweep = boundary_sweep
    omegas = np.array([row.omega for row in sweep.rows], dtype=float)
    assert not np.any(np.isnan(omegas))
    all_positive = bool(np.all(omegas > 0.0))

    below = [i for i, mu in enumerate(mus) if mu < MU_OPT]
    above = [i for i, mu in enumerate(mus) if mu > MU_OPT]
    increasing_before = bool(np.all(np.diff(omegas[below]) > 0.0))
    decreasing_after = bool(np.all(np.diff(omegas[above]) < 0.0))
    argmax_mu = mus[int(np.argmax(omegas))]
    peak_brackets_mu0 = mus[below[-1]] <= MU_OPT <= mus[above[0]] and argmax_mu in (
        mus[below[-1]],
        mus[above[0]],
    )

    ok = all_positive and increasing_before and decreasing_after and peak_brackets_mu0
    nearest = min(mus, key=lambda m: abs(m - MU_OPT))
    report(
        "4",
        ok,
        f"all 19 rates positive; increasing below mu0={MU_OPT:.4f}, decreasing above; "
        f"grid argmax at mu={argmax_mu:g} (nearest grid point to mu0 is {nearest:g}; "
        f"the exact rate -ln(mu)/2 above mu0 puts the grid maximum there, see notes)",
    )
    assert all_positive, omegas
    assert increasing_before and decreasing_after
    assert peak_brackets_mu0


def test_criterion_5_boundary_critical_case():
    u0_devs = {}
    u22_devs = {}
    drifts = {}
    for n in (100, 200):
        cfg = RunConfig(
            case="boundary", mu=1.0, n_cells=n, periods=11, snapshot_times=(0.0, 20.0, 22.0)
        )
        result = run_single(cfg)
        assert result.blow_up_step is None
        e = np.asarray(result.trace.e_total)
        t = result.trace.times()
        drifts[n] = float(np.max(np.abs(e[t <= 20.0] - e[0]))) / e[0]
        ref = u0_reference("boundary", result.params)
        by_time = {prof.requested_time: prof.u for prof in result.profiles}
        u0_devs[n] = periodicity_check(by_time[20.0], ref, -1)
        u22_devs[n] = periodicity_check(by_time[22.0], ref, +1)
    ok = (
        drifts[100] <= 1e-6
        and u0_devs[100] <= 0.05
        and u22_devs[100] <= 0.05
        and u0_devs[200] <= u0_devs[100] + 1e-12
        and u22_devs[200] <= u22_devs[100] + 1e-12
    )
    report(
        "5",
        ok,
        f"mu=1: drift[0,20] {drifts[100]:.1e} <= 1e-6; dev(u(20), -u0) {u0_devs[100]:.2e} "
        f"and dev(u(22), +u0) {u22_devs[100]:.2e} <= 0.05, non-increasing at N=200",
    )
    assert ok, (drifts, u0_devs, u22_devs)


def test_criterion_6_boundary_growth():
    omegas = {}
    for mu in (-0.5, -1.0, 1.5, 2.0):
        result = run_single(RunConfig(case="boundary", mu=mu, periods=200))
        omegas[mu] = result.fit.omega
    ok = all(w < 0.0 for w in omegas.values())
    report(
        "6",
        ok,
        "growth rates " + ", ".join(f"mu={m:g}: {w:+.3f}" for m, w in omegas.items()),
    )
    assert ok, omegas


def test_criterion_7_internal_threshold(internal_sweep):
    mus, sweep = internal_sweep
    omega = {row.mu: row.omega for row in sweep.rows}
    stable = [mu for mu in mus if 0.2 <= mu <= 1.7]
    ok = (
        all(omega[mu] > 0.0 for mu in stable)
        and omega[1.8] < 0.0
        and omega[-0.5] < 0.0
        and omega[-1.0] < 0.0
    )
    report(
        "7",
        ok,
        f"d=1 on [1/4,3/4]: omega > 0 through mu=1.7 (omega(1.7)={omega[1.7]:+.4f}), "
        f"omega(1.8)={omega[1.8]:+.4f} < 0, negative mu grows",
    )
    assert ok, omega


def test_criterion_8_pointwise_decay_sweep(pointwise_sweep):
    mus, sweep = pointwise_sweep
    omega = {row.mu: row.omega for row in sweep.rows}
    stable = [mu for mu in mus if 0.2 <= mu <= 1.8]
    ok = all(omega[mu] > 0.0 for mu in stable)
    worst = min(stable, key=lambda m: omega[m])
    report(
        "8a",
        ok,
        f"xi=l/2: omega > 0 for mu in 0.2..1.8 (weakest {omega[worst]:+.4f} at mu={worst:g})",
    )
    assert ok, omega


def _pointwise_critical(n: int):
    cfg = RunConfig(
        case="pointwise", mu=2.0, n_cells=n, periods=11, snapshot_times=(0.0, 20.0, 22.0)
    )
    result = run_single(cfg)
    assert result.blow_up_step is None
    e = np.asarray(result.trace.e_total)
    t = result.trace.times()
    drift = float(np.max(np.abs(e[t <= 20.0] - e[0]))) / e[0]
    ref = u0_reference("pointwise", result.params)
    by_time = {prof.requested_time: prof.u for prof in result.profiles}
    return drift, by_time[20.0], by_time[22.0], ref


def test_criterion_8_critical_conservation_as_specified():
    """Spec target: mu=2 energy constant on [0,20] to 1e-6.

    Fails by design: the delayed interface power mu*u_t(xi,t)*u_t(xi,t-T)
    does not vanish pointwise in time at the critical coefficient, so the
    discrete energy oscillates at O(dx) (2.3e-2 at N=100, halving with dx);
    only its period average is conserved.
    """
    drift, _, _, _ = _pointwise_critical(100)
    ok = drift <= 1e-6
    report("8b", ok, f"mu=2 drift on [0,20] is {drift:.2e}, required <= 1e-6")
    assert ok, f"energy oscillation {drift:.2e} exceeds 1e-6 (O(dx), see notes)"


def test_criterion_8_critical_parity_as_specified():
    """Spec target (after the reference experiments): u(20) = +u0, u(22) = -u0.

    Fails by design: the conservative critical dynamics are anti-periodic
    over 2T, which forces u(20) = -u0 and u(22) = +u0 for these data (the
    same parity as the boundary case).
    """
    _, u20, u22, ref = _pointwise_critical(100)
    dev20 = periodicity_check(u20, ref, +1)
    dev22 = periodicity_check(u22, ref, -1)
    ok = dev20 <= 0.05 and dev22 <= 0.05
    report(
        "8c",
        ok,
        f"mu=2 parity as specified: dev(u(20), +u0) {dev20:.3f}, dev(u(22), -u0) {dev22:.3f} "
        f"(the verified behavior has the opposite signs, see companion test)",
    )
    assert ok, (dev20, dev22)


def test_criterion_8_critical_behavior_observed():
    """The verified critical behavior: 2T-anti-periodic, refinement-stable."""
    devs = {}
    drifts = {}
    for n in (100, 200):
        drift, u20, u22, ref = _pointwise_critical(n)
        drifts[n] = drift
        devs[n] = (periodicity_check(u20, ref, -1), periodicity_check(u22, ref, +1))
    ok = (
        devs[100][0] <= 0.05
        and devs[100][1] <= 0.05
        and devs[200][0] <= devs[100][0] + 1e-12
        and devs[200][1] <= devs[100][1] + 1e-12
        and drifts[200] <= 0.75 * drifts[100]
    )
    report(
        "8 (observed)",
        ok,
        f"mu=2: dev(u(20), -u0) {devs[100][0]:.4f}, dev(u(22), +u0) {devs[100][1]:.4f}, "
        f"both smaller at N=200; energy oscillation {drifts[100]:.2e} -> {drifts[200]:.2e} (O(dx))",
    )
    assert ok, (devs, drifts)


def test_criterion_8_pointwise_growth(pointwise_sweep):
    mus, sweep = pointwise_sweep
    omega = {row.mu: row.omega for row in sweep.rows}
    ok = omega[2.5] < 0.0 and omega[3.0] < 0.0 and omega[-0.5] < 0.0
    report(
        "8d",
        ok,
        f"omega(2.5)={omega[2.5]:+.4f}, omega(3)={omega[3.0]:+.4f}, "
        f"omega(-0.5)={omega[-0.5]:+.4f}, all < 0",
    )
    assert ok, omega


def test_criterion_9_cfl_stability_boundary():
    hits = {}
    for case in ("boundary", "internal", "pointwise"):
        result = run_single(RunConfig(case=case, mu=0.0, cfl=1.05, periods=10))
        e = np.asarray(result.trace.e_total)
        t = result.trace.times()
        mask = t < 20.0
        exceeded = np.nonzero(e[mask] > 10.0 * e[0])[0]
        hit_t = t[exceeded[0]] if exceeded.size else None
        if hit_t is None and result.blow_up_step is not None:
            hit_t = result.blow_up_step * result.params.dt
        hits[case] = hit_t
    ok = all(h is not None and h < 20.0 for h in hits.values())
    report(
        "9",
        ok,
        "CFL=1.05 exceeds 10*E0 at t = "
        + ", ".join(f"{c}: {h:.2f}" for c, h in hits.items()),
    )
    assert ok, hits


def test_criterion_10_implicit_variant():
    stats = {}
    for case in ("boundary", "internal"):
        kw = dict(i0=25, i1=75) if case == "internal" else {}
        p = build_params(case, n_cells=100, cfl=2.0, periods=6, mu=0.0, **kw)
        expr0, expr1 = resolve_ic("default", case)
        u0, u1 = expr_fn(expr0), expr_fn(expr1)
        cls = BoundaryScheme if case == "boundary" else InternalScheme
        scheme = cls.from_initial_data(u0, u1, p)
        energies = [energy_implicit_variant(scheme.state, p, case)]
        for _ in range(500):
            scheme.step_implicit()
            energies.append(energy_implicit_variant(scheme.state, p, case))
        e = np.asarray(energies)
        stats[case] = (float(e.min()), float(np.max(np.diff(e))) / max(e[0], 1.0))
    ok = all(mn >= 0.0 and inc <= 1e-12 for mn, inc in stats.values())
    report(
        "10",
        ok,
        "implicit CFL=2, 500 steps: "
        + ", ".join(
            f"{c}: min {mn:.3e}, max relative increase {inc:.1e}"
            for c, (mn, inc) in stats.items()
        ),
    )
    assert ok, stats
