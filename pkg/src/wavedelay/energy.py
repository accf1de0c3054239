"""Discrete energy functionals and decay-rate diagnostics.

Each scheme has a quadratic energy of two consecutive time levels that
the free phase conserves exactly (in exact arithmetic); its evolution
under the delayed phase is the stabilization diagnostic.  The energy at
index n pairs the levels (n, n+1), i.e. it is evaluated right after the
step that produced u^{n+1}, when the state triplet is (n-1, n, n+1).

Boundary case (Dirichlet/Neumann nodes 0..N):

    E_k^n = 1/2 sum_{j=0}^{N-1} ((u^{n+1}_j - u^n_j)/dt)^2
            + 1/4 ((u^{n+1}_N - u^n_N)/dt)^2
    E_p^n = 1/2 sum_{j=0}^{N-1} ((u^n_{j+1} - u^n_j)/dx) ((u^{n+1}_{j+1} - u^{n+1}_j)/dx)

Internal case: same potential sum, kinetic sum over j = 1..N-1 with no
boundary half-weight.  Pointwise case (cell averages, transmissivities
alpha): cell-weighted kinetic sum and the face sum

    E_p^n = 1/2 sum_{i=0}^{N} alpha_{i+1/2} (u^{n+1}_{i+1} - u^{n+1}_i)(u^n_{i+1} - u^n_i)

with the Dirichlet ghost u_0 = 0 and alpha_{N+1/2} = 0.

The potential products can be negative for adversarial level pairs; the
implicit-variant functional replaces each product by the half sum of
squares of the same two factors, which is non-negative and is exactly
conserved by the implicit stepper at any CFL.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import FvMesh, SimParams, WaveState


def energy_boundary(state: WaveState, p: SimParams) -> tuple[float, float, float]:
    """Kinetic, potential, and total energy of the boundary scheme."""
    u, un = state.u_curr, state.u_next
    dv = (un - u) / p.dt
    e_k = 0.5 * float(np.dot(dv[:-1], dv[:-1])) + 0.25 * float(dv[-1] ** 2)
    e_p = 0.5 * float(np.dot(np.diff(u), np.diff(un))) / (p.dx * p.dx)
    return e_k, e_p, e_k + e_p


def energy_internal(state: WaveState, p: SimParams) -> tuple[float, float, float]:
    """Kinetic, potential, and total energy of the internal scheme."""
    u, un = state.u_curr, state.u_next
    dv = (un[1:-1] - u[1:-1]) / p.dt
    e_k = 0.5 * float(np.dot(dv, dv))
    e_p = 0.5 * float(np.dot(np.diff(u), np.diff(un))) / (p.dx * p.dx)
    return e_k, e_p, e_k + e_p


def energy_pointwise(
    state: WaveState, mesh: FvMesh, p: SimParams
) -> tuple[float, float, float]:
    """Kinetic, potential, and total energy of the finite-volume scheme."""
    u, un = state.u_curr, state.u_next
    dv = (un - u) / p.dt
    e_k = 0.5 * float(np.dot(mesh.h, dv * dv))
    # face differences with the Dirichlet ghost; the alpha_{N+1/2} = 0
    # face needs no u_{N+1} value
    du = np.diff(u, prepend=0.0)
    dun = np.diff(un, prepend=0.0)
    e_p = 0.5 * float(np.dot(mesh.alpha[:-1], du * dun))
    return e_k, e_p, e_k + e_p


def energy_implicit_variant(state: WaveState, p: SimParams, scheme_kind: str) -> float:
    """Non-negative energy conserved by the implicit FD steppers.

    The kinetic part matches the explicit functional of the given kind;
    the potential products are replaced by half sums of squares, making
    the result a sum of squares for any input.
    """
    u, un = state.u_curr, state.u_next
    if scheme_kind == "boundary":
        dv = (un - u) / p.dt
        e_k = 0.5 * float(np.dot(dv[:-1], dv[:-1])) + 0.25 * float(dv[-1] ** 2)
    elif scheme_kind == "internal":
        dv = (un[1:-1] - u[1:-1]) / p.dt
        e_k = 0.5 * float(np.dot(dv, dv))
    else:
        raise ValueError(f"implicit-variant energy unsupported for {scheme_kind!r}")
    g_curr = np.diff(u) / p.dx
    g_next = np.diff(un) / p.dx
    e_p = 0.25 * float(np.dot(g_next, g_next) + np.dot(g_curr, g_curr))
    return e_k + e_p


class EnergyTrace:
    """Per-step record of kinetic, potential, and total discrete energy."""

    def __init__(self):
        self.step: list[int] = []
        self.t: list[float] = []
        self.e_kinetic: list[float] = []
        self.e_potential: list[float] = []
        self.e_total: list[float] = []

    def __len__(self) -> int:
        return len(self.step)

    def append(self, step: int, t: float, e_k: float, e_p: float) -> None:
        if self.step and step <= self.step[-1]:
            raise ValueError("records must be strictly increasing in step")
        self.step.append(step)
        self.t.append(t)
        self.e_kinetic.append(e_k)
        self.e_potential.append(e_p)
        self.e_total.append(e_k + e_p)

    def times(self) -> np.ndarray:
        return np.asarray(self.t)

    def totals(self) -> np.ndarray:
        return np.asarray(self.e_total)

    def neg_log(self) -> np.ndarray:
        """-ln E(t); errors out on non-positive energy rather than clamping."""
        e = self.totals()
        if np.any(e <= 0.0):
            raise ValueError("energy not positive; cannot take logarithm")
        return -np.log(e)

    def rate(self) -> tuple[np.ndarray, np.ndarray]:
        """(t, -ln E(t)/t) over the records with t > 0."""
        t = self.times()
        mask = t > 0.0
        e = self.totals()[mask]
        if np.any(e <= 0.0):
            raise ValueError("energy not positive; cannot take logarithm")
        return t[mask], -np.log(e) / t[mask]


@dataclass(frozen=True)
class DecayFit:
    """Least-squares line through (t, -ln E): slope = exponential rate.

    omega > 0 means decay (E <~ C * exp(-omega*t)), omega < 0 growth.
    """

    omega: float
    intercept: float
    window: tuple[float, float]
    residual: float

    @property
    def amplitude(self) -> float:
        """The prefactor C = exp(-intercept) of the fitted envelope."""
        return float(np.exp(-self.intercept))


def fit_decay_rate(trace: EnergyTrace, window: tuple[float, float]) -> DecayFit:
    """Fit -ln E(t) ~ omega*t + b over t in [window[0], window[1]]."""
    t_lo, t_hi = window
    t = trace.times()
    e = trace.totals()
    mask = (t >= t_lo) & (t <= t_hi)
    if mask.sum() < 2:
        raise ValueError("fit window contains fewer than two records")
    if np.any(e[mask] <= 0.0):
        raise ValueError("energy not positive; cannot take logarithm")
    ts = t[mask]
    y = -np.log(e[mask])
    slope, intercept = np.polyfit(ts, y, 1)
    resid = float(np.sqrt(np.mean((slope * ts + intercept - y) ** 2)))
    return DecayFit(omega=float(slope), intercept=float(intercept), window=(t_lo, t_hi), residual=resid)


def periodicity_check(
    profile_a: np.ndarray, profile_b: np.ndarray, sign: int
) -> float:
    """Relative sup-norm deviation ||a - sign*b||_inf / max(||b||_inf, eps)."""
    a = np.asarray(profile_a, dtype=float)
    b = np.asarray(profile_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"profile length mismatch: {a.shape} vs {b.shape}")
    denom = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - sign * b))) / denom
