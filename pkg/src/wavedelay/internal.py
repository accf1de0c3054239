"""Finite-difference stepper for the internally damped problem.

Dirichlet conditions at both ends; after the first delay window the
wave equation gains a distributed delayed friction supported on the
interval I = [x_{i0}, x_{i1}]:

    u_tt - u_xx + mu * d(x) * u_t(x, t - T) = 0   on I, t >= T.

The damping weight d is sampled at the nodes of I (the endpoints are
required to be mesh points) and the delayed samples are the vectors

    v^n_j = d(x_j) * (u^{n+1}_j - u^{n-1}_j) / (2*dt),   j = i0..i1,

entering the update as an extra term -mu*dt^2*v^{n-K} on I.  d >= 0 is
required; the stabilization theory additionally assumes d bounded away
from zero on I, but the solver does not enforce that (d == 0 reduces
the delayed phase to the free scheme and is a useful degenerate check).
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from .core import (
    DelayLine,
    PhaseError,
    SimParams,
    WaveState,
    first_level_interior,
    leapfrog_interior,
    require_compatible,
)


class InternalScheme:
    """Explicit (and implicit) stepper for the Dirichlet-Dirichlet case."""

    def __init__(
        self, params: SimParams, state: WaveState, delay: DelayLine, damping: np.ndarray
    ):
        if params.i0 is None or params.i1 is None:
            raise ValueError("internal scheme needs the damping indices i0 and i1")
        if damping.shape != (params.i1 - params.i0 + 1,):
            raise ValueError("damping vector must cover exactly the nodes i0..i1")
        if np.any(damping < 0.0):
            raise ValueError("damping weights must be non-negative")
        self.p = params
        self.state = state
        self.delay = delay
        self.damping = damping

    @classmethod
    def from_initial_data(
        cls,
        u0: Callable[[float], float],
        u1: Callable[[float], float],
        p: SimParams,
        d: Callable[[float], float] | None = None,
    ) -> "InternalScheme":
        """Build levels u^0, u^1 and seed the delay with v^0_j = d(x_j)*u1(x_j).

        ``d`` defaults to the indicator of I (weight 1 on [x_{i0}, x_{i1}]).
        """
        x = p.nodes()
        u0_vals = np.array([u0(xi) for xi in x], dtype=float)
        u1_vals = np.array([u1(xi) for xi in x], dtype=float)
        require_compatible(u0_vals[0], "u0(0)")
        require_compatible(u0_vals[-1], "u0(ell)")
        u0_vals[0] = u0_vals[-1] = 0.0

        lvl1 = first_level_interior(u0_vals, u1_vals, p.s, p.dt)
        lvl1[0] = lvl1[-1] = 0.0

        ghost = lvl1 - 2.0 * p.dt * u1_vals
        ghost[0] = ghost[-1] = 0.0
        state = WaveState(ghost, u0_vals, lvl1, step=0)

        sl = slice(p.i0, p.i1 + 1)
        if d is None:
            damping = np.ones(p.i1 - p.i0 + 1)
        else:
            damping = np.array([d(xi) for xi in x[sl]], dtype=float)

        delay = DelayLine(p.k_delay + 2)
        delay.push(damping * u1_vals[sl])
        return cls(p, state, delay, damping)

    def _next_step(self) -> int:
        return self.state.step + 1

    def _check_phase(self, n: int, delayed: bool) -> None:
        if delayed:
            if not (self.p.k_delay <= n <= self.p.m_total - 1):
                raise PhaseError(f"step {n} is outside the delayed phase")
        else:
            if not (1 <= n <= self.p.k_delay - 1):
                raise PhaseError(f"step {n} is outside the free phase")

    def step_free(self) -> None:
        self._advance(delayed=False)

    def step_delayed(self) -> None:
        self._advance(delayed=True)

    def step(self) -> None:
        self._advance(delayed=self._next_step() >= self.p.k_delay)

    def _advance(self, delayed: bool) -> None:
        n = self._next_step()
        self._check_phase(n, delayed)
        p, st = self.p, self.state
        sl = slice(p.i0, p.i1 + 1)
        v_lag = self.delay.read(p.k_delay) if delayed else None

        st.rotate()
        u, up, un = st.u_curr, st.u_prev, st.u_next
        leapfrog_interior(un, u, up, p.s)
        if delayed:
            un[sl] -= p.mu * p.dt * p.dt * v_lag
        un[0] = un[-1] = 0.0
        st.step = n
        self.delay.push(self.damping * (un[sl] - up[sl]) / (2.0 * p.dt))

    def step_implicit(self, phase: str | None = None) -> None:
        """Implicit variant: spatial operator on (u^{n+1} + u^{n-1})/2.

        Tridiagonal system over the N-1 interior unknowns; the delayed
        friction references time n-K and stays on the right-hand side.
        """
        n = self._next_step()
        if phase is None:
            phase = "delayed" if n >= self.p.k_delay else "free"
        if phase not in ("free", "delayed"):
            raise ValueError(f"unknown phase {phase!r}")
        delayed = phase == "delayed"
        self._check_phase(n, delayed)
        p, st = self.p, self.state
        sl = slice(p.i0, p.i1 + 1)
        v_lag = self.delay.read(p.k_delay) if delayed else None

        st.rotate()
        u, up, un = st.u_curr, st.u_prev, st.u_next
        rhs = 2.0 * u[1:-1] - up[1:-1] + 0.5 * p.s * (up[2:] - 2.0 * up[1:-1] + up[:-2])
        if delayed:
            rhs[p.i0 - 1 : p.i1] -= p.mu * p.dt * p.dt * v_lag  # rhs indexed by j-1
        un[1:-1] = solve_banded((1, 1), self._implicit_bands(), rhs)
        un[0] = un[-1] = 0.0
        st.step = n
        self.delay.push(self.damping * (un[sl] - up[sl]) / (2.0 * p.dt))

    def _implicit_bands(self) -> np.ndarray:
        m = self.p.n_cells - 1
        s = self.p.s
        ab = np.zeros((3, m))
        ab[0, 1:] = -0.5 * s
        ab[1, :] = 1.0 + s
        ab[2, :-1] = -0.5 * s
        return ab
