"""Finite-difference stepper for the boundary delayed-Neumann problem.

The string is clamped at x = 0 and free at x = ell during the first
delay window; from t = T on, the Neumann datum is driven by the delayed
boundary velocity:

    u_x(ell, t) = mu * u_t(ell, t - T),   T = 2*ell.

Discretely, on nodes x_j = j*dx,

    interior   u^{n+1}_j = s*(u^n_{j+1} + u^n_{j-1}) + 2*(1-s)*u^n_j - u^{n-1}_j
    Dirichlet  u^{n+1}_0 = 0
    Neumann    u^{n+1}_N = 2*(1-s)*u^n_N + 2*s*u^n_{N-1} - u^{n-1}_N
                           [+ 2*s*dx*mu*v^{n-K} in the delayed phase]

where the Neumann row comes from eliminating the ghost node u_{N+1}
through the centered one-sided condition, which keeps the scheme second
order in space.  The boundary velocity is sampled centered in time,
v^n = (u^{n+1}_N - u^{n-1}_N) / (2*dt), after u^{n+1} is available.
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


class BoundaryScheme:
    """Explicit (and implicit) stepper owning its state and delay line."""

    def __init__(self, params: SimParams, state: WaveState, delay: DelayLine):
        self.p = params
        self.state = state
        self.delay = delay

    @classmethod
    def from_initial_data(
        cls,
        u0: Callable[[float], float],
        u1: Callable[[float], float],
        p: SimParams,
    ) -> "BoundaryScheme":
        """Build levels u^0 and u^1 and seed the delay line with v^0 = u1(ell).

        The first level uses the ghost time-boundary trick at the
        interior nodes and its one-sided analogue at the Neumann node:

            u^1_N = s*u^0_{N-1} + (1-s)*u^0_N + dt*u1(x_N).
        """
        x = p.nodes()
        u0_vals = np.array([u0(xi) for xi in x], dtype=float)
        u1_vals = np.array([u1(xi) for xi in x], dtype=float)
        require_compatible(u0_vals[0], "u0(0)")
        u0_vals[0] = 0.0

        lvl1 = first_level_interior(u0_vals, u1_vals, p.s, p.dt)
        lvl1[0] = 0.0
        lvl1[-1] = p.s * u0_vals[-2] + (1.0 - p.s) * u0_vals[-1] + p.dt * u1_vals[-1]

        ghost = lvl1 - 2.0 * p.dt * u1_vals  # u^-1, keeps the triplet consistent
        ghost[0] = 0.0
        state = WaveState(ghost, u0_vals, lvl1, step=0)

        delay = DelayLine(p.k_delay + 2)
        delay.push(float(u1_vals[-1]))
        return cls(p, state, delay)

    # -- phase bookkeeping -------------------------------------------------

    def _next_step(self) -> int:
        return self.state.step + 1

    def _check_phase(self, n: int, delayed: bool) -> None:
        if delayed:
            if not (self.p.k_delay <= n <= self.p.m_total - 1):
                raise PhaseError(f"step {n} is outside the delayed phase")
        else:
            if not (1 <= n <= self.p.k_delay - 1):
                raise PhaseError(f"step {n} is outside the free phase")

    # -- explicit steppers ---------------------------------------------------

    def step_free(self) -> None:
        self._advance(delayed=False)

    def step_delayed(self) -> None:
        self._advance(delayed=True)

    def step(self) -> None:
        """Advance one step, picking the phase from the current index."""
        self._advance(delayed=self._next_step() >= self.p.k_delay)

    def _advance(self, delayed: bool) -> None:
        n = self._next_step()
        self._check_phase(n, delayed)
        p, st = self.p, self.state
        v_lag = self.delay.read(p.k_delay) if delayed else 0.0

        st.rotate()
        u, up, un = st.u_curr, st.u_prev, st.u_next
        leapfrog_interior(un, u, up, p.s)
        un[0] = 0.0
        un[-1] = 2.0 * (1.0 - p.s) * u[-1] + 2.0 * p.s * u[-2] - up[-1]
        if delayed:
            un[-1] += 2.0 * p.s * p.dx * p.mu * v_lag
        st.step = n
        self.delay.push(float((un[-1] - up[-1]) / (2.0 * p.dt)))

    # -- implicit stepper ----------------------------------------------------

    def step_implicit(self, phase: str | None = None) -> None:
        """One step of the unconditionally stable variant.

        The spatial difference operator acts on (u^{n+1} + u^{n-1})/2,
        giving the tridiagonal system

            (I - (s/2) D2) u^{n+1} = 2 u^n + ((s/2) D2 - I) u^{n-1}  [+ delay]

        over the N unknowns j = 1..N (Dirichlet row eliminated), where
        D2 has the interior rows (1, -2, 1) and the Neumann ghost row
        (2, -2).  The delayed Neumann term references time n-K, which is
        already known, so it stays on the right-hand side and the system
        remains tridiagonal.
        """
        n = self._next_step()
        if phase is None:
            phase = "delayed" if n >= self.p.k_delay else "free"
        if phase not in ("free", "delayed"):
            raise ValueError(f"unknown phase {phase!r}")
        delayed = phase == "delayed"
        self._check_phase(n, delayed)
        p, st = self.p, self.state
        v_lag = self.delay.read(p.k_delay) if delayed else 0.0

        st.rotate()
        u, up, un = st.u_curr, st.u_prev, st.u_next
        rhs = 2.0 * u[1:] - up[1:] + 0.5 * p.s * _d2_apply(up)
        if delayed:
            rhs[-1] += 2.0 * p.s * p.dx * p.mu * v_lag
        un[1:] = solve_banded((1, 1), self._implicit_bands(), rhs)
        un[0] = 0.0
        st.step = n
        self.delay.push(float((un[-1] - up[-1]) / (2.0 * p.dt)))

    def _implicit_bands(self) -> np.ndarray:
        """Banded storage of I - (s/2) D2 over the unknowns j = 1..N."""
        m = self.p.n_cells
        s = self.p.s
        ab = np.zeros((3, m))
        ab[0, 1:] = -0.5 * s  # superdiagonal
        ab[1, :] = 1.0 + s  # diagonal
        ab[2, :-1] = -0.5 * s  # subdiagonal
        ab[2, m - 2] = -s  # Neumann ghost row couples twice to u_{N-1}
        return ab


def _d2_apply(u: np.ndarray) -> np.ndarray:
    """D2 u over rows j = 1..N: interior (1,-2,1), Neumann row 2*(u_{N-1}-u_N)."""
    out = np.empty(u.shape[0] - 1)
    out[:-1] = u[2:] - 2.0 * u[1:-1] + u[:-2]
    out[-1] = 2.0 * (u[-2] - u[-1])
    return out
