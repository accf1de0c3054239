"""Finite-volume stepper for the pointwise delayed damping at xi = ell/2.

After the first delay window the wave equation carries a delayed Dirac
feedback at the midpoint, which is a transmission problem: the solution
stays continuous across xi while its gradient jumps,

    u_x(xi-, t) - u_x(xi+, t) = mu * u_t(xi, t - T),   T = 2*ell.

The orientation of the jump mirrors the boundary case's delayed Neumann
condition u_x(ell, t) = mu * u_t(ell, t - T): relative to the
instantaneous damper, the feedback sign is flipped, and the round-trip
delay T = 2*ell turns it back into damping.  With this orientation the
per-delay-window amplification factors solve 2*W^2 + (2-mu)*W + mu = 0,
giving decay for every mu in (0, 2), the conservative critical pair
W = +-i at mu = 2, and growth for mu > 2 or mu < 0.

A point source breaks finite differences, so the solver works on cell
averages u_j over the volumes K_j = (x_{j-1/2}, x_{j+1/2}) with the
interface xi = x_{j0+1/2}, j0 = N/2, and numerical fluxes

    F_{j+1/2} = -alpha_{j+1/2} * (u_{j+1} - u_j),
    alpha_{1/2} = 2/dx (Dirichlet ghost), alpha_{N+1/2} = 0 (Neumann).

In the delayed phase the interface fluxes on the two sides of xi are
rebuilt from the discrete transmission condition through the auxiliary
interface value

    u_{j0+1/2} = (dx/4)*mu*v_delayed + (u_{j0} + u_{j0+1})/2,

which splits the delayed source equally onto the two cells adjacent to
xi.  The interface velocity v^n is the centered difference of that
auxiliary value, so in the delayed phase it carries the extra term
(dx/4)*mu*(v^{n+1-K} - v^{n-1-K}); at the first delayed step this
reaches one sample before t = 0, resolved by the linear-extrapolation
ghost v^-1 = 2*v^0 - v^1.

Note: arrays index cells 0-based, so paper cell j lives at ``u[j-1]``
and paper face j+1/2 at ``F[j]``; the face left of xi is ``F[j0]``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .core import (
    DelayLine,
    FvMesh,
    PhaseError,
    SimParams,
    WaveState,
    require_compatible,
)


class PointwiseScheme:
    """Finite-volume stepper owning its mesh, state, and delay line."""

    def __init__(
        self, params: SimParams, mesh: FvMesh, state: WaveState, delay: DelayLine
    ):
        if params.j0 is None:
            raise ValueError("pointwise scheme needs j0 = n_cells/2")
        self.p = params
        self.mesh = mesh
        self.state = state
        self.delay = delay
        self._v0 = None  # kept until the ghost v^-1 can be formed at step 1

    @classmethod
    def from_initial_data(
        cls,
        u0: Callable[[float], float],
        u1: Callable[[float], float],
        p: SimParams,
    ) -> "PointwiseScheme":
        """Sample the data at cell centers and build levels u^0, u^1.

        The first level is the flux-form analogue of the ghost
        time-boundary start,

            u^1_j = u^0_j + dt*u1(x_j) - (dt^2/(2*h_j))*(F^0_{j+1/2} - F^0_{j-1/2}),

        and the seed velocity sample is v^0 = u1(ell/2), the initial
        velocity at the interface point xi.
        """
        mesh = FvMesh.uniform(p)
        u0_vals = np.array([u0(xi) for xi in mesh.centers], dtype=float)
        u1_vals = np.array([u1(xi) for xi in mesh.centers], dtype=float)
        require_compatible(u0(0.0), "u0(0)")

        flux0 = _fluxes(u0_vals, mesh.alpha)
        lvl1 = (
            u0_vals
            + p.dt * u1_vals
            - 0.5 * p.dt * p.dt / mesh.h * (flux0[1:] - flux0[:-1])
        )
        ghost = lvl1 - 2.0 * p.dt * u1_vals
        state = WaveState(ghost, u0_vals, lvl1, step=0)

        delay = DelayLine(p.k_delay + 2)
        v0 = float(u1(p.ell / 2.0))
        delay.push(v0)
        scheme = cls(p, mesh, state, delay)
        scheme._v0 = v0
        return scheme

    # -- fluxes ----------------------------------------------------------------

    def flux_free(self, j: int) -> float:
        """Free numerical flux F_{j+1/2} at face j = 0..N (paper indexing)."""
        if not (0 <= j <= self.p.n_cells):
            raise IndexError(f"face index {j} out of range 0..{self.p.n_cells}")
        return float(_fluxes(self.state.u_curr, self.mesh.alpha)[j])

    def fluxes_free(self, u: np.ndarray | None = None) -> np.ndarray:
        """All free fluxes F_{j+1/2}, j = 0..N, for the given level."""
        return _fluxes(self.state.u_curr if u is None else u, self.mesh.alpha)

    def interface_fluxes(self, v_delayed: float, u: np.ndarray | None = None) -> tuple[float, float]:
        """Delayed-phase fluxes (F-, F+) at the interface x_{j0+1/2}.

        They differ from the free flux by -+ mu*v_delayed/2, so that
        -F- + F+ = mu*v_delayed, the discrete transmission condition.
        """
        p = self.p
        if u is None:
            u = self.state.u_curr
        jump = (u[p.j0] - u[p.j0 - 1]) / p.dx
        half = 0.5 * p.mu * v_delayed
        return float(-half - jump), float(half - jump)

    def interface_value(self, v_delayed: float, u: np.ndarray | None = None) -> float:
        """Auxiliary interface value u_{j0+1/2} from the transmission condition."""
        p = self.p
        if u is None:
            u = self.state.u_curr
        return float(0.25 * p.dx * p.mu * v_delayed + 0.5 * (u[p.j0] + u[p.j0 - 1]))

    # -- stepping ----------------------------------------------------------------

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
        k = p.k_delay
        if delayed:
            v_k = self.delay.read(k)  # v^{n-K}
            v_k_m1 = self.delay.read(k - 1)  # v^{n+1-K}
            v_k_p1 = self.delay.read(k + 1)  # v^{n-1-K} (ghost at n = K)

        st.rotate()
        u, up, un = st.u_curr, st.u_prev, st.u_next
        flux = _fluxes(u, self.mesh.alpha)
        un[:] = 2.0 * u - up - (p.dt * p.dt / p.dx) * (flux[1:] - flux[:-1])
        if delayed:
            # split delayed source on the two cells adjacent to xi
            src = 0.5 * p.s * p.dx * p.mu * v_k
            un[p.j0 - 1] += src
            un[p.j0] += src
        st.step = n

        mean_next = 0.5 * (un[p.j0] + un[p.j0 - 1])
        mean_prev = 0.5 * (up[p.j0] + up[p.j0 - 1])
        if delayed:
            v_n = (0.25 * p.dx * p.mu * (v_k_m1 - v_k_p1) + mean_next - mean_prev) / (
                2.0 * p.dt
            )
        else:
            v_n = (mean_next - mean_prev) / (2.0 * p.dt)
        if n == 1:
            # v^1 exists now; freeze the backward-extrapolated ghost v^-1
            self.delay.ghost_pre = 2.0 * self._v0 - v_n
        self.delay.push(float(v_n))


def _fluxes(u: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Free fluxes at all faces: F_{j+1/2} = -alpha*(u_{j+1} - u_j), u_0 = 0."""
    flux = np.empty(u.shape[0] + 1)
    flux[0] = -alpha[0] * u[0]
    flux[1:-1] = -alpha[1:-1] * (u[1:] - u[:-1])
    flux[-1] = 0.0
    return flux
