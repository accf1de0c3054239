"""Shared state for the three delayed-damping wave schemes.

Holds the resolved scalar parameters of a run, the three consecutive
time levels of the solution, the ring buffer realizing the feedback
delay, and the finite-volume cell geometry used by the pointwise case.

Conventions used throughout the package:

* the domain is (0, ell) with unit wave speed, so the feedback delay is
  always ``T = 2*ell`` (one round trip);
* time levels are uniformly spaced, ``t^n = n*dt``, with the delay an
  exact multiple of the step, ``T = k_delay * dt``;
* ``s = (dt/dx)**2`` is the squared CFL ratio appearing in every stencil.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

CASES = ("boundary", "internal", "pointwise")

#: Tolerance for the exactness invariants k_delay*dt == delay and
#: n_cells*dx == ell (two units in the last place).
_ULP2 = 2.0


class PhaseError(RuntimeError):
    """A stepper was driven outside its free/delayed phase window."""


class DelayError(LookupError):
    """A delay-line read hit an expired or never-written slot."""


class BlowUpError(RuntimeError):
    """The solution left the range of finite floats."""

    def __init__(self, step: int):
        super().__init__(f"numerical blow-up at step {step}")
        self.step = step


@dataclass(frozen=True)
class SimParams:
    """All scalar parameters of one simulation run.

    Instances are built through :func:`build_params`, which snaps the
    time step so that the delay window is an exact number of steps.
    """

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
    mu: float
    i0: int | None = None
    i1: int | None = None
    j0: int | None = None

    @property
    def t_final(self) -> float:
        return self.m_total * self.dt

    def nodes(self) -> np.ndarray:
        """FD grid nodes x_j = j*dx, j = 0..N."""
        return np.linspace(0.0, self.ell, self.n_cells + 1)

    def cell_centers(self) -> np.ndarray:
        """FV cell centers x_j = (j - 1/2)*dx, j = 1..N."""
        return (np.arange(self.n_cells) + 0.5) * self.dx

    def validate(self) -> None:
        tol = _ULP2 * np.finfo(float).eps
        if abs(self.k_delay * self.dt - self.delay) > tol * max(self.delay, 1.0):
            raise ValueError("k_delay*dt does not reproduce the delay exactly")
        if abs(self.n_cells * self.dx - self.ell) > tol * max(self.ell, 1.0):
            raise ValueError("n_cells*dx does not reproduce the domain length")


def build_params(
    case: str,
    ell: float = 1.0,
    n_cells: int = 100,
    cfl: float = 1.0,
    periods: int = 200,
    mu: float = 0.0,
    i0: int | None = None,
    i1: int | None = None,
) -> SimParams:
    """Resolve run parameters, snapping dt so that ``T = K*dt`` exactly.

    The requested CFL number is an upper bound: with ``K =
    ceil(T/(cfl*dx))`` and ``dt = T/K`` the effective CFL is at most the
    requested one, and the delay-commensurability assumption holds by
    construction.  CFL values above 1 are accepted (the explicit
    stability boundary is itself an experiment); the explicit schemes
    are only stable for CFL <= 1.

    ``periods`` is the final time in units of the delay, ``T_f =
    periods*T``, so ``M = periods*K``.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {CASES}")
    if ell <= 0.0:
        raise ValueError("ell must be positive")
    if n_cells < 4:
        raise ValueError("n_cells must be at least 4")
    if cfl <= 0.0:
        raise ValueError("cfl must be positive")
    if periods < 1:
        raise ValueError("periods must be at least 1")

    dx = ell / n_cells
    delay = 2.0 * ell
    # ceil with a one-sided fudge: T/(cfl*dx) lands within float error of
    # an integer whenever cfl*dx divides T, and must not round up then.
    ratio = delay / (cfl * dx)
    k_delay = max(1, math.ceil(ratio - 1e-9))
    dt = delay / k_delay
    eff_cfl = dt / dx
    s = eff_cfl * eff_cfl
    m_total = periods * k_delay

    j0 = None
    if case == "pointwise":
        if n_cells % 2 != 0:
            raise ValueError("pointwise case needs an even number of cells")
        j0 = n_cells // 2
        i0 = i1 = None
    elif case == "internal":
        if i0 is None or i1 is None:
            raise ValueError("internal case needs the damping indices i0 and i1")
        if not (0 < i0 < i1 < n_cells):
            raise ValueError("damping indices must satisfy 0 < i0 < i1 < n_cells")
    else:
        i0 = i1 = None

    p = SimParams(
        case=case,
        ell=ell,
        n_cells=n_cells,
        dx=dx,
        cfl=eff_cfl,
        dt=dt,
        s=s,
        delay=delay,
        k_delay=k_delay,
        m_total=m_total,
        mu=mu,
        i0=i0,
        i1=i1,
        j0=j0,
    )
    p.validate()
    return p


class WaveState:
    """Three consecutive time levels of the solution vector.

    ``u_prev``, ``u_curr``, ``u_next`` hold levels n-1, n, n+1 where
    ``step`` is the index n of the last executed step; after
    construction ``step == 0`` and the triplet is (u^-1, u^0, u^1) with
    the ghost time level u^-1 = u^1 - 2*dt*u1 from the centered start.
    Keeping three levels makes the energy functionals, which mix levels
    n and n+1 (and n-1 for the implicit variant), evaluable without
    recomputation.
    """

    __slots__ = ("u_prev", "u_curr", "u_next", "step")

    def __init__(self, u_prev: np.ndarray, u_curr: np.ndarray, u_next: np.ndarray, step: int = 0):
        if not (u_prev.shape == u_curr.shape == u_next.shape):
            raise ValueError("all three levels must have identical length")
        self.u_prev = u_prev
        self.u_curr = u_curr
        self.u_next = u_next
        self.step = step

    def rotate(self) -> None:
        """Shift the window one level forward; u_next becomes scratch."""
        self.u_prev, self.u_curr, self.u_next = self.u_curr, self.u_next, self.u_prev

    def copy(self) -> "WaveState":
        return WaveState(
            self.u_prev.copy(), self.u_curr.copy(), self.u_next.copy(), self.step
        )


class DelayLine:
    """Ring buffer of past velocity samples realizing the delay T = K*dt.

    ``read(lag)`` returns the sample pushed ``lag`` pushes ago (lag 1 is
    the most recent).  The steppers push v^n at the end of step n, so at
    the start of step n the buffer ends with v^(n-1) and the delayed
    term v^(n-K) sits at lag K; the pointwise update also touches lags
    K-1 and K+1, which is why the capacity is K+2.

    ``ghost_pre`` resolves the one read past the beginning of time that
    the pointwise velocity recursion performs at n = K (the sample
    v^-1); any other unwritten slot is an error.
    """

    __slots__ = ("capacity", "_samples", "_pushed", "ghost_pre")

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._samples: deque = deque(maxlen=capacity)
        self._pushed = 0
        self.ghost_pre = None

    def __len__(self) -> int:
        return len(self._samples)

    def push(self, sample) -> None:
        self._samples.append(sample)
        self._pushed += 1

    def read(self, lag: int):
        if lag < 1:
            raise DelayError("lag must be at least 1; the current sample is not past")
        if lag > self._pushed:
            if lag == self._pushed + 1 and self.ghost_pre is not None:
                return self.ghost_pre
            raise DelayError(f"delay underflow: lag {lag} was never written")
        if lag > self.capacity:
            raise DelayError(f"sample expired: lag {lag} exceeds capacity {self.capacity}")
        return self._samples[-lag]

    def copy(self) -> "DelayLine":
        out = DelayLine(self.capacity)
        out._samples = deque(
            (np.array(x, copy=True) if isinstance(x, np.ndarray) else x for x in self._samples),
            maxlen=self.capacity,
        )
        out._pushed = self._pushed
        out.ghost_pre = self.ghost_pre
        return out


@dataclass(frozen=True)
class FvMesh:
    """Uniform finite-volume mesh with its interface transmissivities.

    alpha encodes the boundary conditions of the pointwise case: the
    Dirichlet end enters through alpha[0] = 2/dx against a zero ghost
    value, the Neumann end through alpha[N] = 0.
    """

    interfaces: np.ndarray  # x_{j+1/2} = j*dx, j = 0..N
    centers: np.ndarray  # x_j = (j-1/2)*dx, j = 1..N
    h: np.ndarray  # cell widths, all equal to dx
    alpha: np.ndarray  # transmissivities at the N+1 interfaces

    @classmethod
    def uniform(cls, p: SimParams) -> "FvMesh":
        n, dx = p.n_cells, p.dx
        interfaces = np.arange(n + 1) * dx
        centers = (np.arange(n) + 0.5) * dx
        h = np.full(n, dx)
        alpha = np.full(n + 1, 1.0 / dx)
        alpha[0] = 2.0 / dx
        alpha[-1] = 0.0
        return cls(interfaces=interfaces, centers=centers, h=h, alpha=alpha)


def leapfrog_interior(u_next: np.ndarray, u_curr: np.ndarray, u_prev: np.ndarray, s: float) -> None:
    """Write the explicit interior stencil into u_next[1:-1].

    u^{n+1}_j = s*(u^n_{j+1} + u^n_{j-1}) + 2*(1-s)*u^n_j - u^{n-1}_j
    """
    u_next[1:-1] = (
        s * (u_curr[2:] + u_curr[:-2]) + 2.0 * (1.0 - s) * u_curr[1:-1] - u_prev[1:-1]
    )


def first_level_interior(
    u0_vals: np.ndarray, u1_vals: np.ndarray, s: float, dt: float
) -> np.ndarray:
    """First time level from the ghost time-boundary trick (interior part).

    u^1_j = (s/2)*(u^0_{j+1} + u^0_{j-1}) + (1-s)*u^0_j + dt*u1(x_j)

    Returns the full-length vector with the interior formula applied at
    j = 1..N-1; the endpoint entries are left equal to u0 and must be
    overwritten by the scheme's boundary handling.
    """
    u1_level = u0_vals.copy()
    u1_level[1:-1] = (
        0.5 * s * (u0_vals[2:] + u0_vals[:-2])
        + (1.0 - s) * u0_vals[1:-1]
        + dt * u1_vals[1:-1]
    )
    return u1_level


def require_compatible(value: float, what: str, tol: float = 1e-12) -> None:
    """Check a homogeneous-boundary compatibility condition on the data."""
    if abs(value) > tol:
        raise ValueError(f"incompatible initial datum: {what} = {value!r} is not 0")
