"""Dense-matrix realization of each scheme, for equivalence testing only.

Every scheme is linear, so one step is exactly one matrix application on
the stacked vector

    z^n = (u^n, u^{n-1}, v^{n-1}, v^{n-2}, ..., v^{n-H})

with one matrix per phase (free/delayed).  The velocity sample v^n
references u^{n+1}, so its row is formed by substituting the u^{n+1}
rows, keeping the recurrence strictly one-step.  History slots shift
down by one per application; slot i always holds v^{n-i}.

Dense storage only (small N); production runs use the steppers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SimParams

MAX_ORACLE_CELLS = 32


@dataclass(frozen=True)
class DenseRecurrence:
    """One-phase transition matrix plus the stacked-vector layout."""

    case: str
    phase: str
    matrix: np.ndarray
    dof: int
    delay_dof: int
    hist_slots: int


def _history_slots(case: str, k_delay: int) -> int:
    # the pointwise velocity recursion reads lag K+1
    return k_delay + 1 if case == "pointwise" else k_delay


def build_recurrence(case: str, p: SimParams, phase: str) -> DenseRecurrence:
    """Transcribe the stencils of one scheme/phase into a dense matrix."""
    if p.n_cells > MAX_ORACLE_CELLS:
        raise ValueError(f"N={p.n_cells} too large for the dense oracle")
    if phase not in ("free", "delayed"):
        raise ValueError(f"unknown phase {phase!r}")
    if case == "boundary":
        return _build_boundary(p, phase)
    if case == "internal":
        return _build_internal(p, phase)
    if case == "pointwise":
        return _build_pointwise(p, phase)
    raise ValueError(f"unknown case {case!r}")


def _assemble(
    case: str,
    phase: str,
    p: SimParams,
    dof: int,
    ddof: int,
    a_blk: np.ndarray,
    b_blk: np.ndarray,
    c_blk: np.ndarray,
    v_rows: np.ndarray,
) -> DenseRecurrence:
    """Stack the blocks into the full one-step matrix.

    a_blk, b_blk, c_blk: u^{n+1} as a function of (u^n, u^{n-1}, history).
    v_rows: the new slot-1 rows over the full stacked vector.
    """
    hist = _history_slots(case, p.k_delay)
    dim = 2 * dof + hist * ddof
    m = np.zeros((dim, dim))
    m[:dof, :dof] = a_blk
    m[:dof, dof : 2 * dof] = b_blk
    m[:dof, 2 * dof :] = c_blk
    m[dof : 2 * dof, :dof] = np.eye(dof)  # new u^n := old u^n... shifted
    m[2 * dof : 2 * dof + ddof, :] = v_rows
    # slot j (j >= 2) copies old slot j-1
    for j in range(2, hist + 1):
        r = 2 * dof + (j - 1) * ddof
        c = 2 * dof + (j - 2) * ddof
        m[r : r + ddof, c : c + ddof] = np.eye(ddof)
    return DenseRecurrence(case, phase, m, dof, ddof, hist)


def _build_boundary(p: SimParams, phase: str) -> DenseRecurrence:
    n, s = p.n_cells, p.s
    dof, ddof = n + 1, 1
    hist = _history_slots("boundary", p.k_delay)
    a = np.zeros((dof, dof))
    for j in range(1, n):
        a[j, j - 1] = s
        a[j, j] = 2.0 * (1.0 - s)
        a[j, j + 1] = s
    a[n, n - 1] = 2.0 * s
    a[n, n] = 2.0 * (1.0 - s)
    b = -np.eye(dof)
    b[0, 0] = 0.0
    c = np.zeros((dof, hist * ddof))
    if phase == "delayed":
        c[n, p.k_delay - 1] = 2.0 * s * p.dx * p.mu  # slot K column
    # v^n = (u^{n+1}_N - u^{n-1}_N) / (2 dt), u^{n+1} substituted
    v = np.zeros((ddof, 2 * dof + hist * ddof))
    v[0, :dof] = a[n, :]
    v[0, dof : 2 * dof] = b[n, :]
    v[0, dof + n] -= 1.0
    v[0, 2 * dof :] = c[n, :]
    v /= 2.0 * p.dt
    return _assemble("boundary", phase, p, dof, ddof, a, b, c, v)


def _build_internal(p: SimParams, phase: str) -> DenseRecurrence:
    n, s = p.n_cells, p.s
    dof = n + 1
    ddof = p.i1 - p.i0 + 1
    hist = _history_slots("internal", p.k_delay)
    a = np.zeros((dof, dof))
    for j in range(1, n):
        a[j, j - 1] = s
        a[j, j] = 2.0 * (1.0 - s)
        a[j, j + 1] = s
    b = -np.eye(dof)
    b[0, 0] = b[n, n] = 0.0
    c = np.zeros((dof, hist * ddof))
    if phase == "delayed":
        base = (p.k_delay - 1) * ddof  # slot K block
        for idx in range(ddof):
            c[p.i0 + idx, base + idx] = -p.mu * p.dt * p.dt
    # v^n_j = d_j (u^{n+1}_j - u^{n-1}_j) / (2 dt); oracle fixes d == 1 on I,
    # matching the default damping profile
    v = np.zeros((ddof, 2 * dof + hist * ddof))
    for idx in range(ddof):
        j = p.i0 + idx
        v[idx, :dof] = a[j, :]
        v[idx, dof : 2 * dof] = b[j, :]
        v[idx, dof + j] -= 1.0
        v[idx, 2 * dof :] = c[j, :]
    v /= 2.0 * p.dt
    return _assemble("internal", phase, p, dof, ddof, a, b, c, v)


def _build_pointwise(p: SimParams, phase: str) -> DenseRecurrence:
    n, s = p.n_cells, p.s
    dof, ddof = n, 1
    hist = _history_slots("pointwise", p.k_delay)
    j0 = p.j0  # 0-based cell right of the interface; left cell is j0-1
    a = np.zeros((dof, dof))
    for j in range(1, n - 1):
        a[j, j - 1] = s
        a[j, j] = 2.0 * (1.0 - s)
        a[j, j + 1] = s
    a[0, 0] = 2.0 - 3.0 * s
    a[0, 1] = s
    a[n - 1, n - 2] = s
    a[n - 1, n - 1] = 2.0 - s
    b = -np.eye(dof)
    c = np.zeros((dof, hist * ddof))
    if phase == "delayed":
        src = 0.5 * s * p.dx * p.mu
        c[j0 - 1, p.k_delay - 1] = src
        c[j0, p.k_delay - 1] = src
    v = np.zeros((ddof, 2 * dof + hist * ddof))
    v[0, :dof] = 0.5 * (a[j0 - 1, :] + a[j0, :])
    v[0, dof : 2 * dof] = 0.5 * (b[j0 - 1, :] + b[j0, :])
    v[0, dof + j0 - 1] -= 0.5
    v[0, dof + j0] -= 0.5
    v[0, 2 * dof :] = 0.5 * (c[j0 - 1, :] + c[j0, :])
    if phase == "delayed":
        quarter = 0.25 * p.dx * p.mu
        v[0, 2 * dof + p.k_delay - 2] += quarter  # v^{n+1-K}, slot K-1
        v[0, 2 * dof + p.k_delay] -= quarter  # v^{n-1-K}, slot K+1
    v /= 2.0 * p.dt
    return _assemble("pointwise", phase, p, dof, ddof, a, b, c, v)


def initial_vector(scheme) -> tuple[np.ndarray, int]:
    """Stack a scheme's current state into (z, start_step).

    The vector is taken at n = scheme.state.step + 1, i.e. the next step
    the scheme would execute, with history slots filled from the delay
    line (unwritten depths resolve to the pointwise ghost, then zero).
    """
    p = scheme.p
    case = p.case
    hist = _history_slots(case, p.k_delay)
    st = scheme.state
    dof = st.u_curr.shape[0]
    if case == "internal":
        ddof = p.i1 - p.i0 + 1
    else:
        ddof = 1
    z = np.zeros(2 * dof + hist * ddof)
    z[:dof] = st.u_next
    z[dof : 2 * dof] = st.u_curr
    line = scheme.delay
    for slot in range(1, hist + 1):
        try:
            sample = line.read(slot)
        except Exception:
            break
        z[2 * dof + (slot - 1) * ddof : 2 * dof + slot * ddof] = sample
    return z, st.step + 1


def oracle_run(
    free: DenseRecurrence,
    delayed: DenseRecurrence,
    z0: np.ndarray,
    start_step: int,
    steps: int,
    p: SimParams,
) -> np.ndarray:
    """Apply the phase-appropriate matrix repeatedly; return the u levels.

    Row i of the result is u^{start_step + i}; row 0 echoes the input.
    """
    dof = free.dof
    out = np.empty((steps + 1, dof))
    z = z0.copy()
    out[0] = z[:dof]
    for i in range(steps):
        n = start_step + i
        m = delayed.matrix if n >= p.k_delay else free.matrix
        z = m @ z
        out[i + 1] = z[:dof]
    return out
