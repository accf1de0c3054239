"""Shared helpers: grid-sampling callables and scheme drivers."""

from __future__ import annotations

import numpy as np
import pytest

from wavedelay import (
    BoundaryScheme,
    DelayLine,
    InternalScheme,
    PointwiseScheme,
    WaveState,
    energy_boundary,
    energy_internal,
    energy_pointwise,
)


def nodal_fn(values, dx):
    """Callable returning prescribed values at the FD nodes x_j = j*dx."""
    return lambda x: float(values[int(round(x / dx))])


def cell_fn(values, dx):
    """Callable returning prescribed values at FV cell centers; 0 at x = 0."""

    def fn(x):
        if x == 0.0:
            return 0.0
        idx = int(round(x / dx - 0.5))
        idx = min(max(idx, 0), len(values) - 1)
        return float(values[idx])

    return fn


def energy_of(scheme):
    p = scheme.p
    if isinstance(scheme, BoundaryScheme):
        return energy_boundary(scheme.state, p)[2]
    if isinstance(scheme, InternalScheme):
        return energy_internal(scheme.state, p)[2]
    return energy_pointwise(scheme.state, scheme.mesh, p)[2]


def drive(scheme, steps, stepper="explicit"):
    """Advance and return the list of total energies (index 0 included)."""
    energies = [energy_of(scheme)]
    for _ in range(steps):
        if stepper == "explicit":
            scheme.step()
        else:
            scheme.step_implicit()
        energies.append(energy_of(scheme))
    return np.asarray(energies)


def combine_states(s1: WaveState, s2: WaveState, c1: float, c2: float) -> WaveState:
    return WaveState(
        c1 * s1.u_prev + c2 * s2.u_prev,
        c1 * s1.u_curr + c2 * s2.u_curr,
        c1 * s1.u_next + c2 * s2.u_next,
        s1.step,
    )


def combine_delay(d1: DelayLine, d2: DelayLine, c1: float, c2: float) -> DelayLine:
    assert len(d1) == len(d2) and d1.capacity == d2.capacity
    out = DelayLine(d1.capacity)
    for a, b in zip(d1._samples, d2._samples):
        out.push(c1 * a + c2 * b)
    out._pushed = d1._pushed
    if d1.ghost_pre is not None and d2.ghost_pre is not None:
        out.ghost_pre = c1 * d1.ghost_pre + c2 * d2.ghost_pre
    return out


def combine_schemes(a, b, c1, c2):
    """Linear combination of two same-shaped scheme instances."""
    state = combine_states(a.state, b.state, c1, c2)
    delay = combine_delay(a.delay, b.delay, c1, c2)
    if isinstance(a, BoundaryScheme):
        return BoundaryScheme(a.p, state, delay)
    if isinstance(a, InternalScheme):
        return InternalScheme(a.p, state, delay, a.damping)
    out = PointwiseScheme(a.p, a.mesh, state, delay)
    if a._v0 is not None and b._v0 is not None:
        out._v0 = c1 * a._v0 + c2 * b._v0
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
