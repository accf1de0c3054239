"""Internally damped scheme: distributed delayed friction on [x_i0, x_i1]."""

import numpy as np
import pytest

from wavedelay import InternalScheme, build_params, energy_implicit_variant

from conftest import combine_schemes, drive, nodal_fn


def make_scheme(n=8, cfl=1.0, mu=0.0, periods=2, i0=None, i1=None, u0=None, u1=None, d=None):
    p = build_params(
        "internal",
        n_cells=n,
        cfl=cfl,
        periods=periods,
        mu=mu,
        i0=i0 if i0 is not None else n // 4,
        i1=i1 if i1 is not None else 3 * n // 4,
    )
    zero = lambda x: 0.0
    return InternalScheme.from_initial_data(u0 or zero, u1 or zero, p, d=d), p


def force_state(scheme, u_curr, u_prev, step=1):
    # the stepper rotates first: the next step propagates (u_next, u_curr)
    scheme.state.u_next[:] = u_curr
    scheme.state.u_curr[:] = u_prev
    scheme.state.step = step


def seed_delay(scheme, v_lagged):
    k = scheme.p.k_delay
    scheme.delay.push(np.asarray(v_lagged, dtype=float))
    width = scheme.p.i1 - scheme.p.i0 + 1
    for _ in range(k - 1):
        scheme.delay.push(np.zeros(width))
    scheme.state.step = k


class TestInit:
    def test_zero_data(self):
        scheme, _ = make_scheme()
        assert np.all(scheme.state.u_next == 0.0)
        assert np.all(scheme.delay.read(1) == 0.0)

    def test_seed_velocity_is_weighted_initial_velocity(self):
        # reference interval [1/4, 3/4] with d == 1: v0_j = u1(x_j)
        u0 = lambda x: x * (x - 1)
        u1 = lambda x: -x * (x - 1)
        scheme, p = make_scheme(n=100, i0=25, i1=75, u0=u0, u1=u1)
        v0 = scheme.delay.read(1)
        assert v0.shape == (51,)
        x_mid = 0.5
        mid_idx = 50 - p.i0
        assert v0[mid_idx] == pytest.approx(0.25, rel=1e-15)
        x = p.nodes()[p.i0 : p.i1 + 1]
        np.testing.assert_allclose(v0, -(x * (x - 1)), rtol=1e-15)

    def test_zero_damping_annihilates_feedback(self, rng):
        vals0 = rng.normal(size=9)
        vals0[0] = vals0[-1] = 0.0
        vals1 = rng.normal(size=9)
        p = build_params("internal", n_cells=8, cfl=1.0, periods=3, mu=5.0, i0=2, i1=6)
        damped = InternalScheme.from_initial_data(
            nodal_fn(vals0, p.dx), nodal_fn(vals1, p.dx), p, d=lambda x: 0.0
        )
        free_p = build_params("internal", n_cells=8, cfl=1.0, periods=3, mu=0.0, i0=2, i1=6)
        free = InternalScheme.from_initial_data(
            nodal_fn(vals0, p.dx), nodal_fn(vals1, p.dx), free_p
        )
        assert np.all(damped.delay.read(1) == 0.0)
        for _ in range(40):
            damped.step()
            free.step()
        np.testing.assert_array_equal(damped.state.u_next, free.state.u_next)

    def test_rejects_negative_damping(self):
        with pytest.raises(ValueError, match="non-negative"):
            make_scheme(d=lambda x: -1.0)

    def test_rejects_incompatible_data(self):
        with pytest.raises(ValueError, match="incompatible"):
            make_scheme(u0=lambda x: x)  # u0(ell) != 0


class TestStepFree:
    def test_zero_state(self):
        scheme, _ = make_scheme()
        scheme.step_free()
        assert np.all(scheme.state.u_next == 0.0)
        assert np.all(scheme.delay.read(1) == 0.0)

    def test_interior_bump_with_dirichlet_ends(self):
        scheme, _ = make_scheme(n=4, i0=1, i1=3)
        force_state(scheme, [0.0, 0.0, 1.0, 0.0, 0.0], np.zeros(5))
        scheme.step_free()
        np.testing.assert_allclose(
            scheme.state.u_next, [0.0, 1.0, 0.0, 1.0, 0.0], atol=0.0
        )

    def test_symmetric_state_stays_symmetric(self, rng):
        n = 16
        scheme, p = make_scheme(n=n, i0=4, i1=12)
        half = rng.normal(size=n // 2 + 1)
        sym = np.concatenate([half, half[-2::-1]])
        sym[0] = sym[-1] = 0.0
        force_state(scheme, sym, np.zeros(n + 1))
        scheme.step_free()
        np.testing.assert_array_equal(
            scheme.state.u_next, scheme.state.u_next[::-1]
        )


class TestStepDelayed:
    def test_mu_zero_matches_free(self, rng):
        vals0 = rng.normal(size=9)
        vals0[0] = vals0[-1] = 0.0
        u = rng.normal(size=9)
        u[0] = u[-1] = 0.0
        up = rng.normal(size=9)
        up[0] = up[-1] = 0.0
        a, p = make_scheme(n=8, mu=0.0, i0=2, i1=6)
        b, _ = make_scheme(n=8, mu=0.0, i0=2, i1=6)
        force_state(a, u, up)
        a.step_free()
        seed_delay(b, np.full(5, 3.3))
        force_state(b, u, up, step=p.k_delay)
        b.step_delayed()
        np.testing.assert_array_equal(a.state.u_next, b.state.u_next)

    def test_delay_source_only(self):
        # dt = 0.1 via N = 10 at CFL 1
        scheme, p = make_scheme(n=10, cfl=1.0, mu=1.0, i0=3, i1=7)
        assert p.dt == pytest.approx(0.1, rel=1e-15)
        seed_delay(scheme, np.full(5, 3.0))
        force_state(scheme, np.zeros(11), np.zeros(11), step=p.k_delay)
        scheme.step_delayed()
        inside = scheme.state.u_next[p.i0 : p.i1 + 1]
        np.testing.assert_allclose(inside, -0.03, rtol=1e-14)
        outside = np.concatenate(
            [scheme.state.u_next[: p.i0], scheme.state.u_next[p.i1 + 1 :]]
        )
        assert np.all(outside == 0.0)

    def test_sign_flip_with_mu(self):
        scheme, p = make_scheme(n=10, cfl=1.0, mu=-1.0, i0=3, i1=7)
        seed_delay(scheme, np.full(5, 3.0))
        force_state(scheme, np.zeros(11), np.zeros(11), step=p.k_delay)
        scheme.step_delayed()
        inside = scheme.state.u_next[p.i0 : p.i1 + 1]
        np.testing.assert_allclose(inside, 0.03, rtol=1e-14)

    def test_mu_linearity_of_first_delayed_correction(self, rng):
        """Doubling mu doubles the delayed correction, exactly."""
        vals0 = rng.normal(size=9)
        vals0[0] = vals0[-1] = 0.0
        vals1 = rng.normal(size=9)
        runs = {}
        for mu in (0.0, 0.7, 1.4):
            p = build_params("internal", n_cells=8, cfl=1.0, periods=2, mu=mu, i0=2, i1=6)
            scheme = InternalScheme.from_initial_data(
                nodal_fn(vals0, p.dx), nodal_fn(vals1, p.dx), p
            )
            for _ in range(p.k_delay):
                scheme.step()
            runs[mu] = scheme.state.u_next.copy()
        delta_1 = runs[0.7] - runs[0.0]
        delta_2 = runs[1.4] - runs[0.0]
        np.testing.assert_allclose(delta_2, 2.0 * delta_1, rtol=0, atol=1e-15)


class TestImplicit:
    def test_zero_state(self):
        scheme, _ = make_scheme(cfl=2.0)
        scheme.step_implicit()
        assert np.all(scheme.state.u_next == 0.0)

    def test_energy_monotone_at_cfl_two(self):
        u0 = lambda x: x * (x - 1)
        u1 = lambda x: -x * (x - 1)
        scheme, p = make_scheme(n=32, cfl=2.0, periods=8, i0=8, i1=24, u0=u0, u1=u1)
        energies = [energy_implicit_variant(scheme.state, p, "internal")]
        for _ in range(100):
            scheme.step_implicit()
            energies.append(energy_implicit_variant(scheme.state, p, "internal"))
        e = np.asarray(energies)
        assert np.all(e >= 0.0)
        assert np.max(np.diff(e)) <= 1e-12 * max(e[0], 1.0)

    def test_agrees_with_explicit_under_refinement(self):
        """Second-order agreement at t = 1 for smooth compatible data."""
        u0 = lambda x: float(np.sin(np.pi * x))
        u1 = lambda x: 0.0
        errors = []
        for n in (32, 64, 128):
            p = build_params("internal", n_cells=n, cfl=0.5, periods=1, i0=n // 4, i1=3 * n // 4)
            explicit = InternalScheme.from_initial_data(u0, u1, p)
            implicit = InternalScheme.from_initial_data(u0, u1, p)
            steps = int(round(1.0 / p.dt)) - 1
            for _ in range(steps):
                explicit.step_free()
                implicit.step_implicit()
            errors.append(
                float(np.max(np.abs(explicit.state.u_next - implicit.state.u_next)))
            )
        # dt halves each time; the gap should shrink by about 4x
        assert errors[1] < errors[0] / 2.5
        assert errors[2] < errors[1] / 2.5


class TestInvariants:
    @pytest.mark.parametrize("cfl", [0.5, 1.0])
    def test_free_phase_conservation(self, cfl):
        u0 = lambda x: x * (x - 1)
        u1 = lambda x: -x * (x - 1)
        scheme, p = make_scheme(n=16, cfl=cfl, periods=1, u0=u0, u1=u1)
        energies = drive(scheme, p.k_delay - 1)
        assert np.max(np.abs(np.diff(energies))) <= 1e-12 * max(energies[0], 1.0)

    def test_linearity(self, rng):
        p = build_params("internal", n_cells=8, cfl=0.5, periods=2, mu=1.1, i0=2, i1=6)
        schemes = []
        for _ in range(2):
            vals0 = rng.normal(size=9)
            vals0[0] = vals0[-1] = 0.0
            schemes.append(
                InternalScheme.from_initial_data(
                    nodal_fn(vals0, p.dx), nodal_fn(rng.normal(size=9), p.dx), p
                )
            )
        a, b = schemes
        combo = combine_schemes(a, b, 2.0, -0.3)
        for scheme in (a, b, combo):
            scheme.step_free()
        np.testing.assert_allclose(
            combo.state.u_next,
            2.0 * a.state.u_next - 0.3 * b.state.u_next,
            rtol=1e-12,
            atol=1e-12,
        )

    def test_symmetric_data_full_run(self):
        """Symmetric u0, u1, d about ell/2 stay symmetric through both phases."""
        u0 = lambda x: x * (x - 1)
        u1 = lambda x: -x * (x - 1)
        scheme, p = make_scheme(n=16, mu=0.9, periods=3, i0=4, i1=12, u0=u0, u1=u1)
        for _ in range(40):
            scheme.step()
            dev = np.max(np.abs(scheme.state.u_next - scheme.state.u_next[::-1]))
            assert dev <= 1e-12

    def test_dirichlet_ends_exact(self, rng):
        vals0 = rng.normal(size=9)
        vals0[0] = vals0[-1] = 0.0
        p = build_params("internal", n_cells=8, cfl=1.0, periods=3, mu=1.3, i0=2, i1=6)
        scheme = InternalScheme.from_initial_data(
            nodal_fn(vals0, p.dx), nodal_fn(rng.normal(size=9), p.dx), p
        )
        for _ in range(40):
            scheme.step()
            assert scheme.state.u_next[0] == 0.0
            assert scheme.state.u_next[-1] == 0.0
