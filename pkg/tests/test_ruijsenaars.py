"""Classical model: Hamiltonian/flow consistency by finite differences,
Lax builds and factorizations against each other and against LU/eig
oracles, spectral invariants, and monitored time evolution."""

import numpy as np
import pytest

from vertexdual import (
    CollisionDetected,
    GeneralPositionViolated,
    RSState,
    a_matrix,
    acceleration,
    cauchy_det,
    char_poly_via_en,
    evolve,
    factorized_lax,
    lax_from_momenta,
    lax_from_velocities,
    rs_hamiltonian,
    velocities,
    xle_relation_check,
)
from vertexdual.linalg import coth, match_multisets
from vertexdual.ruijsenaars import flow_step, hamilton_rhs, power_traces, symmetric_invariants

STATE3 = RSState(eta=0.45, x=np.array([0.15, 1.0, 2.05]), p=np.array([0.2, -0.1, 0.05]))


def _random_state(rng, n, eta=0.45, spread=0.85):
    x = np.cumsum(rng.uniform(0.8 * spread, 1.2 * spread, n)) + rng.uniform(-0.2, 0.2)
    p = rng.uniform(-0.3, 0.3, n)
    return RSState(eta=eta, x=x.astype(complex), p=p.astype(complex))


class TestHamiltonian:
    def test_single_particle(self):
        st = RSState(eta=0.4, x=np.array([0.3]), p=np.array([0.7]))
        assert abs(rs_hamiltonian(st) - np.exp(0.4 * 0.7)) < 1e-15

    def test_two_particles_zero_momenta(self):
        st = RSState(eta=0.4, x=np.array([0.3, 1.2]), p=np.array([0.0, 0.0]))
        d = 0.3 - 1.2
        expected = np.sinh(d + 0.4) / np.sinh(d) + np.sinh(-d + 0.4) / np.sinh(-d)
        assert abs(rs_hamiltonian(st) - expected) < 1e-14

    def test_trace_relation(self):
        lax = lax_from_momenta(STATE3).entries
        assert abs(rs_hamiltonian(STATE3) + np.trace(lax) / STATE3.eta) < 1e-12

    def test_velocities_match_momentum_gradient(self):
        rng = np.random.default_rng(2)
        st = _random_state(rng, 4)
        eps = 1e-5
        vel = velocities(st)
        for i in range(4):
            step = np.zeros(4)
            step[i] = eps
            plus = rs_hamiltonian(RSState(eta=st.eta, x=st.x, p=st.p + step))
            minus = rs_hamiltonian(RSState(eta=st.eta, x=st.x, p=st.p - step))
            fd = (plus - minus) / (2 * eps)
            assert abs(fd - vel[i]) < 1e-6 * max(1.0, abs(vel[i]))

    def test_forces_match_coordinate_gradient(self):
        rng = np.random.default_rng(3)
        st = _random_state(rng, 4)
        eps = 1e-5
        _, forces = hamilton_rhs(st)
        for i in range(4):
            step = np.zeros(4)
            step[i] = eps
            plus = rs_hamiltonian(RSState(eta=st.eta, x=st.x + step, p=st.p))
            minus = rs_hamiltonian(RSState(eta=st.eta, x=st.x - step, p=st.p))
            fd = -(plus - minus) / (2 * eps)
            assert abs(fd - forces[i]) < 1e-6 * max(1.0, abs(forces[i]))


class TestLaxBuilds:
    def test_single_particle_value(self):
        st = RSState(eta=0.4, x=np.array([0.2]), p=np.array([0.5]))
        lax = lax_from_momenta(st).entries
        assert abs(lax[0, 0] + 0.4 * np.exp(0.4 * 0.5)) < 1e-14

    def test_diagonal_is_minus_velocity(self):
        vel = velocities(STATE3)
        lax = lax_from_momenta(STATE3).entries
        assert np.max(np.abs(np.diag(lax) + vel)) < 1e-14
        assert abs(np.trace(lax) + np.sum(vel)) < 1e-13

    def test_velocity_build_is_weighted_cauchy(self):
        rng = np.random.default_rng(7)
        st = _random_state(rng, 5)
        xd = velocities(st)
        lax = lax_from_velocities(st.x, xd, st.eta).entries
        n = 5
        cauchy = np.empty((n, n), dtype=complex)
        for i in range(n):
            cauchy[i, :] = np.sinh(st.eta) / np.sinh(st.x[i] - st.x - st.eta)
        assert np.max(np.abs(lax - np.diag(xd) @ cauchy)) < 1e-14 * np.max(np.abs(lax))

    def test_momentum_and_velocity_builds_agree(self):
        rng = np.random.default_rng(8)
        st = _random_state(rng, 4)
        a = lax_from_momenta(st).entries
        b = lax_from_velocities(st.x, velocities(st), st.eta).entries
        assert np.max(np.abs(a - b)) < 1e-12 * np.max(np.abs(a))

    def test_factorized_build(self):
        st1 = RSState(eta=0.4, x=np.array([0.3]), p=np.array([0.6]))
        assert abs(factorized_lax(st1).entries[0, 0] + 0.4 * np.exp(0.24)) < 1e-12
        rng = np.random.default_rng(9)
        st3 = _random_state(rng, 3)
        err = np.max(np.abs(factorized_lax(st3).entries - lax_from_momenta(st3).entries))
        assert err < 1e-9 * np.max(np.abs(lax_from_momenta(st3).entries))
        st5 = _random_state(rng, 5, spread=0.7)
        err5 = np.max(np.abs(factorized_lax(st5).entries - lax_from_momenta(st5).entries))
        assert err5 < 1e-8 * np.max(np.abs(lax_from_momenta(st5).entries))

    def test_general_position_guard(self):
        with pytest.raises(GeneralPositionViolated):
            lax_from_velocities(np.array([0.2, 0.65]), np.array([1.0, 1.0]), 0.45)


class TestCompanionMatrix:
    def test_single_particle_entry(self):
        xd = velocities(RSState(eta=0.4, x=np.array([0.2]), p=np.array([0.5])))
        a = a_matrix(np.array([0.2]), xd, 0.4)
        assert abs(a[0, 0] + xd[0] * coth(0.4)) < 1e-14

    def test_off_diagonal_carries_row_velocity(self):
        xd = velocities(STATE3)
        a = a_matrix(STATE3.x, xd, STATE3.eta)
        for j in range(3):
            for k in range(3):
                if j != k:
                    expected = xd[j] / np.sinh(STATE3.x[j] - STATE3.x[k])
                    assert abs(a[j, k] - expected) < 1e-14

    def test_lax_equation_along_flow(self):
        delta = 1e-4
        for state in (STATE3, RSState(eta=0.3 + 0.1j,
                                      x=np.array([0.1, 0.95, 2.1], complex),
                                      p=np.array([0.25, -0.15, 0.0], complex))):
            plus = flow_step(state, delta)
            minus = flow_step(state, -delta)
            d_lax = (lax_from_momenta(plus).entries - lax_from_momenta(minus).entries) / (
                2 * delta
            )
            lax = lax_from_momenta(state).entries
            a = a_matrix(state.x, velocities(state), state.eta)
            resid = np.linalg.norm(d_lax - (a @ lax - lax @ a)) / np.linalg.norm(lax)
            assert resid < 1e-6


class TestDeterminants:
    def test_single_point(self):
        assert abs(cauchy_det(np.array([0.4]), 0.3) + 1.0) < 1e-14

    def test_two_points_direct(self):
        x = np.array([0.2, 1.1])
        eta = 0.4
        m = np.array(
            [
                [np.sinh(eta) / np.sinh(-eta), np.sinh(eta) / np.sinh(x[0] - x[1] - eta)],
                [np.sinh(eta) / np.sinh(x[1] - x[0] - eta), np.sinh(eta) / np.sinh(-eta)],
            ]
        )
        direct = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        assert abs(cauchy_det(x, eta) - direct) < 1e-12 * abs(direct)

    def test_five_points_lu(self):
        rng = np.random.default_rng(12)
        x = np.cumsum(rng.uniform(0.5, 0.9, 5)) + 1j * rng.uniform(-0.2, 0.2, 5)
        eta = 0.37 + 0.05j
        n = 5
        m = np.empty((n, n), dtype=complex)
        for i in range(n):
            m[i, :] = np.sinh(eta) / np.sinh(x[i] - x - eta)
        lu = np.linalg.det(m)
        assert abs(cauchy_det(x, eta) - lu) < 1e-10 * abs(lu)

    def test_subset_selection(self):
        rng = np.random.default_rng(13)
        x = np.cumsum(rng.uniform(0.5, 0.9, 5))
        full = cauchy_det(x, 0.3, subset=[1, 3])
        direct = cauchy_det(x[[1, 3]], 0.3)
        assert abs(full - direct) < 1e-13 * abs(direct)


class TestSpectralInvariants:
    def test_first_and_last_invariants(self):
        rng = np.random.default_rng(14)
        st = _random_state(rng, 4)
        xd = velocities(st)
        coeffs = char_poly_via_en(st.x, xd, st.eta)
        lax = lax_from_velocities(st.x, xd, st.eta).entries
        # lambda^{L-1} coefficient is -tr(L); constant term is (-1)^L det(L).
        assert abs(coeffs[1] + np.trace(lax)) < 1e-12 * max(1.0, abs(np.trace(lax)))
        det = np.linalg.det(lax)
        assert abs(coeffs[4] - det) < 1e-10 * max(1.0, abs(det))

    def test_matches_direct_characteristic_polynomial(self):
        rng = np.random.default_rng(15)
        st = _random_state(rng, 5, spread=0.75)
        xd = velocities(st)
        coeffs = char_poly_via_en(st.x, xd, st.eta)
        direct = np.poly(np.linalg.eigvals(lax_from_velocities(st.x, xd, st.eta).entries))
        assert np.max(np.abs(coeffs - direct)) < 1e-9 * np.max(np.abs(direct))

    def test_newton_identity_chain(self):
        rng = np.random.default_rng(16)
        for n in (2, 4, 6):
            st = _random_state(rng, n, spread=0.7)
            xd = velocities(st)
            lax = lax_from_velocities(st.x, xd, st.eta).entries
            en = np.concatenate([[1.0], (-1.0) ** np.arange(1, n + 1) * 0])
            coeffs = char_poly_via_en(st.x, xd, st.eta)
            en = np.array(
                [1.0] + [(-1.0) ** k * coeffs[k] for k in range(1, n + 1)], dtype=complex
            )
            traces = np.concatenate([[n], power_traces(lax, n)])
            total = sum(
                (-1.0) ** k * en[n - k] * traces[k] for k in range(n + 1)
            )
            scale = max(np.max(np.abs(en)), np.max(np.abs(traces)))
            assert abs(total) < 1e-9 * scale

    def test_translation_covariance(self):
        rng = np.random.default_rng(17)
        st = _random_state(rng, 4)
        xd = velocities(st)
        coeffs = char_poly_via_en(st.x, xd, st.eta)
        shifted = char_poly_via_en(st.x + (0.37 - 0.21j), xd, st.eta)
        assert np.max(np.abs(coeffs - shifted)) < 1e-10 * np.max(np.abs(coeffs))


class TestConjugationIdentity:
    def test_single_particle_reduction(self):
        st = RSState(eta=0.4, x=np.array([0.3]), p=np.array([0.6]))
        assert xle_relation_check(st) < 1e-14

    def test_random_state(self):
        rng = np.random.default_rng(18)
        st = _random_state(rng, 4)
        assert xle_relation_check(st) < 1e-11

    def test_translation_invariance(self):
        rng = np.random.default_rng(19)
        st = _random_state(rng, 3)
        shifted = RSState(eta=st.eta, x=st.x + 0.83, p=st.p)
        assert abs(xle_relation_check(st) - xle_relation_check(shifted)) < 1e-11


class TestEvolution:
    def test_single_particle_free_motion(self):
        st = RSState(eta=0.4, x=np.array([0.2]), p=np.array([0.5]))
        traj = evolve(st, 2.0, 1e-12, n_samples=9)
        speed = 0.4 * np.exp(0.4 * 0.5)
        for t, state in traj:
            assert abs(state.x[0] - (0.2 + speed * t)) < 1e-10
            assert abs(state.p[0] - 0.5) < 1e-12

    def test_two_particles_conserved_invariants(self):
        st = RSState(eta=0.3, x=np.array([0.2, 1.3]), p=np.array([0.25, -0.2]))
        traj = evolve(st, 2.0, 1e-10, n_samples=21)
        ref = char_poly_via_en(st.x, velocities(st), st.eta)
        for _, state in traj:
            coeffs = char_poly_via_en(state.x, velocities(state), state.eta)
            assert np.max(np.abs(coeffs - ref)) < 1e-7 * max(1.0, np.max(np.abs(ref)))

    def test_isospectral_drift(self):
        rng = np.random.default_rng(20)
        st = _random_state(rng, 3)
        traj = evolve(st, 2.0, 1e-10, n_samples=17)
        ref = np.linalg.eigvals(lax_from_momenta(st).entries)
        for _, state in traj:
            eigs = np.linalg.eigvals(lax_from_momenta(state).entries)
            _, errors = match_multisets(eigs, ref)
            assert errors.max() < 1e-6

    def test_second_order_form_residual(self):
        rng = np.random.default_rng(21)
        st = _random_state(rng, 3)
        traj = evolve(st, 1.0, 1e-10, n_samples=5)
        delta = 1e-3
        for _, state in traj:
            plus = flow_step(state, delta)
            minus = flow_step(state, -delta)
            xdd_fd = (plus.x - 2 * state.x + minus.x) / delta ** 2
            target = acceleration(state.x, velocities(state), state.eta)
            scale = max(1.0, np.max(np.abs(target)))
            assert np.max(np.abs(xdd_fd - target)) < 1e-5 * scale

    def test_half_period_coupling_form(self):
        # At eta = i pi/2 the second-order form collapses to
        # 4 xd_j xd_k / sinh(2(x_j - x_k)).
        st = RSState(
            eta=1j * np.pi / 2,
            x=np.array([0.1, 1.1, 2.2], complex),
            p=np.array([0.15, -0.1, 0.2], complex),
        )
        traj = evolve(st, 0.6, 1e-10, n_samples=4)
        delta = 1e-4
        for _, state in traj:
            plus = flow_step(state, delta)
            minus = flow_step(state, -delta)
            xdd_fd = (plus.x - 2 * state.x + minus.x) / delta ** 2
            xd = velocities(state)
            target = np.array(
                [
                    4.0
                    * sum(
                        xd[j] * xd[k] / np.sinh(2 * (state.x[j] - state.x[k]))
                        for k in range(3)
                        if k != j
                    )
                    for j in range(3)
                ]
            )
            scale = max(1.0, np.max(np.abs(target)))
            assert np.max(np.abs(xdd_fd - target)) < 1e-5 * scale

    def test_large_coupling_algebraic_form(self):
        # Soft check of the strong-coupling limit of the second-order
        # form: at eta = 8 it approaches 2 xd_j xd_k coth(x_j - x_k).
        rng = np.random.default_rng(22)
        x = np.cumsum(rng.uniform(0.6, 1.0, 3)).astype(complex)
        xd = (rng.standard_normal(3) + 0.2).astype(complex)
        general = acceleration(x, xd, 8.0)
        limit = np.array(
            [
                2.0 * sum(xd[j] * xd[k] * coth(x[j] - x[k]) for k in range(3) if k != j)
                for j in range(3)
            ]
        )
        assert np.max(np.abs(general - limit)) < 1e-4 * max(1.0, np.max(np.abs(limit)))

    def test_collision_detection(self):
        st = RSState(
            eta=1j * np.pi / 2,
            x=np.array([0.0, 0.8], complex),
            p=np.array([0.0, 0.0], complex),
        )
        with pytest.raises(CollisionDetected):
            evolve(st, 3.0, 1e-10)

    def test_initial_state_inside_collision_shell(self):
        st = RSState(eta=0.4, x=np.array([0.0, 1e-7]), p=np.array([0.1, -0.1]))
        with pytest.raises(CollisionDetected):
            evolve(st, 1.0, 1e-10)


def test_invariants_multilinearity():
    # symmetric_invariants is multilinear in the weights; its partials are
    # the H_j = 1 minus H_j = 0 differences used by the inverse solver.
    rng = np.random.default_rng(23)
    x = np.cumsum(rng.uniform(0.5, 0.9, 4)).astype(complex)
    w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    eta = 0.4
    base = symmetric_invariants(x, w, eta)
    eps = 1e-6
    for j in range(4):
        w1 = w.copy()
        w1[j] = 1.0
        w0 = w.copy()
        w0[j] = 0.0
        partial = symmetric_invariants(x, w1, eta) - symmetric_invariants(x, w0, eta)
        step = np.zeros(4, dtype=complex)
        step[j] = eps
        fd = (symmetric_invariants(x, w + step, eta) - symmetric_invariants(x, w - step, eta)) / (
            2 * eps
        )
        assert np.max(np.abs(partial - fd)) < 1e-8 * max(1.0, np.max(np.abs(base)))
