"""Ergotropy tests: permutation oracles, closed form vs eigensolver,
maximization brute force, monotonicity and the backflow measure."""

import numpy as np
import pytest

from ergochan.channels import ErgodicChannel, ProbabilitySchedule, apply_ergodic
from ergochan.ergotropy import (Hamiltonian, anti_ergotropy, energy, ergotropy,
                                ergotropy_qubit_closed, max_ergotropy_state, nm_measure,
                                passive_energy_bruteforce, passive_state, sigma_w,
                                w_max_at, w_max_comparison_form)
from ergochan.matkernel import (BlochVector, DensityMatrix, bloch_to_density,
                                random_density_matrix)


def qubit_channel(z_tau, kind, **kw):
    tau = bloch_to_density(BlochVector(0.0, 0.0, z_tau))
    return ErgodicChannel(tau, ProbabilitySchedule(kind, **kw))


class TestHamiltonian:
    def test_requires_sorted_energies(self):
        with pytest.raises(ValueError, match="non-decreasing"):
            Hamiltonian((1.0, 0.0))

    def test_qubit_factory(self):
        h = Hamiltonian.qubit(2.0)
        assert h.energies == (0.0, 2.0)
        assert np.allclose(h.matrix(), np.diag([0.0, 2.0]))


class TestPassiveState:
    def test_idempotent(self):
        rng = np.random.default_rng(0)
        h = Hamiltonian((0.0, 0.4, 1.0))
        rho = random_density_matrix(rng, 3)
        p1 = passive_state(rho, h)
        p2 = passive_state(p1, h)
        assert np.max(np.abs(p1.matrix - p2.matrix)) < 1e-12

    def test_population_inversion(self):
        h = Hamiltonian.qubit(1.0)
        excited = DensityMatrix.pure(np.array([0.0, 1.0]))
        assert np.allclose(passive_state(excited, h).matrix, np.diag([1.0, 0.0]), atol=1e-14)

    def test_commutes_with_hamiltonian(self):
        rng = np.random.default_rng(1)
        h = Hamiltonian((0.0, 0.5, 2.0))
        rho = random_density_matrix(rng, 3)
        p = passive_state(rho, h)
        hm = h.matrix()
        assert np.max(np.abs(p.matrix @ hm - hm @ p.matrix)) < 1e-12

    def test_matches_permutation_oracle(self):
        rng = np.random.default_rng(2)
        h = Hamiltonian((0.0, 0.7, 1.3))
        for _ in range(50):
            rho = random_density_matrix(rng, 3)
            direct = energy(passive_state(rho, h), h)
            oracle = passive_energy_bruteforce(rho, h)
            assert direct == pytest.approx(oracle, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            passive_state(DensityMatrix.maximally_mixed(2), Hamiltonian((0.0, 1.0, 2.0)))


class TestErgotropy:
    def test_passive_state_has_none(self):
        rng = np.random.default_rng(3)
        h = Hamiltonian((0.0, 0.5, 1.5))
        for _ in range(20):
            rho = random_density_matrix(rng, 3)
            assert ergotropy(passive_state(rho, h), h) == pytest.approx(0.0, abs=1e-12)

    def test_full_inversion(self):
        h = Hamiltonian.qubit(1.0)
        excited = DensityMatrix.pure(np.array([0.0, 1.0]))
        assert ergotropy(excited, h) == pytest.approx(1.0, abs=1e-14)

    def test_qubit_bloch_value(self):
        # W = (r - z)/2 for a qubit with H = |1><1|.
        rho = bloch_to_density(BlochVector(0.5, 0.0, 0.5))
        r = np.sqrt(0.5)
        expected = (r - 0.5) / 2.0
        assert ergotropy(rho, Hamiltonian.qubit(1.0)) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.103553, abs=1e-6)

    def test_convexity(self):
        rng = np.random.default_rng(4)
        h = Hamiltonian((0.0, 0.8, 1.1))
        for _ in range(100):
            rhos = [random_density_matrix(rng, 3) for _ in range(3)]
            weights = rng.dirichlet(np.ones(3))
            mixture = DensityMatrix(sum(w * r.matrix for w, r in zip(weights, rhos)))
            lhs = ergotropy(mixture, h)
            rhs = sum(w * ergotropy(r, h) for w, r in zip(weights, rhos))
            assert lhs <= rhs + 1e-10

    def test_invariant_under_commuting_unitaries(self):
        # Energy-preserving unitaries (diagonal phases) leave W_e unchanged.
        rng = np.random.default_rng(5)
        h = Hamiltonian((0.0, 0.6, 1.7))
        for _ in range(20):
            rho = random_density_matrix(rng, 3)
            phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=3))
            u = np.diag(phases)
            rotated = DensityMatrix(u @ rho.matrix @ u.conj().T)
            assert ergotropy(rotated, h) == pytest.approx(ergotropy(rho, h), abs=1e-12)


class TestAntiErgotropy:
    def test_maximally_mixed_is_inert(self):
        h = Hamiltonian((0.0, 1.0, 2.0))
        assert anti_ergotropy(DensityMatrix.maximally_mixed(3), h) == pytest.approx(0.0, abs=1e-12)

    def test_ground_state_full_charge(self):
        h = Hamiltonian.qubit(1.0)
        ground = DensityMatrix.pure(np.array([1.0, 0.0]))
        assert anti_ergotropy(ground, h) == pytest.approx(1.0, abs=1e-14)

    def test_matches_permutation_oracle(self):
        rng = np.random.default_rng(6)
        h = Hamiltonian((0.0, 0.7, 1.3))
        from itertools import permutations
        energies = np.asarray(h.energies)
        for _ in range(50):
            rho = random_density_matrix(rng, 3)
            values = rho.eigenvalues()
            best = max(float(np.sum(values[list(perm)] * energies)) for perm in permutations(range(3)))
            assert anti_ergotropy(rho, h) == pytest.approx(best - energy(rho, h), abs=1e-12)

    def test_range_bound_qubit(self):
        rng = np.random.default_rng(7)
        h = Hamiltonian.qubit(1.0)
        for _ in range(50):
            rho = random_density_matrix(rng, 2)
            assert ergotropy(rho, h) + anti_ergotropy(rho, h) <= 1.0 + 1e-12


class TestQubitClosedForm:
    def test_p_one_reduces_to_static_value(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            v = rng.normal(size=3)
            v *= rng.uniform() / np.linalg.norm(v)
            b = BlochVector(*v)
            r = b.norm()
            expected = 0.5 * (r - b.z)
            assert ergotropy_qubit_closed(b, 0.4, 1.0) == pytest.approx(expected, abs=1e-14)

    def test_p_zero_is_passive(self):
        assert ergotropy_qubit_closed(BlochVector(0.3, 0.1, -0.4), 0.7, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_example_state(self):
        # Evolved Bloch vector (0.3, 0, 0.5); ergotropy (r' - z')/2.
        closed = ergotropy_qubit_closed(BlochVector(0.5, 0.0, 0.5), 0.5, 0.6)
        r_evolved = np.sqrt(0.09 + 0.25)
        assert closed == pytest.approx((r_evolved - 0.5) / 2.0, abs=1e-14)

    def test_matches_eigensolver_oracle(self):
        rng = np.random.default_rng(9)
        h = Hamiltonian.qubit(1.0)
        worst = 0.0
        for _ in range(500):
            v = rng.normal(size=3)
            v *= rng.uniform() / np.linalg.norm(v)
            b = BlochVector(*v)
            z_tau = float(rng.uniform(0.0, 1.0))
            p = float(rng.uniform(0.0, 1.0))
            tau = bloch_to_density(BlochVector(0.0, 0.0, z_tau))
            evolved = DensityMatrix(p * bloch_to_density(b).matrix + (1 - p) * tau.matrix)
            worst = max(worst, abs(ergotropy_qubit_closed(b, z_tau, p) - ergotropy(evolved, h)))
        assert worst <= 1e-10

    def test_rejects_active_fixed_point(self):
        with pytest.raises(ValueError, match="passive"):
            ergotropy_qubit_closed(BlochVector(0, 0, 0.5), -0.2, 0.5)


class TestMaxErgotropyState:
    def test_p_one_fully_inverted(self):
        for z_tau in (0.0, 0.3, 0.9):
            z_opt, w = max_ergotropy_state(z_tau, 1.0, 1.0)
            assert z_opt == -1.0
            assert w == pytest.approx(1.0, abs=1e-12)

    def test_p_zero_no_work(self):
        for z_tau in (0.0, 0.5, 1.0):
            _, w = max_ergotropy_state(z_tau, 0.0, 1.0)
            assert w == pytest.approx(0.0, abs=1e-12)

    def test_against_2d_bruteforce(self):
        # 10^6-point grid over (r, z), evaluated through the closed form.
        z_tau, p = 0.5, 0.6
        rs = np.linspace(0.0, 1.0, 1000)
        zs = np.linspace(-1.0, 1.0, 1000)
        r_grid, z_grid = np.meshgrid(rs, zs)
        mask = np.abs(z_grid) <= r_grid
        z_ev = p * z_grid + (1 - p) * z_tau
        w = 0.5 * (np.sqrt(np.clip(p**2 * (r_grid**2 - z_grid**2), 0, None) + z_ev**2) - z_ev)
        brute = float(np.max(w[mask]))
        _, w_max = max_ergotropy_state(z_tau, p, 1.0)
        assert w_max >= brute - 1e-9
        assert w_max == pytest.approx(brute, abs=1e-6)

    def test_monotone_in_bloch_length(self):
        # Audited assumption behind the pure-state restriction.
        rng = np.random.default_rng(10)
        for _ in range(200):
            z = float(rng.uniform(-1, 1))
            z_tau = float(rng.uniform(0, 1))
            p = float(rng.uniform(0, 1))
            rms = np.sort(rng.uniform(np.abs(z), 1.0, size=2))
            w_small = ergotropy_qubit_closed(BlochVector(np.sqrt(rms[0]**2 - z*z), 0.0, z), z_tau, p)
            w_large = ergotropy_qubit_closed(BlochVector(np.sqrt(rms[1]**2 - z*z), 0.0, z), z_tau, p)
            assert w_large >= w_small - 1e-12

    def test_interior_maximizer_branch(self):
        # For p < 2 (1-p) z_tau the optimum sits at z* = -p / (2 (1-p) z_tau).
        z_tau, p = 0.8, 0.3
        z_opt, w = max_ergotropy_state(z_tau, p, 1.0)
        q = (1 - p) * z_tau
        assert p < 2 * q
        assert z_opt == pytest.approx(-p / (2 * q), abs=1e-6)
        assert w == pytest.approx(p**2 / (4 * q), abs=1e-10)


class TestSigmaW:
    def test_markovian_measure_zero(self):
        ch = qubit_channel(0.5, "exponential", gamma=1.0)
        h = Hamiltonian.qubit(1.0)
        for t in (0.0, 0.5, 1.7, 4.0):
            sample = sigma_w(ch, h, t)
            assert sample.measure == 0.0
            assert sample.derivative < 0.0

    def test_backflow_window_positive(self):
        ch = qubit_channel(0.5, "cosine_squared", omega=1.0)
        h = Hamiltonian.qubit(1.0)
        for t in (1.8, 2.3, 2.9):
            sample = sigma_w(ch, h, t)
            assert sample.measure > 0.0

    def test_stationary_instant(self):
        ch = qubit_channel(0.5, "cosine_squared", omega=1.0)
        h = Hamiltonian.qubit(1.0)
        assert sigma_w(ch, h, np.pi).measure == pytest.approx(0.0, abs=1e-8)

    def test_sign_matches_schedule_derivative(self):
        ch = qubit_channel(0.5, "cosine_squared", omega=1.0)
        h = Hamiltonian.qubit(1.0)
        for t in np.linspace(0.05, 6.0, 120):
            pdot = ch.schedule.evaluate(float(t))[1]
            if abs(pdot) <= 1e-8:
                continue
            assert np.sign(sigma_w(ch, h, float(t)).derivative) == np.sign(pdot)

    def test_rejects_active_fixed_point(self):
        tau = bloch_to_density(BlochVector(0.0, 0.0, -0.5))
        ch = ErgodicChannel(tau, ProbabilitySchedule("exponential", gamma=1.0))
        with pytest.raises(ValueError, match="passive"):
            sigma_w(ch, Hamiltonian.qubit(1.0), 0.5)


class TestNmMeasure:
    def test_markovian_measure_is_exactly_zero(self):
        ch = qubit_channel(0.5, "exponential", gamma=1.0)
        trace = nm_measure(ch, Hamiltonian.qubit(1.0), np.linspace(0.0, 5.0, 201))
        assert trace.script_n_w == 0.0
        assert all(m == 0.0 for m in trace.sigma_w)

    def test_constant_schedule_zero(self):
        ch = qubit_channel(0.3, "constant")
        trace = nm_measure(ch, Hamiltonian.qubit(1.0), np.linspace(0.0, 2.0, 51))
        assert trace.script_n_w == 0.0

    def test_cosine_full_period_positive(self):
        ch = qubit_channel(0.5, "cosine_squared", omega=1.0)
        trace = nm_measure(ch, Hamiltonian.qubit(1.0), np.linspace(0.0, np.pi, 301))
        assert trace.script_n_w > 0.0
        assert 0.0 <= trace.script_n_w < 1.0
        assert np.all(np.diff(trace.n_w_cumulative) >= -1e-15)

    def test_markovian_w_max_monotone(self):
        ch = qubit_channel(0.5, "exponential", gamma=1.0)
        trace = nm_measure(ch, Hamiltonian.qubit(1.0), np.linspace(0.0, 5.0, 101))
        assert np.all(np.diff(trace.w_max) <= 1e-12)


class TestTheorem2Monotonicity:
    def test_random_states_nonincreasing(self):
        rng = np.random.default_rng(11)
        ch = qubit_channel(0.4, "exponential", gamma=1.0)
        h = Hamiltonian.qubit(1.0)
        times = np.linspace(0.0, 5.0, 120)
        for _ in range(20):
            rho0 = random_density_matrix(rng, 2)
            values = [ergotropy(apply_ergodic(ch, float(t), rho0), h) for t in times]
            assert np.all(np.diff(values) <= 1e-10)


def test_comparison_form_disagrees_with_numeric_maximum():
    # The quoted closed-form rate expression does not reproduce the maximized
    # ergotropy; the numeric maximization is the authority and the deviation
    # is surfaced rather than hidden.
    z_tau = 0.5
    ch = qubit_channel(z_tau, "exponential", gamma=1.0)
    h = Hamiltonian.qubit(1.0)
    t = 0.1  # p close to 1, where the quoted form diverges
    p = ch.schedule.evaluate(t)[0]
    numeric = w_max_at(ch, h, t)
    quoted = w_max_comparison_form(p, z_tau)
    assert abs(quoted - numeric) > 0.1
