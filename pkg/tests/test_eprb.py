import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from heisensim import (
    BETA_PRESETS,
    DOWN,
    Direction,
    EprbConfig,
    EprbReport,
    InteractionSequence,
    PROBABILITY_BETA,
    SPIN_BETA,
    UP,
    bell_q,
    bell_q_terms,
    heisenberg_evolve,
    real_expectation,
    run_eprb,
    singlet_entangler,
    spin_projector,
)
from heisensim.eprb import (
    belief_observables,
    eprb_layout,
    initial_state,
    measurement_sequence,
)
from heisensim.tensor import Operator, SubsystemLayout, embed
from conftest import random_direction


def entangled_correlation(n1: Direction, n2: Direction, beta) -> float:
    # closed form: ((b1+b2)^2 - (b1-b2)^2 n1.n2) / 4
    b1, b2 = beta[1], beta[2]
    return ((b1 + b2) ** 2 - (b1 - b2) ** 2 * n1.dot(n2)) / 4.0


def _from_vector(v) -> Direction:
    return Direction(math.acos(max(-1.0, min(1.0, v[2]))), math.atan2(v[1], v[0]))


def nonentangled_means(theta1: float, theta2: float, beta) -> tuple[float, float]:
    # particle 1 starts up, particle 2 starts down, hence the swapped roles
    # of cos^2 and sin^2
    b1, b2 = beta[1], beta[2]
    m1 = b1 * math.cos(theta1 / 2) ** 2 + b2 * math.sin(theta1 / 2) ** 2
    m2 = b1 * math.sin(theta2 / 2) ** 2 + b2 * math.cos(theta2 / 2) ** 2
    return m1, m2


class TestSingletEntangler:
    def test_action_on_all_four_basis_states(self):
        u = singlet_entangler().matrix
        r = 1.0 / math.sqrt(2.0)
        assert_allclose(u[:, 0], [1, 0, 0, 0], atol=0)  # up,up fixed
        assert_allclose(u[:, 1], [0, r, -r, 0], atol=0)  # up,down -> singlet
        assert_allclose(u[:, 2], [0, r, r, 0], atol=0)  # down,up -> triplet
        assert_allclose(u[:, 3], [0, 0, 0, 1], atol=0)  # down,down fixed

    def test_unitary(self):
        assert singlet_entangler().is_unitary(1e-15)


class TestEprbConfig:
    def test_rejects_equal_outcome_values(self):
        with pytest.raises(ValueError):
            EprbConfig(Direction(0, 0), Direction(0, 0), beta=(0.0, 1.0, 1.0))

    def test_probability_preset_accepted(self):
        EprbConfig(Direction(0, 0), Direction(0, 0), beta=PROBABILITY_BETA)

    def test_presets(self):
        assert BETA_PRESETS["spin"] == (0.0, 1.0, -1.0)
        assert BETA_PRESETS["probability"] == (0.0, 1.0, 0.0)


class TestReport:
    def test_p_uu_bounds_enforced(self):
        with pytest.raises(ValueError):
            EprbReport(0.0, 0.0, 0.0, 1.5)


class TestEntangled:
    def test_spin_preset_gives_minus_dot_product(self, rng):
        for _ in range(50):
            n1, n2 = random_direction(rng), random_direction(rng)
            report = run_eprb(EprbConfig(n1, n2, beta=SPIN_BETA))
            assert report.mean_b1b2 == pytest.approx(-n1.dot(n2), abs=1e-12)

    def test_general_beta_closed_form(self, rng):
        # full matrix pipeline against the closed form, eigenvalues drawn
        # freely (only the outcome values need to differ)
        for _ in range(1000):
            n1, n2 = random_direction(rng), random_direction(rng)
            beta = (rng.normal(), *np.sort(rng.normal(size=2))[::-1])
            report = run_eprb(EprbConfig(n1, n2, beta=beta))
            assert report.mean_b1b2 == pytest.approx(
                entangled_correlation(n1, n2, beta), abs=1e-10
            )

    def test_p_uu_law(self, rng):
        for _ in range(50):
            n1, n2 = random_direction(rng), random_direction(rng)
            report = run_eprb(EprbConfig(n1, n2))
            assert report.p_uu == pytest.approx((1.0 - n1.dot(n2)) / 4.0, abs=1e-12)

    def test_perfect_anticorrelation_at_equal_directions(self, rng):
        for _ in range(20):
            n = random_direction(rng)
            assert run_eprb(EprbConfig(n, n)).p_uu < 1e-12

    def test_rotational_invariance(self, rng):
        # p_uu depends only on the opening angle between the analyzers:
        # rigidly rotating both directions in 3d changes nothing
        n1, n2 = random_direction(rng), random_direction(rng)
        reference = run_eprb(EprbConfig(n1, n2)).p_uu
        for _ in range(4):
            q, r = np.linalg.qr(rng.normal(size=(3, 3)))
            rot = q * np.sign(np.diag(r))
            if np.linalg.det(rot) < 0:
                rot[:, 0] = -rot[:, 0]
            m1, m2 = (_from_vector(rot @ n.unit_vector) for n in (n1, n2))
            assert abs(m1.dot(m2) - n1.dot(n2)) < 1e-12
            assert run_eprb(EprbConfig(m1, m2)).p_uu == pytest.approx(
                reference, abs=1e-10
            )


class TestNonentangled:
    def test_factorization(self, rng):
        for _ in range(50):
            n1, n2 = random_direction(rng), random_direction(rng)
            r = run_eprb(EprbConfig(n1, n2, entangled=False))
            assert r.mean_b1b2 == pytest.approx(r.mean_b1 * r.mean_b2, abs=1e-10)

    def test_closed_form(self, rng):
        for _ in range(50):
            n1, n2 = random_direction(rng), random_direction(rng)
            r = run_eprb(EprbConfig(n1, n2, entangled=False))
            m1, m2 = nonentangled_means(n1.theta, n2.theta, SPIN_BETA)
            assert r.mean_b1 == pytest.approx(m1, abs=1e-12)
            assert r.mean_b2 == pytest.approx(m2, abs=1e-12)
            assert r.mean_b1b2 == pytest.approx(m1 * m2, abs=1e-12)

    def test_z_analyzers_read_initial_spins(self):
        r = run_eprb(EprbConfig(Direction(0, 0), Direction(0, 0), entangled=False))
        assert r.mean_b1 == pytest.approx(SPIN_BETA[1], abs=1e-14)
        assert r.mean_b2 == pytest.approx(SPIN_BETA[2], abs=1e-14)
        assert r.mean_b1b2 == pytest.approx(r.mean_b1 * r.mean_b2, abs=1e-14)


class TestBellQ:
    def test_headline_value(self):
        terms = bell_q_terms()
        assert_allclose(terms, [0.375] * 3, atol=1e-12)
        assert bell_q() == pytest.approx(9.0 / 8.0, abs=1e-12)

    def test_degenerate_parallel_analyzers(self):
        assert bell_q((0.0, 0.0, 0.0)) == pytest.approx(0.0, abs=1e-12)


class TestOrderInvariance:
    def test_swapping_measurements_changes_nothing(self, rng):
        cfg = EprbConfig(random_direction(rng), random_direction(rng))
        seq = measurement_sequence(cfg)
        swapped = seq.reordered(("t1:entangle", "t2:measure-2", "t2:measure-1"))
        psi0 = initial_state()
        b1, b2 = belief_observables(cfg.beta)
        for s in (seq, swapped):
            prod = heisenberg_evolve(b1, s) @ heisenberg_evolve(b2, s)
            value = real_expectation(psi0, prod)
            assert value == pytest.approx(-cfg.n1.dot(cfg.n2), abs=1e-12)


class TestCompletionInvariance:
    def test_alternative_shift_completion_same_report(self, rng):
        # shifts only need to move the ignorant state to the right
        # awareness state; send the remaining basis states through a
        # transposition instead of the cyclic completion and check every
        # report field stays put
        n1, n2 = random_direction(rng), random_direction(rng)
        cfg = EprbConfig(n1, n2)
        layout = eprb_layout()

        def alt_measurement(observer, particle, n):
            swap1 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
            swap2 = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)
            block = np.zeros((6, 6), dtype=complex)
            for shift, outcome in ((swap1, UP), (swap2, DOWN)):
                block += np.kron(shift, spin_projector(n, outcome, particle).matrix)
            sub = Operator(SubsystemLayout(((observer, 3), (particle, 2))), block)
            return embed(sub, layout)

        steps = (
            ("t1:entangle", embed(singlet_entangler(), layout)),
            ("t2:measure-1", alt_measurement("O1", "S1", n1)),
            ("t2:measure-2", alt_measurement("O2", "S2", n2)),
        )
        seq = InteractionSequence(steps)
        psi0 = initial_state()
        b1, b2 = belief_observables(cfg.beta)
        alt = real_expectation(psi0, heisenberg_evolve(b1, seq) @ heisenberg_evolve(b2, seq))
        standard = run_eprb(cfg).mean_b1b2
        assert alt == pytest.approx(standard, abs=1e-12)
