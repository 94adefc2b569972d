import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdtree.qsim import (
    QubitCapError,
    StateVector,
    apply_mixer,
    apply_phase,
    expectation,
    sample,
    uniform_state,
)

from .oracles import dense_mixer, dense_phase


def test_uniform_state():
    assert np.allclose(uniform_state(1).amps, [1 / math.sqrt(2)] * 2, atol=1e-15)
    assert np.allclose(uniform_state(2).amps, [0.5] * 4, atol=1e-15)
    assert abs(uniform_state(3).norm() - 1) < 1e-12
    for bad in (0, 17):
        with pytest.raises(QubitCapError):
            uniform_state(bad)


def test_phase_identity_and_global_phase():
    rng = np.random.default_rng(0)
    state = uniform_state(3)
    apply_mixer(state, 0.4)
    before = state.amps.copy()
    apply_phase(state, rng.random(8), 0.0)
    assert np.array_equal(state.amps, before)
    apply_phase(state, np.full(8, 0.7), 1.3)
    assert np.allclose(state.amps, before * cmath.exp(-1j * 0.91), atol=1e-14)
    assert np.allclose(state.probabilities(), np.abs(before) ** 2, atol=1e-15)


def test_phase_hand_value():
    state = apply_phase(uniform_state(2), [0, 0.25, 0.25, 0], math.pi)
    assert state.amps[1] == pytest.approx(0.5 * cmath.exp(-1j * math.pi / 4), abs=1e-15)
    assert state.amps[0] == pytest.approx(0.5, abs=1e-15)


def test_phase_length_mismatch():
    with pytest.raises(ValueError):
        apply_phase(uniform_state(2), [0, 1], 1.0)
    with pytest.raises(ValueError):
        expectation(uniform_state(2), [0, 1, 2])


def test_mixer_hand_values():
    state = uniform_state(2)
    before = state.amps.copy()
    assert np.array_equal(apply_mixer(state, 0.0).amps, before)

    flipped = apply_mixer(StateVector.basis(3, 0), math.pi / 2)
    assert flipped.probabilities()[7] == pytest.approx(1.0, abs=1e-15)

    one = apply_mixer(StateVector.basis(1, 0), math.pi / 4)
    assert np.allclose(one.amps, [math.cos(math.pi / 4), -1j * math.sin(math.pi / 4)], atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mixer_matches_dense_exponential(n):
    rng = np.random.default_rng(n)
    for beta in rng.uniform(-3, 3, 5):
        amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        amps /= np.linalg.norm(amps)
        state = apply_mixer(StateVector(n, amps.copy()), beta)
        assert np.allclose(state.amps, dense_mixer(n, beta) @ amps, atol=1e-8, rtol=0)


def test_phase_matches_dense_exponential():
    rng = np.random.default_rng(9)
    f = rng.random(8)
    state = apply_phase(uniform_state(3), f, 0.8)
    assert np.allclose(state.amps, dense_phase(f, 0.8) @ uniform_state(3).amps, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_norm_and_composition(n, seed):
    rng = np.random.default_rng(seed)
    f = rng.random(1 << n)
    state = uniform_state(n)
    for _ in range(50):
        if rng.random() < 0.5:
            apply_phase(state, f, rng.uniform(-4, 4))
        else:
            apply_mixer(state, rng.uniform(-4, 4))
    assert abs(state.norm() - 1) < 1e-10

    b1, b2 = rng.uniform(-2, 2, 2)
    split = apply_mixer(apply_mixer(state.copy(), b1), b2)
    joint = apply_mixer(state.copy(), b1 + b2)
    assert np.allclose(split.amps, joint.amps, atol=1e-9, rtol=0)

    g1, g2 = rng.uniform(-2, 2, 2)
    split = apply_phase(apply_phase(state.copy(), f, g1), f, g2)
    joint = apply_phase(state.copy(), f, g1 + g2)
    assert np.allclose(split.amps, joint.amps, atol=1e-13, rtol=0)
    assert np.allclose(np.abs(split.amps), np.abs(state.amps), atol=1e-14)


def test_expectation():
    f = [0, 0.25, 0.25, 0]
    assert expectation(uniform_state(2), f) == pytest.approx(0.125, abs=1e-15)
    assert expectation(StateVector.basis(2, 2), [3.0, 1.0, 7.5, 2.0]) == 7.5
    rng = np.random.default_rng(4)
    f = rng.random(16)
    assert expectation(uniform_state(4), f) == pytest.approx(f.mean(), abs=1e-12)


def test_expectation_matches_shot_mean():
    rng = np.random.default_rng(12)
    f = rng.random(8)
    state = apply_mixer(apply_phase(uniform_state(3), f, 2.1), 0.6)
    shots = sample(state, 100_000, seed=5)
    mean = f[shots].mean()
    # standard error of the shot mean is at most (max f - min f) / 2 / sqrt(shots)
    assert abs(mean - expectation(state, f)) < 5 * 0.5 / math.sqrt(100_000)


def test_sampling():
    assert set(sample(StateVector.basis(3, 5), 200, seed=1).tolist()) == {5}
    draws = sample(uniform_state(2), 4096, seed=3)
    freq = np.bincount(draws, minlength=4) / 4096
    assert ((freq > 0.20) & (freq < 0.30)).all()
    assert np.array_equal(sample(uniform_state(3), 500, seed=7), sample(uniform_state(3), 500, seed=7))
    assert not np.array_equal(sample(uniform_state(3), 500, seed=7), sample(uniform_state(3), 500, seed=8))
    with pytest.raises(ValueError):
        sample(uniform_state(1), 0, seed=1)


def test_sampling_never_draws_zero_probability_states():
    amps = np.zeros(8, dtype=complex)
    amps[[2, 6]] = 1 / math.sqrt(2)
    assert set(sample(StateVector(3, amps), 5000, seed=0).tolist()) == {2, 6}
