"""Polarization matrix algebra: rotators, retarders, mirror reflection."""

import numpy as np
import pytest

from biphoton import (
    PreconditionError,
    RetarderSpec,
    analyzer_vector,
    backward,
    faraday_mirror,
    jones_vector,
    phase_aligned_distance,
    random_unitary,
    retarder,
    rotator,
    round_trip,
)

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def test_jones_vector_normalizes():
    v = jones_vector(3.0, 4.0)
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-15)
    raw = jones_vector(3.0, 4.0, normalized=False)
    np.testing.assert_allclose(raw, [3.0, 4.0])


def test_jones_vector_zero_rejected():
    with pytest.raises(ValueError):
        jones_vector(0.0, 0.0)


def test_analyzer_vector_components():
    a = analyzer_vector(np.pi / 3)
    np.testing.assert_allclose(a, [0.5, np.sqrt(3) / 2], atol=1e-15)


def test_rotator_identity_and_composition():
    np.testing.assert_allclose(rotator(0.0), np.eye(2), atol=1e-15)
    # two eighth-turns make a quarter-turn
    np.testing.assert_allclose(
        rotator(np.pi / 4) @ rotator(np.pi / 4), rotator(np.pi / 2), atol=1e-15
    )


def test_rotator_orthogonal(rng):
    for _ in range(20):
        th = rng.uniform(-np.pi, np.pi)
        r = rotator(th)
        np.testing.assert_allclose(r @ r.conj().T, np.eye(2), atol=1e-14)


def test_rotator_rejects_nonfinite():
    with pytest.raises(ValueError):
        rotator(np.nan)


def test_retarder_known_matrices():
    # delta = 0: no retardation regardless of axis angle
    np.testing.assert_allclose(retarder(0.0, 0.3), np.eye(2), atol=1e-15)
    # quarter-turn phase on the principal axes
    np.testing.assert_allclose(
        retarder(np.pi / 2, 0.0), np.diag([1j, -1j]), atol=1e-15
    )
    # same plate rotated 45 degrees swaps the basis states
    np.testing.assert_allclose(
        retarder(np.pi / 2, np.pi / 4), np.array([[0, 1j], [1j, 0]]), atol=1e-15
    )


def test_retarder_eigenvalues(rng):
    # the retardation phases are invariant under axis rotation
    for _ in range(30):
        delta = rng.uniform(0.0, np.pi)
        alpha = rng.uniform(0.0, np.pi)
        u = retarder(delta, alpha)
        ev = np.linalg.eigvals(u)
        for target in (np.exp(1j * delta), np.exp(-1j * delta)):
            assert np.min(np.abs(ev - target)) < 1e-12


def test_retarder_unitary_unit_determinant(rng):
    for _ in range(30):
        u = retarder(rng.uniform(0, np.pi), rng.uniform(0, np.pi))
        np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-14)
        assert abs(np.linalg.det(u) - 1.0) < 1e-14


def test_retarder_spec_canonicalization():
    spec = RetarderSpec(delta=np.pi / 2 + np.pi, alpha=np.pi / 8 + 3 * np.pi)
    assert 0.0 <= spec.delta < np.pi
    assert 0.0 <= spec.alpha < np.pi
    # the physical action only changes by a global sign under delta -> delta + pi
    direct = retarder(np.pi / 2 + np.pi, np.pi / 8 + 3 * np.pi)
    assert phase_aligned_distance(spec.matrix(), direct) < 1e-12


def test_retarder_rejects_nonfinite():
    with pytest.raises(ValueError):
        retarder(np.inf, 0.0)
    with pytest.raises(ValueError):
        RetarderSpec(delta=0.1, alpha=np.nan)


def test_faraday_mirror_matrix():
    fm = faraday_mirror()
    np.testing.assert_array_equal(fm, np.array([[0, -1], [-1, 0]], dtype=complex))
    # horizontal input reflects to (minus) vertical
    np.testing.assert_allclose(fm @ np.array([1.0, 0.0]), [0.0, -1.0])
    # a returned copy must not alias module state
    fm[0, 0] = 99.0
    np.testing.assert_array_equal(faraday_mirror(), np.array([[0, -1], [-1, 0]]))


def test_backward_of_rotator_is_same_rotation():
    # geometric rotations look identical from both propagation directions
    for th in np.linspace(-np.pi, np.pi, 17):
        np.testing.assert_allclose(backward(rotator(th)), rotator(th), atol=1e-15)


def test_backward_preserves_diagonal_phases():
    d = np.diag([np.exp(0.7j), np.exp(-0.3j)])
    np.testing.assert_allclose(backward(d), d, atol=1e-15)


def test_backward_is_antihomomorphism(rng):
    for _ in range(50):
        u = random_unitary(rng)
        v = random_unitary(rng)
        np.testing.assert_allclose(
            backward(u @ v), backward(v) @ backward(u), atol=1e-13
        )


def test_backward_definition(rng):
    for _ in range(20):
        u = random_unitary(rng)
        np.testing.assert_allclose(backward(u), SIGMA_Z @ u.T @ SIGMA_Z, atol=1e-15)


def test_backward_rejects_bad_input():
    with pytest.raises(ValueError):
        backward(np.eye(3))
    with pytest.raises(ValueError):
        backward(np.array([[np.nan, 0], [0, 1]], dtype=complex))


def test_round_trip_collapses_to_mirror(rng):
    # forward pass, mirror, backward pass: the medium cancels up to det(u)
    for _ in range(200):
        u = random_unitary(rng)
        expected = np.linalg.det(u) * faraday_mirror()
        assert np.max(np.abs(round_trip(u) - expected)) < 1e-12


def test_round_trip_retarder_is_pure_mirror():
    # det(retarder) = 1, so the retardation cancels exactly
    u = retarder(1.234, 0.567)
    np.testing.assert_allclose(round_trip(u), faraday_mirror(), atol=1e-13)


def test_round_trip_requires_unitary():
    with pytest.raises(PreconditionError):
        round_trip(np.array([[2.0, 0.0], [0.0, 1.0]], dtype=complex))


def test_phase_aligned_distance_quotients_global_phase(rng):
    u = random_unitary(rng)
    assert phase_aligned_distance(u, np.exp(0.9j) * u) < 1e-14
    v = random_unitary(rng)
    # distinct unitaries should generically register a gap
    assert phase_aligned_distance(u, v) > 1e-3


def test_random_unitary_is_unitary(rng):
    for _ in range(50):
        u = random_unitary(rng)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-13)
