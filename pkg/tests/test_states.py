import math

import numpy as np
import pytest

from wyskew.linalg import IDENTITY2, SIGMA_X, SIGMA_Y, hs_norm
from wyskew.states import (
    BlochVector,
    ObservableSet,
    StateError,
    from_bloch,
    from_pure,
    random_density,
    random_observable,
    validate,
)


def test_from_bloch_examples():
    np.testing.assert_allclose(from_bloch(BlochVector(0, 0, 1)).matrix, np.diag([1, 0]), atol=1e-15)
    np.testing.assert_allclose(from_bloch(BlochVector(0, 0, 0)).matrix, IDENTITY2 / 2, atol=1e-15)
    r = math.sqrt(3) / 2
    lam = np.linalg.eigvalsh(from_bloch(BlochVector(r, 0, 0)).matrix)
    np.testing.assert_allclose(lam, [(1 - r) / 2, (1 + r) / 2], atol=1e-15)


def test_from_bloch_rejects_long_vector():
    with pytest.raises(StateError) as exc:
        from_bloch(BlochVector(1.0, 0.1, 0.0))
    assert exc.value.code == "bloch"


@pytest.mark.parametrize("seed", range(30))
def test_from_bloch_spectrum(seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(3)
    v *= rng.uniform(0, 1) / np.linalg.norm(v)
    rho = from_bloch(BlochVector(*v))
    r = np.linalg.norm(v)
    np.testing.assert_allclose(np.linalg.eigvalsh(rho.matrix), [(1 - r) / 2, (1 + r) / 2], atol=1e-12)
    assert np.linalg.norm(rho.sqrt @ rho.sqrt - rho.matrix) <= 1e-9


def test_from_pure_examples():
    np.testing.assert_allclose(from_pure([1, 0]).matrix, np.diag([1, 0]), atol=1e-15)
    np.testing.assert_allclose(from_pure([1, 1]).matrix, (IDENTITY2 + SIGMA_X) / 2, atol=1e-15)
    np.testing.assert_allclose(from_pure([1, 1j]).matrix, (IDENTITY2 + SIGMA_Y) / 2, atol=1e-15)
    with pytest.raises(StateError):
        from_pure([0, 0])


def test_from_pure_sqrt_is_itself():
    rho = from_pure([1, 2 - 1j, 0.5j])
    assert np.linalg.norm(rho.sqrt @ rho.sqrt - rho.matrix) <= 1e-14


@pytest.mark.parametrize("dim", [1, 2, 3, 5, 8])
def test_random_density_contract(dim):
    for rank in range(1, dim + 1):
        rho = random_density(dim, rank, seed=17 + rank)
        assert abs(np.trace(rho.matrix) - 1) <= 1e-12
        assert np.linalg.matrix_rank(rho.matrix, tol=1e-10) == rank
        assert 1 / dim - 1e-10 <= rho.purity() <= 1 + 1e-10
        assert np.linalg.norm(rho.sqrt @ rho.sqrt - rho.matrix) <= 1e-9
    assert abs(random_density(dim, 1, 3).purity() - 1) <= 1e-10


def test_random_density_deterministic():
    a = random_density(4, 2, 99).matrix
    b = random_density(4, 2, 99).matrix
    assert a.tobytes() == b.tobytes()
    assert random_density(4, 2, 100).matrix.tobytes() != a.tobytes()


def test_random_density_min_eigenvalue_over_seeds():
    for seed in range(100):
        rho = random_density(4, 1 + seed % 4, seed)
        assert np.linalg.eigvalsh(rho.matrix)[0] >= -1e-12


def test_random_density_invalid_rank():
    with pytest.raises(StateError):
        random_density(3, 0, 1)
    with pytest.raises(StateError):
        random_density(3, 4, 1)


@pytest.mark.parametrize("dim", [1, 2, 4, 7])
def test_random_observable_contract(dim):
    h = random_observable(dim, 5)
    assert np.max(np.abs(h - h.conj().T)) <= 1e-14
    assert abs(hs_norm(h) - dim) <= 1e-10
    assert random_observable(dim, 5).tobytes() == h.tobytes()


def test_validate_examples():
    rho = validate(np.diag([0.9, 0.1]))
    np.testing.assert_allclose(rho.sqrt, np.diag([math.sqrt(0.9), math.sqrt(0.1)]), atol=1e-15)
    with pytest.raises(StateError) as exc:
        validate(np.diag([0.9, 0.2]))
    assert exc.value.code == "trace" and exc.value.magnitude == pytest.approx(1.1)
    with pytest.raises(StateError) as exc:
        validate(np.diag([1.1, -0.1]))
    assert exc.value.code == "non-psd" and exc.value.magnitude == pytest.approx(-0.1)
    with pytest.raises(StateError) as exc:
        validate(np.array([[0.5, 0.1], [0.3, 0.5]]))
    assert exc.value.code == "non-hermitian" and exc.value.magnitude == pytest.approx(0.2)


def test_validate_tolerates_rounding_noise():
    noisy = np.diag([0.9, 0.1]) + np.array([[0, 1e-12], [0, 0]])
    rho = validate(noisy)
    np.testing.assert_array_equal(rho.matrix, rho.matrix.conj().T)


def test_observable_set():
    obs = ObservableSet([SIGMA_X, SIGMA_Y])
    assert len(obs) == 2 and obs.dim == 2
    np.testing.assert_array_equal(obs.total(), SIGMA_X + SIGMA_Y)
    with pytest.raises(ValueError):
        ObservableSet([])
    with pytest.raises(ValueError):
        ObservableSet([SIGMA_X, np.eye(3)])
