"""Information measures against brute-force and textbook oracles."""

import numpy as np
import pytest

from xxchains.dynamics import TimeGrid, evolve_spec
from xxchains.hamiltonians import p1_chain
from xxchains.measures import (
    BipartiteSplit,
    DensityMatrix,
    InvalidState,
    bhattacharyya,
    boundary_density_series,
    boundary_density_series_rho,
    boundary_negativity_series,
    fidelity,
    max_negativity,
    negativity,
    negativity_batch,
    normalized_negativity,
    partial_transpose,
    reduced_boundary_from_full,
    reduced_boundary_from_sector,
    shannon_entropy,
    state_fidelity,
    von_neumann_entropy,
)
from xxchains.spin import lift_to_full, sector_basis


def _random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def test_partial_transpose_is_an_involution():
    rng = np.random.default_rng(3)
    split = BipartiteSplit(3, 3)
    rho = _random_density(rng, 9)
    assert np.allclose(partial_transpose(partial_transpose(rho, split), split), rho)


def test_psi_plus_negativity():
    psi = np.array([0.0, 1.0, 1.0, 0.0]) / np.sqrt(2.0)
    rho = np.outer(psi, psi)
    split = BipartiteSplit(2, 2)
    assert negativity(rho, split) == pytest.approx(0.5, abs=1e-12)
    assert normalized_negativity(rho, split) == pytest.approx(1.0, abs=1e-12)


def test_negativity_identity_against_trace_norm():
    """(||rho^Ta||_1 - 1)/2 must equal the negative-eigenvalue sum to 1e-10,
    checked on random qutrit-pair mixed states."""
    rng = np.random.default_rng(11)
    split = BipartiteSplit(3, 3)
    for _ in range(25):
        rho = _random_density(rng, 9)
        pt = partial_transpose(rho, split)
        trace_norm = np.abs(np.linalg.eigvalsh(pt)).sum()
        assert negativity(rho, split) == pytest.approx(
            (trace_norm - 1.0) / 2.0, abs=1e-10)


def test_negativity_batch_matches_scalar():
    rng = np.random.default_rng(4)
    split = BipartiteSplit(2, 3)
    rhos = np.stack([_random_density(rng, 6) for _ in range(7)])
    batch = negativity_batch(rhos, split)
    for k in range(7):
        assert batch[k] == pytest.approx(negativity(rhos[k], split), abs=1e-12)


def test_max_negativity():
    assert max_negativity(2) == 0.5
    assert max_negativity(3) == 1.0
    assert max_negativity(4) == 1.5


def test_separable_state_has_zero_negativity():
    rho = np.diag([0.4, 0.1, 0.3, 0.2]).astype(complex)
    assert negativity(rho, BipartiteSplit(2, 2)) == 0.0


def test_reduced_boundary_matches_full_space_trace():
    """Oracle: lift a sector state to the full tensor product, trace the bulk
    there, compare with the grouped sector-side partial trace."""
    chain = p1_chain()
    traj = evolve_spec(chain, TimeGrid(0.0, 22.5, 5))
    basis = traj.basis
    d = basis.spin.local_dim
    for k in range(traj.states.shape[1]):
        psi = traj.states[:, k]
        red = reduced_boundary_from_sector(psi, basis)
        full = lift_to_full(psi, basis)
        oracle = reduced_boundary_from_full(np.outer(full, full.conj()),
                                            basis.n_sites, d)
        assert np.max(np.abs(red.matrix - oracle.matrix)) < 1e-12


def test_density_series_match_single_state_path():
    chain = p1_chain()
    traj = evolve_spec(chain, TimeGrid(0.0, 22.5, 9))
    basis = traj.basis
    series = boundary_density_series(traj.states, basis)
    rho_stack = np.einsum("it,jt->tij", traj.states, traj.states.conj())
    series_rho = boundary_density_series_rho(rho_stack, basis)
    negs = boundary_negativity_series(traj.states, basis)
    for k in range(9):
        ref = reduced_boundary_from_sector(traj.states[:, k], basis).matrix
        assert np.max(np.abs(series[k] - ref)) < 1e-12
        assert np.max(np.abs(series_rho[k] - ref)) < 1e-12
        d = basis.spin.local_dim
        assert negs[k] == pytest.approx(negativity(ref, BipartiteSplit(d, d)),
                                        abs=1e-12)


def test_shannon_entropy_values():
    assert shannon_entropy([0.99, 0.01]) == pytest.approx(0.0807931, abs=1e-6)
    assert shannon_entropy([0.5, 0.5]) == 1.0
    assert shannon_entropy([1.0, 0.0]) == 0.0
    with pytest.raises(ValueError):
        shannon_entropy([0.5, 0.4])


def test_von_neumann_entropy_values():
    assert von_neumann_entropy(np.eye(2) / 2.0) == pytest.approx(1.0, abs=1e-12)
    assert von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0


def test_bhattacharyya_bounds():
    p = [0.2, 0.8]
    assert bhattacharyya(p, p) == pytest.approx(1.0, abs=1e-12)
    assert bhattacharyya([1.0, 0.0], [0.0, 1.0]) == 0.0


def test_fidelity_symmetry_and_unitary_invariance():
    rng = np.random.default_rng(9)
    for _ in range(10):
        rho = _random_density(rng, 4)
        sigma = _random_density(rng, 4)
        f = fidelity(rho, sigma)
        assert f == pytest.approx(fidelity(sigma, rho), abs=1e-9)
        q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        assert f == pytest.approx(
            fidelity(q @ rho @ q.conj().T, q @ sigma @ q.conj().T), abs=1e-9)
        assert 0.0 <= f <= 1.0


def test_fidelity_pure_state_shortcut():
    rng = np.random.default_rng(2)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    phi = rng.normal(size=4) + 1j * rng.normal(size=4)
    phi /= np.linalg.norm(phi)
    f_mixed = fidelity(np.outer(psi, psi.conj()), np.outer(phi, phi.conj()))
    assert f_mixed == pytest.approx(state_fidelity(psi, phi), abs=1e-7)


def test_density_matrix_validation():
    with pytest.raises(InvalidState):
        DensityMatrix(dims=(2,), matrix=np.eye(2))  # trace 2
    m = np.eye(2) / 2.0
    m[0, 1] = 0.3
    with pytest.raises(InvalidState):
        DensityMatrix(dims=(2,), matrix=m)  # not Hermitian
