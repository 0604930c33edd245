"""Spin operators, sector bases, and the sector projection against a
full-tensor-product oracle."""

import numpy as np
import pytest

from xxchains.hamiltonians import ChainSpec
from xxchains.spin import (
    SectorBasis,
    SpinValue,
    UnsupportedSpin,
    embed_local,
    ladder_down,
    ladder_up,
    lift_to_full,
    project_to_sector,
    sector_basis,
    sector_operator_diagonal,
    spin_matrices,
)

SPINS = [0.5, 1.0, 1.5]


@pytest.mark.parametrize("s", SPINS)
def test_angular_momentum_algebra(s):
    ops = spin_matrices(s)
    comm = ops.sx @ ops.sy - ops.sy @ ops.sx
    assert np.allclose(comm, 1j * ops.sz, atol=1e-12)
    casimir = ops.sx @ ops.sx + ops.sy @ ops.sy + ops.sz @ ops.sz
    d = SpinValue(s).local_dim
    assert np.allclose(casimir, s * (s + 1) * np.eye(d), atol=1e-12)


def test_spin_half_is_half_pauli():
    ops = spin_matrices(0.5)
    assert np.allclose(ops.sz, np.diag([-0.5, 0.5]))
    assert np.allclose(ops.sx, 0.5 * np.array([[0, 1], [1, 0]]))


def test_unsupported_spin_rejected():
    with pytest.raises(UnsupportedSpin):
        SpinValue(2.0)


@pytest.mark.parametrize("s", SPINS)
def test_ladder_matrix_elements(s):
    ops = spin_matrices(s)
    two_s = SpinValue(s).two_s
    for n in range(two_s):
        assert ops.s_plus[n + 1, n] == pytest.approx(ladder_up(n, two_s))
        assert ops.s_minus[n, n + 1] == pytest.approx(ladder_down(n + 1, two_s))


def test_sector_basis_counts_and_order():
    basis = sector_basis(4, 0.5, 2)
    assert basis.dim == 6  # C(4, 2)
    assert basis.states == tuple(sorted(basis.states))
    assert all(sum(t) == 2 for t in basis.states)
    # spin 1 three sites, two excitations: 6 occupation tuples
    assert sector_basis(3, 1.0, 2).dim == 6


def test_sector_basis_offset_bounds():
    with pytest.raises(ValueError):
        sector_basis(3, 0.5, 4)


def _restrict_full(H_full, basis: SectorBasis):
    idx = [basis.full_space_index(t) for t in basis.states]
    return H_full[np.ix_(idx, idx)]


@pytest.mark.parametrize("s", SPINS)
@pytest.mark.parametrize("offset", [1, 2])
def test_sector_projection_matches_full_space(s, offset):
    """Oracle: build the full tensor-product XX matrix, restrict its rows and
    columns to the sector states, compare with the direct sector build."""
    rng = np.random.default_rng(7)
    n = 4
    spec = ChainSpec(
        n_sites=n, spin=SpinValue(s),
        couplings=tuple(rng.uniform(0.5, 2.0, n - 1)),
        fields=tuple(rng.uniform(-1.0, 1.0, n)),
    )
    from xxchains.hamiltonians import xx_chain, xx_full_matrix

    basis = sector_basis(n, s, offset)
    H_sector = project_to_sector(xx_chain(spec), basis)
    H_full = xx_full_matrix(spec)
    assert np.max(np.abs(H_sector - _restrict_full(H_full, basis))) < 1e-10


def test_sector_diagonal_matches_embedded_sz():
    s = 1.0
    n = 3
    basis = sector_basis(n, s, 2)
    w = np.array([0.3, -1.2, 0.7])
    ops = spin_matrices(s)
    full = sum(w[i] * embed_local(ops.sz, i, n, s) for i in range(n))
    idx = [basis.full_space_index(t) for t in basis.states]
    assert np.allclose(sector_operator_diagonal(basis, w),
                       np.diag(full)[idx].real, atol=1e-12)


def test_lift_to_full_roundtrip():
    basis = sector_basis(3, 0.5, 1)
    psi = np.array([0.6, 0.8j, 0.0])
    full = lift_to_full(psi, basis)
    assert full.shape == (8,)
    idx = [basis.full_space_index(t) for t in basis.states]
    assert np.allclose(full[idx], psi)
    mask = np.ones(8, bool)
    mask[idx] = False
    assert np.all(full[mask] == 0)
