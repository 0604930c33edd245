"""Spin-s operator matrices, tensor-product embedding, and magnetization-sector bases.

Conventions: hbar = 1, operators are dimensionless spin matrices (s = 1/2 gives
S = sigma/2).  Local basis states |0>..|d-1> are the Sz eigenstates ordered from
m = -s up to m = +s, so the integer label of a site is its excitation number
above |m = -s>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

ALLOWED_SPINS = (0.5, 1.0, 1.5)


class UnsupportedSpin(ValueError):
    pass


class NonConservingTerm(ValueError):
    pass


@dataclass(frozen=True)
class SpinValue:
    """Spin magnitude and the derived local Hilbert-space dimension."""

    s: float

    def __post_init__(self):
        if self.s not in ALLOWED_SPINS:
            raise UnsupportedSpin(f"spin {self.s} not in {ALLOWED_SPINS}")

    @property
    def local_dim(self) -> int:
        return int(round(2 * self.s)) + 1

    @property
    def two_s(self) -> int:
        return int(round(2 * self.s))


@dataclass(frozen=True)
class SpinOperators:
    """The d x d spin matrices for one site."""

    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray


def spin_matrices(spin: SpinValue | float) -> SpinOperators:
    """Build the standard angular-momentum matrices for spin s.

    Basis ordering is m = -s .. +s (excitation number 0 .. 2s), so sz is
    diagonal with entries -s .. +s and s_plus populates the superdiagonal
    of the *reversed* basis, i.e. s_plus[n+1, n] = sqrt((n+1)(2s-n)).
    """
    if not isinstance(spin, SpinValue):
        spin = SpinValue(spin)
    s = spin.s
    d = spin.local_dim
    m = np.arange(d) - s  # m values for |0>..|d-1>
    sz = np.diag(m).astype(complex)
    # S+|m> = sqrt(s(s+1) - m(m+1)) |m+1>
    coeff = np.sqrt(s * (s + 1) - m[:-1] * (m[:-1] + 1))
    s_plus = np.zeros((d, d), dtype=complex)
    s_plus[np.arange(1, d), np.arange(d - 1)] = coeff
    s_minus = s_plus.conj().T
    sx = 0.5 * (s_plus + s_minus)
    sy = -0.5j * (s_plus - s_minus)
    return SpinOperators(sx=sx, sy=sy, sz=sz, s_plus=s_plus, s_minus=s_minus)


def ladder_up(n: np.ndarray | int, two_s: int):
    """Matrix element <n+1|S+|n> as a function of excitation number n."""
    return np.sqrt((np.asarray(n) + 1.0) * (two_s - np.asarray(n)))


def ladder_down(n: np.ndarray | int, two_s: int):
    """Matrix element <n-1|S-|n>."""
    return np.sqrt(np.asarray(n) * (two_s - np.asarray(n) + 1.0))


FULL_SPACE_QUBIT_LIMIT = 16  # n_sites * log2(d) cap for full tensor-product builds


def embed_local(op: np.ndarray, site: int, n_sites: int, spin: SpinValue | float) -> np.ndarray:
    """I (x) ... (x) op (x) ... (x) I with `op` at position `site` (site 0 leftmost)."""
    if not isinstance(spin, SpinValue):
        spin = SpinValue(spin)
    if not 0 <= site < n_sites:
        raise IndexError(f"site {site} out of range for {n_sites} sites")
    d = spin.local_dim
    left = np.eye(d**site)
    right = np.eye(d ** (n_sites - site - 1))
    return np.kron(np.kron(left, op), right)


@dataclass(frozen=True)
class SectorBasis:
    """Product-basis states of fixed total excitation number, lexicographically ordered.

    `states[i]` is the occupation tuple of dense index i; `index_of` inverts it.
    Site 0 is the most significant position in the ordering.
    """

    n_sites: int
    spin: SpinValue
    total_m_offset: int
    states: tuple
    index_of: dict = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def full_space_index(self, state: tuple) -> int:
        d = self.spin.local_dim
        idx = 0
        for n in state:
            idx = idx * d + n
        return idx


def sector_basis(n_sites: int, spin: SpinValue | float, total_m_offset: int) -> SectorBasis:
    """Enumerate all occupation tuples with the given total excitation number."""
    if not isinstance(spin, SpinValue):
        spin = SpinValue(spin)
    if not 0 <= total_m_offset <= n_sites * spin.two_s:
        raise ValueError(
            f"offset {total_m_offset} outside [0, {n_sites * spin.two_s}]"
        )
    d = spin.local_dim
    states = tuple(
        t for t in product(range(d), repeat=n_sites) if sum(t) == total_m_offset
    )
    # itertools.product over sorted ranges is already lexicographic
    index_of = {t: i for i, t in enumerate(states)}
    return SectorBasis(n_sites, spin, total_m_offset, states, index_of)


def project_to_sector(h_terms, basis: SectorBasis) -> np.ndarray:
    """Sector matrix of an XX + Sz-field Hamiltonian.

    `h_terms` carries `couplings` (length N-1) and `fields` (length N); the XX
    term sum J_i (Sx Sx + Sy Sy) moves one excitation between neighbours with
    amplitude (J_i/2) * ladder factors, the field term is diagonal.
    """
    J = np.asarray(h_terms.couplings, dtype=float)
    B = np.asarray(h_terms.fields, dtype=float)
    n = basis.n_sites
    if len(J) != n - 1 or len(B) != n:
        raise ValueError("term arrays do not match basis size")
    two_s = basis.spin.two_s
    s = basis.spin.s
    dim = basis.dim
    H = np.zeros((dim, dim))
    for a, t in enumerate(basis.states):
        H[a, a] = sum(B[i] * (t[i] - s) for i in range(n))
        for i in range(n - 1):
            if t[i] > 0 and t[i + 1] < two_s:
                u = list(t)
                u[i] -= 1
                u[i + 1] += 1
                b = basis.index_of[tuple(u)]
                amp = 0.5 * J[i] * ladder_down(t[i], two_s) * ladder_up(t[i + 1], two_s)
                H[b, a] += amp
                H[a, b] += amp
    return H


def lift_to_full(psi: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Embed a sector amplitude vector into the d^N full space."""
    d = basis.spin.local_dim
    full = np.zeros(d**basis.n_sites, dtype=complex)
    for i, t in enumerate(basis.states):
        full[basis.full_space_index(t)] = psi[i]
    return full


def sector_operator_diagonal(basis: SectorBasis, site_weights) -> np.ndarray:
    """Diagonal of sum_i w_i * (n_i - s) in the sector basis (an Sz-type operator)."""
    w = np.asarray(site_weights, dtype=float)
    s = basis.spin.s
    occ = np.array(basis.states, dtype=float)
    return (occ - s) @ w
