"""Information-theoretic quantities: partial trace/transpose, negativity, fidelity,
entropies, Bhattacharyya coefficient.

All entropies are in bits (base 2).  Eigenvalues in (-CLAMP_TOL, 0) are clamped
to zero before entropies and matrix square roots; anything more negative raises.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .spin import SectorBasis

CLAMP_TOL = 1e-8


class InvalidState(ValueError):
    pass


@dataclass(frozen=True)
class BipartiteSplit:
    dim_a: int
    dim_b: int


@dataclass
class DensityMatrix:
    """Hermitian, unit-trace matrix over an ordered list of subsystem dimensions."""

    dims: tuple
    matrix: np.ndarray

    def __post_init__(self):
        self.dims = tuple(self.dims)
        size = int(np.prod(self.dims))
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (size, size):
            raise InvalidState(f"matrix shape {m.shape} does not match dims {self.dims}")
        if abs(np.trace(m).real - 1.0) > 1e-9 or abs(np.trace(m).imag) > 1e-9:
            raise InvalidState(f"trace {np.trace(m)} != 1")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise InvalidState("matrix is not Hermitian")
        self.matrix = m

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def _clamped_eigvalsh(m: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvalsh(m)
    if ev.min() < -CLAMP_TOL:
        raise InvalidState(f"eigenvalue {ev.min()} below clamping tolerance")
    return np.clip(ev, 0.0, None)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    ev, V = np.linalg.eigh(m)
    if ev.min() < -CLAMP_TOL:
        raise InvalidState(f"eigenvalue {ev.min()} below clamping tolerance")
    return (V * np.sqrt(np.clip(ev, 0.0, None))) @ V.conj().T


# ---------------------------------------------------------------------------
# reduced boundary states


def boundary_pair_groups(basis: SectorBasis):
    """Group sector indices by bulk occupation; two states in one group differ
    only on the boundary sites, which is exactly the structure the bulk partial
    trace contracts over.  Returns (groups, boundary_index) where
    boundary_index[i] = d*n_first + n_last."""
    d = basis.spin.local_dim
    groups = defaultdict(list)
    bidx = np.empty(basis.dim, dtype=np.intp)
    for i, t in enumerate(basis.states):
        groups[t[1:-1]].append(i)
        bidx[i] = t[0] * d + t[-1]
    return list(groups.values()), bidx


def reduced_boundary_from_sector(psi: np.ndarray, basis: SectorBasis) -> DensityMatrix:
    """Partial trace over sites 2..N-1 of a sector pure state."""
    d = basis.spin.local_dim
    groups, bidx = boundary_pair_groups(basis)
    rho = np.zeros((d * d, d * d), dtype=complex)
    for g in groups:
        for i in g:
            for j in g:
                rho[bidx[i], bidx[j]] += psi[i] * np.conj(psi[j])
    return DensityMatrix(dims=(d, d), matrix=rho)


def boundary_density_series(psis: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Reduced boundary density matrices (T x d^2 x d^2) for every column of
    `psis` (dim x T), vectorized over the grid."""
    d = basis.spin.local_dim
    T = psis.shape[1]
    groups, bidx = boundary_pair_groups(basis)
    rho = np.zeros((d * d, d * d, T), dtype=complex)
    for g in groups:
        g = np.asarray(g)
        block = psis[g, :]  # |g| x T
        outer = np.einsum("it,jt->ijt", block, block.conj())
        bi = bidx[g]
        np.add.at(rho, (bi[:, None], bi[None, :]), outer)
    return rho.transpose(2, 0, 1)


def boundary_density_series_rho(rhos: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Reduced boundary density matrices for a stack of sector density
    matrices (T x dim x dim)."""
    d = basis.spin.local_dim
    T = rhos.shape[0]
    groups, bidx = boundary_pair_groups(basis)
    red = np.zeros((T, d * d, d * d), dtype=complex)
    for g in groups:
        g = np.asarray(g)
        block = rhos[:, g[:, None], g[None, :]]  # T x |g| x |g|
        bi = bidx[g]
        np.add.at(red, (slice(None), bi[:, None], bi[None, :]), block)
    return red


def boundary_negativity_series(psis: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Raw boundary negativity at every column of `psis` (dim x T), vectorized.

    Builds all reduced d^2 x d^2 matrices at once, partial-transposes, and
    feeds the stack to a batched eigensolve.
    """
    d = basis.spin.local_dim
    rhos = boundary_density_series(psis, basis)
    return negativity_batch(rhos, BipartiteSplit(d, d))


def boundary_negativity_series_rho(rhos: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Raw boundary negativity for a stack of sector density matrices."""
    d = basis.spin.local_dim
    red = boundary_density_series_rho(rhos, basis)
    return negativity_batch(red, BipartiteSplit(d, d))


def reduced_boundary_from_full(rho_full: np.ndarray, n_sites: int, d: int) -> DensityMatrix:
    """Partial trace over sites 2..N-1 of a full-space density matrix
    (optionally with trailing auxiliary factors already traced out)."""
    dim = d**n_sites
    if rho_full.shape != (dim, dim):
        raise InvalidState("density matrix does not match n_sites/d")
    r = rho_full.reshape(d, d ** (n_sites - 2), d, d, d ** (n_sites - 2), d)
    red = np.einsum("aibcid->abcd", r)
    return DensityMatrix(dims=(d, d), matrix=red.reshape(d * d, d * d))


def partial_trace_keep_boundary(rho: np.ndarray, n_sites: int, d: int, aux_dim: int = 1) -> DensityMatrix:
    """Trace out chain bulk and an optional trailing auxiliary mode."""
    dim = d**n_sites * aux_dim
    if rho.shape != (dim, dim):
        raise InvalidState("shape mismatch")
    mid = d ** (n_sites - 2)
    r = rho.reshape(d, mid, d, aux_dim, d, mid, d, aux_dim)
    red = np.einsum("aibxcidx->abcd", r)
    return DensityMatrix(dims=(d, d), matrix=red.reshape(d * d, d * d))


# ---------------------------------------------------------------------------
# negativity


def partial_transpose(rho: np.ndarray, split: BipartiteSplit) -> np.ndarray:
    """(T_A (x) I) rho: transpose the first-factor indices blockwise."""
    da, db = split.dim_a, split.dim_b
    if rho.shape != (da * db, da * db):
        raise ValueError("split does not match matrix size")
    r = rho.reshape(da, db, da, db)
    return r.transpose(2, 1, 0, 3).reshape(da * db, da * db)


def negativity(rho: np.ndarray | DensityMatrix, split: BipartiteSplit) -> float:
    """(||rho^{T_A}||_1 - 1) / 2, computed as the negative-eigenvalue sum."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    ev = np.linalg.eigvalsh(partial_transpose(m, split))
    return float(np.abs(ev[ev < 0]).sum())


def negativity_batch(rhos: np.ndarray, split: BipartiteSplit) -> np.ndarray:
    """Negativity of a stack of density matrices (T x D x D)."""
    da, db = split.dim_a, split.dim_b
    T = rhos.shape[0]
    pt = rhos.reshape(T, da, db, da, db).transpose(0, 3, 2, 1, 4).reshape(T, da * db, da * db)
    ev = np.linalg.eigvalsh(pt)
    return np.where(ev < 0, -ev, 0.0).sum(axis=1)


def max_negativity(d: int) -> float:
    """Maximum negativity of two d-level systems, (d-1)/2 (maximally entangled pair)."""
    return (d - 1) / 2.0


def normalized_negativity(rho, split: BipartiteSplit, d: int | None = None) -> float:
    if d is None:
        d = split.dim_a
    val = negativity(rho, split) / max_negativity(d)
    if not -1e-6 <= val <= 1.0 + 1e-6:
        raise InvalidState(f"normalized negativity {val} outside [0, 1]")
    return val


# ---------------------------------------------------------------------------
# fidelity and entropies


def fidelity(rho: DensityMatrix | np.ndarray, sigma: DensityMatrix | np.ndarray) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0, 1]."""
    r = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    s = sigma.matrix if isinstance(sigma, DensityMatrix) else np.asarray(sigma, dtype=complex)
    if r.shape != s.shape:
        raise ValueError("dimension mismatch")
    sr = _psd_sqrt(r)
    inner = sr @ s @ sr
    ev = np.linalg.eigvalsh(inner)
    if ev.min() < -CLAMP_TOL:
        raise InvalidState(f"eigenvalue {ev.min()} below clamping tolerance")
    return float(min(1.0, np.sqrt(np.clip(ev, 0.0, None)).sum()))


def state_fidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    """Pure-pure shortcut |<psi|phi>|."""
    return float(abs(np.vdot(psi, phi)))


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """S(rho) = -Tr(rho log2 rho) in bits, with 0 log 0 := 0."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    p = _clamped_eigvalsh(m)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _check_distribution(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.min() < 0 or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("not a probability distribution")
    return p


def shannon_entropy(p) -> float:
    p = _check_distribution(p)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def bhattacharyya(p, q) -> float:
    p = _check_distribution(p)
    q = _check_distribution(q)
    if p.shape != q.shape:
        raise ValueError("distributions must have equal length")
    return float(np.sqrt(p * q).sum())
