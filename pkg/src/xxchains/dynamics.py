"""Closed dynamics: protocol initial states, unitary evolution, the extraction
rotation, Jordan-Wigner single-excitation fast path, and peak detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import expm_multiply

from .hamiltonians import ChainSpec, xx_chain
from .spin import SectorBasis, project_to_sector, sector_basis

DENSE_EIG_LIMIT = 4096


class NonHermitian(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class QuantumState:
    basis: SectorBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        if len(self.amplitudes) != self.basis.dim:
            raise DimensionMismatch("amplitudes do not match basis")
        n = np.linalg.norm(self.amplitudes)
        if abs(n - 1.0) > 1e-10:
            raise ValueError(f"state norm {n} != 1")


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    n_points: int

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise ValueError("t_end must exceed t_start")
        if self.n_points < 2:
            raise ValueError("need at least two grid points")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_points)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # dim x T amplitude matrix
    basis: SectorBasis
    solver: str = "eig"

    def state_at(self, k: int) -> np.ndarray:
        return self.states[:, k]


def initial_state_p1(spec: ChainSpec) -> QuantumState:
    """|m=+s> on both boundaries, |m=-s> in the bulk (sector offset 2*(2s))."""
    if spec.protocol != "P1":
        raise ValueError("spec is not a P1 chain")
    two_s = spec.spin.two_s
    basis = sector_basis(spec.n_sites, spec.spin, 2 * two_s)
    t0 = tuple([two_s] + [0] * (spec.n_sites - 2) + [two_s])
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index_of[t0]] = 1.0
    return QuantumState(basis, amps)


def initial_state_p2(spec: ChainSpec) -> QuantumState:
    """Single maximal excitation at the sender (sector offset 2s)."""
    if spec.protocol != "P2":
        raise ValueError("spec is not a P2 chain")
    two_s = spec.spin.two_s
    basis = sector_basis(spec.n_sites, spec.spin, two_s)
    t0 = tuple([two_s] + [0] * (spec.n_sites - 1))
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index_of[t0]] = 1.0
    return QuantumState(basis, amps)


def initial_state(spec: ChainSpec) -> QuantumState:
    return initial_state_p1(spec) if spec.protocol == "P1" else initial_state_p2(spec)


def evolve(h_sector: np.ndarray, state: QuantumState, grid: TimeGrid) -> Trajectory:
    """psi(t) = exp(-iHt) psi0 on the grid.

    One eigendecomposition, phases applied per grid point; Krylov
    (expm_multiply) fallback above the dense limit.
    """
    H = np.asarray(h_sector)
    if H.shape != (state.basis.dim, state.basis.dim):
        raise DimensionMismatch("Hamiltonian does not match state basis")
    if np.max(np.abs(H - H.conj().T)) > 1e-10:
        raise NonHermitian("sector Hamiltonian must be Hermitian")
    ts = grid.times
    if state.basis.dim <= DENSE_EIG_LIMIT:
        w, V = np.linalg.eigh(H)
        c = V.conj().T @ state.amplitudes
        phases = np.exp(-1j * np.outer(w, ts))
        psis = V @ (phases * c[:, None])
        solver = "eig"
    else:
        psis = expm_multiply(
            -1j * H, state.amplitudes.astype(complex),
            start=ts[0], stop=ts[-1], num=len(ts), endpoint=True,
        ).T
        solver = "krylov"
    return Trajectory(times=ts, states=psis, basis=state.basis, solver=solver)


def evolve_spec(spec: ChainSpec, grid: TimeGrid):
    """Convenience: build the sector Hamiltonian for the protocol's initial
    state and evolve it."""
    psi0 = initial_state(spec)
    H = project_to_sector(xx_chain(spec), psi0.basis)
    return evolve(H, psi0, grid)


def rz_on_site(state: QuantumState, site: int, theta: float) -> QuantumState:
    """Apply exp(-i theta Sz) on one site: |m> -> e^{-i theta m} |m>.

    Sign convention fixed so that the P2 s=1/2 peak state maps onto |psi+>
    after theta = -pi/2 on site N.
    """
    s = state.basis.spin.s
    occ = np.array([t[site] for t in state.basis.states], dtype=float)
    phases = np.exp(-1j * theta * (occ - s))
    return QuantumState(state.basis, state.amplitudes * phases)


def jw_single_excitation_propagator(couplings, fields, t: float) -> np.ndarray:
    """exp(-i h t) for the one-particle hopping matrix of an s=1/2 XX chain.

    h is tridiagonal with hoppings J_i/2 and diagonal B_i; the fermionic vacuum
    energy -sum(B)/2 is included as a global phase so columns match sector
    evolution exactly.  Column j = amplitudes from an excitation at site j.
    """
    J = np.asarray(couplings, dtype=float)
    B = np.asarray(fields, dtype=float)
    n = len(B)
    if len(J) != n - 1:
        raise DimensionMismatch("couplings must have length n-1")
    h = np.diag(B.astype(complex))
    h[np.arange(n - 1), np.arange(1, n)] = J / 2.0
    h[np.arange(1, n), np.arange(n - 1)] = J / 2.0
    w, V = np.linalg.eigh(h)
    U = (V * np.exp(-1j * w * t)) @ V.conj().T
    return U * np.exp(-1j * (-B.sum() / 2.0) * t)


def bulk_population_series(traj: Trajectory) -> np.ndarray:
    """Total excitation number on sites 2..N-1 at every grid point."""
    occ = np.array(traj.basis.states, dtype=float)[:, 1:-1].sum(axis=1)
    return (np.abs(traj.states) ** 2 * occ[:, None]).sum(axis=0)


def bulk_population_series_rho(rhos: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Same for a stack of sector density matrices (T x dim x dim)."""
    occ = np.array(basis.states, dtype=float)[:, 1:-1].sum(axis=1)
    diag = np.einsum("tii->ti", rhos).real
    return diag @ occ


def refine_peak(times: np.ndarray, values: np.ndarray) -> tuple:
    """Grid argmax followed by three-point parabolic refinement.

    Returns (t_peak, v_peak); falls back to the raw grid point at the edges.
    """
    k = int(np.argmax(values))
    if k == 0 or k == len(values) - 1:
        return float(times[k]), float(values[k])
    y0, y1, y2 = values[k - 1], values[k], values[k + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return float(times[k]), float(values[k])
    shift = 0.5 * (y0 - y2) / denom
    shift = float(np.clip(shift, -1.0, 1.0))
    dt = times[k] - times[k - 1]
    t_peak = times[k] + shift * dt
    v_peak = y1 - 0.25 * (y0 - y2) * shift
    return float(t_peak), float(v_peak)
