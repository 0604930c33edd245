"""Chain Hamiltonians: general Heisenberg, P1/P2 XX architectures, static disorder.

Units: the weak coupling delta is the energy unit (delta = 1 by default) and
times are reported in 1/delta.  All builders are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .spin import (
    FULL_SPACE_QUBIT_LIMIT,
    SpinValue,
    embed_local,
    spin_matrices,
)


class EvenLength(ValueError):
    pass


@dataclass(frozen=True)
class HeisenbergParams:
    """Parameters of the general anisotropic Heisenberg chain."""

    n_sites: int
    spin: SpinValue
    couplings: tuple  # J_{i,i+1}, length n_sites-1
    anisotropy: float = 0.0  # lambda
    zz_anisotropy: float = 0.0  # Gamma
    onsite: tuple = ()  # epsilon_i
    fields: tuple = ()  # B_i

    def __post_init__(self):
        if len(self.couplings) != self.n_sites - 1:
            raise ValueError("couplings must have length n_sites-1")
        for name in ("onsite", "fields"):
            arr = getattr(self, name)
            if arr and len(arr) != self.n_sites:
                raise ValueError(f"{name} must have length n_sites")
        if not (np.isfinite(self.anisotropy) and np.isfinite(self.zz_anisotropy)):
            raise ValueError("anisotropies must be finite")


@dataclass(frozen=True)
class ChainSpec:
    """An XX chain instance: couplings, fields, and the protocol tag."""

    n_sites: int
    spin: SpinValue
    couplings: tuple
    fields: tuple
    protocol: str = "custom"  # P1 | P2 | custom
    delta_strong: float = 0.0  # Delta used to build the pattern (bookkeeping)
    delta_weak: float = 0.0

    def __post_init__(self):
        if len(self.couplings) != self.n_sites - 1:
            raise ValueError("couplings must have length n_sites-1")
        if len(self.fields) != self.n_sites:
            raise ValueError("fields must have length n_sites")
        if self.protocol == "P1" and self.n_sites % 2 == 0:
            raise EvenLength("P1 requires odd n_sites")


@dataclass(frozen=True)
class DisorderConfig:
    kind: str = "diagonal"  # diagonal | offdiagonal | both
    strength: float = 0.0  # E, multiples of delta_weak
    n_realizations: int = 1000
    seed: int = 0
    all_sites: bool = False  # exploratory full-chain diagonal disorder

    def __post_init__(self):
        if self.kind not in ("diagonal", "offdiagonal", "both"):
            raise ValueError(f"unknown disorder kind {self.kind!r}")
        if self.strength < 0:
            raise ValueError("disorder strength must be >= 0")
        if self.n_realizations < 1:
            raise ValueError("need at least one realization")


def build_general_heisenberg(params: HeisenbergParams) -> np.ndarray:
    """Full tensor-product matrix of the general Heisenberg chain.

    H = sum_i J_i [(1+lambda) Sx Sx + (1-lambda) Sy Sy + Gamma Sz Sz]
        + sum_i (eps_i + B_i) Sz_i,
    calibrated so that N=2, lambda=0, Gamma=1 is exactly H = J S1.S2
    (spectrum {-3J/4, J/4 x3} for s=1/2).
    """
    n = params.n_sites
    spin = params.spin
    d = spin.local_dim
    if n * np.log2(d) > FULL_SPACE_QUBIT_LIMIT:
        raise ValueError("full-space build exceeds the size budget; use the sector path")
    ops = spin_matrices(spin)
    dim = d**n
    H = np.zeros((dim, dim), dtype=complex)
    lam, gam = params.anisotropy, params.zz_anisotropy
    for i, J in enumerate(params.couplings):
        if J == 0 and gam == 0:
            continue
        sxi = embed_local(ops.sx, i, n, spin)
        sxj = embed_local(ops.sx, i + 1, n, spin)
        syi = embed_local(ops.sy, i, n, spin)
        syj = embed_local(ops.sy, i + 1, n, spin)
        szi = embed_local(ops.sz, i, n, spin)
        szj = embed_local(ops.sz, i + 1, n, spin)
        H += J * ((1 + lam) * sxi @ sxj + (1 - lam) * syi @ syj + gam * szi @ szj)
    onsite = params.onsite or (0.0,) * n
    fields = params.fields or (0.0,) * n
    for i in range(n):
        w = onsite[i] + fields[i]
        if w != 0:
            H += w * embed_local(ops.sz, i, n, spin)
    return H


def xx_chain(spec: ChainSpec) -> HeisenbergParams:
    """XX Hamiltonian terms for a chain spec (sector-compatible: couplings + fields)."""
    return HeisenbergParams(
        n_sites=spec.n_sites,
        spin=spec.spin,
        couplings=tuple(spec.couplings),
        anisotropy=0.0,
        zz_anisotropy=0.0,
        fields=tuple(spec.fields),
    )


def xx_full_matrix(spec: ChainSpec) -> np.ndarray:
    """Full-space matrix of the XX chain (oracle path, small N only)."""
    return build_general_heisenberg(xx_chain(spec)).real


def p1_pattern(n_sites: int, delta_strong: float, delta_weak: float) -> tuple:
    """Dimerized P1 coupling pattern: boundaries and the centre attach via delta,
    interior dimers carry Delta.  Valid lengths are N = 7, 11, 15, ... (the
    (N-3)/2 interior sites per half must pair into dimers)."""
    if n_sites % 2 == 0:
        raise EvenLength("P1 requires odd n_sites")
    half_interior = (n_sites - 3) // 2
    if n_sites < 7 or half_interior % 2 != 0:
        raise ValueError(
            f"no symmetric dimer placement for N={n_sites}; smallest valid is 7"
        )
    half = [delta_weak]
    for _ in range(half_interior // 2):
        half += [delta_strong, delta_weak]
    return tuple(half + half)


def p2_pattern(n_sites: int, delta_strong: float, delta_weak: float, boundary_field: float):
    """P2: weak symmetric boundary couplings, uniform strong bulk, boundary fields."""
    if n_sites < 3:
        raise ValueError("P2 needs at least 3 sites")
    couplings = (delta_weak,) + (delta_strong,) * (n_sites - 3) + (delta_weak,)
    fields = [0.0] * n_sites
    fields[0] = boundary_field
    fields[-1] = boundary_field
    return couplings, tuple(fields)


def p1_chain(n_sites=7, spin=0.5, delta_strong=10.0, delta_weak=1.0) -> ChainSpec:
    if not isinstance(spin, SpinValue):
        spin = SpinValue(spin)
    return ChainSpec(
        n_sites=n_sites,
        spin=spin,
        couplings=p1_pattern(n_sites, delta_strong, delta_weak),
        fields=(0.0,) * n_sites,
        protocol="P1",
        delta_strong=delta_strong,
        delta_weak=delta_weak,
    )


def p2_chain(n_sites=7, spin=0.5, delta_strong=10.0, delta_weak=1.0, boundary_field=0.0) -> ChainSpec:
    if not isinstance(spin, SpinValue):
        spin = SpinValue(spin)
    couplings, fields = p2_pattern(n_sites, delta_strong, delta_weak, boundary_field)
    return ChainSpec(
        n_sites=n_sites,
        spin=spin,
        couplings=couplings,
        fields=fields,
        protocol="P2",
        delta_strong=delta_strong,
        delta_weak=delta_weak,
    )


def disorder_rng(seed: int, realization: int) -> np.random.Generator:
    """Stream keyed by (seed, realization index); pure function of its arguments."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(realization)]))


def apply_diagonal_disorder(spec: ChainSpec, strength: float, rng: np.random.Generator,
                            all_sites: bool = False) -> ChainSpec:
    """Add E*delta*d_i to the on-site fields, d_i ~ U[-0.5, 0.5].

    By default only the two field-carrying boundary sites (1 and N) are
    perturbed, following the displayed modification; all_sites perturbs every
    site (exploratory mode).
    """
    if strength < 0:
        raise ValueError("strength must be >= 0")
    sites = tuple(range(spec.n_sites)) if all_sites else (0, spec.n_sites - 1)
    d = rng.uniform(-0.5, 0.5, size=len(sites))
    fields = list(spec.fields)
    for k, i in enumerate(sites):
        fields[i] += strength * spec.delta_weak * d[k]
    return replace(spec, fields=tuple(fields))


def apply_offdiagonal_disorder(spec: ChainSpec, strength: float, rng: np.random.Generator) -> ChainSpec:
    """Perturb every coupling: J_i -> J_i + E*delta*d_i, d_i ~ U[-0.5, 0.5].

    Negative disordered couplings are allowed; the displayed sum imposes no clamp.
    """
    if strength < 0:
        raise ValueError("strength must be >= 0")
    d = rng.uniform(-0.5, 0.5, size=spec.n_sites - 1)
    couplings = tuple(J + strength * spec.delta_weak * di for J, di in zip(spec.couplings, d))
    return replace(spec, couplings=couplings)


def apply_disorder(spec: ChainSpec, config: DisorderConfig, realization: int) -> ChainSpec:
    """Draw one disordered realization.  Combined kind applies diagonal first,
    then off-diagonal, from a single stream."""
    rng = disorder_rng(config.seed, realization)
    out = spec
    if config.kind in ("diagonal", "both"):
        out = apply_diagonal_disorder(out, config.strength, rng, all_sites=config.all_sites)
    if config.kind in ("offdiagonal", "both"):
        out = apply_offdiagonal_disorder(out, config.strength, rng)
    return out
