"""Closed-form reductions: the P1 trimer model, one-excitation band spectrum,
bulk standing-wave modes, and the second-order effective boundary model for P2.

Closed forms are quoted in the hopping=J convention of the analytic derivation;
the literal-operator simulation has all single-particle energies halved, and
the bridge factor 2 is applied explicitly wherever the two meet.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CONVENTION_BRIDGE = 2.0  # closed-form energy = bridge * literal sector eigenvalue


class ResonantMode(ValueError):
    pass


@dataclass(frozen=True)
class TrimerModel:
    eta: float
    delta_strong: float
    delta_weak: float


@dataclass(frozen=True)
class BandSpectrum:
    e0: float
    e_pm1: float
    e_pm2: float
    e_pm3: float

    def levels(self) -> np.ndarray:
        return np.array(sorted([
            -self.e_pm3, -self.e_pm2, -self.e_pm1, self.e0,
            self.e_pm1, self.e_pm2, self.e_pm3,
        ]))


@dataclass(frozen=True)
class P2EffectiveModel:
    n_bulk: int
    lambda_bar: np.ndarray  # boundary-mode couplings (literal convention)
    zeta: np.ndarray        # per-mode detunings
    j_eff: float
    gamma_eff: float = 0.0
    dispersive_ratio: float = field(default=0.0)  # max |lambda_k / zeta_k|


def trimer_eta(delta_strong: float, delta_weak: float) -> float:
    """Effective A-B-C coupling of the dimerized chain (hopping=J convention)."""
    if delta_strong <= 0 or delta_weak <= 0:
        raise ValueError("couplings must be positive")
    D2, d2 = delta_strong**2, delta_weak**2
    inner = np.sqrt(delta_strong**4 + 6 * D2 * d2 + delta_weak**4)
    return np.sqrt(D2 + 3 * d2 - inner) / 2.0


def trimer_model(delta_strong: float, delta_weak: float) -> TrimerModel:
    return TrimerModel(trimer_eta(delta_strong, delta_weak), delta_strong, delta_weak)


def trimer_spectrum(eta: float):
    """Eigenpairs of [[0,eta,0],[eta,0,eta],[0,eta,0]]: energies {-sqrt2 eta, 0,
    +sqrt2 eta} with the standing-wave eigenvectors."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    r2 = np.sqrt(2.0)
    energies = np.array([-r2 * eta, 0.0, r2 * eta])
    vectors = np.column_stack([
        np.array([-1.0, r2, -1.0]) / 2.0,
        np.array([1.0, 0.0, -1.0]) / r2,
        np.array([1.0, r2, 1.0]) / 2.0,
    ])
    return energies, vectors


def p1_peak_estimate(delta_strong: float, delta_weak: float) -> float:
    """Boundary-negativity peak time of P1, t* = pi / (sqrt2 * eta), in 1/delta.

    The literal-operator simulation halves the trimer coupling but peaks at the
    half-transfer point, so the two factors of 2 cancel and the closed form
    applies as printed.
    """
    return float(np.pi / (np.sqrt(2.0) * trimer_eta(delta_strong, delta_weak)))


def band_spectrum(delta_strong: float, delta_weak: float) -> BandSpectrum:
    """The four closed-form one-excitation energies of the N=7 P1 chain
    (hopping=J convention)."""
    if delta_strong <= 0 or delta_weak <= 0:
        raise ValueError("couplings must be positive")
    D2, d2 = delta_strong**2, delta_weak**2
    inner = np.sqrt(delta_strong**4 + 6 * D2 * d2 + delta_weak**4)
    e3 = np.sqrt(D2 + 3 * d2 + inner) / np.sqrt(2.0)
    e2 = np.sqrt(D2 + d2)
    e1 = np.sqrt(D2 + 3 * d2 - inner) / np.sqrt(2.0)
    return BandSpectrum(e0=0.0, e_pm1=float(e1), e_pm2=float(e2), e_pm3=float(e3))


def bulk_modes(n_bulk: int, delta_strong: float, omega: float = 0.0):
    """Standing-wave modes of the uniform bulk under the literal convention.

    phi_n^k = sqrt(2/(n+1)) sin(pi k n / (n+1)); E_k = omega + 2*(Delta/2)*cos(...)
    since the literal single-particle hopping is Delta/2.
    """
    if n_bulk < 1:
        raise ValueError("need at least one bulk site")
    k = np.arange(1, n_bulk + 1)
    n = np.arange(1, n_bulk + 1)
    phi = np.sqrt(2.0 / (n_bulk + 1)) * np.sin(np.pi * np.outer(n, k) / (n_bulk + 1))
    energies = omega + delta_strong * np.cos(np.pi * k / (n_bulk + 1))
    return energies, phi


def p2_effective(n_bulk: int, delta_strong: float, delta_weak: float,
                 boundary_field: float, gamma: float = 0.0) -> P2EffectiveModel:
    """Second-order boundary-boundary model of P2 (literal convention).

    lambda_k = (delta/2) sqrt(2/(n+1)) sin(pi k/(n+1)); zeta_k = B - E_k with
    the bulk field taken as zero.  Each standing wave enters the two boundaries
    with opposite parity, phi_k(n) = (-1)^(k+1) phi_k(1), so the end-to-end
    coupling is the alternating sum j_eff = sum (-1)^(k+1) lambda_k^2 / zeta_k
    (the non-alternating sum is the common Lamb shift of the two boundary
    levels, which only contributes a global phase).  With local dephasing at
    rate gamma the boundary pair dephases at
    Gamma = gamma * sum_k lambda_k^2 / zeta_k^2.
    """
    energies, phi = bulk_modes(n_bulk, delta_strong, omega=0.0)
    k = np.arange(1, n_bulk + 1)
    lam = (delta_weak / 2.0) * np.sqrt(2.0 / (n_bulk + 1)) * np.sin(np.pi * k / (n_bulk + 1))
    zeta = boundary_field - energies
    scale = max(abs(boundary_field), float(np.max(np.abs(energies))), 1.0)
    if np.any(np.abs(zeta) < 1e-9 * scale):
        raise ResonantMode("boundary field resonant with a bulk mode")
    parity = (-1.0) ** (k + 1)
    j_eff = float((parity * lam**2 / zeta).sum())
    gamma_eff = float(gamma * (lam**2 / zeta**2).sum())
    ratio = float(np.max(np.abs(lam / zeta)))
    return P2EffectiveModel(n_bulk=n_bulk, lambda_bar=lam, zeta=zeta,
                            j_eff=j_eff, gamma_eff=gamma_eff, dispersive_ratio=ratio)


def p2_peak_estimate(model: P2EffectiveModel) -> float:
    """Closed boundary-pair negativity peak time, pi / (4 |j_eff|)."""
    if model.j_eff == 0:
        raise ValueError("vanishing effective coupling")
    return float(np.pi / (4.0 * abs(model.j_eff)))


def p2_effective_dynamics(model: P2EffectiveModel, times: np.ndarray):
    """Two-qubit boundary dynamics under H_eff, with optional effective dephasing.

    Returns a stack of 4x4 density matrices (alternating-sign mode couplings
    make the virtual hop |e> -> |r>; the single-excitation block is solved in
    closed form for gamma_eff = 0 and by the Lindblad integrator otherwise).
    """
    times = np.asarray(times, dtype=float)
    j = model.j_eff
    if model.gamma_eff == 0.0:
        ce = np.cos(j * times)
        cr = -1j * np.sin(j * times)
        rhos = np.zeros((len(times), 4, 4), dtype=complex)
        # basis |00>,|01>,|10>,|11>; excitation at emitter = |10>, receiver = |01>
        rhos[:, 2, 2] = np.abs(ce) ** 2
        rhos[:, 1, 1] = np.abs(cr) ** 2
        rhos[:, 2, 1] = ce * cr.conj()
        rhos[:, 1, 2] = cr * ce.conj()
        return rhos
    from .open_dynamics import OpenSystemSpec, evolve_lindblad

    H = np.zeros((4, 4), dtype=complex)
    H[2, 1] = H[1, 2] = j
    sz = np.diag([0.5, -0.5]).astype(complex)
    ops = [
        (np.kron(sz, np.eye(2)).astype(complex), model.gamma_eff),
        (np.kron(np.eye(2), sz).astype(complex), model.gamma_eff),
    ]
    rho0 = np.zeros((4, 4), dtype=complex)
    rho0[2, 2] = 1.0
    spec = OpenSystemSpec(hamiltonian=H, collapse_ops=ops, representation="full")
    traj = evolve_lindblad(spec, rho0, times)
    return traj.rhos


def diagnostics_report(delta_strong: float, delta_weak: float, boundary_field: float,
                       n_bulk: int = 5, gamma: float = 0.0) -> dict:
    """Effective-model numbers for the run manifest."""
    eta = trimer_eta(delta_strong, delta_weak)
    band = band_spectrum(delta_strong, delta_weak)
    model = p2_effective(n_bulk, delta_strong, delta_weak, boundary_field, gamma=gamma)
    # alternative reading of the dephasing rate: one representative detuning
    zeta_rep = float(np.min(np.abs(model.zeta)))
    gamma_alt = float(gamma * (model.lambda_bar**2).sum() / zeta_rep**2) if zeta_rep else None
    return {
        "eta": float(eta),
        "band_energies": {"e0": band.e0, "e_pm1": band.e_pm1,
                          "e_pm2": band.e_pm2, "e_pm3": band.e_pm3},
        "lambda_bar": model.lambda_bar.tolist(),
        "zeta": model.zeta.tolist(),
        "j_eff": model.j_eff,
        "gamma_eff": model.gamma_eff,
        "gamma_eff_single_zeta_reading": gamma_alt,
        "max_lambda_over_zeta": model.dispersive_ratio,
        "p1_peak_estimate": p1_peak_estimate(delta_strong, delta_weak),
    }
