"""Chain builders and static disorder."""

import numpy as np
import pytest

from xxchains.hamiltonians import (
    ChainSpec,
    DisorderConfig,
    EvenLength,
    HeisenbergParams,
    apply_diagonal_disorder,
    apply_disorder,
    apply_offdiagonal_disorder,
    build_general_heisenberg,
    disorder_rng,
    p1_chain,
    p1_pattern,
    p2_chain,
    p2_pattern,
)
from xxchains.spin import SpinValue


def test_two_spin_heisenberg_spectrum():
    """H = J S1.S2 for s=1/2 has the singlet at -3J/4 and the triplet at J/4."""
    J = 1.7
    params = HeisenbergParams(n_sites=2, spin=SpinValue(0.5), couplings=(J,),
                              zz_anisotropy=1.0)
    ev = np.linalg.eigvalsh(build_general_heisenberg(params))
    assert np.allclose(ev, [-0.75 * J, 0.25 * J, 0.25 * J, 0.25 * J], atol=1e-12)


def test_xx_two_spin_spectrum():
    """XX pair: {-J/2, 0, 0, +J/2} with literal spin operators."""
    J = 2.0
    params = HeisenbergParams(n_sites=2, spin=SpinValue(0.5), couplings=(J,))
    ev = np.linalg.eigvalsh(build_general_heisenberg(params))
    assert np.allclose(ev, [-J / 2, 0.0, 0.0, J / 2], atol=1e-12)


def test_anisotropy_terms_enter_linearly():
    rng = np.random.default_rng(0)
    base = dict(n_sites=2, spin=SpinValue(0.5), couplings=(1.0,))
    h0 = build_general_heisenberg(HeisenbergParams(**base))
    h_lam = build_general_heisenberg(HeisenbergParams(**base, anisotropy=0.5))
    from xxchains.spin import embed_local, spin_matrices

    ops = spin_matrices(0.5)
    sxsx = embed_local(ops.sx, 0, 2, 0.5) @ embed_local(ops.sx, 1, 2, 0.5)
    sysy = embed_local(ops.sy, 0, 2, 0.5) @ embed_local(ops.sy, 1, 2, 0.5)
    assert np.allclose(h_lam - h0, 0.5 * (sxsx - sysy), atol=1e-12)


def test_p1_pattern_layout():
    assert p1_pattern(7, 10.0, 1.0) == (1.0, 10.0, 1.0, 1.0, 10.0, 1.0)
    assert p1_pattern(11, 10.0, 1.0) == (1.0, 10.0, 1.0, 10.0, 1.0,
                                         1.0, 10.0, 1.0, 10.0, 1.0)
    with pytest.raises(EvenLength):
        p1_pattern(8, 10.0, 1.0)
    with pytest.raises(ValueError):
        p1_pattern(5, 10.0, 1.0)


def test_p2_pattern_layout():
    couplings, fields = p2_pattern(7, 10.0, 1.0, 3.7)
    assert couplings == (1.0, 10.0, 10.0, 10.0, 10.0, 1.0)
    assert fields == (3.7, 0.0, 0.0, 0.0, 0.0, 0.0, 3.7)


def test_chain_builders_tag_protocols():
    assert p1_chain().protocol == "P1"
    assert p2_chain(boundary_field=3.7).protocol == "P2"
    with pytest.raises(ValueError):
        ChainSpec(n_sites=3, spin=SpinValue(0.5), couplings=(1.0,),
                  fields=(0.0,) * 3)


def test_disorder_rng_is_keyed_and_reproducible():
    a = disorder_rng(12, 3).uniform(size=5)
    b = disorder_rng(12, 3).uniform(size=5)
    c = disorder_rng(12, 4).uniform(size=5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_diagonal_disorder_boundary_sites_only():
    spec = p2_chain(boundary_field=3.7)
    rng = np.random.default_rng(0)
    out = apply_diagonal_disorder(spec, 0.5, rng)
    delta = np.array(out.fields) - np.array(spec.fields)
    assert delta[0] != 0 and delta[-1] != 0
    assert np.all(delta[1:-1] == 0)
    assert np.all(np.abs(delta) <= 0.5 * 0.5 * spec.delta_weak)
    assert out.couplings == spec.couplings


def test_diagonal_disorder_all_sites():
    spec = p2_chain(boundary_field=3.7)
    out = apply_diagonal_disorder(spec, 0.5, np.random.default_rng(0), all_sites=True)
    delta = np.array(out.fields) - np.array(spec.fields)
    assert np.all(delta != 0)


def test_offdiagonal_disorder_bounds_and_distribution():
    spec = p1_chain()
    draws = []
    for r in range(4000):
        out = apply_offdiagonal_disorder(spec, 1.0, disorder_rng(0, r))
        draws.extend(np.array(out.couplings) - np.array(spec.couplings))
    draws = np.array(draws)
    # U[-0.5, 0.5] scaled by E * delta = 1: mean 0, var 1/12, hard bounds
    assert np.all(np.abs(draws) <= 0.5)
    assert abs(draws.mean()) < 0.01
    assert abs(draws.var() - 1.0 / 12.0) < 0.005


def test_zero_strength_is_identity():
    spec = p1_chain()
    cfg = DisorderConfig(kind="both", strength=0.0, seed=5)
    out = apply_disorder(spec, cfg, 0)
    assert out.couplings == spec.couplings
    assert out.fields == spec.fields


def test_combined_disorder_applies_both():
    spec = p2_chain(boundary_field=3.7)
    cfg = DisorderConfig(kind="both", strength=0.8, seed=1)
    out = apply_disorder(spec, cfg, 0)
    assert out.fields != spec.fields
    assert out.couplings != spec.couplings


def test_disorder_config_validation():
    with pytest.raises(ValueError):
        DisorderConfig(kind="sideways")
    with pytest.raises(ValueError):
        DisorderConfig(strength=-1.0)
