"""Experiment drivers: CSV format, horizons, Bell targets."""

import csv

import numpy as np
import pytest

from xxchains.config import load_config
from xxchains.experiments import (
    bell_fidelity_series,
    chain_from_config,
    default_horizon,
    write_csv,
)
from xxchains.hamiltonians import p1_chain, p2_chain
from xxchains.spin import SpinValue


def _config(tmp_path, text):
    p = tmp_path / "c.conf"
    p.write_text(text, encoding="utf-8")
    return load_config(str(p))


def test_write_csv_full_precision_and_newlines(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(path, ["x", "flag", "k"], [(1.0 / 3.0, True, 7)])
    raw = path.read_bytes()
    assert b"\r" not in raw
    text = raw.decode()
    assert "0.33333333333333331" in text  # 17 significant digits round-trip
    assert "true" in text
    row = next(csv.DictReader(text.splitlines()))
    assert float(row["x"]) == 1.0 / 3.0


def test_write_csv_is_deterministic(tmp_path):
    rows = [(0.1 * k, k) for k in range(5)]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(a, ["v", "k"], rows)
    write_csv(b, ["v", "k"], rows)
    assert a.read_bytes() == b.read_bytes()


def test_chain_from_config_protocol_dispatch(tmp_path):
    cfg = _config(tmp_path, "experiment=p2\nchain.boundary_field=3.7\n")
    p2 = chain_from_config(cfg, "P2")
    assert p2.fields[0] == 3.7 and p2.fields[-1] == 3.7
    p1 = chain_from_config(cfg, "P1")
    assert all(f == 0 for f in p1.fields)
    override = chain_from_config(cfg, "P2", boundary_field=1.1, delta_strong=20.0)
    assert override.fields[0] == 1.1
    assert max(override.couplings) == 20.0


def test_default_horizon_policy():
    p1 = p1_chain()
    p2 = p2_chain(boundary_field=3.7)
    assert default_horizon(p1) == pytest.approx(2.0 * default_horizon(p2))
    # the window must contain the calibrated peaks
    assert default_horizon(p1) > 22.5
    assert default_horizon(p2) > 13.0


def test_bell_fidelity_identifies_the_targets():
    spin = SpinValue(0.5)
    d = spin.local_dim
    psi_plus = np.zeros(d * d, dtype=complex)
    psi_plus[0 * d + 1] = psi_plus[1 * d + 0] = 1.0 / np.sqrt(2.0)
    rho = np.outer(psi_plus, psi_plus.conj())[None, :, :]
    assert bell_fidelity_series(rho, spin, rotate_last=False)[0] == pytest.approx(1.0)
    # the rotated target differs from |psi+> itself
    assert bell_fidelity_series(rho, spin, rotate_last=True)[0] < 0.99


def test_bell_fidelity_higher_spin_target():
    spin = SpinValue(1.0)
    d = spin.local_dim
    target = np.zeros(d * d, dtype=complex)
    target[2 * d + 0] = target[0 * d + 2] = 1.0 / np.sqrt(2.0)
    rho = np.outer(target, target.conj())[None, :, :]
    assert bell_fidelity_series(rho, spin, rotate_last=False)[0] == pytest.approx(1.0)
