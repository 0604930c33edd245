"""Config parsing: schema, defaults, overrides, precise error reporting."""

import pytest

from xxchains.config import (
    ConfigError,
    ExperimentConfig,
    format_config,
    load_config,
)


def write(tmp_path, text):
    p = tmp_path / "exp.conf"
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_minimal_config_fills_defaults(tmp_path):
    cfg = load_config(write(tmp_path, "experiment=p1\n"))
    assert cfg.experiment == "p1"
    assert cfg["chain.n_sites"] == 7
    assert cfg["chain.spin"] == 0.5
    assert cfg["disorder.n_realizations"] == 1000
    assert cfg["output.prefix"] == "run"


def test_comments_and_blank_lines_ignored(tmp_path):
    cfg = load_config(write(tmp_path, "# header\n\nexperiment=p2\n  # indented\n"))
    assert cfg.experiment == "p2"


def test_unknown_key_reports_line_number(tmp_path):
    path = write(tmp_path, "experiment=p1\n# comment\nchain.sites=7\n")
    with pytest.raises(ConfigError, match="line 3.*chain.sites"):
        load_config(path)


def test_bad_value_reports_key(tmp_path):
    path = write(tmp_path, "experiment=p1\nchain.n_sites=seven\n")
    with pytest.raises(ConfigError, match="line 2.*chain.n_sites"):
        load_config(path)


def test_duplicate_key_rejected(tmp_path):
    path = write(tmp_path, "experiment=p1\nexperiment=p2\n")
    with pytest.raises(ConfigError, match="duplicate"):
        load_config(path)


def test_missing_required_key(tmp_path):
    with pytest.raises(ConfigError, match="experiment"):
        load_config(write(tmp_path, "chain.n_sites=7\n"))


def test_choice_validation(tmp_path):
    with pytest.raises(ConfigError, match="disorder.kind"):
        load_config(write(tmp_path, "experiment=disorder\ndisorder.kind=upward\n"))


def test_float_lists(tmp_path):
    cfg = load_config(write(tmp_path,
                            "experiment=dephasing\ndephasing.gammas=0.0, 0.01,0.1\n"))
    assert cfg["dephasing.gammas"] == (0.0, 0.01, 0.1)


def test_overrides_win(tmp_path):
    path = write(tmp_path, "experiment=p1\nseed=1\n")
    cfg = load_config(path, overrides=["seed=99", "chain.n_sites=11"])
    assert cfg["seed"] == 99
    assert cfg["chain.n_sites"] == 11


def test_semantic_validation(tmp_path):
    with pytest.raises(ConfigError, match="odd"):
        load_config(write(tmp_path, "experiment=p1\nchain.n_sites=8\n"))
    with pytest.raises(ConfigError, match="spin"):
        load_config(write(tmp_path, "experiment=p2\nchain.spin=2.0\n"))


def test_format_config_is_canonical(tmp_path):
    a = load_config(write(tmp_path, "experiment=p1\nseed=4\nchain.n_sites=7\n"))
    b = load_config(write(tmp_path, "chain.n_sites=7\nseed=4\nexperiment=p1\n"))
    assert format_config(a) == format_config(b)
    assert isinstance(a, ExperimentConfig)
    # every line is key=value, sorted
    lines = format_config(a).strip().splitlines()
    assert lines == sorted(lines)
