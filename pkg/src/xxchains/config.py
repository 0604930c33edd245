"""Flat key=value experiment configs with dotted sections.

One canonical format: `section.key=value`, `#` comments, blank lines ignored.
Every key is schema-checked (type + allowed values); unknown keys are rejected
with the offending line number.  Values never depend on locale; lists are
comma-separated.
"""

from __future__ import annotations

from dataclasses import dataclass


class ConfigError(ValueError):
    pass


EXPERIMENTS = ("p1", "p2", "scan_b", "disorder", "dephasing", "nonmarkovian",
               "effective", "measures-demo")


def _bool(raw):
    low = raw.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _float_list(raw):
    return tuple(float(x) for x in raw.split(",") if x.strip())


# key -> (parser, default).  Defaults marked REQUIRED must appear in the file.
REQUIRED = object()

SCHEMA = {
    "experiment": (str, REQUIRED),
    "seed": (int, 0),
    "chain.n_sites": (int, 7),
    "chain.spin": (float, 0.5),
    "chain.delta_strong": (float, 10.0),
    "chain.delta_weak": (float, 1.0),
    "chain.boundary_field": (float, 0.0),
    "grid.t_end": (float, 0.0),  # 0 = protocol horizon policy
    "grid.n_points": (int, 601),
    "scan.b_min": (float, 0.0),
    "scan.b_max": (float, 8.0),
    "scan.b_step": (float, 0.1),
    "scan.t_max": (float, 40.0),
    "scan.n_t": (int, 401),
    "disorder.kind": (str, "diagonal"),
    "disorder.strengths": (_float_list, (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)),
    "disorder.n_realizations": (int, 1000),
    "disorder.statistic": (str, "at-clean-peak"),
    "disorder.all_sites": (_bool, False),
    "dephasing.gammas": (_float_list, (0.0, 0.005, 0.01, 0.02, 0.05, 0.1)),
    "dephasing.delta_strongs": (_float_list, (10.0, 30.0)),
    "dephasing.boundary_fields": (_float_list, ()),  # per delta_strong; empty = chain.boundary_field
    "dephasing.n_points": (int, 241),
    "pseudomode.g_grid": (_float_list, (0.01, 0.05, 0.1)),
    "pseudomode.kappas": (_float_list, (0.1, 1.0, 10.0)),
    "pseudomode.n_max": (int, 3),
    "pseudomode.omega_a": (float, 0.0),
    "pseudomode.n_points": (int, 81),
    "output.prefix": (str, "run"),
}

_CHOICES = {
    "experiment": EXPERIMENTS,
    "disorder.kind": ("diagonal", "offdiagonal", "both"),
    "disorder.statistic": ("peak", "at-clean-peak"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    values: tuple  # sorted (key, value) pairs; hashable echo of the config

    def __getitem__(self, key):
        d = dict(self.values)
        if key not in SCHEMA:
            raise KeyError(key)
        return d[key]

    @property
    def experiment(self) -> str:
        return self["experiment"]

    def as_dict(self) -> dict:
        return dict(self.values)


def parse_pairs(pairs) -> dict:
    """pairs: iterable of (lineno, 'key=value') -> {key: parsed value}."""
    out = {}
    for lineno, line in pairs:
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        parser, _ = SCHEMA[key]
        try:
            value = parser(raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
        if key in _CHOICES and value not in _CHOICES[key]:
            raise ConfigError(
                f"line {lineno}: {key!r} must be one of {_CHOICES[key]}, got {value!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path: str, overrides=()) -> ExperimentConfig:
    """Parse a config file, apply `key=value` override strings, fill defaults."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            pairs.append((lineno, stripped))
    values = parse_pairs(pairs)
    over = parse_pairs((0, o) for o in overrides)
    values.update(over)
    for key, (_, default) in SCHEMA.items():
        if key not in values:
            if default is REQUIRED:
                raise ConfigError(f"missing required key {key!r}")
            values[key] = default
    _validate(values)
    return ExperimentConfig(values=tuple(sorted(values.items())))


def _validate(values: dict) -> None:
    if values["chain.n_sites"] < 2:
        raise ConfigError("chain.n_sites must be at least 2")
    if values["chain.spin"] not in (0.5, 1.0, 1.5):
        raise ConfigError("chain.spin must be 0.5, 1.0 or 1.5")
    if values["chain.delta_strong"] <= 0 or values["chain.delta_weak"] <= 0:
        raise ConfigError("couplings must be positive")
    if values["grid.n_points"] < 2:
        raise ConfigError("grid.n_points must be at least 2")
    if values["experiment"] == "p1" and values["chain.n_sites"] % 2 == 0:
        raise ConfigError("p1 requires an odd chain length")
    if values["disorder.n_realizations"] < 1:
        raise ConfigError("disorder.n_realizations must be >= 1")
    if values["pseudomode.n_max"] < 1:
        raise ConfigError("pseudomode.n_max must be >= 1")


def format_config(config: ExperimentConfig) -> str:
    """Canonical text form (sorted keys), used in manifests."""
    lines = []
    for key, value in config.values:
        if isinstance(value, tuple):
            value = ",".join(repr(v) for v in value)
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"
