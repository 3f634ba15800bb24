"""Flat key = value run configuration files.

The format is a single namespace of ``key = value`` lines; ``#`` starts a
comment and ``[section]`` headers are allowed as visual grouping but carry
no meaning.  Every model and initial-condition field must be present,
unknown keys are an error, and there are no nested structures, so files
diff cleanly and parse identically from any language.
"""

from __future__ import annotations

from .errors import ConfigError
from .params import InitialCondition, ModelParams, validate

MODEL_KEYS = ("n_emitters", "omega0", "delta", "g_collective", "kappa",
              "gamma", "gamma_phi", "omega_nu", "huang_rhys", "gamma_nu",
              "temperature")
INITIAL_KEYS = ("theta", "vib_thermal")

_BOOL = {"true": True, "yes": True, "1": True,
         "false": False, "no": False, "0": False}


def parse_config_text(text: str) -> dict:
    """Parse config text into a raw {key: string} dict."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {line!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def config_from_text(text: str):
    """Parse and validate; returns (ModelParams, InitialCondition)."""
    raw = parse_config_text(text)
    known = set(MODEL_KEYS) | set(INITIAL_KEYS)
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
    for key in MODEL_KEYS + INITIAL_KEYS:
        if key not in raw:
            raise ConfigError(f"missing config key {key!r}")

    def number(key):
        try:
            return float(raw[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: {raw[key]!r} is not a number") from None

    try:
        n_emitters = int(raw["n_emitters"])
        if float(raw["n_emitters"]) != n_emitters:
            raise ValueError
    except ValueError:
        raise ConfigError(
            f"key 'n_emitters': {raw['n_emitters']!r} is not an integer") from None
    vt = _BOOL.get(raw["vib_thermal"].lower())
    if vt is None:
        raise ConfigError(
            f"key 'vib_thermal': {raw['vib_thermal']!r} is not a boolean")

    params = ModelParams(
        n_emitters=n_emitters,
        omega0=number("omega0"),
        delta=number("delta"),
        g_collective=number("g_collective"),
        kappa=number("kappa"),
        gamma=number("gamma"),
        gamma_phi=number("gamma_phi"),
        omega_nu=number("omega_nu"),
        huang_rhys=number("huang_rhys"),
        gamma_nu=number("gamma_nu"),
        temperature=number("temperature"),
    )
    init = InitialCondition(theta=number("theta"), vib_thermal=vt)
    return validate(params), init


def load_config(path):
    """Read a config file; returns (ModelParams, InitialCondition)."""
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_text(fh.read())


def config_echo(params: ModelParams, init: InitialCondition) -> dict:
    """Round-trippable dict of every config field (for run manifests)."""
    echo = {key: getattr(params, key) for key in MODEL_KEYS}
    echo["theta"] = init.theta
    echo["vib_thermal"] = init.vib_thermal
    return echo
