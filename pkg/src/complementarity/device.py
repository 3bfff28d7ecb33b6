"""Device parameters, presets and the YAML configuration loader.

Internally every frequency is an angular frequency in rad/s and every time is
in seconds. The configuration document uses lab units with explicit suffixes
(``g1_mhz`` means g1 / 2pi in MHz, ``t1_q1_us`` is microseconds, ...).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import math
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import ConfigurationError

TWO_PI = 2 * math.pi
MHZ = TWO_PI * 1e6
GHZ = TWO_PI * 1e9
US = 1e-6
NS = 1e-9

SCHEMA_VERSION = 1
DEPHASING_MODELS = ("additive", "master_equation")


@dataclass(frozen=True)
class DeviceParams:
    """Q1 (three-level) + Q2 (two-level) + resonator parameters.

    ``dephasing`` selects how the Ramsey time enters the master equation:

    * ``"additive"``: coherences decay as ``exp(-t/2T1 - t/T2*)``; the pure
      dephasing channel ``D[b^dag b]`` gets rate ``2/T2*``.
    * ``"master_equation"``: ``D[b^dag b]`` gets rate ``1/T_phi`` with
      ``1/T_phi = 1/T2* - 1/(2 T1)``.
    """

    g1: float = 19.2 * MHZ
    g2: float = 19.9 * MHZ
    omega_r: float = 5.582 * GHZ
    delta: float = 0.0
    anharmonicity_q1: float = 241.0 * MHZ
    t1_q1: float = 17.1 * US
    t2star_q1: float = 3.0 * US
    t1_q2: float = 23.4 * US
    t2star_q2: float = 2.4 * US
    t_r: float = 10.0 * US
    n_max: int = 2
    readout_q1: tuple = (0.9930, 0.8917, 0.8483)
    readout_q2: tuple = (0.9803, 0.9073, 0.8890)
    pulse_duration: float = 40.0 * NS
    dt: float = 0.01 * NS
    dephasing: str = "additive"

    def __post_init__(self):
        for name in ("t1_q1", "t2star_q1", "t1_q2", "t2star_q2", "t_r", "pulse_duration", "dt"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if not (self.g1 > 0 and self.g2 > 0):
            raise ConfigurationError("couplings g1 and g2 must be positive")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ConfigurationError("n_max must be an integer >= 1")
        if self.dephasing not in DEPHASING_MODELS:
            raise ConfigurationError(f"dephasing must be one of {DEPHASING_MODELS}")
        for q in (1, 2):
            if self.pure_dephasing_rate_literal(q) <= 0:
                raise ConfigurationError(f"1/T2* - 1/(2 T1) must be positive for Q{q}")
        for name in ("readout_q1", "readout_q2"):
            vals = getattr(self, name)
            if len(vals) not in (2, 3) or not all(0.0 <= f <= 1.0 for f in vals):
                raise ConfigurationError(f"{name} must hold 2 or 3 fidelities in [0, 1]")
            if vals[0] + vals[1] - 1.0 <= 1e-6:
                raise ConfigurationError(f"{name} gives a singular confusion matrix")

    @property
    def dims(self) -> tuple:
        return (3, 2, self.n_max + 1)

    def t1(self, qubit: int) -> float:
        return self.t1_q1 if qubit == 1 else self.t1_q2

    def t2star(self, qubit: int) -> float:
        return self.t2star_q1 if qubit == 1 else self.t2star_q2

    def pure_dephasing_rate_literal(self, qubit: int) -> float:
        """``1/T_phi = 1/T2* - 1/(2 T1)``."""
        return 1.0 / self.t2star(qubit) - 1.0 / (2.0 * self.t1(qubit))

    def dephasing_channel_rate(self, qubit: int) -> float:
        """Rate multiplying ``D[b^dag b]`` for the chosen dephasing model."""
        if self.dephasing == "additive":
            return 2.0 / self.t2star(qubit)
        return self.pure_dephasing_rate_literal(qubit)

    def coherence_decay_rate(self, qubit: int) -> float:
        """Decay rate of the qubit's 0-1 coherence during an idle."""
        return 1.0 / (2.0 * self.t1(qubit)) + 0.5 * self.dephasing_channel_rate(qubit)

    def swap_duration(self) -> float:
        """Full ancilla-resonator excitation transfer, ``pi / (2 g2)``."""
        return math.pi / (2.0 * self.g2)

    def with_(self, **changes) -> "DeviceParams":
        return replace(self, **changes)


# Two sets of Ramsey times are reported for the device: the per-qubit
# characterization table (3.0 / 2.4 us) and the headline values (3.6 / 2.7 us).
PRESETS: dict[str, DeviceParams] = {
    "characterization": DeviceParams(),
    "headline": DeviceParams(t2star_q1=3.6 * US, t2star_q2=2.7 * US),
}

_DEVICE_KEYS: dict[str, tuple[str, float]] = {
    "g1_mhz": ("g1", MHZ),
    "g2_mhz": ("g2", MHZ),
    "omega_r_ghz": ("omega_r", GHZ),
    "delta_mhz": ("delta", MHZ),
    "anharmonicity_q1_mhz": ("anharmonicity_q1", MHZ),
    "t1_q1_us": ("t1_q1", US),
    "t2star_q1_us": ("t2star_q1", US),
    "t1_q2_us": ("t1_q2", US),
    "t2star_q2_us": ("t2star_q2", US),
    "t_r_us": ("t_r", US),
    "pulse_ns": ("pulse_duration", NS),
    "dt_ns": ("dt", NS),
}


def params_from_mapping(device: Mapping[str, Any] | None, preset: str = "characterization") -> DeviceParams:
    """Build ``DeviceParams`` from the ``device`` table of a config document."""
    if preset not in PRESETS:
        raise ConfigurationError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    base = PRESETS[preset]
    changes: dict[str, Any] = {}
    for key, value in (device or {}).items():
        if key in _DEVICE_KEYS:
            name, unit = _DEVICE_KEYS[key]
            try:
                changes[name] = float(value) * unit
            except (TypeError, ValueError) as exc:
                raise ConfigurationError(f"{key} must be a number, got {value!r}") from exc
        elif key == "n_max":
            changes["n_max"] = value
        elif key in ("readout_q1", "readout_q2"):
            changes[key] = tuple(float(v) for v in value)
        elif key == "dephasing":
            changes["dephasing"] = str(value)
        else:
            raise ConfigurationError(f"unknown device key {key!r}")
    return replace(base, **changes)


def params_to_mapping(params: DeviceParams) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, (name, unit) in _DEVICE_KEYS.items():
        out[key] = float(f"{getattr(params, name) / unit:.12g}")
    out["n_max"] = params.n_max
    out["readout_q1"] = list(params.readout_q1)
    out["readout_q2"] = list(params.readout_q2)
    out["dephasing"] = params.dephasing
    return out


def load_config(path: str | Path) -> dict[str, Any]:
    """Read and version-check a configuration document.

    Returns a dict with keys ``device`` (``DeviceParams``) and ``scenario``
    (raw mapping, possibly empty).
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigurationError("config document must be a mapping")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigurationError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    unknown = set(doc) - {"schema_version", "preset", "device", "scenario"}
    if unknown:
        raise ConfigurationError(f"unknown top-level keys {sorted(unknown)}")
    params = params_from_mapping(doc.get("device"), doc.get("preset", "characterization"))
    return {"device": params, "scenario": dict(doc.get("scenario") or {})}

