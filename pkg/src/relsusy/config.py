"""Run configuration: JSON schema, defaults and conversion to a ModelSpec."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .models import CASES, ModelSpec
from .opalg import Tolerances

SCHEMA_VERSION = 1

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "relsusy run configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "case": {"enum": list(CASES)},
        "g": {"type": "number"},
        "omega_c": _POSITIVE,
        "k_z": {"type": "number"},
        "m": _POSITIVE,
        "c": _POSITIVE,
        "hbar": _POSITIVE,
        "n_fock": {"type": "integer", "minimum": 2, "maximum": 512},
        "buffer": {"type": "integer", "minimum": 0},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "identity_tol": _POSITIVE,
                "interior_tol": _POSITIVE,
                "kernel_rel": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "shift_margin": _POSITIVE,
            },
        },
        "scan": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kz_min": {"type": "number"},
                "kz_max": {"type": "number"},
                "points": {"type": "integer", "minimum": 3},
            },
        },
        "resolvent": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "shifts": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "array", "minItems": 1, "maxItems": 2,
                              "items": {"type": "number"}},
                },
            },
        },
        "limits": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "c_list": {"type": "array", "minItems": 2, "items": _POSITIVE},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "json_path": {"type": "string"},
                "csv_path": {"type": "string"},
            },
        },
    },
}


class ConfigError(ValueError):
    """Invalid run configuration (schema violation or inconsistent values)."""


@dataclass(frozen=True)
class RunConfig:
    spec: ModelSpec
    kz_min: float = -2.0
    kz_max: float = 2.0
    points: int = 81
    shifts: tuple[complex, ...] | None = None
    c_list: tuple[float, ...] = (1.0, 10.0, 100.0)
    json_path: str | None = None
    csv_path: str | None = None
    raw: dict = field(default_factory=dict, compare=False)

    def resolved_shifts(self) -> list[complex]:
        if self.shifts is not None:
            return list(self.shifts)
        mc2 = self.spec.rest_energy
        return [1j, -1j, 1 + 1j, 2 * mc2 + 1j, 0.3j * mc2]

    def to_dict(self) -> dict:
        """Fully resolved configuration (every default filled in)."""
        s = self.spec
        t = s.tolerances
        return {
            "schema_version": SCHEMA_VERSION,
            "case": s.case, "g": s.g, "omega_c": s.omega_c, "k_z": s.k_z,
            "m": s.m, "c": s.c, "hbar": s.hbar, "n_fock": s.n_fock, "buffer": s.buffer,
            "tolerances": {"identity_tol": t.identity_tol, "interior_tol": t.interior_tol,
                           "kernel_rel": t.kernel_rel, "shift_margin": t.shift_margin},
            "scan": {"kz_min": self.kz_min, "kz_max": self.kz_max, "points": self.points},
            "resolvent": {"shifts": [[z.real, z.imag] for z in self.resolved_shifts()]},
            "limits": {"c_list": list(self.c_list)},
        }


def _shift(pair) -> complex:
    # A bare real part gets a unit imaginary part to stay off the real spectrum.
    return complex(pair[0], pair[1] if len(pair) == 2 else 1.0)


def parse_config(data: dict) -> RunConfig:
    """Validate ``data`` against :data:`CONFIG_SCHEMA` and build a RunConfig."""
    try:
        jsonschema.validate(data, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    data = copy.deepcopy(data)
    try:
        tol = Tolerances(**data.get("tolerances", {}))
        spec_fields = {k: data[k] for k in
                       ("case", "g", "omega_c", "k_z", "m", "c", "hbar", "n_fock", "buffer")
                       if k in data}
        spec_fields.setdefault("case", "dirac")
        spec = ModelSpec(**spec_fields, tolerances=tol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    scan = data.get("scan", {})
    kz_min, kz_max = float(scan.get("kz_min", -2.0)), float(scan.get("kz_max", 2.0))
    if kz_max <= kz_min:
        raise ConfigError("scan: kz_max must exceed kz_min")
    c_list = tuple(float(c) for c in data.get("limits", {}).get("c_list", (1.0, 10.0, 100.0)))
    if any(b <= a for a, b in zip(c_list, c_list[1:])):
        raise ConfigError("limits/c_list must be strictly ascending")
    shifts = data.get("resolvent", {}).get("shifts")
    out = data.get("output", {})
    return RunConfig(
        spec=spec, kz_min=kz_min, kz_max=kz_max, points=int(scan.get("points", 81)),
        shifts=None if shifts is None else tuple(_shift(p) for p in shifts),
        c_list=c_list, json_path=out.get("json_path"), csv_path=out.get("csv_path"),
        raw=data,
    )


def load_config(path: str | Path | None) -> RunConfig:
    """Read and validate a JSON configuration file; ``None`` gives the defaults."""
    if path is None:
        return parse_config({"schema_version": SCHEMA_VERSION})
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return parse_config(data)
