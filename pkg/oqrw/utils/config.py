"""
Run configuration.

Defaults come from the package constants, can be overridden by the
``defaults:`` section of a YAML file and finally by explicit CLI flags.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Mapping

import yaml

import oqrw
from oqrw.exceptions import InvalidParameterError

logger = logging.getLogger(__name__)

COMMANDS = ("validate", "evolve", "dist", "invariant", "qmc-eval", "recurrence", "accessible", "example")
TOLERANCES = ("kraus_tol", "trace_tol", "decision_tol", "access_tol")
HORIZONS = ("n", "n_max")
INPUTS = ("walk", "state", "proj", "proj2", "observables")


def load_yaml_config(file_path):
    try:
        with open(file_path, "r") as f:
            data = yaml.safe_load(f)
        return data
    except FileNotFoundError:
        raise FileNotFoundError(f"The file {file_path} does not exist.")
    except yaml.YAMLError as e:
        raise ValueError(f"Error decoding YAML file {file_path}: {e}")


def load_defaults(file_path) -> dict[str, Any]:
    """The ``defaults`` mapping of a YAML config file, restricted to known keys."""
    data = load_yaml_config(file_path) or {}
    if not isinstance(data, dict):
        raise ValueError(f"Config file {file_path} must contain a mapping")
    defaults = data.get("defaults") or {}
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(defaults) - known)
    if unknown:
        logger.warning(f"ignoring unknown config keys in {file_path}: {', '.join(unknown)}")
    values = {k: v for k, v in defaults.items() if k in known}
    try:
        # PyYAML reads exponent literals such as 1e-9 as strings.
        for name in TOLERANCES:
            if name in values:
                values[name] = float(values[name])
        for name in HORIZONS + ("threads",):
            if name in values:
                values[name] = int(values[name])
    except (TypeError, ValueError) as e:
        raise ValueError(f"Invalid value in config file {file_path}: {e}")
    return values


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: Mapping[str, Any] = field(default_factory=dict)
    out: str | None = None
    fmt: str = "csv"
    threads: int = 1
    kraus_tol: float = oqrw.kraus_tol
    trace_tol: float = oqrw.trace_tol
    decision_tol: float = oqrw.decision_tol
    access_tol: float = oqrw.access_tol
    n: int = 0
    n_max: int = oqrw.n_max
    kind: str = "forward"
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidParameterError(f"unknown command {self.command!r}")
        for name in TOLERANCES:
            value = getattr(self, name)
            if not value > 0:
                raise InvalidParameterError(f"{name} must be positive, got {value}")
        for name in HORIZONS:
            value = getattr(self, name)
            if value < 0:
                raise InvalidParameterError(f"{name} must be non-negative, got {value}")
        if self.fmt not in ("csv", "json"):
            raise InvalidParameterError(f"unknown output format {self.fmt!r}")
        if self.kind not in ("forward", "dual"):
            raise InvalidParameterError(f"unknown expectation kind {self.kind!r}")
        if self.threads < 1:
            raise InvalidParameterError(f"thread count must be positive, got {self.threads}")

    @classmethod
    def from_namespace(cls, args, defaults: Mapping[str, Any] | None = None) -> "RunConfig":
        """
        Merge parsed arguments over ``defaults``.

        Flags left at ``None`` by the parser fall back to the config file and
        then to the dataclass defaults.
        """
        values: dict[str, Any] = dict(defaults or {})
        scalar = {f.name for f in fields(cls)} - {"command", "inputs", "params"}
        for name in scalar:
            value = getattr(args, name, None)
            if value is not None:
                values[name] = value
        inputs = {key: getattr(args, key) for key in INPUTS if getattr(args, key, None) is not None}
        consumed = scalar | set(INPUTS) | {"command", "config"}
        params = {key: value for key, value in vars(args).items() if key not in consumed and value is not None}
        return cls(command=args.command, inputs=inputs, params=params, **values)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["inputs"] = dict(self.inputs)
        data["params"] = dict(self.params)
        return data
