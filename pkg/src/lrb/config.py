"""Experiment configuration: parsing and validation of the JSON config file."""
from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .channels import PauliChannel, channel_from_spec, channel_to_spec
from .codes import StabilizerCode, get_code
from .logical import RecoveryMode

__all__ = ["ConfigError", "RbConfig", "ExperimentConfig", "load_experiment_config"]

TIMINGS = ("concurrent", "postprocessed")
EMITTABLE = ("dataset", "fit", "oracle", "figures")


class ConfigError(ValueError):
    """Invalid configuration.  ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line else f"{path}: "
        elif line:
            where = f"line {line}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class RbConfig:
    noise: dict
    sequence_lengths: tuple[int, ...]
    sequences_per_length: int
    shots_per_sequence: int
    master_seed: int
    code: str | dict = "bitflip"
    recovery: str = "lookup"
    recovery_timing: str = "concurrent"
    prep_noise: dict | None = None
    meas_noise: dict | None = None
    recovery_noise: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "sequence_lengths", tuple(int(m) for m in self.sequence_lengths))
        self.validate()

    def validate(self):
        if any(m < 1 for m in self.sequence_lengths):
            raise ConfigError("sequence_lengths must all be >= 1")
        if len(set(self.sequence_lengths)) != len(self.sequence_lengths):
            raise ConfigError("sequence_lengths must be distinct")
        if len(set(self.sequence_lengths)) < 3:
            raise ConfigError("sequence_lengths needs at least 3 distinct values for fitting")
        if self.sequences_per_length < 1:
            raise ConfigError("sequences_per_length must be >= 1")
        if self.shots_per_sequence < 1:
            raise ConfigError("shots_per_sequence must be >= 1")
        if not isinstance(self.master_seed, int) or isinstance(self.master_seed, bool):
            raise ConfigError("master_seed must be an integer")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must fit in 64 unsigned bits")
        if self.recovery_timing not in TIMINGS:
            raise ConfigError(f"recovery_timing must be one of {TIMINGS}")
        try:
            RecoveryMode.parse(self.recovery)
        except ValueError:
            raise ConfigError(f"recovery must be one of {[m.value for m in RecoveryMode]}") from None
        code = self.code_obj()
        if self.noise_channel().n_qubits != code.n_physical:
            raise ConfigError("noise acts on the wrong number of qubits for the code")
        if self.recovery_noise is not None and self.recovery_noise_channel().n_qubits != code.n_physical:
            raise ConfigError("recovery_noise acts on the wrong number of qubits for the code")
        for name in ("prep_noise", "meas_noise"):
            ch = self._channel(name)
            if ch is not None and ch.n_qubits != 1:
                raise ConfigError(f"{name} must be a single-qubit (logical) channel")

    # resolved objects ---------------------------------------------------

    def code_obj(self) -> StabilizerCode:
        try:
            return get_code(self.code)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad code: {exc}") from None

    def _channel(self, name) -> PauliChannel | None:
        spec = getattr(self, name)
        if spec is None:
            return None
        try:
            return channel_from_spec(spec)
        except KeyError as exc:
            raise ConfigError(f"bad {name}: missing key {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad {name}: {exc}") from None

    def noise_channel(self) -> PauliChannel:
        return self._channel("noise")

    def prep_channel(self) -> PauliChannel | None:
        return self._channel("prep_noise")

    def meas_channel(self) -> PauliChannel | None:
        return self._channel("meas_noise")

    def recovery_noise_channel(self) -> PauliChannel | None:
        return self._channel("recovery_noise")

    @property
    def recovery_mode(self) -> RecoveryMode:
        return RecoveryMode.parse(self.recovery)

    def with_(self, **changes) -> "RbConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sequence_lengths"] = list(self.sequence_lengths)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RbConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        if "master_seed" not in d:
            raise ConfigError("master_seed is required (no implicit entropy)")
        for key in ("noise", "sequence_lengths", "sequences_per_length", "shots_per_sequence"):
            if key not in d:
                raise ConfigError(f"missing required key {key!r}")
        return cls(**d)

    @classmethod
    def for_physical_rb(cls, channel: PauliChannel, **kwargs) -> "RbConfig":
        if channel.n_qubits != 1:
            raise ValueError("physical RB takes a single-qubit channel")
        return cls(noise=channel_to_spec(channel), code="trivial", recovery="lookup", **kwargs)


@dataclass(frozen=True)
class ExperimentConfig:
    rb: RbConfig
    output_dir: str = "out"
    emit: tuple[str, ...] = ("dataset",)
    n_bootstrap: int = 1000

    def to_dict(self) -> dict:
        d = self.rb.to_dict()
        d["output_dir"] = self.output_dir
        d["emit"] = list(self.emit)
        d["n_bootstrap"] = self.n_bootstrap
        return d


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def load_experiment_config(path, seed_override: int | None = None) -> ExperimentConfig:
    """Read and validate an experiment config; errors carry the offending line."""
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError("config file not found", path=str(path)) from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", exc.lineno, str(path)) from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object", 1, str(path))
    raw = dict(raw)
    if seed_override is not None:
        raw["master_seed"] = seed_override
    output_dir = raw.pop("output_dir", "out")
    emit = tuple(raw.pop("emit", ["dataset"]))
    n_boot = raw.pop("n_bootstrap", 1000)
    bad = [e for e in emit if e not in EMITTABLE]
    if bad:
        raise ConfigError(f"unknown emit targets {bad}", _line_of(text, "emit"), str(path))
    try:
        rb = RbConfig.from_dict(raw)
    except ConfigError as exc:
        msg = str(exc)
        key = next((k for k in sorted(raw, key=len, reverse=True) if k in msg), None)
        raise ConfigError(msg, _line_of(text, key) if key else 1, str(path)) from None
    except TypeError as exc:
        raise ConfigError(str(exc), 1, str(path)) from None
    return ExperimentConfig(rb, str(output_dir), emit, int(n_boot))


def dumps_config(d: dict) -> str:
    return json.dumps(d, indent=2, sort_keys=True) + "\n"
