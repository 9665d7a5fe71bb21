"""Experiment configuration: a flat ``key=value`` text format.

Recognized keys (defaults reproduce the n=10, m=100 rate-memory experiment)::

    n=10
    m=100
    kappa=2
    delta=1/5
    file_units=200
    packets=200          # packets per I-file
    sweep=0:2:100        # start:step:stop, or a comma list
    schemes=comp-cacm,rap-cm,lc-u,lc-nm
    bounds=lower,upper   # or "none"
    trials=500
    seed=0
    coloring=cover       # cover | degree | random
    unit_bits=1          # bits per entropy unit when verifying decodes
    verify=true
    q_mode=uniform
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "SCHEMES",
    "BOUNDS",
    "ConfigError",
    "ExperimentConfig",
    "parse_kv",
    "parse_sweep",
    "load_config",
    "dump_config",
]

SCHEMES = ("comp-cacm", "rap-cm", "lc-u", "lc-nm")
BOUNDS = ("lower", "upper")
COLORINGS = ("cover", "degree", "random")


class ConfigError(ValueError):
    """Invalid experiment configuration; ``problems`` holds one message per field."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


def parse_sweep(text: str) -> tuple[float, ...]:
    """``"0:10:100"`` (inclusive stop) or ``"0,20,60"``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"sweep {text!r} is not start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("sweep step must be positive")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + k * step, 9) for k in range(max(count, 0)))
    return tuple(float(p) for p in text.split(",") if p.strip())


def _fmt_sweep(sweep: Iterable[float]) -> str:
    return ",".join(f"{x:g}" for x in sweep)


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 10
    m: int = 100
    kappa: int = 2
    delta: Fraction = Fraction(1, 5)
    file_units: int = 200
    packets: int = 200
    sweep: tuple[float, ...] = field(default_factory=lambda: parse_sweep("0:2:100"))
    schemes: tuple[str, ...] = SCHEMES
    bounds: tuple[str, ...] = BOUNDS
    trials: int = 500
    seed: int = 0
    coloring: str = "cover"
    unit_bits: int = 1
    verify: bool = True
    q_mode: str = "uniform"

    @property
    def b_units(self) -> int:
        return self.file_units // self.packets

    def problems(self) -> list[str]:
        out = []
        if self.n < 1:
            out.append("n: must be >= 1")
        if self.m < 1:
            out.append("m: must be >= 1")
        if self.kappa < 1 or (self.m >= 1 and self.m % self.kappa):
            out.append(f"kappa: {self.kappa} must be positive and divide m={self.m}")
        if not 0 < self.delta <= 1:
            out.append(f"delta: {self.delta} outside (0, 1]")
        if self.file_units < 1:
            out.append("file_units: must be >= 1")
        if self.packets < 1 or self.file_units % self.packets:
            out.append(f"packets: {self.packets} must divide file_units={self.file_units}")
        elif self.kappa > 1 and (self.delta * self.file_units / self.b_units).denominator != 1:
            out.append(f"delta: delta*file_units/b = {self.delta * self.file_units / self.b_units} "
                       "is not a whole number of packets")
        if not self.sweep:
            out.append("sweep: empty")
        bad = [M for M in self.sweep if not 0 <= M <= self.m]
        if bad:
            out.append(f"sweep: {len(bad)} value(s) outside [0, {self.m}], e.g. {bad[0]:g}")
        unknown = [s for s in self.schemes if s not in SCHEMES]
        if unknown:
            out.append(f"schemes: unknown {unknown}")
        unknown = [b for b in self.bounds if b not in BOUNDS]
        if unknown:
            out.append(f"bounds: unknown {unknown}")
        if not self.schemes and not self.bounds:
            out.append("schemes: nothing to compute")
        if self.trials < 1:
            out.append("trials: must be >= 1")
        if self.coloring not in COLORINGS:
            out.append(f"coloring: {self.coloring!r} not in {COLORINGS}")
        elif self.coloring == "cover" and self.n > 16:
            out.append(f"coloring: cover supports at most 16 receivers, n={self.n}")
        if self.unit_bits < 1:
            out.append("unit_bits: must be >= 1")
        if self.q_mode != "uniform":
            out.append(f"q_mode: {self.q_mode!r} unsupported (only uniform)")
        return out

    def validate(self) -> "ExperimentConfig":
        probs = self.problems()
        if probs:
            raise ConfigError(probs)
        return self

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)


def parse_kv(text: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError([f"line {lineno}: expected key=value, got {line!r}"])
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _as_bool(v: str) -> bool:
    low = v.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _as_list(v: str) -> tuple[str, ...]:
    if v.strip().lower() in ("", "none"):
        return ()
    return tuple(s.strip() for s in v.split(",") if s.strip())


_CONVERT = {
    "n": int, "m": int, "kappa": int, "delta": Fraction, "file_units": int, "packets": int,
    "sweep": parse_sweep, "schemes": _as_list, "bounds": _as_list, "trials": int, "seed": int,
    "coloring": str, "unit_bits": int, "verify": _as_bool, "q_mode": str,
}


def config_from_mapping(kv: Mapping[str, str]) -> ExperimentConfig:
    values, problems = {}, []
    for k, v in kv.items():
        if k not in _CONVERT:
            problems.append(f"{k}: unknown key")
            continue
        try:
            values[k] = _CONVERT[k](v)
        except (ValueError, ZeroDivisionError) as exc:
            problems.append(f"{k}: {exc}")
    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(**values).validate()


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return config_from_mapping(parse_kv(fh.read()))


def dump_config(cfg: ExperimentConfig) -> str:
    lines = [
        f"n={cfg.n}",
        f"m={cfg.m}",
        f"kappa={cfg.kappa}",
        f"delta={cfg.delta}",
        f"file_units={cfg.file_units}",
        f"packets={cfg.packets}",
        f"sweep={_fmt_sweep(cfg.sweep)}",
        f"schemes={','.join(cfg.schemes) or 'none'}",
        f"bounds={','.join(cfg.bounds) or 'none'}",
        f"trials={cfg.trials}",
        f"seed={cfg.seed}",
        f"coloring={cfg.coloring}",
        f"unit_bits={cfg.unit_bits}",
        f"verify={'true' if cfg.verify else 'false'}",
        f"q_mode={cfg.q_mode}",
    ]
    return "\n".join(lines) + "\n"
