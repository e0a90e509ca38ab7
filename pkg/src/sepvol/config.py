"""Run configuration: serialization, digests and the estimation grid."""

from __future__ import annotations

import configparser
import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .qmc import KINDS, SequenceSpec

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
DIMENSION = {"real": 6, "complex": 12}

# fields that change the sampled counts; everything else is bookkeeping
SAMPLING_FIELDS = ("case", "grid_size", "extra_mu", "seed", "sequence", "skip", "path")


@dataclass(frozen=True)
class RunConfig:
    case: str = "real"
    points: int = 100_000
    grid_size: int = 201
    extra_mu: tuple[float, ...] = ()
    seed: int = 0
    sequence: str = "faure"
    skip: int | None = None
    path: str = "fast"
    switch_point: float = 0.95
    series_degree: int = 100
    interp_degree: int = 3
    workers: int = 1
    out: str = "run"
    checkpoint_every: int = 1_000_000

    def __post_init__(self):
        if self.case not in DIMENSION:
            raise ValueError(f"case must be 'real' or 'complex', got {self.case!r}")
        if self.sequence not in KINDS:
            raise ValueError(f"sequence must be one of {KINDS}, got {self.sequence!r}")
        if self.path not in ("fast", "slow"):
            raise ValueError("path must be 'fast' or 'slow'")
        if self.points < 0 or self.grid_size < 2 or self.workers < 1:
            raise ValueError("points >= 0, grid_size >= 2 and workers >= 1 are required")
        if self.interp_degree < 1:
            raise ValueError("interp_degree must be positive")
        object.__setattr__(self, "extra_mu", tuple(float(m) for m in self.extra_mu))
        if self.skip is None:
            object.__setattr__(self, "skip", self.sequence_spec().skip)

    @property
    def dimension(self) -> int:
        return DIMENSION[self.case]

    def sequence_spec(self) -> SequenceSpec:
        return SequenceSpec(self.dimension, self.sequence, self.seed, self.skip)

    def grid(self) -> np.ndarray:
        g = np.linspace(0.0, 1.0, self.grid_size)
        if self.extra_mu:
            g = np.union1d(g, np.asarray(self.extra_mu, dtype=float))
        return g

    def to_dict(self) -> dict:
        d = asdict(self)
        d["extra_mu"] = list(self.extra_mu)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "extra_mu" in d:
            d["extra_mu"] = tuple(d["extra_mu"])
        return cls(**d)

    def digest(self) -> str:
        d = self.to_dict()
        payload = json.dumps({k: d[k] for k in SAMPLING_FIELDS}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def with_overrides(self, **kw) -> "RunConfig":
        """Copy with the non-None entries of ``kw`` applied.

        A new case without an explicit skip gets that case's default skip.
        """
        kw = {k: v for k, v in kw.items() if v is not None}
        if kw.get("case", self.case) != self.case and "skip" not in kw:
            kw["skip"] = None
        return replace(self, **kw)

    def save(self, path: str | Path) -> None:
        cp = configparser.ConfigParser()
        cp["run"] = {}
        for k, v in self.to_dict().items():
            if v is None:
                continue
            cp["run"][k] = ", ".join(repr(x) for x in v) if k == "extra_mu" else str(v)
        with open(path, "w") as fh:
            cp.write(fh)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        return cls.from_dict(read_values(path))


def read_values(path: str | Path) -> dict:
    """Typed values from the ``[run]`` section of a config file."""
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise FileNotFoundError(f"config file not found: {path}")
    if "run" not in cp:
        raise ValueError(f"{path}: missing [run] section")
    return parse_values(dict(cp["run"]))


def parse_values(raw: dict[str, str]) -> dict:
    """Convert string values from a config file to field types."""
    types = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for k, v in raw.items():
        if k not in types:
            raise ValueError(f"unknown config key {k!r}")
        t = str(types[k])
        v = v.strip()
        if k == "extra_mu":
            out[k] = tuple(_parse_float(x) for x in v.split(",") if x.strip())
        elif t.startswith("int"):
            out[k] = None if v in ("", "None") else int(float(v)) if "e" in v.lower() else int(v)
        elif t.startswith("float"):
            out[k] = _parse_float(v)
        else:
            out[k] = v
    return out


def _parse_float(text: str) -> float:
    text = text.strip()
    if text.lower() in ("golden", "sigma_au"):
        return GOLDEN
    if "/" in text:
        num, den = text.split("/")
        return float(num) / float(den)
    return float(text)
