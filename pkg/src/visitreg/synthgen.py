"""Seeded synthetic traffic with a known linear page-view process.

Draws come from numpy's PCG64 bit generator in a fixed order: for every
dimension, then every level (both in config order), the visit path first and
the page-view noise second. The same config and seed therefore give the
same dataset on any platform numpy supports.

Config document (JSON)::

    {
      "seed": 0,
      "periods": 240,
      "start": "2008-06",
      "dimensions": {
        "type": {
          "new":       {"process": {"kind": "ar1", "mean": 400, "phi": 0.3, "sd": 90},
                        "slope": 2.4, "intercept": 0, "noise_sd": 50, "noise_phi": 0.0},
          "returning": {"process": {"kind": "random_walk", "start": 300, "drift": 0, "sd": 20},
                        "slope": 5.22, "intercept": 0, "noise_sd": 60}
        }
      }
    }

The first dimension is the anchor. Later dimensions are drawn from their own
processes and then rescaled (largest-remainder rounding) so their visit and
page-view totals match the anchor exactly in every period.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .core import Period, SegmentedDataset, period_range
from .errors import ConfigurationError


@dataclass(frozen=True)
class ProcessSpec:
    kind: str = "ar1"
    mean: float = 100.0
    phi: float = 0.3
    sd: float = 10.0
    start: float | None = None
    drift: float = 0.0

    def validate(self, where: str) -> None:
        if self.kind not in ("ar1", "random_walk"):
            raise ConfigurationError(f"{where}: unknown process kind {self.kind!r}")
        if self.sd < 0:
            raise ConfigurationError(f"{where}: innovation sd must be non-negative")
        if self.kind == "ar1" and not -1.0 < self.phi < 1.0:
            raise ConfigurationError(f"{where}: AR coefficient must lie strictly inside (-1, 1)")

    def to_dict(self) -> dict:
        if self.kind == "ar1":
            return {"kind": "ar1", "mean": self.mean, "phi": self.phi, "sd": self.sd}
        return {"kind": "random_walk", "start": self.initial, "drift": self.drift, "sd": self.sd}

    @property
    def initial(self) -> float:
        return self.mean if self.start is None else self.start


@dataclass(frozen=True)
class LevelSpec:
    process: ProcessSpec
    slope: float
    intercept: float = 0.0
    noise_sd: float = 0.0
    noise_phi: float = 0.0

    def validate(self, where: str) -> None:
        self.process.validate(where)
        if not self.slope > 0:
            raise ConfigurationError(f"{where}: slope must be positive")
        if self.noise_sd < 0:
            raise ConfigurationError(f"{where}: noise sd must be non-negative")
        if not -1.0 < self.noise_phi < 1.0:
            raise ConfigurationError(f"{where}: noise AR coefficient must lie inside (-1, 1)")

    def to_dict(self) -> dict:
        return {
            "process": self.process.to_dict(),
            "slope": self.slope,
            "intercept": self.intercept,
            "noise_sd": self.noise_sd,
            "noise_phi": self.noise_phi,
        }


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    periods: int
    dimensions: Mapping[str, Mapping[str, LevelSpec]]
    start: Period = field(default_factory=lambda: Period(2008, 6))

    def validate(self) -> None:
        if self.periods < 12:
            raise ConfigurationError("periods must be at least 12")
        if not self.dimensions:
            raise ConfigurationError("at least one dimension is required")
        for dim, levels in self.dimensions.items():
            if len(levels) < 2:
                raise ConfigurationError(f"dimension {dim!r} needs at least 2 levels")
            for level, spec in levels.items():
                spec.validate(f"{dim}/{level}")

    def with_seed(self, seed: int) -> SynthConfig:
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "periods": self.periods,
            "start": str(self.start),
            "dimensions": {
                dim: {lv: spec.to_dict() for lv, spec in levels.items()}
                for dim, levels in self.dimensions.items()
            },
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> SynthConfig:
        try:
            dims = {}
            for dim, levels in doc["dimensions"].items():
                dims[dim] = {}
                for level, spec in levels.items():
                    spec = dict(spec)
                    proc = ProcessSpec(**spec.pop("process"))
                    dims[dim][level] = LevelSpec(process=proc, **spec)
            cfg = cls(
                seed=int(doc.get("seed", 0)),
                periods=int(doc["periods"]),
                dimensions=dims,
                start=Period.parse(doc.get("start", "2008-06")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"invalid synth config: {exc}") from exc
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> SynthConfig:
        return cls.from_dict(json.loads(text))


def _visits_path(proc: ProcessSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    eps = rng.standard_normal(n)
    x = np.empty(n)
    if proc.kind == "ar1":
        # start from the stationary distribution
        x[0] = proc.mean + proc.sd / np.sqrt(1.0 - proc.phi**2) * eps[0]
        for t in range(1, n):
            x[t] = proc.mean + proc.phi * (x[t - 1] - proc.mean) + proc.sd * eps[t]
    else:
        x[0] = proc.initial + proc.sd * eps[0]
        for t in range(1, n):
            x[t] = x[t - 1] + proc.drift + proc.sd * eps[t]
    return np.maximum(np.rint(x), 0).astype(np.int64)


def _noise_path(spec: LevelSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    eps = rng.standard_normal(n)
    if spec.noise_phi == 0.0:
        return spec.noise_sd * eps
    phi = spec.noise_phi
    u = np.empty(n)
    u[0] = spec.noise_sd * eps[0]
    scale = spec.noise_sd * np.sqrt(1.0 - phi * phi)
    for t in range(1, n):
        u[t] = phi * u[t - 1] + scale * eps[t]
    return u


def _allocate(total: int, weights: np.ndarray) -> np.ndarray:
    """Split a non-negative integer total proportionally (largest remainder)."""
    w = np.clip(weights.astype(float), 0.0, None)
    if w.sum() <= 0:
        w = np.ones_like(w)
    raw = total * w / w.sum()
    base = np.floor(raw).astype(np.int64)
    short = int(total - base.sum())
    if short:
        order = np.argsort(-(raw - base), kind="stable")
        base[order[:short]] += 1
    return base


def generate(config: SynthConfig) -> SegmentedDataset:
    """Draw a dataset whose additivity invariants hold exactly."""
    config.validate()
    n = config.periods
    rng = np.random.Generator(np.random.PCG64(config.seed))
    raw: dict[str, dict[str, tuple[np.ndarray, np.ndarray]]] = {}
    for dim, levels in config.dimensions.items():
        raw[dim] = {}
        for level, spec in levels.items():
            v = _visits_path(spec.process, n, rng)
            noise = _noise_path(spec, n, rng)
            pv = np.rint(spec.slope * v + spec.intercept + noise).astype(np.int64)
            raw[dim][level] = (v, np.maximum(pv, v))

    dims = list(raw)
    anchor = raw[dims[0]]
    total_v = sum(v for v, _ in anchor.values())
    total_pv = sum(p for _, p in anchor.values())
    counts = {dims[0]: anchor}
    for dim in dims[1:]:
        levels = list(raw[dim])
        v_raw = np.column_stack([raw[dim][lv][0] for lv in levels])
        extra_raw = np.column_stack([raw[dim][lv][1] - raw[dim][lv][0] for lv in levels])
        v_new = np.empty_like(v_raw)
        pv_new = np.empty_like(v_raw)
        for t in range(n):
            v_new[t] = _allocate(int(total_v[t]), v_raw[t])
            pv_new[t] = v_new[t] + _allocate(int(total_pv[t] - total_v[t]), extra_raw[t])
        counts[dim] = {lv: (v_new[:, j], pv_new[:, j]) for j, lv in enumerate(levels)}

    return SegmentedDataset.from_counts(period_range(config.start, n), counts, total_pv)
