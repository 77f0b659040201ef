"""Prior baseline: a cumulative hazard on the time axis and a mark law."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "IdentityHazard",
    "WeibullHazard",
    "CustomHazard",
    "UniformLabels",
    "UnitUniform",
    "PointMass",
    "BaselineMeasure",
    "baseline_from_spec",
    "parse_baseline",
]


@dataclass(frozen=True)
class IdentityHazard:
    """``Lambda0(t) = t``: an exponential(1) prior for the times."""

    def __call__(self, t):
        return np.asarray(t, dtype=float) if np.ndim(t) else float(t)

    def inverse(self, a):
        return np.asarray(a, dtype=float) if np.ndim(a) else float(a)

    def density(self, t):
        return 1.0

    def to_spec(self):
        return {"hazard": "identity"}


@dataclass(frozen=True)
class WeibullHazard:
    """``Lambda0(t) = (t / scale) ** shape``."""

    shape: float = 2.0
    scale: float = 1.0

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ConfigurationError(f"weibull hazard needs positive shape and scale, got {self}")

    def __call__(self, t):
        return (np.asarray(t, dtype=float) / self.scale) ** self.shape

    def inverse(self, a):
        return self.scale * np.asarray(a, dtype=float) ** (1.0 / self.shape)

    def density(self, t):
        return self.shape / self.scale * (t / self.scale) ** (self.shape - 1.0)

    def to_spec(self):
        return {"hazard": "weibull", "shape": self.shape, "scale": self.scale}


@dataclass(frozen=True, eq=False)
class CustomHazard:
    """User supplied cumulative hazard; ``inverse`` is needed for sampling."""

    cumulative: Callable[[float], float]
    inverse_fn: Callable[[float], float] | None = None
    density_fn: Callable[[float], float] | None = None

    def __call__(self, t):
        return np.vectorize(self.cumulative, otypes=[float])(t) if np.ndim(t) else self.cumulative(t)

    def inverse(self, a):
        if self.inverse_fn is None:
            raise ConfigurationError("cumulative hazard has no inverse; cannot map sampled times")
        return np.vectorize(self.inverse_fn, otypes=[float])(a) if np.ndim(a) else self.inverse_fn(a)

    def density(self, t):
        if self.density_fn is None:
            raise ConfigurationError("cumulative hazard has no density")
        return self.density_fn(t)

    def to_spec(self):
        raise ConfigurationError("custom hazards cannot be serialised")


@dataclass(frozen=True)
class UniformLabels:
    labels: tuple = ("a", "b")

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.labels:
            raise ConfigurationError("uniform_labels needs at least one label")

    def sample(self, rng, size):
        idx = rng.integers(len(self.labels), size=size)
        return [self.labels[i] for i in idx]

    def to_spec(self):
        return {"kind": "uniform_labels", "labels": list(self.labels)}


@dataclass(frozen=True)
class UnitUniform:
    def sample(self, rng, size):
        return rng.random(size).tolist()

    def to_spec(self):
        return {"kind": "unit_uniform"}


@dataclass(frozen=True)
class PointMass:
    value: Any = "x"

    def sample(self, rng, size):
        return [self.value] * size

    def to_spec(self):
        return {"kind": "point_mass", "value": self.value}


@dataclass(frozen=True)
class BaselineMeasure:
    """Product baseline ``Lambda0(ds) P0(dx)``."""

    hazard: Any = field(default_factory=IdentityHazard)
    marks: Any = field(default_factory=UnitUniform)

    def cumulative_hazard(self, t):
        return self.hazard(t)

    def inverse_hazard(self, a):
        return self.hazard.inverse(a)

    def prior_survival(self, t):
        return np.exp(-np.asarray(self.hazard(t), dtype=float))

    def sample_marks(self, rng, size):
        return self.marks.sample(rng, size)

    @property
    def is_identity(self):
        return isinstance(self.hazard, IdentityHazard)

    def to_spec(self):
        spec = dict(self.hazard.to_spec())
        spec["marks"] = self.marks.to_spec()
        return spec


_MARKS = {"uniform_labels": UniformLabels, "unit_uniform": UnitUniform, "point_mass": PointMass}


def baseline_from_spec(spec):
    """Build a baseline from a record such as ``{"hazard": "weibull", "shape": 2}``."""
    if isinstance(spec, BaselineMeasure):
        return spec
    spec = dict(spec or {})
    kind = spec.pop("hazard", "identity")
    marks_spec = dict(spec.pop("marks", {"kind": "unit_uniform"}))
    if kind == "identity":
        if spec:
            raise ConfigurationError(f"identity hazard takes no parameters, got {sorted(spec)}")
        hazard = IdentityHazard()
    elif kind == "weibull":
        try:
            hazard = WeibullHazard(**{k: float(v) for k, v in spec.items()})
        except TypeError as exc:
            raise ConfigurationError(f"weibull: {exc}") from exc
    else:
        raise ConfigurationError(f"unknown hazard {kind!r}; expected 'identity' or 'weibull'")
    mark_kind = marks_spec.pop("kind", None)
    if mark_kind not in _MARKS:
        raise ConfigurationError(f"unknown mark law {mark_kind!r}; expected one of {sorted(_MARKS)}")
    try:
        marks = _MARKS[mark_kind](**marks_spec)
    except TypeError as exc:
        raise ConfigurationError(f"{mark_kind}: {exc}") from exc
    return BaselineMeasure(hazard, marks)


def parse_baseline(text):
    """Parse baseline JSON or the shorthand ``identity`` / ``weibull:shape=2,scale=1.5``."""
    text = (text or "identity").strip()
    if text.startswith("{"):
        try:
            return baseline_from_spec(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"bad baseline JSON: {exc}") from exc
    name, _, rest = text.partition(":")
    spec = {"hazard": name.strip()}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ConfigurationError(f"bad baseline parameter {item!r}; expected key=value")
        spec[key.strip()] = val.strip()
    return baseline_from_spec(spec)
