"""Scenario parameters and the OBO backoff ladder."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

EOCW_LIMIT = 7
MAX_STAS = 1024
MAX_RUS = 74


class ConfigError(ValueError):
    """Raised for scenario parameters outside their valid range."""


@dataclass(frozen=True)
class SlotTiming:
    """Durations (microseconds) of the frame exchange making up one slot."""

    t_tf: float = 0.0
    t_sifs: float = 0.0
    t_payload: float = 0.0
    t_ack: float = 0.0
    t_difs: float = 0.0

    def __post_init__(self):
        for name in ("t_tf", "t_sifs", "t_payload", "t_ack", "t_difs"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")

    @property
    def slot_duration(self) -> float:
        return self.t_tf + 2 * self.t_sifs + self.t_payload + self.t_ack + self.t_difs


@dataclass(frozen=True)
class NetworkConfig:
    """One symmetric UORA scenario.

    ``arrival_rate`` is the per-slot Bernoulli update probability; 1 means
    generate-at-will. ``eocw_min`` and ``max_backoff_level`` fix the window
    ladder, with EOCW_max = eocw_min + max_backoff_level.
    """

    n_stas: int
    n_rus: int
    arrival_rate: float
    eocw_min: int
    max_backoff_level: int
    timing: SlotTiming | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("n_stas", "n_rus", "eocw_min", "max_backoff_level"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{name} must be an integer, got {value!r}")
        if not 1 <= self.n_stas <= MAX_STAS:
            raise ConfigError(f"n_stas must be in [1, {MAX_STAS}], got {self.n_stas}")
        if not 1 <= self.n_rus <= MAX_RUS:
            raise ConfigError(f"n_rus must be in [1, {MAX_RUS}], got {self.n_rus}")
        lam = self.arrival_rate
        if not (isinstance(lam, (int, float)) and 0.0 < lam <= 1.0):
            raise ConfigError(f"arrival_rate must be in (0, 1], got {lam!r}")
        if not 0 <= self.eocw_min <= EOCW_LIMIT:
            raise ConfigError(f"eocw_min must be in [0, {EOCW_LIMIT}], got {self.eocw_min}")
        if self.max_backoff_level < 0:
            raise ConfigError("max_backoff_level must be >= 0")
        if self.eocw_min + self.max_backoff_level > EOCW_LIMIT:
            raise ConfigError(
                f"eocw_min + m must not exceed {EOCW_LIMIT} "
                f"(got {self.eocw_min} + {self.max_backoff_level})"
            )

    @property
    def m(self) -> int:
        return self.max_backoff_level

    @property
    def w0(self) -> int:
        return 2**self.eocw_min

    @property
    def generate_at_will(self) -> bool:
        return self.arrival_rate == 1.0

    def replace(self, **changes) -> "NetworkConfig":
        kwargs = dict(
            n_stas=self.n_stas,
            n_rus=self.n_rus,
            arrival_rate=self.arrival_rate,
            eocw_min=self.eocw_min,
            max_backoff_level=self.max_backoff_level,
            timing=self.timing,
        )
        kwargs.update(changes)
        return NetworkConfig(**kwargs)

    def to_dict(self) -> dict:
        doc = {
            "n_stas": self.n_stas,
            "n_rus": self.n_rus,
            "arrival_rate": self.arrival_rate,
            "eocw_min": self.eocw_min,
            "m": self.max_backoff_level,
        }
        if self.timing is not None:
            doc["timing"] = {
                "t_tf": self.timing.t_tf,
                "t_sifs": self.timing.t_sifs,
                "t_payload": self.timing.t_payload,
                "t_ack": self.timing.t_ack,
                "t_difs": self.timing.t_difs,
            }
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "NetworkConfig":
        unknown = set(doc) - {"n_stas", "n_rus", "arrival_rate", "eocw_min", "m", "timing"}
        if unknown:
            raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
        try:
            timing = SlotTiming(**doc["timing"]) if doc.get("timing") else None
            return cls(
                n_stas=doc["n_stas"],
                n_rus=doc["n_rus"],
                arrival_rate=float(doc["arrival_rate"]),
                eocw_min=doc["eocw_min"],
                max_backoff_level=doc["m"],
                timing=timing,
            )
        except KeyError as exc:
            raise ConfigError(f"missing scenario key {exc.args[0]!r}") from None
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def load_scenario(path: str | Path) -> dict:
    """Read a JSON scenario document without validating it."""
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("scenario file must contain a JSON object")
    return doc


@dataclass(frozen=True)
class BackoffLadder:
    """Per-level windows W_x and the quotient/remainder terms derived from them."""

    w: tuple[int, ...]
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    h: tuple[float, ...]
    n_rus: int

    @property
    def m(self) -> int:
        return len(self.w) - 1

    @property
    def w0(self) -> int:
        return self.w[0]

    def single_slot(self, x: int) -> bool:
        """True when any counter drawn at level ``x`` reaches 0 at the first TF."""
        return self.w[x] <= self.n_rus + 1


def ladder_terms(w: int, l: int) -> tuple[int, int, float]:
    alpha = (w - 1) // l
    beta = w - 1 - alpha * l
    h = -(l / 2) * alpha**2 + (w - 1 - l / 2) * alpha
    return alpha, beta, h


def build_ladder(config: NetworkConfig) -> BackoffLadder:
    if config.eocw_min + config.m > EOCW_LIMIT:
        raise ConfigError("eocw_min + m exceeds the EOCW range")
    l = config.n_rus
    w = tuple(config.w0 * 2**x for x in range(config.m + 1))
    terms = [ladder_terms(wx, l) for wx in w]
    return BackoffLadder(
        w=w,
        alpha=tuple(t[0] for t in terms),
        beta=tuple(t[1] for t in terms),
        h=tuple(t[2] for t in terms),
        n_rus=l,
    )


def poisson_to_slot_rate(poisson_rate: float, timing: SlotTiming) -> float:
    """Per-slot Bernoulli rate equivalent to a Poisson rate given in updates/second."""
    if poisson_rate < 0:
        raise ConfigError("poisson_rate must be non-negative")
    if math.isinf(poisson_rate):
        return 1.0
    slot_seconds = timing.slot_duration * 1e-6
    return -math.expm1(-poisson_rate * slot_seconds)
