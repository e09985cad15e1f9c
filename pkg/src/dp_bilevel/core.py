"""Shared domain types and distance helpers."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class DimensionError(ValueError):
    """Raised when two vectors that must align have different lengths."""


class NoiselessInput(ZeroDivisionError):
    """Raised when the noisy vector equals the original one (ratio undefined)."""


class Role(enum.Enum):
    ORIGINAL = "original"
    NOISY = "noisy"
    RELEASED = "released"
    HPR_POINT = "hpr_point"
    PUSH_UP_POINT = "push_up_point"


@dataclass(frozen=True)
class DemandVector:
    """Per-unit demands at the demand-bearing buses, tagged with how they were produced."""

    values: np.ndarray
    role: Role = Role.ORIGINAL

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(arr)):
            raise ValueError("demand vector has non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return self.values.size

    def with_role(self, role: Role) -> "DemandVector":
        return DemandVector(self.values, role)


def _as_array(v) -> np.ndarray:
    if isinstance(v, DemandVector):
        return v.values
    return np.asarray(v, dtype=float).reshape(-1)


@dataclass(frozen=True)
class PrivacyParams:
    epsilon: float
    alpha: float
    beta: float
    eta: float = 1e-3
    beta_floor: Optional[float] = None
    max_oracle_calls: int = 3000
    seed: int = 0

    def __post_init__(self):
        for name in ("epsilon", "alpha", "beta", "eta"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if self.beta_floor is not None:
            if not self.beta_floor > 0:
                raise ValueError("beta_floor must be positive")
            if self.beta < self.beta_floor:
                raise ValueError("beta must be at least beta_floor")
        if int(self.max_oracle_calls) < 1:
            raise ValueError("max_oracle_calls must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


class CostSource(enum.Enum):
    PUBLIC = "public"
    PRIVATE_ESTIMATE = "private_estimate"


@dataclass(frozen=True)
class CostTarget:
    f_tilde: float
    source: CostSource = CostSource.PUBLIC

    def __post_init__(self):
        if not math.isfinite(self.f_tilde):
            raise ValueError("f_tilde must be finite")


class FollowerStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    NUMERIC_FAILURE = "numeric_failure"


@dataclass(frozen=True)
class FollowerResult:
    status: FollowerStatus
    objective: Optional[float] = None
    dispatch: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def optimal(self) -> bool:
        return self.status is FollowerStatus.OPTIMAL


@dataclass(frozen=True)
class DistanceBudget:
    """Bracket ``[delta_low, delta_high]`` on the squared distance to the noisy demands."""

    delta_low: float
    delta_high: float

    def __post_init__(self):
        if self.delta_low < 0 or self.delta_high < self.delta_low:
            raise ValueError(f"invalid budget [{self.delta_low}, {self.delta_high}]")

    @property
    def width(self) -> float:
        return self.delta_high - self.delta_low


def l2sq_distance(a, b) -> float:
    """Squared Euclidean distance between two demand vectors."""
    a, b = _as_array(a), _as_array(b)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.size} != {b.size}")
    diff = a - b
    return float(diff @ diff)


def theorem2_ratio(d_star, d_tilde, d_orig) -> float:
    """``||d* - d_orig|| / ||d_tilde - d_orig||``; never exceeds 2 for a bilevel optimum."""
    num = math.sqrt(l2sq_distance(d_star, d_orig))
    den = math.sqrt(l2sq_distance(d_tilde, d_orig))
    if den == 0.0:
        raise NoiselessInput("noisy and original demands coincide")
    return num / den
