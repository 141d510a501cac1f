"""Hyperparameter grids and their enumeration into clustering configs."""

from itertools import product
from typing import List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..clustering import ClusteringConfig
from ..errors import ConfigError


THRESHOLD_GRID: Tuple[float, ...] = tuple(round(0.01 * i, 2) for i in range(101))
PREFERENCE_GRID: Tuple[float, ...] = tuple(-5.0 + 0.25 * i for i in range(41))
ALPHA_GRID: Tuple[float, ...] = tuple(round(0.05 * i, 2) for i in range(21))
GAMMA_GRID: Tuple[float, ...] = (tuple(round(0.1 * i, 1) for i in range(1, 10))
                                 + tuple(1.0 + 0.375 * i for i in range(25)))

assert len(THRESHOLD_GRID) == 101 and THRESHOLD_GRID[-1] == 1.0
assert len(PREFERENCE_GRID) == 41 and PREFERENCE_GRID[-1] == 5.0
assert len(ALPHA_GRID) == 21 and ALPHA_GRID[-1] == 1.0
assert len(GAMMA_GRID) == 34 and GAMMA_GRID[-1] == 10.0


def parse_grid(text: str) -> List[float]:
    """Parse ``a,b,c`` or an inclusive ``start:stop:step`` range.

    Raises:
        ConfigError: If the text is not a valid grid
    """
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError("need step > 0 and stop >= start")
            count = int(round((stop - start) / step)) + 1
            values = [round(start + i * step, 10) for i in range(count)]
        else:
            values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigError(f"invalid grid {text!r}: {e}", grid=text)
    if not values:
        raise ConfigError(f"grid {text!r} is empty", grid=text)
    return values


class GridSpec(BaseModel):
    """Values searched for each hyperparameter."""

    model_config = ConfigDict(extra="forbid")

    threshold: List[float] = Field(default_factory=lambda: list(THRESHOLD_GRID), min_length=1)
    preference: List[float] = Field(default_factory=lambda: list(PREFERENCE_GRID), min_length=1)
    gamma: List[float] = Field(default_factory=lambda: list(GAMMA_GRID), min_length=1)
    alpha: List[float] = Field(default_factory=lambda: list(ALPHA_GRID), min_length=1)

    @field_validator("threshold", "alpha")
    @classmethod
    def check_unit_interval(cls, v):
        if any(not 0.0 <= x <= 1.0 for x in v):
            raise ValueError("values must lie in [0, 1]")
        return v

    @field_validator("gamma")
    @classmethod
    def check_positive(cls, v):
        if any(x <= 0 for x in v):
            raise ValueError("gamma values must be positive")
        return v

    def configs(self, algorithm: str, base: ClusteringConfig) -> List[ClusteringConfig]:
        """Enumerate the Cartesian grid of ``algorithm`` over ``base``.

        Configurations run from the fewest merges to the most: threshold,
        preference and gamma descending, alpha descending (pure visual
        similarity first).
        """
        def desc(values: Sequence[float]) -> List[float]:
            return sorted(set(values), reverse=True)

        base = base.model_copy(update={"algorithm": algorithm})
        if algorithm == "none":
            return [base]
        if algorithm == "threshold":
            return [base.model_copy(update={"threshold": t}) for t in desc(self.threshold)]
        if algorithm == "ap":
            return [base.model_copy(update={"preference": p}) for p in desc(self.preference)]
        if algorithm == "temporal_ap":
            return [base.model_copy(update={"gamma": g, "alpha": a, "preference": p})
                    for g, a, p in product(desc(self.gamma), desc(self.alpha), desc(self.preference))]
        raise ConfigError(f"unknown clustering algorithm {algorithm!r}")


def tuned_parameters(algorithm: str) -> Tuple[str, ...]:
    """Hyperparameters a grid search over ``algorithm`` selects."""
    return {
        "none": (),
        "threshold": ("threshold",),
        "ap": ("preference",),
        "temporal_ap": ("gamma", "alpha", "preference"),
    }[algorithm]
