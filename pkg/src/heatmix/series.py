"""Year-indexed series with step and linear-interpolation lookups."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import YearGridError


@dataclass(frozen=True)
class YearSeries:
    """Values on an integer year grid.

    `at` treats the series as a step function (calendar-year semantics used
    by policy schedules and grid intensities); `interp` interpolates
    linearly (used for physical quantities such as demand).
    """

    years: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        years = np.asarray(self.years, dtype=int)
        values = np.asarray(self.values, dtype=float)
        if years.ndim != 1 or years.shape != values.shape:
            raise YearGridError("years and values must be 1-d arrays of equal length")
        if len(years) == 0:
            raise YearGridError("empty series")
        if np.any(np.diff(years) <= 0):
            raise YearGridError("years must be strictly increasing")
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, value: float, start: int, end: int) -> "YearSeries":
        years = np.arange(start, end + 1)
        return cls(years, np.full(len(years), float(value)))

    @property
    def start(self) -> int:
        return int(self.years[0])

    @property
    def end(self) -> int:
        return int(self.years[-1])

    def at(self, year: float) -> float:
        """Step lookup: value of the latest grid year <= year."""
        y = int(np.floor(year + 1e-9))
        if y < self.start or y > self.end:
            raise YearGridError(f"year {year} outside series range [{self.start}, {self.end}]")
        idx = np.searchsorted(self.years, y, side="right") - 1
        return float(self.values[idx])

    def interp(self, year: float) -> float:
        if year < self.start - 1e-9 or year > self.end + 1e-9:
            raise YearGridError(f"year {year} outside series range [{self.start}, {self.end}]")
        return float(np.interp(year, self.years, self.values))

    def to_dict(self) -> dict:
        return {"years": self.years.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "YearSeries":
        return cls(np.asarray(d["years"]), np.asarray(d["values"]))
