"""Exception hierarchy shared across the package."""

from __future__ import annotations


class HeatmixError(Exception):
    """Base class for all package errors."""


class ValidationError(HeatmixError):
    """An input violated a documented precondition or schema."""


class YearGridError(ValidationError):
    """A year was requested outside (or off) a series' year grid."""


class DatasetError(ValidationError):
    """A dataset failed validation; carries the complete violation list."""

    def __init__(self, issues):
        self.issues = list(issues)
        lines = "\n".join(f"  - {i}" for i in self.issues)
        super().__init__(f"dataset validation failed with {len(self.issues)} issue(s):\n{lines}")


class SimulationError(HeatmixError):
    """A run aborted; message carries region/year context."""


class SessionError(HeatmixError):
    """A calibration session handle is closed, stale or unknown."""


class NonConvergenceError(HeatmixError):
    """An iterative procedure did not meet its tolerance."""
