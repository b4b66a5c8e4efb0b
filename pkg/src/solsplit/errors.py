"""Exception types shared across the package.

ConfigError maps to CLI exit code 1, numerical failures (StabilityError
and friends) to exit code 2; plain ValueError marks contract violations
at API boundaries.
"""

from __future__ import annotations

__all__ = ["ConfigError", "StabilityError", "LocalizationError"]


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


class StabilityError(RuntimeError):
    """Time integration lost mass beyond tolerance; carries the step index."""

    def __init__(self, step: int, drift: float) -> None:
        super().__init__(
            f"mass drift {drift:.3e} exceeded 1e-4 at step {step}"
        )
        self.step = step
        self.drift = drift


class LocalizationError(ValueError):
    """Initial data is not localized well enough inside the domain."""
