from typing import List, Optional

import numpy as np


class ConicNavError(Exception):
    """Base exception for constrained sphere navigation errors."""

    pass


class DimensionMismatchError(ConicNavError, ValueError):
    pass


class NotUnitError(ConicNavError, ValueError):
    pass


class DegenerateVectorError(ConicNavError, ValueError):
    pass


class NotTangentError(ConicNavError, ValueError):
    pass


class PoleSingularityError(ConicNavError, ArithmeticError):
    """The point is too close to the projection pole e_{n+1}."""

    pass


class InvalidConstraintError(ConicNavError, ValueError):
    pass


class InconsistentConstraintsError(ConicNavError, ValueError):
    """Constraint data that would only occur if validation was skipped."""

    pass


class NavigationDomainError(ConicNavError, ValueError):
    pass


class DegenerateConfigurationError(ConicNavError, ValueError):
    pass


class NearSingularityError(ConicNavError, ArithmeticError):
    pass


class ModeError(ConicNavError, ValueError):
    pass


class ScenarioLoadError(ConicNavError):
    """Error loading a scenario document."""

    def __init__(self, message: str, invalid_fields: Optional[List[str]] = None) -> None:
        super().__init__(message)
        self.invalid_fields = invalid_fields or []


class ScenarioValidationError(ConicNavError):
    """Scenario failed the constraint assumptions."""

    def __init__(self, message: str, report=None) -> None:
        super().__init__(message)
        self.report = report


class SafetyViolationError(ConicNavError):
    def __init__(self, t: float, x: np.ndarray, margin: float) -> None:
        super().__init__(
            f"safety violation at t={t:.6f}: min sphere margin {margin:.3e}"
        )
        self.t = t
        self.x = x
        self.margin = margin
