"""Error hierarchy shared by the simulation apps."""

from __future__ import annotations

from collections.abc import Sequence


class TwinWindError(Exception):
    """Base class for every error raised by the lab."""


class SingularOrientation(TwinWindError):
    """The effective wind speed V_v·cos(ψ−α) vanished."""


class DegenerateTipSpeed(TwinWindError):
    """Tip speed ratio below the division floor of the torque expression."""


class InvalidSeverity(TwinWindError, ValueError):
    """Fault severity outside [0, 1)."""


class SingularInductance(TwinWindError):
    """Effective inductance matrix is too badly conditioned to invert."""


class SingularDecoupling(TwinWindError):
    """Decoupling matrix of the linearizing control is not regular."""


class DivergedState(TwinWindError):
    """Closed-loop state left the admissible region."""

    def __init__(self, time: float, reason: str) -> None:
        super().__init__(f'state diverged at t={time:.6f} s: {reason}')
        self.time = time
        self.reason = reason


class ScenarioConfigError(TwinWindError):
    """Scenario file could not be read or failed validation."""

    def __init__(self, diagnostics: Sequence[str]) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__('; '.join(self.diagnostics) or 'invalid scenario configuration')


__all__ = [
    'DegenerateTipSpeed',
    'DivergedState',
    'InvalidSeverity',
    'ScenarioConfigError',
    'SingularDecoupling',
    'SingularInductance',
    'SingularOrientation',
    'TwinWindError',
]
