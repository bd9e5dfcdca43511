"""Small dense linear algebra with conditioning guards."""

from __future__ import annotations

import numpy as np

from .exceptions import TwinWindError


def one_norm_condition(matrix: np.ndarray, inverse: np.ndarray) -> float:
    return float(np.abs(matrix).sum(axis=0).max() * np.abs(inverse).sum(axis=0).max())


def guarded_inverse(
    matrix: np.ndarray,
    *,
    limit: float,
    error: type[TwinWindError],
    label: str,
) -> np.ndarray:
    """Invert ``matrix`` or raise ``error`` when its 1-norm condition exceeds ``limit``."""

    try:
        inverse = np.linalg.inv(matrix)
    except np.linalg.LinAlgError as exc:
        raise error(f'{label} is singular') from exc
    condition = one_norm_condition(matrix, inverse)
    if not np.isfinite(condition) or condition > limit:
        raise error(f'{label} condition number {condition:.3e} exceeds {limit:.1e}')
    return inverse


def check_condition(
    matrix: np.ndarray,
    *,
    limit: float,
    error: type[TwinWindError],
    label: str,
) -> float:
    """Return the 2-norm condition number of ``matrix`` or raise ``error`` above ``limit``."""

    if not np.all(np.isfinite(matrix)):
        raise error(f'{label} has non-finite entries')
    condition = float(np.linalg.cond(matrix))
    if not np.isfinite(condition) or condition > limit:
        raise error(f'{label} condition number {condition:.3e} exceeds {limit:.1e}')
    return condition


def guarded_solve(
    matrix: np.ndarray,
    rhs: np.ndarray,
    *,
    limit: float,
    error: type[TwinWindError],
    label: str,
) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` once the condition check passed."""

    check_condition(matrix, limit=limit, error=error, label=label)
    return np.linalg.solve(matrix, rhs)


__all__ = ['check_condition', 'guarded_inverse', 'guarded_solve', 'one_norm_condition']
