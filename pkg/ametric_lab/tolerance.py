"""
Floating-point comparison helpers

Shared by every checker so that "holds within tolerance" means the same
thing for axioms, convexity, contraction and stability.
"""

from typing import Sequence, Union

import numpy as np

from .constants import STABILITY, TOLERANCES

ArrayLike = Union[float, np.ndarray]


def exceeds(
    lhs: ArrayLike,
    rhs: ArrayLike,
    atol: float = TOLERANCES.ABS,
    rtol: float = TOLERANCES.REL,
) -> np.ndarray:
    """
    Elementwise test for a violated inequality lhs <= rhs

    Args:
        lhs: Left-hand side values
        rhs: Right-hand side values
        atol: Absolute tolerance
        rtol: Relative tolerance applied to the larger side

    Returns:
        Boolean array, True where lhs > rhs + atol + rtol * max(|lhs|, |rhs|)
    """
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    return lhs > rhs + atol + rtol * scale


def tail_limit_is_zero(
    values: Sequence[float],
    window: int = STABILITY.TAIL_WINDOW,
    tol: float = STABILITY.LIMIT_TOL,
) -> bool:
    """
    Numerical reading of lim values = 0

    The mean of the last ``window`` values and the last value must both be
    below ``tol``.
    """
    if len(values) == 0:
        return False
    tail = np.asarray(values[-window:], dtype=float)
    return bool(np.mean(tail) < tol and tail[-1] < tol)
