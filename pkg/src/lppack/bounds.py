"""Closed-form bounds on how many unit-separated points fit in an l_q ball.

All closed forms are evaluated with mpmath at ``WORKING_DPS`` significant
digits and floored with a small snap (``FLOOR_SNAP``) so that a radius sitting
exactly on a jump of the staircase does not lose a point to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath

from .lp_core import ExponentLike, as_exponent, exponent_to_json

WORKING_DPS = 40
FLOOR_SNAP = 1e-12
#: Radii within this relative distance of a domain boundary count as on it.
BOUNDARY_RTOL = 1e-12

RANKIN = "rankin"
BOUND_ONE = "bound_one"
BOUND_TWO = "bound_two"


class DomainError(ValueError):
    """A bound was requested outside the region where it is proven."""

    def __init__(self, message, boundaries: Optional[dict] = None):
        super().__init__(message)
        self.boundaries = boundaries or {}


@dataclass(frozen=True)
class BoundResult:
    n_max: int
    formula: str
    q: float
    radius: float
    in_domain: bool = True

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "formula": self.formula,
            "q": exponent_to_json(self.q),
            "radius": self.radius,
            "in_domain": self.in_domain,
        }


def _snap_floor(x) -> int:
    k = int(mpmath.floor(x))
    if (k + 1) - x < FLOOR_SNAP:
        k += 1
    return k


def _check_radius(R) -> float:
    R = float(R)
    if not math.isfinite(R) or R < 0:
        raise DomainError(f"radius must be finite and >= 0, got {R}")
    return R


def _below(R: float, boundary: float) -> bool:
    return R < boundary * (1 - BOUNDARY_RTOL)


def rankin_boundary() -> float:
    return 2.0**-0.5


def bound_one_boundary(q: float) -> float:
    """Largest radius (exclusive) where the 1 < q < 2 bound applies: 2^(-1/q)."""
    return 2.0 ** (-1.0 / q)


def bound_two_boundary(q: float) -> float:
    """Largest radius (exclusive) where the q >= 2 bound applies: 2^(1/q - 1)."""
    return 2.0 ** (1.0 / q - 1.0)


def rankin_bound(R: float) -> BoundResult:
    """Euclidean count floor(1 / (1 - 2R^2)), valid for R < 1/sqrt(2)."""
    R = _check_radius(R)
    if not _below(R, rankin_boundary()):
        raise DomainError(
            f"Rankin bound needs R < 1/sqrt(2), got {R}", {RANKIN: rankin_boundary()}
        )
    with mpmath.workdps(WORKING_DPS):
        r = mpmath.mpf(R)
        n = _snap_floor(1 / (1 - 2 * r**2))
    return BoundResult(n, RANKIN, 2.0, R)


def psi_one(q: ExponentLike, R: float) -> BoundResult:
    """floor(1 / (1 - (2R^q)^(1/(q-1)))) for 1 < q < 2 and R < 2^(-1/q)."""
    q = as_exponent(q)
    R = _check_radius(R)
    if not 1 < q < 2:
        raise DomainError(f"bound_one needs 1 < q < 2, got q={q}")
    if not _below(R, bound_one_boundary(q)):
        raise DomainError(
            f"bound_one needs R < 2^(-1/q) = {bound_one_boundary(q)!r}, got {R}",
            {BOUND_ONE: bound_one_boundary(q)},
        )
    with mpmath.workdps(WORKING_DPS):
        mq, r = mpmath.mpf(q), mpmath.mpf(R)
        n = _snap_floor(1 / (1 - (2 * r**mq) ** (1 / (mq - 1))))
    return BoundResult(n, BOUND_ONE, q, R)


def psi_two(q: ExponentLike, R: float) -> BoundResult:
    """floor(1 / (1 - 2^(q-1) R^q)) for R < 2^(1/q - 1).

    The closed form is evaluated for any finite q > 1, but only q >= 2 is
    backed by a proven operator-norm estimate; :func:`psi` never uses it
    below 2.
    """
    q = as_exponent(q)
    R = _check_radius(R)
    if q <= 1:
        raise DomainError(f"bound_two needs q > 1, got q={q}")
    if math.isinf(q):
        raise DomainError("bound_two needs finite q")
    if not _below(R, bound_two_boundary(q)):
        raise DomainError(
            f"bound_two needs R < 2^(1/q - 1) = {bound_two_boundary(q)!r}, got {R}",
            {BOUND_TWO: bound_two_boundary(q)},
        )
    with mpmath.workdps(WORKING_DPS):
        mq, r = mpmath.mpf(q), mpmath.mpf(R)
        n = _snap_floor(1 / (1 - 2 ** (mq - 1) * r**mq))
    return BoundResult(n, BOUND_TWO, q, R)


def psi(q: ExponentLike, R: float) -> BoundResult:
    """The tightest proven bound at (q, R).

    ``bound_one`` covers 1 < q < 2 and ``bound_two`` covers q >= 2 (q = 2
    goes to ``bound_two``; both agree there in the limit). Raises
    :class:`DomainError` carrying the boundary radius when R is at or past
    the critical radius, where no finite bound exists.
    """
    q = as_exponent(q)
    R = _check_radius(R)
    if q <= 1 or math.isinf(q):
        raise DomainError(f"psi needs 1 < q < inf, got q={q}")
    if q < 2:
        boundaries = {BOUND_ONE: bound_one_boundary(q), BOUND_TWO: bound_two_boundary(q)}
        try:
            return psi_one(q, R)
        except DomainError:
            raise DomainError(
                f"no bound applies at q={q}, R={R}: need R < {boundaries[BOUND_ONE]!r}",
                boundaries,
            ) from None
    try:
        return psi_two(q, R)
    except DomainError:
        boundaries = {BOUND_TWO: bound_two_boundary(q)}
        raise DomainError(
            f"no bound applies at q={q}, R={R}: need R < {boundaries[BOUND_TWO]!r}",
            boundaries,
        ) from None


def conjugate(p: ExponentLike) -> float:
    """Hoelder conjugate: 1 <-> inf, otherwise p / (p - 1)."""
    p = as_exponent(p)
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def critical_radius(p: ExponentLike) -> float:
    """Radius past which arbitrarily many unit-separated points fit in the l_p ball."""
    p = as_exponent(p)
    if p <= 2:
        return 2.0 ** (-1.0 / p)
    return 2.0 ** (1.0 / p - 1.0)
