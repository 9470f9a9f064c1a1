"""Finitely supported vectors in l_p, their norms, and admissibility checks.

A vector is stored as a 1-D float array; coordinates beyond the stored
length are zero, so vectors of different lengths can be compared freely.
The exponent ``p`` is a float in ``[1, inf]`` (``math.inf`` for the sup norm).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

#: Default slack on both the radius and the unit-distance constraint.
ADMISSIBILITY_TOL = 1e-9

#: Above this exponent norms are evaluated as max * (sum (|x|/max)^p)^(1/p).
LARGE_P = 64.0

INF = math.inf


class InvalidInputError(ValueError):
    """Raised for malformed vectors, exponents or configurations."""


ExponentLike = Union[float, int, str]


def as_exponent(p: ExponentLike) -> float:
    """Coerce ``p`` to a float exponent in ``[1, inf]``.

    Accepts numbers and the strings ``"inf"``/``"infinity"`` (any case).
    """
    if isinstance(p, str):
        text = p.strip().lower()
        if text in ("inf", "infinity", "+inf"):
            return INF
        try:
            p = float(text)
        except ValueError:
            raise InvalidInputError(f"not an exponent: {p!r}") from None
    if isinstance(p, bool):
        raise InvalidInputError(f"not an exponent: {p!r}")
    try:
        value = float(p)
    except (TypeError, ValueError):
        raise InvalidInputError(f"not an exponent: {p!r}") from None
    if math.isnan(value) or value < 1:
        raise InvalidInputError(f"exponent must lie in [1, inf], got {p!r}")
    return value


def exponent_to_json(p: float):
    return "inf" if math.isinf(p) else p


def as_vector(coords: Iterable[float]) -> np.ndarray:
    """Return ``coords`` as a finite 1-D float array."""
    v = np.asarray(coords, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise InvalidInputError(f"vector must be one-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("vector has non-finite coordinates")
    return v


def pad_stack(vectors: Sequence[Iterable[float]], dim: Optional[int] = None) -> np.ndarray:
    """Zero-extend ``vectors`` to a common length and stack them as rows."""
    vs = [as_vector(v) for v in vectors]
    width = max([len(v) for v in vs] + [dim or 0, 1])
    out = np.zeros((len(vs), width))
    for i, v in enumerate(vs):
        out[i, : len(v)] = v
    return out


def _int_pow(a: np.ndarray, k: int) -> np.ndarray:
    result, base = None, a
    while k:
        if k & 1:
            result = base if result is None else result * base
        k >>= 1
        if k:
            base = base * base
    return result


def abs_pow(a: np.ndarray, p: float) -> np.ndarray:
    """``|a| ** p`` for finite ``p``, via multiplications when 2p is a small integer."""
    a = np.abs(a)
    if p == 1:
        return a
    twice = 2 * p
    if twice == int(twice) and twice <= 64:
        k = int(twice)
        if k % 2 == 0:
            return _int_pow(a, k // 2)
        half = np.sqrt(a)
        return half if k == 1 else _int_pow(a, k // 2) * half
    return a**p


def _powers_in_range(m: np.ndarray, p: float) -> bool:
    """True when every nonzero row maximum raised to p stays well inside double range."""
    pos = m[m > 0]
    if pos.size == 0:
        return True
    return p * math.log10(pos.max()) < 280 and p * math.log10(pos.min()) > -280


def _norms_rows(x: np.ndarray, p: float) -> np.ndarray:
    """l_p norms along the last axis of an already-validated array."""
    a = np.abs(x)
    if a.shape[-1] == 0:
        return np.zeros(a.shape[:-1])
    if math.isinf(p):
        return a.max(axis=-1)
    if p == 1:
        return a.sum(axis=-1)
    m = a.max(axis=-1, keepdims=True)
    if p <= LARGE_P and _powers_in_range(m, p):
        if p == 2:
            return np.sqrt((a * a).sum(axis=-1))
        return abs_pow(a, p).sum(axis=-1) ** (1.0 / p)
    safe = np.where(m > 0, m, 1.0)
    s = abs_pow(a / safe, p).sum(axis=-1)
    return m[..., 0] * s ** (1.0 / p)


def trim(x: np.ndarray) -> np.ndarray:
    """Drop trailing coordinates that are zero in every row.

    Gives each vector (or stack of vectors) a canonical stored length, so
    results cannot depend on how many explicit zeros were appended.
    """
    if x.shape[-1] == 0:
        return x
    nz = np.flatnonzero(np.any(x.reshape(-1, x.shape[-1]) != 0, axis=0))
    width = int(nz[-1]) + 1 if nz.size else 0
    return x[..., :width]


def norm_p(v: Iterable[float], p: ExponentLike) -> float:
    """The l_p norm of a finitely supported vector."""
    return float(_norms_rows(trim(as_vector(v)), as_exponent(p)))


def distance_p(u: Iterable[float], v: Iterable[float], p: ExponentLike) -> float:
    """``norm_p(u - v)`` after zero-extending the shorter vector."""
    rows = pad_stack([u, v])
    return float(_norms_rows(trim(rows[0] - rows[1]), as_exponent(p)))


def aggregate_norm(vectors: Sequence[Iterable[float]], p: ExponentLike) -> float:
    """Norm of a tuple of vectors: the l_p norm of the member norms.

    For ``p = inf`` this is the largest member norm.
    """
    if len(vectors) == 0:
        raise InvalidInputError("aggregate norm of an empty tuple")
    p = as_exponent(p)
    member = np.array([norm_p(v, p) for v in vectors])
    return float(_norms_rows(member, p))


def pairwise_distances(points: np.ndarray, p: float, block: int = 1 << 22) -> np.ndarray:
    """Condensed pairwise l_p distances, ordered lexicographically by (i, j), i < j.

    Rows are processed in chunks so that at most ``block`` differences are
    held at once.
    """
    n, d = points.shape
    out = np.empty(n * (n - 1) // 2)
    pos = 0
    rows_per_chunk = max(1, block // max(1, n * d))
    for start in range(0, n - 1, rows_per_chunk):
        stop = min(n - 1, start + rows_per_chunk)
        for i in range(start, stop):
            diff = points[i + 1 :] - points[i]
            k = n - 1 - i
            out[pos : pos + k] = _norms_rows(diff, p)
            pos += k
    return out


@dataclass
class PointConfig:
    """Points in the closed l_p ball of radius ``radius``."""

    p: float
    radius: float
    points: list = field(default_factory=list)

    def __post_init__(self):
        self.p = as_exponent(self.p)
        self.radius = float(self.radius)
        if not math.isfinite(self.radius) or self.radius < 0:
            raise InvalidInputError(f"radius must be finite and >= 0, got {self.radius}")
        self.points = [as_vector(v) for v in self.points]

    @property
    def n(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return pad_stack(self.points) if self.points else np.zeros((0, 1))

    def to_dict(self) -> dict:
        return {
            "p": exponent_to_json(self.p),
            "radius": self.radius,
            "points": [[float(x) for x in v] for v in self.points],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data) -> "PointConfig":
        if not isinstance(data, dict):
            raise InvalidInputError("point configuration must be a JSON object")
        missing = {"p", "radius", "points"} - data.keys()
        if missing:
            raise InvalidInputError(f"missing keys: {sorted(missing)}")
        points = data["points"]
        if not isinstance(points, list) or not all(isinstance(v, list) for v in points):
            raise InvalidInputError("'points' must be a list of coordinate lists")
        for v in points:
            for x in v:
                if isinstance(x, bool) or not isinstance(x, (int, float)):
                    raise InvalidInputError(f"non-numeric coordinate {x!r}")
        radius = data["radius"]
        if isinstance(radius, bool) or not isinstance(radius, (int, float)):
            raise InvalidInputError(f"non-numeric radius {radius!r}")
        return cls(p=data["p"], radius=radius, points=points)

    @classmethod
    def from_json(cls, text: str) -> "PointConfig":
        try:
            data = json.loads(text, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"malformed JSON: {exc}") from None
        return cls.from_dict(data)


def _reject_constant(name):
    raise InvalidInputError(f"non-finite number {name} in JSON")


@dataclass
class ValidationReport:
    max_norm: float
    min_pairwise_distance: float
    admissible: bool
    worst_pair: Optional[tuple]
    n: int = 0
    radius: float = 0.0
    tol: float = ADMISSIBILITY_TOL

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "radius": self.radius,
            "tol": self.tol,
            "max_norm": self.max_norm,
            "min_pairwise_distance": (
                "inf" if math.isinf(self.min_pairwise_distance) else self.min_pairwise_distance
            ),
            "admissible": self.admissible,
            "worst_pair": list(self.worst_pair) if self.worst_pair is not None else None,
        }


def validate(config: PointConfig, tol: float = ADMISSIBILITY_TOL) -> ValidationReport:
    """Check that every point lies within ``radius + tol`` and every distinct
    pair is at distance at least ``1 - tol``.

    With fewer than two points the pair condition holds vacuously and
    ``min_pairwise_distance`` is ``inf``.
    """
    n = config.n
    if n == 0:
        return ValidationReport(0.0, INF, True, None, 0, config.radius, tol)
    x = trim(config.as_array())
    max_norm = float(_norms_rows(x, config.p).max())
    min_dist, worst = INF, None
    if n >= 2:
        dists = pairwise_distances(x, config.p)
        k = int(np.argmin(dists))
        min_dist = float(dists[k])
        worst = _condensed_pair(k, n)
    admissible = max_norm <= config.radius + tol and min_dist >= 1 - tol
    return ValidationReport(max_norm, min_dist, bool(admissible), worst, n, config.radius, tol)


def _condensed_pair(k: int, n: int) -> tuple:
    i = 0
    while k >= n - 1 - i:
        k -= n - 1 - i
        i += 1
    return (i, i + 1 + k)
