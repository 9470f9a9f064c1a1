"""Penalty search for n unit-separated points in the radius-R ball of l_p^d.

A success is a certificate: the returned configuration passes
:func:`lppack.lp_core.validate`. A failure is only evidence that no such
configuration exists; local search can miss feasible regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .lp_core import (
    LARGE_P,
    ExponentLike,
    InvalidInputError,
    PointConfig,
    _norms_rows,
    abs_pow,
    as_exponent,
    pad_stack,
    validate,
)

REPORT_TOL = 1e-6
#: The descent works on constraints tightened by this much (distance >= 1 + m,
#: norm <= R - m), so iterates that meet penalty_tol there are strictly feasible.
MARGIN = 1e-5
FD_STEP = 1e-7
MIN_STEP = 1e-12
#: Restarts are run this many at a time; the search stops after the first
#: batch containing a success and reports the lowest successful index.
BATCH = 10
POLISH_ITERS = 200


@dataclass(frozen=True)
class SearchParams:
    p: float
    d: int
    n: int
    radius: float
    restarts: int = 20
    max_steps: int = 2000
    seed: int = 0
    penalty_tol: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "p", as_exponent(self.p))
        for name, low in (("d", 1), ("n", 1), ("restarts", 1), ("max_steps", 1)):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < low:
                raise InvalidInputError(f"need integer {name} >= {low}, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not math.isfinite(self.radius) or self.radius < 0:
            raise InvalidInputError(f"radius must be finite and >= 0, got {self.radius}")
        if not self.penalty_tol > 0:
            raise InvalidInputError("penalty_tol must be positive")
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass
class SearchReport:
    success: bool
    config: Optional[PointConfig]
    final_penalty: float
    restarts_used: int
    steps_total: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "config": self.config.to_dict() if self.config is not None else None,
            "final_penalty": self.final_penalty,
            "restarts_used": self.restarts_used,
            "steps_total": self.steps_total,
            "seed": self.seed,
        }


def penalty(points, p: ExponentLike, radius: float) -> float:
    """Sum of squared violations of the unit-distance and radius constraints."""
    p = as_exponent(p)
    if len(points) == 0:
        return 0.0
    x = pad_stack(points)
    return float(_penalty_batch(x[None], p, float(radius))[0])


def _penalty_batch(X, p, radius, target=1.0):
    n = X.shape[1]
    norms = _norms_rows(X, p)
    total = (np.maximum(0.0, norms - radius) ** 2).sum(axis=1)
    if n >= 2:
        i, j = np.triu_indices(n, k=1)
        dist = _norms_rows(X[:, i] - X[:, j], p)
        total = total + (np.maximum(0.0, target - dist) ** 2).sum(axis=1)
    return total


def _perturbed_row_norms(rows, p, h):
    """Norms of every row after shifting coordinate k by +h and by -h.

    ``rows`` has shape (..., d); returns two arrays of shape (..., d) whose
    entry k is the norm with coordinate k moved.
    """
    a = np.abs(rows)
    if math.isinf(p):
        d = a.shape[-1]
        order = np.argsort(-a, axis=-1, kind="stable")
        first = np.take_along_axis(a, order[..., :1], axis=-1)
        second = np.take_along_axis(a, order[..., 1:2], axis=-1) if d > 1 else np.zeros_like(first)
        rest = np.broadcast_to(first, a.shape).copy()
        np.put_along_axis(rest, order[..., :1], second, axis=-1)
        return np.maximum(rest, np.abs(rows + h)), np.maximum(rest, np.abs(rows - h))
    scale = a.max(axis=-1, keepdims=True) + h if p > LARGE_P else 1.0
    base = abs_pow(a / scale, p)
    total = base.sum(axis=-1, keepdims=True)
    out = []
    for s in (h, -h):
        moved = np.maximum(total - base + abs_pow((rows + s) / scale, p), 0.0)
        out.append(scale * moved ** (1.0 / p))
    return out[0], out[1]


def _penalty_gradient(X, p, radius, target=1.0, h=FD_STEP):
    """Central finite differences of the penalty, coordinate by coordinate.

    Moving x_ik only changes the norm of point i and its distances to the
    other points, so each perturbed penalty is a local correction.
    """
    n = X.shape[1]
    np_plus, np_minus = _perturbed_row_norms(X, p, h)
    g = (
        np.maximum(0.0, np_plus - radius) ** 2 - np.maximum(0.0, np_minus - radius) ** 2
    )
    if n >= 2:
        D = X[:, :, None, :] - X[:, None, :, :]  # (B, i, j, k)
        dp, dm = _perturbed_row_norms(D, p, h)  # (B, i, j, k)
        off = ~np.eye(n, dtype=bool)[None, :, :, None]
        terms_p = np.maximum(0.0, target - dp) ** 2
        terms_m = np.maximum(0.0, target - dm) ** 2
        g = g + np.where(off, terms_p - terms_m, 0.0).sum(axis=2)
    return g / (2 * h)


def _sample_ball(rng, n, d, p, radius):
    """n points uniform in the l_p ball of radius ``radius``.

    Coordinates are drawn with density proportional to exp(-|t|^p) and an
    independent Exp(1) variable z is appended; x / (|x|_p^p + z)^(1/p) is
    then uniform in the unit ball (Barthe, Guedon, Mendelson, Naor).
    """
    if math.isinf(p):
        return rng.uniform(-radius, radius, size=(n, d))
    mag = rng.gamma(1.0 / p, 1.0, size=(n, d)) ** (1.0 / p)
    x = np.where(rng.random((n, d)) < 0.5, -mag, mag)
    z = rng.exponential(1.0, size=(n, 1))
    return radius * x / (abs_pow(x, p).sum(axis=1, keepdims=True) + z) ** (1.0 / p)


def _descend(X, params: SearchParams):
    """Finite-difference descent with per-restart step halving, batched over restarts.

    Returns the final points, their (untightened) penalties and step counts.
    """
    p, tol = params.p, params.penalty_tol
    R, target = max(params.radius - MARGIN, 0.0), 1.0 + MARGIN
    B = len(X)
    f = _penalty_batch(X, p, R, target)
    step = np.full(B, max(params.radius, 0.5) * 0.25)
    steps = np.zeros(B, dtype=int)
    active = f > tol
    for _ in range(params.max_steps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        W = X[idx]
        g = _penalty_gradient(W, p, R, target)
        gn = np.sqrt((g * g).sum(axis=(1, 2)))
        flat = gn == 0
        gn = np.where(flat, 1.0, gn)
        cand = W - (step[idx] / gn)[:, None, None] * g
        fc = _penalty_batch(cand, p, R, target)
        steps[idx] += 1
        better = (fc < f[idx]) & ~flat
        acc = idx[better]
        X[acc] = cand[better]
        f[acc] = fc[better]
        step[acc] *= 1.5
        step[idx[~better]] /= 2
        done = flat | (step[idx] < MIN_STEP) | (f[idx] <= tol)
        active[idx[done]] = False
    return X, _penalty_batch(X, p, params.radius), steps


def _polish(x, params: SearchParams):
    """L-BFGS on the tightened penalty with the same finite-difference gradient.

    Descent with a normalized step crawls along degenerate valleys (e.g. two
    points that must become exactly antipodal); quasi-Newton steps do not.
    """
    p, shape = params.p, x.shape
    R, target = max(params.radius - MARGIN, 0.0), 1.0 + MARGIN

    def fun(z):
        return float(_penalty_batch(z.reshape((1,) + shape), p, R, target)[0])

    def jac(z):
        return _penalty_gradient(z.reshape((1,) + shape), p, R, target).ravel()

    res = minimize(
        fun, x.ravel(), jac=jac, method="L-BFGS-B",
        options={"maxiter": POLISH_ITERS, "ftol": 0.0, "gtol": 1e-14},
    )
    z = res.x.reshape(shape)
    true = float(_penalty_batch(z[None], p, params.radius)[0])
    return z, true, int(res.nit)


def _project(points, p, radius):
    norms = _norms_rows(points, p)
    factor = np.where(norms > radius, radius / np.where(norms > 0, norms, 1.0), 1.0)
    return points * factor[:, None]


def search(params: SearchParams) -> SearchReport:
    """Multi-start penalty minimization.

    Restarts run in batches of ``BATCH``: batched finite-difference descent,
    then an L-BFGS polish for restarts still above ``penalty_tol``. The first
    restart (by index) whose penalty meets the tolerance is projected into
    the ball, re-validated and returned, so the report depends only on
    ``params``.
    """
    best_f, steps_total = math.inf, 0
    for start in range(0, params.restarts, BATCH):
        idx = range(start, min(params.restarts, start + BATCH))
        X = np.stack(
            [
                _sample_ball(np.random.default_rng([params.seed, r]), params.n, params.d, params.p, params.radius)
                for r in idx
            ]
        )
        X, f, steps = _descend(X, params)
        for k, r in enumerate(idx):
            steps_total += int(steps[k])
            x, fk = X[k], float(f[k])
            if fk > params.penalty_tol:
                polished, fp, nit = _polish(x, params)
                steps_total += nit
                if fp < fk:
                    x, fk = polished, fp
            best_f = min(best_f, fk)
            if fk <= params.penalty_tol:
                pts = _project(x, params.p, params.radius)
                config = PointConfig(params.p, params.radius, list(pts))
                if validate(config, tol=REPORT_TOL).admissible:
                    return SearchReport(True, config, fk, r + 1, steps_total, params.seed)
    return SearchReport(False, None, best_f, params.restarts, steps_total, params.seed)


def empirical_N(
    p: ExponentLike,
    d: int,
    radius: float,
    n_cap: int,
    params: Optional[SearchParams] = None,
    failure_streak: int = 1,
) -> int:
    """Largest n <= n_cap found by :func:`search`, scanning n = 1, 2, ...

    Stops after ``failure_streak`` consecutive failures. ``params`` supplies
    restarts, max_steps, seed and penalty_tol; its p, d, n and radius are
    overridden. A single point always fits, so the result is at least 1.
    """
    if isinstance(n_cap, bool) or int(n_cap) != n_cap or n_cap < 1:
        raise InvalidInputError(f"need n_cap >= 1, got {n_cap!r}")
    base = params or SearchParams(p=p, d=d, n=1, radius=radius)
    base = replace(base, p=as_exponent(p), d=d, radius=float(radius))
    best, misses = 1, 0
    for n in range(2, int(n_cap) + 1):
        if search(replace(base, n=n)).success:
            best, misses = n, 0
        else:
            misses += 1
            if misses >= failure_streak:
                break
    return best
