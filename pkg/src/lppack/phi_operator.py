"""The pairwise-difference map (v_1, ..., v_n) -> (v_i - v_j)_{i<j}.

Both sides carry the aggregate l_q norm (l_q norm of the member norms).
Exact operator norms are known at q = 1, 2 and inf; in between, the
interpolation estimates give upper bounds and :func:`phi_norm_estimate`
searches for tuples that push the ratio up, giving certified lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lp_core import (
    ExponentLike,
    InvalidInputError,
    abs_pow,
    aggregate_norm,
    as_exponent,
    exponent_to_json,
    pad_stack,
)

#: Ascent stops for a restart once an accepted step gains less than this, relatively.
REL_IMPROVEMENT_STOP = 1e-10
MAX_ASCENT_STEPS = 500
MIN_STEP = 1e-12
FD_STEP = 1e-7


def _check_n(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidInputError(f"need n >= 2, got {n!r}")
    return int(n)


def apply_phi(vectors) -> list:
    """All differences ``v_i - v_j`` for i < j, in lexicographic (i, j) order."""
    _check_n(len(vectors))
    x = pad_stack(vectors)
    i, j = np.triu_indices(len(x), k=1)
    return list(x[i] - x[j])


def phi_norm_exact(p: ExponentLike, n: int) -> float | None:
    """n - 1 at p = 1, sqrt(n) at p = 2, 2 at p = inf; None elsewhere."""
    p = as_exponent(p)
    n = _check_n(n)
    if p == 1:
        return float(n - 1)
    if p == 2:
        return math.sqrt(n)
    if math.isinf(p):
        return 2.0
    return None


def phi_norm_upper(q: ExponentLike, n: int) -> float:
    """Upper bound on the operator norm at exponent q.

    For 1 < q < 2: (n^(q-1) (n-1)^(2-q))^(1/q), interpolating q = 1 and 2.
    For 2 < q < inf: (n 2^(q-2))^(1/q), interpolating q = 2 and inf.
    """
    q = as_exponent(q)
    n = _check_n(n)
    exact = phi_norm_exact(q, n)
    if exact is not None:
        return exact
    if q < 2:
        return math.exp(((q - 1) * math.log(n) + (2 - q) * math.log(n - 1)) / q)
    return math.exp((math.log(n) + (q - 2) * math.log(2.0)) / q)


def n2_identity_residual(vectors) -> float:
    """|sum_{i<j} |x_i - x_j|^2 - (n sum |x_i|^2 - |sum x_i|^2)| in the Euclidean norm."""
    n = _check_n(len(vectors))
    x = pad_stack(vectors)
    i, j = np.triu_indices(n, k=1)
    lhs = math.fsum(((x[i] - x[j]) ** 2).ravel())
    rhs = n * math.fsum((x**2).ravel()) - math.fsum(x.sum(axis=0) ** 2)
    return abs(lhs - rhs)


def phi_ratio(vectors, q: ExponentLike) -> float:
    """aggregate_norm(apply_phi(v)) / aggregate_norm(v); 0 for the zero tuple."""
    q = as_exponent(q)
    den = aggregate_norm(vectors, q)
    if den == 0:
        return 0.0
    return aggregate_norm(apply_phi(vectors), q) / den


@dataclass
class PhiNormReport:
    p: float
    n: int
    exact: float | None
    upper_bound: float
    numeric_lower_bound: float
    witness: list = field(repr=False)
    iterations: int
    seed: int
    d: int = 0
    restarts: int = 0

    def to_dict(self) -> dict:
        return {
            "p": exponent_to_json(self.p),
            "n": self.n,
            "d": self.d,
            "exact": self.exact,
            "upper_bound": self.upper_bound,
            "numeric_lower_bound": self.numeric_lower_bound,
            "witness": [[float(x) for x in v] for v in self.witness],
            "iterations": self.iterations,
            "restarts": self.restarts,
            "seed": self.seed,
        }


# Batched ascent. V has shape (B, n, d): B independent restarts.


def _rescale(V):
    """Scale every tuple so its largest coordinate or pair difference is 1.

    The ratio is scale-invariant; this keeps large exponents in range.
    """
    D = V[:, :, None, :] - V[:, None, :, :]
    m = np.maximum(np.abs(D).max(axis=(1, 2, 3)), np.abs(V).max(axis=(1, 2)))
    m = np.where(m > 0, m, 1.0)
    return V / m[:, None, None]


def _ratio_finite(V, q):
    D = V[:, :, None, :] - V[:, None, :, :]
    num = abs_pow(D, q).sum(axis=(1, 2, 3)) / 2
    den = abs_pow(V, q).sum(axis=(1, 2))
    return (num / den) ** (1.0 / q)


def _ratio_inf(V):
    D = V[:, :, None, :] - V[:, None, :, :]
    return np.abs(D).max(axis=(1, 2, 3)) / np.abs(V).max(axis=(1, 2))


def _grad_finite(V, q, h):
    """Central differences of the ratio, one coordinate at a time.

    Moving v_ik only touches the terms |v_ik|^q and |v_ik - v_jk|^q, so each
    perturbed power sum is the base sum plus a local correction.
    """
    B, n, d = V.shape
    D = V[:, :, None, :] - V[:, None, :, :]  # (B, i, j, k)
    A = abs_pow(D, q)
    num = A.sum(axis=(1, 2, 3)) / 2
    P = abs_pow(V, q)
    den = P.sum(axis=(1, 2))
    off = ~np.eye(n, dtype=bool)[None, :, :, None]
    out = []
    for s in (h, -h):
        dnum = np.where(off, abs_pow(D + s, q) - A, 0.0).sum(axis=2)  # (B, i, k)
        dden = abs_pow(V + s, q) - P
        out.append(((num[:, None, None] + dnum) / (den[:, None, None] + dden)) ** (1.0 / q))
    return (out[0] - out[1]) / (2 * h)


def _max_excluding_each(x, axis_len):
    """For x of shape (B, m), the max over all entries except entry t, for each t."""
    order = np.argsort(-x, axis=1, kind="stable")
    first = np.take_along_axis(x, order[:, :1], axis=1)
    second = np.take_along_axis(x, order[:, 1:2], axis=1) if axis_len > 1 else np.zeros_like(first)
    res = np.broadcast_to(first, x.shape).copy()
    np.put_along_axis(res, order[:, :1], second, axis=1)
    return res


def _grad_inf(V, h):
    B, n, d = V.shape
    D = V[:, :, None, :] - V[:, None, :, :]
    E = np.abs(D)
    eye = np.eye(n, dtype=bool)
    # Max of |D| over coordinates other than k.
    col = E.max(axis=(1, 2))  # (B, d)
    other_cols = _max_excluding_each(col, d)  # (B, d)
    # Max of |D[a, b, k]| over a, b both different from i.
    inner = np.empty((B, n, d))
    for i in range(n):
        keep = np.ones(n, dtype=bool)
        keep[i] = False
        sub = E[:, keep][:, :, keep]
        inner[:, i, :] = sub.max(axis=(1, 2)) if sub.size else 0.0
    rest_num = np.maximum(other_cols[:, None, :], inner)  # (B, i, k)
    absV = np.abs(V).reshape(B, n * d)
    rest_den = _max_excluding_each(absV, n * d).reshape(B, n, d)
    out = []
    for s in (h, -h):
        touched = np.where(eye[None, :, :, None], 0.0, np.abs(D + s)).max(axis=2)
        num = np.maximum(rest_num, touched)
        den = np.maximum(rest_den, np.abs(V + s))
        out.append(num / den)
    return (out[0] - out[1]) / (2 * h)


def _ascend(V, q, max_steps=MAX_ASCENT_STEPS):
    """Finite-difference ascent on the ratio, run for all restarts at once.

    Each restart keeps its own step length: doubled after an accepted step,
    halved after a rejected one. Returns final tuples, ratios and step counts.
    """
    inf = math.isinf(q)
    ratio = _ratio_inf if inf else (lambda W: _ratio_finite(W, q))
    grad = (lambda W: _grad_inf(W, FD_STEP)) if inf else (lambda W: _grad_finite(W, q, FD_STEP))

    V = _rescale(V)
    f = ratio(V)
    B = len(V)
    step = np.full(B, 0.1)
    steps = np.zeros(B, dtype=int)
    active = np.ones(B, dtype=bool)
    for _ in range(max_steps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        W = V[idx]
        g = grad(W)
        gn = np.sqrt((g * g).sum(axis=(1, 2)))
        flat = gn == 0
        gn = np.where(flat, 1.0, gn)
        cand = _rescale(W + (step[idx] / gn)[:, None, None] * g)
        fc = ratio(cand)
        steps[idx] += 1
        better = (fc > f[idx]) & ~flat
        gain = np.where(better, (fc - f[idx]) / np.maximum(f[idx], 1e-300), 0.0)
        acc = idx[better]
        V[acc] = cand[better]
        f[acc] = fc[better]
        step[acc] = np.minimum(step[acc] * 2, 1.0)
        step[idx[~better]] /= 2
        done = flat | (step[idx] < MIN_STEP) | (better & (gain < REL_IMPROVEMENT_STOP))
        active[idx[done]] = False
    return V, f, steps


def _initial_tuples(seed: int, restarts: int, n: int, d: int) -> np.ndarray:
    """One standard-normal start per restart, drawn from its own (seed, index) stream."""
    return np.stack(
        [np.random.default_rng([seed, r]).standard_normal((n, d)) for r in range(restarts)]
    )


def phi_norm_estimate(
    q: ExponentLike, n: int, d: int | None = None, seed: int = 0, budget: int = 200
) -> PhiNormReport:
    """Lower-bound the operator norm at exponent ``q`` by multi-start ascent.

    ``budget`` is the number of random restarts. The reported lower bound is
    the ratio of the best witness re-evaluated through :func:`phi_ratio`.
    """
    q = as_exponent(q)
    n = _check_n(n)
    d = n if d is None else d
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise InvalidInputError(f"need d >= 1, got {d!r}")
    if isinstance(budget, bool) or int(budget) != budget or budget < 1:
        raise InvalidInputError(f"need budget >= 1, got {budget!r}")
    d, budget, seed = int(d), int(budget), int(seed)

    V, f, steps = _ascend(_initial_tuples(seed, budget, n, d), q)
    best = int(np.argmax(f))
    witness = list(V[best])
    return PhiNormReport(
        p=q,
        n=n,
        exact=phi_norm_exact(q, n),
        upper_bound=phi_norm_upper(q, n),
        numeric_lower_bound=phi_ratio(witness, q),
        witness=witness,
        iterations=int(steps.sum()),
        seed=seed,
        d=d,
        restarts=budget,
    )
