"""Explicit unit-separated configurations on the critical sphere of l_p.

Two families:

* scaled basis vectors 2^(-1/p) e_i, with norm 2^(-1/p);
* scaled rows of a Sylvester-Hadamard matrix, a_i / (2 h^(1/p)) with
  n = 2h = 2^r, with norm 2^(1/p - 1).

In both every pair is at distance exactly 1. The certificates prove this by
counting differing positions in the integer pattern before any scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lp_core import ExponentLike, InvalidInputError, PointConfig, as_exponent, exponent_to_json

#: Largest Sylvester order exponent built by default (2^14 x 2^14 int8 = 256 MiB).
MAX_SYLVESTER_R = 14

BASIS = "basis"
HADAMARD = "hadamard"


class ResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class HadamardMatrix:
    order: int
    entries: np.ndarray  # int8, values in {-1, +1}

    def row_disagreements(self) -> np.ndarray:
        """Number of positions where rows i and j differ, as an integer matrix."""
        bits = np.packbits(self.entries < 0, axis=1)
        pad = (-bits.shape[1]) % 8
        if pad:
            bits = np.pad(bits, ((0, 0), (0, pad)))
        words = bits.view(np.uint64)
        out = np.empty((self.order, self.order), dtype=np.int64)
        for i in range(self.order):
            out[i] = np.bitwise_count(words ^ words[i]).sum(axis=1)
        return out

    def is_orthogonal(self) -> bool:
        """Distinct rows agree in exactly half their positions (dot product 0)."""
        if self.order == 1:
            return True
        dis = self.row_disagreements()
        off = ~np.eye(self.order, dtype=bool)
        return bool(np.all(dis[off] == self.order // 2))


def _check_int(name: str, value, low: int) -> int:
    if isinstance(value, bool) or int(value) != value or value < low:
        raise InvalidInputError(f"need integer {name} >= {low}, got {value!r}")
    return int(value)


def sylvester_hadamard(r: int, max_r: int = MAX_SYLVESTER_R) -> HadamardMatrix:
    """Order-2^r Hadamard matrix by repeated doubling [[H, H], [H, -H]]."""
    r = _check_int("r", r, 0)
    if r > max_r:
        raise ResourceError(f"order 2^{r} exceeds the cap 2^{max_r}")
    H = np.ones((1, 1), dtype=np.int8)
    for _ in range(r):
        H = np.block([[H, H], [H, -H]])
    return HadamardMatrix(1 << r, H)


@dataclass(frozen=True)
class Certificate:
    kind: str
    p: float
    n: int
    claimed_norm: float
    claimed_pairwise_distance: float = 1.0
    exact: bool = False
    differing_positions: int | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "p": exponent_to_json(self.p),
            "n": self.n,
            "claimed_norm": self.claimed_norm,
            "claimed_pairwise_distance": self.claimed_pairwise_distance,
            "exact": self.exact,
            "differing_positions": self.differing_positions,
        }


def _finite_p(p: ExponentLike) -> float:
    p = as_exponent(p)
    if math.isinf(p):
        raise InvalidInputError("constructions need a finite exponent")
    return p


def basis_config(p: ExponentLike, n: int) -> tuple[PointConfig, Certificate]:
    """n scaled unit vectors 2^(-1/p) e_i in the ball of radius 2^(-1/p)."""
    p = _finite_p(p)
    n = _check_int("n", n, 1)
    scale = 2.0 ** (-1.0 / p)
    pattern = np.eye(n, dtype=np.int8)
    # Each difference e_i - e_j has exactly two nonzero entries of size one,
    # so its norm is scale * 2^(1/p) = 1.
    support = np.count_nonzero(pattern[:, None, :] != pattern[None, :, :], axis=2)
    off = ~np.eye(n, dtype=bool)
    exact = bool(np.all(support[off] == 2))
    config = PointConfig(p, scale, list(scale * pattern.astype(float)))
    cert = Certificate(BASIS, p, n, scale, 1.0, exact, 2)
    return config, cert


def hadamard_config(p: ExponentLike, r: int) -> tuple[PointConfig, Certificate]:
    """The 2^r rows of a Sylvester matrix scaled by 1 / (2 h^(1/p)), h = 2^(r-1).

    Rows differ in exactly h positions, each by 2, so scaled differences
    have h entries of size h^(-1/p) and norm 1.
    """
    p = _finite_p(p)
    r = _check_int("r", r, 1)
    H = sylvester_hadamard(r)
    h = H.order // 2
    scale = 1.0 / (2.0 * h ** (1.0 / p))
    dis = H.row_disagreements()
    off = ~np.eye(H.order, dtype=bool)
    exact = bool(np.all(dis[off] == h))
    norm = 2.0 ** (1.0 / p - 1.0)
    config = PointConfig(p, norm, list(scale * H.entries.astype(float)))
    cert = Certificate(HADAMARD, p, H.order, norm, 1.0, exact, h)
    return config, cert
