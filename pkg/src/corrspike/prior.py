"""Correlated priors for the spike pair (x, y).

Each coordinate pair (x_i, y_i) is drawn independently from a two-point-mass
law ``pi_star`` with centred, unit-variance marginals and correlation
``rho_eff``. Three couplings are supported: correlated Gaussian, correlated
Rademacher and sparse Rademacher.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UnsupportedMomentError


class PriorKind(str, enum.Enum):
    GAUSSIAN = "CorrelatedGaussian"
    RADEMACHER = "CorrelatedRademacher"
    SPARSE = "SparseRademacher"


class RhoMode(str, enum.Enum):
    LINEAR = "Linear"
    SQUARED = "Squared"


@dataclass(frozen=True)
class PriorSpec:
    kind: PriorKind = PriorKind.RADEMACHER
    rho: float = 0.0
    p: float = 1.0
    rho_mode: RhoMode = RhoMode.LINEAR

    def __post_init__(self):
        object.__setattr__(self, "kind", PriorKind(self.kind))
        object.__setattr__(self, "rho_mode", RhoMode(self.rho_mode))
        if not (0.0 <= self.rho <= 1.0) or math.isnan(self.rho):
            raise ParameterError(f"rho must lie in [0, 1], got {self.rho}")
        if self.kind is PriorKind.SPARSE and not (0.0 < self.p <= 1.0):
            raise ParameterError(f"sparsity p must lie in (0, 1], got {self.p}")

    @property
    def rho_eff(self) -> float:
        """Target value of E[XY]."""
        return self.rho if self.rho_mode is RhoMode.LINEAR else self.rho**2

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "rho": self.rho, "p": self.p,
                "rho_mode": self.rho_mode.value}

    @classmethod
    def from_dict(cls, d: dict) -> "PriorSpec":
        unknown = set(d) - {"kind", "rho", "p", "rho_mode"}
        if unknown:
            raise ParameterError(f"unknown prior keys: {sorted(unknown)}")
        try:
            return cls(kind=PriorKind(d.get("kind", PriorKind.RADEMACHER)),
                       rho=float(d.get("rho", 0.0)),
                       p=float(d.get("p", 1.0)),
                       rho_mode=RhoMode(d.get("rho_mode", RhoMode.LINEAR)))
        except ValueError as exc:
            if isinstance(exc, ParameterError):
                raise
            raise ParameterError(str(exc)) from exc


@dataclass(frozen=True)
class SpikePair:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ParameterError("x and y must be vectors of equal length")

    @property
    def n(self) -> int:
        return self.x.shape[0]


def _rademacher_pair(rng: np.random.Generator, n: int, r: float):
    x = rng.choice(np.array([-1.0, 1.0]), size=n)
    flip = rng.random(n) >= (1.0 + r) / 2.0
    y = np.where(flip, -x, x)
    return x, y


def sample_spikes(spec: PriorSpec, n: int, seed) -> SpikePair:
    """Draw ``n`` i.i.d. coordinate pairs from the prior."""
    if n < 1:
        raise ParameterError("n must be positive")
    rng = np.random.default_rng(seed)
    r = spec.rho_eff
    if spec.kind is PriorKind.GAUSSIAN:
        x = rng.standard_normal(n)
        z = rng.standard_normal(n)
        y = r * x + math.sqrt(max(0.0, 1.0 - r * r)) * z
    elif spec.kind is PriorKind.RADEMACHER:
        x, y = _rademacher_pair(rng, n, r)
    else:
        x, y = _rademacher_pair(rng, n, r)
        b = (rng.random(n) < spec.p) / math.sqrt(spec.p)
        x, y = b * x, b * y
    return SpikePair(x, y)


def _gauss_moment(k: int) -> float:
    # E[Z^k] for a standard normal: (k-1)!! for even k, zero otherwise
    if k % 2:
        return 0.0
    return float(math.prod(range(k - 1, 0, -2)))


def _rademacher_moment(a: int, b: int, r: float) -> float:
    if (a + b) % 2:
        return 0.0
    return r if b % 2 else 1.0


def prior_moments(spec: PriorSpec, a: int, b: int) -> float:
    """Exact E[X^a Y^b] under ``spec``."""
    if a < 0 or b < 0 or a + b > 8:
        raise UnsupportedMomentError(f"moment order ({a}, {b}) not supported")
    r = spec.rho_eff
    if spec.kind is PriorKind.RADEMACHER:
        return _rademacher_moment(a, b, r)
    if spec.kind is PriorKind.SPARSE:
        if a + b == 0:
            return 1.0
        return spec.p ** (1 - (a + b) / 2) * _rademacher_moment(a, b, r)
    s = math.sqrt(max(0.0, 1.0 - r * r))
    total = 0.0
    for j in range(b + 1):
        total += (math.comb(b, j) * r**j * s ** (b - j)
                  * _gauss_moment(a + j) * _gauss_moment(b - j))
    return total


def discrete_support(spec: PriorSpec):
    """Atoms and probabilities of the coordinate law, or None if continuous.

    Returns ``(xs, ys, probs)`` with ``P(X = xs[i], Y = ys[i]) = probs[i]``.
    """
    r = spec.rho_eff
    same, opp = (1.0 + r) / 4.0, (1.0 - r) / 4.0
    if spec.kind is PriorKind.RADEMACHER:
        return (np.array([1.0, -1.0, 1.0, -1.0]), np.array([1.0, -1.0, -1.0, 1.0]),
                np.array([same, same, opp, opp]))
    if spec.kind is PriorKind.SPARSE:
        s = 1.0 / math.sqrt(spec.p)
        p = spec.p
        return (np.array([s, -s, s, -s, 0.0]), np.array([s, -s, -s, s, 0.0]),
                np.array([p * same, p * same, p * opp, p * opp, 1.0 - p]))
    return None
