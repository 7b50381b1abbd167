"""Samplers for correlated spiked Wigner and Wishart pairs and their nulls.

Randomness is split with ``SeedSequence.spawn`` into a spike stream and a
noise stream, so the null and planted samplers draw identical noise for the
same seed.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError
from .prior import PriorSpec, SpikePair, sample_spikes


@dataclass(frozen=True)
class ModelParams:
    lam: float
    mu: float
    rho: float
    n: int
    N: Optional[int] = None

    def __post_init__(self):
        if self.lam < 0 or self.mu < 0:
            raise ParameterError("lambda and mu must be nonnegative")
        if not 0.0 <= self.rho <= 1.0:
            raise ParameterError("rho must lie in [0, 1]")
        if self.n < 1 or (self.N is not None and self.N < 1):
            raise ParameterError("dimensions must be positive")

    @property
    def gamma(self) -> float:
        if self.N is None:
            return 1.0
        return self.n / self.N


@dataclass(frozen=True)
class WignerPair:
    X: np.ndarray
    Y: np.ndarray
    spikes: Optional[SpikePair] = None

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclass(frozen=True)
class WishartPair:
    X: np.ndarray
    Y: np.ndarray
    spikes: Optional[SpikePair] = None
    u: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def N(self) -> int:
        return self.X.shape[1]


def _streams(seed):
    spike_ss, noise_ss = np.random.SeedSequence(seed).spawn(2)
    return spike_ss, np.random.default_rng(noise_ss)


def _wigner_noise(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n))
    w = g + g.T
    w *= 1.0 / math.sqrt(2.0)
    return w


def sample_wigner_pair(params: ModelParams, spec: PriorSpec, seed, *,
                       spikes: Optional[SpikePair] = None,
                       noise_scale: float = 1.0) -> WignerPair:
    """X = (lam/sqrt n) x x^T + W and Y = (mu/sqrt n) y y^T + Z.

    ``spikes`` and ``noise_scale`` are test hooks: the first fixes (x, y),
    the second scales (or with 0, removes) the noise.
    """
    n = params.n
    if n < 2:
        raise ParameterError("Wigner pair needs n >= 2")
    spike_ss, rng = _streams(seed)
    if spikes is None:
        spikes = sample_spikes(spec, n, spike_ss)
    elif spikes.n != n:
        raise ParameterError("spike length does not match n")
    W = _wigner_noise(rng, n)
    Z = _wigner_noise(rng, n)
    x, y = spikes.x, spikes.y
    X = noise_scale * W + (params.lam / math.sqrt(n)) * np.outer(x, x)
    Y = noise_scale * Z + (params.mu / math.sqrt(n)) * np.outer(y, y)
    return WignerPair(X, Y, spikes)


def sample_null_wigner(n: int, seed) -> WignerPair:
    if n < 2:
        raise ParameterError("Wigner pair needs n >= 2")
    _, rng = _streams(seed)
    W = _wigner_noise(rng, n)
    Z = _wigner_noise(rng, n)
    return WignerPair(W, Z, None)


def sample_wishart_pair(params: ModelParams, spec: PriorSpec, seed, *,
                        spikes: Optional[SpikePair] = None,
                        noise_scale: float = 1.0) -> WishartPair:
    """X = sqrt(lam/n) x u^T + W and Y = sqrt(mu/n) y v^T + Z (n x N)."""
    n, N = params.n, params.N
    if N is None or n < 2 or N < 2:
        raise ParameterError("Wishart pair needs n, N >= 2")
    spike_ss, rng = _streams(seed)
    prior_ss, factor_ss = spike_ss.spawn(2)
    if spikes is None:
        spikes = sample_spikes(spec, n, prior_ss)
    elif spikes.n != n:
        raise ParameterError("spike length does not match n")
    frng = np.random.default_rng(factor_ss)
    u = frng.standard_normal(N)
    v = frng.standard_normal(N)
    W = rng.standard_normal((n, N))
    Z = rng.standard_normal((n, N))
    X = noise_scale * W + math.sqrt(params.lam / n) * np.outer(spikes.x, u)
    Y = noise_scale * Z + math.sqrt(params.mu / n) * np.outer(spikes.y, v)
    return WishartPair(X, Y, spikes, u, v)


def sample_null_wishart(n: int, N: int, seed) -> WishartPair:
    if n < 2 or N < 2:
        raise ParameterError("Wishart pair needs n, N >= 2")
    _, rng = _streams(seed)
    W = rng.standard_normal((n, N))
    Z = rng.standard_normal((n, N))
    return WishartPair(W, Z)


def sample_modified_wigner_pair(params: ModelParams, spec: PriorSpec, seed, *,
                                spikes: Optional[SpikePair] = None,
                                noise_scale: float = 1.0) -> WignerPair:
    """Asymmetric variant with i.i.d. noise and spike scale lam/sqrt(2n)."""
    n = params.n
    spike_ss, rng = _streams(seed)
    if spikes is None:
        spikes = sample_spikes(spec, n, spike_ss)
    W = rng.standard_normal((n, n))
    Z = rng.standard_normal((n, n))
    c = 1.0 / math.sqrt(2.0 * n)
    X = noise_scale * W + params.lam * c * np.outer(spikes.x, spikes.x)
    Y = noise_scale * Z + params.mu * c * np.outer(spikes.y, spikes.y)
    return WignerPair(X, Y, spikes)


# binary dump: magic, version, n, N, dtype tag, then X and Y as <f8 row-major
_MAGIC = b"CSPK"
_HEADER = struct.Struct("<4sIQQ8s")


def dump_pair(path, X: np.ndarray, Y: np.ndarray) -> None:
    if X.shape != Y.shape or X.ndim != 2:
        raise ParameterError("X and Y must be matrices of equal shape")
    n, N = X.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, 1, n, N, b"float64\0"))
        fh.write(np.ascontiguousarray(X, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(Y, dtype="<f8").tobytes())


def load_pair(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, n, N, dtype = _HEADER.unpack_from(raw)
    if magic != _MAGIC or version != 1 or dtype.rstrip(b"\0") != b"float64":
        raise ParameterError("not a matrix-pair dump")
    off = _HEADER.size
    size = n * N * 8
    if len(raw) != off + 2 * size:
        raise ParameterError("truncated matrix-pair dump")
    X = np.frombuffer(raw, dtype="<f8", count=n * N, offset=off).reshape(n, N)
    Y = np.frombuffer(raw, dtype="<f8", count=n * N, offset=off + size).reshape(n, N)
    return X.astype(np.float64), Y.astype(np.float64)
