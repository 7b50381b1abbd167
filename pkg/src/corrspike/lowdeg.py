"""Monte Carlo evaluation of low-degree advantage bounds.

Both bounds are expectations over two independent replicas (x, y) and
(x', y') of the spike prior of a function of the overlaps <x, x'> and
<y, y'>. For discrete priors the overlaps are sums of n i.i.d. atoms of
the product law, so a multinomial draw of atom counts samples them exactly
in O(#atoms) per replicate, independent of n.
"""
from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from ._parallel import task_seed
from .errors import ParameterError
from .prior import PriorKind, PriorSpec, RhoMode, discrete_support

LOG_SPACE_ABOVE = 10**6
_CHUNK = 20_000


@dataclass(frozen=True)
class AdvEstimate:
    value: float
    std_error: float
    D: int
    reps: int
    n: int


def exp_trunc(x, D: int):
    """sum_{k<=D} x^k / k!, elementwise."""
    if D < 0:
        raise ParameterError("D must be nonnegative")
    x = np.asarray(x, float)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, D + 1):
        term = term * x / k
        total = total + term
    return total if total.ndim else float(total)


# ------------------------------------------------------------ overlaps

def _product_law(spec: PriorSpec):
    xs, ys, ps = discrete_support(spec)
    a = np.multiply.outer(xs, xs).ravel()
    b = np.multiply.outer(ys, ys).ravel()
    p = np.multiply.outer(ps, ps).ravel()
    # merge equal atoms so the multinomial stays small
    table = {}
    for ai, bi, pi in zip(a, b, p):
        key = (round(float(ai), 12), round(float(bi), 12))
        table[key] = table.get(key, 0.0) + float(pi)
    keys = sorted(table)
    probs = np.array([table[k] for k in keys])
    return (np.array([k[0] for k in keys]), np.array([k[1] for k in keys]),
            probs / probs.sum())


def sample_overlaps(spec: PriorSpec, n: int, reps: int, seed):
    """``reps`` draws of (<x, x'>, <y, y'>) for two independent replicas."""
    if n < 1 or reps < 1:
        raise ParameterError("n and reps must be positive")
    rng = np.random.default_rng(seed)
    law = discrete_support(spec)
    if law is not None:
        a, b, p = _product_law(spec)
        counts = rng.multinomial(n, p, size=reps).astype(float)
        return counts @ a, counts @ b
    r = spec.rho_eff
    s = math.sqrt(max(0.0, 1.0 - r * r))
    ox, oy = np.empty(reps), np.empty(reps)
    step = max(1, _CHUNK * 50 // n)
    for lo in range(0, reps, step):
        m = min(step, reps - lo)
        x, x2 = rng.standard_normal((m, n)), rng.standard_normal((m, n))
        y = r * x + s * rng.standard_normal((m, n))
        y2 = r * x2 + s * rng.standard_normal((m, n))
        ox[lo:lo + m] = np.einsum("ij,ij->i", x, x2)
        oy[lo:lo + m] = np.einsum("ij,ij->i", y, y2)
    return ox, oy


def _estimate(vals, D, n):
    vals = np.asarray(vals, float)
    reps = vals.size
    se = float(vals.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    return AdvEstimate(float(vals.mean()), se, D, reps, n)


def adv_wigner_mc(spec: PriorSpec, lam, mu, n: int, D: int, reps: int = 10**5,
                  seed=0) -> AdvEstimate:
    """E exp_{<=D}((lam^2 <x,x'>^2 + mu^2 <y,y'>^2) / (2n))."""
    if D < 0:
        raise ParameterError("D must be nonnegative")
    if reps < 1000:
        raise ParameterError("reps must be at least 1000")
    if (lam == 0 and mu == 0) or D == 0:
        return AdvEstimate(1.0, 0.0, D, reps, n)
    ox, oy = sample_overlaps(spec, n, reps, task_seed(seed, n, D))
    arg = (lam * lam * ox * ox + mu * mu * oy * oy) / (2.0 * n)
    return _estimate(exp_trunc(arg, D), D, n)


# ------------------------------------------------------------ phi_D

@dataclass(frozen=True)
class PhiCoefficients:
    N: int
    D: int
    c: np.ndarray
    log_c: np.ndarray


def phi_coefficients_dp(N: int, D: int):
    """Exact integers sum over compositions k_1+...+k_N = k of prod C(2k_i, k_i)."""
    base = [math.comb(2 * j, j) for j in range(D + 1)]
    out = [1] + [0] * D
    for _ in range(N):
        out = [sum(out[i] * base[k - i] for i in range(k + 1)) for k in range(D + 1)]
    return out


def phi_coefficients_closed(N: int, D: int):
    """Exact integers 2^k prod_{i<k} (N + 2i) / k!."""
    out = []
    for k in range(D + 1):
        num = 2**k * math.prod(N + 2 * i for i in range(k))
        q, rem = divmod(num, math.factorial(k))
        if rem:
            raise ArithmeticError("closed form is not an integer")
        out.append(q)
    return out


@functools.lru_cache(maxsize=1)
def phi_identity_verified(max_N: int = 8, max_k: int = 6) -> bool:
    return all(phi_coefficients_dp(N, max_k) == phi_coefficients_closed(N, max_k)
               for N in range(1, max_N + 1))


def phi_coefficients(N: int, D: int) -> PhiCoefficients:
    if N < 1 or not 0 <= D <= 30:
        raise ParameterError("need N >= 1 and 0 <= D <= 30")
    k = np.arange(D + 1)
    if phi_identity_verified():
        # log c_k = k log 4 + sum_{i<k} log(N/2 + i) - log k!
        # direct log sums: a gammaln difference cancels badly at large N
        steps = np.log(N / 2.0 + np.arange(D, dtype=float))
        log_c = k * math.log(4.0) + np.concatenate([[0.0], np.cumsum(steps)]) - gammaln(k + 1.0)
        if N * D <= LOG_SPACE_ABOVE:
            c = np.array([float(v) for v in phi_coefficients_closed(N, D)])
            log_c = np.log(c)
        else:
            c = np.exp(log_c)
    else:
        ints = phi_coefficients_dp(N, D)
        c = np.array([float(v) for v in ints])
        log_c = np.array([math.log(v) for v in ints])
    return PhiCoefficients(N, D, c, log_c)


def log_phi(coef: PhiCoefficients, t) -> np.ndarray:
    """log phi_D(t) for t >= 0 (all terms positive, so logsumexp is exact)."""
    t = np.atleast_1d(np.asarray(t, float))
    out = np.zeros_like(t)
    pos = t > 0
    if np.any(pos):
        k = np.arange(coef.D + 1)
        terms = coef.log_c[None, :] + k[None, :] * np.log(t[pos])[:, None]
        out[pos] = logsumexp(terms, axis=1)
    return out


def adv_wishart_mc(spec: PriorSpec, lam, mu, n: int, N: int, D: int, reps: int = 10**5,
                   seed=0) -> AdvEstimate:
    """E phi_D(lam^2 <x,x'>^2 / (4n^2)) * phi_D(mu^2 <y,y'>^2 / (4n^2))."""
    if D < 0:
        raise ParameterError("D must be nonnegative")
    if reps < 1000:
        raise ParameterError("reps must be at least 1000")
    if (lam == 0 and mu == 0) or D == 0:
        return AdvEstimate(1.0, 0.0, D, reps, n)
    coef = phi_coefficients(N, D)
    ox, oy = sample_overlaps(spec, n, reps, task_seed(seed, n, N, D))
    s = 4.0 * n * n
    logs = log_phi(coef, lam * lam * ox * ox / s) + log_phi(coef, mu * mu * oy * oy / s)
    return _estimate(np.exp(logs), D, n)


def coefficient_ratio(N: int, D: int) -> np.ndarray:
    """c_k k! / (2^k N^k): how far the coefficients sit above 2^k N^k / k!."""
    coef = phi_coefficients(N, D)
    k = np.arange(D + 1)
    return np.exp(coef.log_c + gammaln(k + 1.0) - k * math.log(2.0 * N))


def default_spec(rho: float) -> PriorSpec:
    return PriorSpec(PriorKind.RADEMACHER, rho, rho_mode=RhoMode.SQUARED)


def write_csv(path, rows) -> None:
    """rows: iterables of (n, D, lambda, mu, rho, estimate, stderr)."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["n", "D", "lambda", "mu", "rho", "estimate", "stderr"])
        for r in rows:
            wr.writerow([r[0], r[1]] + [repr(float(v)) for v in r[2:]])
