"""Spectral comparators: top eigenpairs, BBP predictions, PLS and CCA."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ParameterError


@dataclass(frozen=True)
class SpectralResult:
    top_value: float
    top_vector: np.ndarray
    iterations: int
    residual: float


def _ritz_step(A, v, w):
    """Best Ritz pair (by |theta|) of A on span{v, w}; v is a unit vector."""
    q = w - (v @ w) * v
    nq = np.linalg.norm(q)
    if nq <= 1e-14 * max(1.0, np.linalg.norm(w)):
        theta = float(v @ w)
        return theta, v
    q /= nq
    Aq = A @ q
    T = np.array([[v @ w, v @ Aq], [q @ w, q @ Aq]])
    T = 0.5 * (T + T.T)
    vals, vecs = np.linalg.eigh(T)
    j = int(np.argmax(np.abs(vals)))
    u = vecs[0, j] * v + vecs[1, j] * q
    return float(vals[j]), u / np.linalg.norm(u)


def top_eigpair_sym(A, tol: float = 1e-8, max_iter: int = 20000, seed=0,
                    method: str = "power", largest: str = "magnitude") -> SpectralResult:
    """Dominant eigenpair of a symmetric matrix.

    ``method="power"`` runs power iteration where every step also solves the
    2x2 Rayleigh-Ritz problem on span{v, Av}; this settles the +theta/-theta
    tie that stalls plain power iteration. ``method="lanczos"`` defers to
    ARPACK. ``largest="algebraic"`` targets the largest eigenvalue instead of
    the largest in magnitude (via a Gershgorin shift for the power method).
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ParameterError("A must be square")
    if largest not in ("magnitude", "algebraic"):
        raise ParameterError(f"unknown target {largest!r}")
    if n == 1:
        return SpectralResult(float(A[0, 0]), np.ones(1), 0, 0.0)
    if method == "lanczos":
        from scipy.sparse.linalg import eigsh

        rng = np.random.default_rng(seed)
        which = "LA" if largest == "algebraic" else "LM"
        vals, vecs = eigsh(A, k=1, which=which, tol=0.0, v0=rng.standard_normal(n))
        v = vecs[:, 0]
        res = float(np.linalg.norm(A @ v - vals[0] * v))
        return SpectralResult(float(vals[0]), v, 0, res)
    if method != "power":
        raise ParameterError(f"unknown method {method!r}")

    shift = 0.0
    B = A
    if largest == "algebraic":
        shift = float(np.max(np.sum(np.abs(A), axis=1)))
        B = A + shift * np.eye(n)
    rng = np.random.default_rng(seed)
    v = np.ones(n) / math.sqrt(n) + 0.1 * rng.standard_normal(n) / math.sqrt(n)
    v /= np.linalg.norm(v)
    scale = max(1.0, float(np.max(np.abs(A))))
    best = None
    for it in range(1, max_iter + 1):
        w = B @ v
        theta, v = _ritz_step(B, v, w)
        r = float(np.linalg.norm(B @ v - theta * v))
        if best is None or r < best.residual:
            best = SpectralResult(theta - shift, v.copy(), it, r)
        if r <= tol * scale:
            return best
    raise ConvergenceError(f"power iteration stalled at residual {best.residual:.3e}", best)


def bbp_wigner_predict(lam: float) -> float:
    if lam <= 0:
        return 2.0
    return lam + 1.0 / lam if lam > 1.0 else 2.0


def bbp_wishart_predict(lam: float, gamma: float):
    """(bulk edge, spike location) of the top eigenvalue of X X^T / N."""
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    bulk = (1.0 + math.sqrt(gamma)) ** 2
    if lam > 0 and lam * lam > gamma:
        return bulk, (1.0 + lam) * (1.0 + gamma / lam)
    return bulk, bulk


def pls_stat(X, Y, **kw) -> SpectralResult:
    """Top singular value and left vector of the cross-covariance X Y^T."""
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    if X.shape[1] != Y.shape[1]:
        raise ParameterError("X and Y need the same number of columns")
    S = X @ Y.T
    res = top_eigpair_sym(S @ S.T, **kw)
    val = math.sqrt(max(res.top_value, 0.0))
    return SpectralResult(val, res.top_vector, res.iterations, res.residual)


def _pls_poly(lam, mu, rho):
    l2, m2, r2 = lam * lam, mu * mu, rho * rho
    # coefficients, highest degree first
    return [l2 * m2, l2 * m2 - l2 - m2, 1.0 - r2 * l2 * m2 - l2 - m2, 1.0]


def pls_threshold(lam, mu, rho, upper: float = 1e3) -> float:
    """Largest real root in [0, upper] of the PLS cubic, +inf if none."""
    coeffs = _pls_poly(lam, mu, rho)
    p = np.poly1d(coeffs)
    roots = []
    try:
        for z in np.roots(coeffs):
            if abs(z.imag) <= 1e-6 * max(1.0, abs(z.real)) and -1e-9 <= z.real <= upper:
                roots.append(max(z.real, 0.0))
    except np.linalg.LinAlgError:
        roots = []
    if not roots:
        roots = _bracket_roots(p, upper)
    if not roots:
        return math.inf
    return _polish(p, max(roots))


def _bracket_roots(p, upper, pts=20001):
    xs = np.linspace(0.0, upper, pts)
    ys = p(xs)
    out = []
    for i in np.nonzero(np.sign(ys[:-1]) * np.sign(ys[1:]) <= 0)[0]:
        lo, hi = xs[i], xs[i + 1]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if np.sign(p(mid)) == np.sign(p(lo)):
                lo = mid
            else:
                hi = mid
        out.append(0.5 * (lo + hi))
    return out


def _polish(p, x):
    dp = p.deriv()
    for _ in range(3):
        d = dp(x)
        if d == 0:
            break
        step = p(x) / d
        if not math.isfinite(step) or abs(step) > 1e-3 * max(1.0, abs(x)):
            break
        x -= step
    return float(x)


def cca_value(lam, mu, rho, gamma) -> float:
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    l2, m2 = lam * lam, mu * mu
    return l2 * m2 * rho**2 * (1.0 / gamma - 1.0) / ((l2 + 1.0) * (m2 + 1.0))


def cca_condition(lam, mu, rho, gamma) -> bool:
    return cca_value(lam, mu, rho, gamma) > 1.0


def _inv_sqrt(G, floor=1e-10):
    vals, vecs = np.linalg.eigh(G)
    if vals[0] < floor:
        raise ParameterError(f"singular Gram matrix (min eigenvalue {vals[0]:.2e})")
    return (vecs / np.sqrt(vals)) @ vecs.T


def cca_stat(X, Y) -> SpectralResult:
    """Top singular value of (X X^T)^{-1/2} (Y X^T) (Y Y^T)^{-1/2}."""
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    n, N = X.shape
    if Y.shape != X.shape:
        raise ParameterError("X and Y must have equal shape")
    if n > N:
        raise ParameterError("CCA needs n <= N")
    M = _inv_sqrt(Y @ Y.T) @ (Y @ X.T) @ _inv_sqrt(X @ X.T)
    K = M @ M.T
    vals, vecs = np.linalg.eigh(0.5 * (K + K.T))
    v = vecs[:, -1]
    res = float(np.linalg.norm(K @ v - vals[-1] * v))
    return SpectralResult(math.sqrt(max(vals[-1], 0.0)), v, 1, res)
