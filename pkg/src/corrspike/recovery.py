"""Pivot-row recovery scores and the truncated spike estimate.

For a pivot w the score of v aggregates weighted decorated paths with
leaves {w, v}. Scores are scaled so that their conditional mean given the
spike is close to x_w x_v, hence x_hat_v = score_v (up to truncation)
estimates x_v up to the global sign x_w.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import counting
from ._parallel import ordered_map, pairwise_sum, task_seed
from .errors import ParameterError
from .graphfam import Family, beta, class_weight, enumerate_family


class PivotMode(str, enum.Enum):
    FIXED = "FixedIndex"
    MAX_ROW_ENERGY = "MaxRowEnergy"


@dataclass(frozen=True)
class RecoverConfig:
    ell: int = 4
    t: Optional[int] = None
    R: float = 3.0
    pivot_mode: PivotMode = PivotMode.FIXED
    pivot: int = 0
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "pivot_mode", PivotMode(self.pivot_mode))
        if self.R <= 0:
            raise ParameterError("R must be positive")
        if self.t is not None and self.t < 1:
            raise ParameterError("t must be at least 1")
        if self.ell < 1 or self.threads < 1:
            raise ParameterError("ell and threads must be positive")

    @property
    def cutoff(self) -> float:
        return float(self.R) ** 4


@dataclass(frozen=True)
class ScoreRow:
    pivot: int
    scores: np.ndarray
    normalizer: float
    t: int
    kappa: float


def _colorings(n_vertices, k, cfg, n_a=None, colorings=None):
    if colorings is not None:
        cols = list(colorings)
        if not cols:
            raise ParameterError("empty coloring list")
        return cols
    t = cfg.t if cfg.t is not None else counting.default_colorings(k)
    return [counting.random_coloring(n_vertices, k, task_seed(cfg.seed, j), n_a) for j in range(t)]


def _wigner_row(X, Y, lam, mu, rho, cfg, w, cols):
    ell = cfg.ell
    vals = ordered_map(
        lambda col: counting.weighted_path_row(X, Y, ell, lam, mu, rho, col, w), cols, cfg.threads)
    return pairwise_sum(vals)


def _wishart_row(X, Y, lam, mu, rho, cfg, w, cols):
    ell = cfg.ell
    vals = ordered_map(
        lambda col: counting.weighted_bipartite_path_row(X, Y, ell, lam, mu, rho, col, w),
        cols, cfg.threads)
    return pairwise_sum(vals)


def _pick_pivot(n, cfg, row_fn):
    if cfg.pivot_mode is PivotMode.FIXED:
        if not 0 <= cfg.pivot < n:
            raise ParameterError(f"pivot {cfg.pivot} out of range")
        return cfg.pivot, row_fn(cfg.pivot)
    best = None
    for w in range(n):
        row = row_fn(w)
        e = float(row @ row)
        if best is None or e > best[0]:
            best = (e, w, row)
    return best[1], best[2]


def recovery_scores_wigner(pair, lam, mu, rho, cfg: RecoverConfig = RecoverConfig(),
                           colorings: Optional[Sequence] = None) -> ScoreRow:
    X, Y = np.asarray(pair.X, float), np.asarray(pair.Y, float)
    n, ell = X.shape[0], cfg.ell
    if n < ell + 2:
        raise ParameterError("need n >= ell + 2")
    k = ell + 1
    cols = _colorings(n, k, cfg, colorings=colorings)
    kappa = counting.colorful_probability(k)
    b = beta(Family.J, ell, lam, mu, rho)
    # each leaf-pinned copy is met from both orientations: mean 2 * b * n^(ell/2-1)
    denom = 2.0 * b * n ** (ell / 2.0 - 1.0) * len(cols) * kappa
    w, raw = _pick_pivot(n, cfg, lambda u: _wigner_row(X, Y, lam, mu, rho, cfg, u, cols))
    scores = raw / denom if b > 0 else np.zeros(n)
    return ScoreRow(w, scores, b, len(cols), kappa)


def recovery_scores_wishart(pair, lam, mu, rho, cfg: RecoverConfig = RecoverConfig(ell=3),
                            colorings: Optional[Sequence] = None) -> ScoreRow:
    X, Y = np.asarray(pair.X, float), np.asarray(pair.Y, float)
    n, N = X.shape
    ell = cfg.ell
    if n < ell + 1 or N < ell + 1:
        raise ParameterError("need n, N >= ell + 1")
    k = 2 * ell + 1
    cols = _colorings(n + N, k, cfg, n_a=n, colorings=colorings)
    kappa = counting.colorful_probability(k)
    b = beta(Family.I, ell, lam, mu, rho)
    log_denom = math.log(2.0 * b) + ell * math.log(N) - math.log(n) if b > 0 else None
    w, raw = _pick_pivot(n, cfg, lambda u: _wishart_row(X, Y, lam, mu, rho, cfg, u, cols))
    if log_denom is None:
        scores = np.zeros(n)
    else:
        scores = raw * math.exp(-log_denom) / (len(cols) * kappa)
    return ScoreRow(w, scores, b, len(cols), kappa)


def _exact_row(X, Y, ell, lam, mu, rho, w, tag):
    n = X.shape[0]
    fam = enumerate_family(tag, ell)
    row = np.zeros(n)
    for v in range(n):
        if v == w:
            continue
        row[v] = math.fsum(class_weight(c, lam, mu, rho)
                           * counting.brute_force_sum(X, Y, c, endpoints=(w, v)) for c in fam)
    return row


def exact_scores_wigner(X, Y, ell, lam, mu, rho, w) -> np.ndarray:
    """Uncolored pivot row by exhaustive enumeration (tiny n only)."""
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    n = X.shape[0]
    b = beta(Family.J, ell, lam, mu, rho)
    return _exact_row(X, Y, ell, lam, mu, rho, w, Family.J) / (2.0 * b * n ** (ell / 2.0 - 1.0))


def exact_scores_wishart(X, Y, ell, lam, mu, rho, w) -> np.ndarray:
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    n, N = X.shape
    b = beta(Family.I, ell, lam, mu, rho)
    return _exact_row(X, Y, ell, lam, mu, rho, w, Family.I) / (2.0 * b * N**ell / n)


def assemble_estimate(row: Union[ScoreRow, np.ndarray], cfg: RecoverConfig = RecoverConfig()) -> np.ndarray:
    """Scores with entries above R^4 in magnitude zeroed."""
    s = np.asarray(row.scores if isinstance(row, ScoreRow) else row, float)
    return np.where(np.abs(s) <= cfg.cutoff, s, 0.0)


def overlap(x_hat, x) -> float:
    x_hat, x = np.asarray(x_hat, float), np.asarray(x, float)
    a, b = np.linalg.norm(x_hat), np.linalg.norm(x)
    if a == 0 or b == 0:
        return 0.0
    return float(min(1.0, abs(x_hat @ x) / (a * b)))


def conditional_products(row: ScoreRow, x) -> np.ndarray:
    """score_v * x_w * x_v for v != w."""
    x = np.asarray(x, float)
    prod = row.scores * x * x[row.pivot]
    return np.delete(prod, row.pivot)


def write_row_csv(path, row: ScoreRow, cfg: RecoverConfig = RecoverConfig(), x=None) -> None:
    est = assemble_estimate(row, cfg)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["v", "score", "truncated", "x_v", "product"])
        for v, s in enumerate(row.scores):
            xv = "" if x is None else repr(float(x[v]))
            prod = "" if x is None else repr(float(s * x[v] * x[row.pivot]))
            wr.writerow([v, repr(float(s)), int(est[v] == 0 and s != 0), xv, prod])
