"""Color-coded detection statistics for the Wigner and Wishart pairs.

The Wigner statistic sums, over decorated cycle classes of length ell, the
class weight times the number of copies in (X, Y), estimated by averaging
colorful counts over t random colorings and rescaling by 1/r. The Wishart
statistic does the same over bipartite cycles with 2*ell vertices.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import counting
from ._parallel import ordered_map, pairwise_sum, task_seed
from .errors import ParameterError
from .graphfam import Family, beta, class_weight, enumerate_family


class ThresholdMode(str, enum.Enum):
    ANALYTIC = "Analytic"
    EMPIRICAL_NULL = "EmpiricalNull"


@dataclass(frozen=True)
class DetectConfig:
    """``t=None`` picks min(ceil(1/r), 500) colorings."""
    ell: int = 5
    t: Optional[int] = None
    c: float = 0.5
    threshold_mode: ThresholdMode = ThresholdMode.ANALYTIC
    quantile: float = 0.95
    null_reps: int = 200
    seed: int = 0
    threads: int = 1
    per_class: bool = False

    def __post_init__(self):
        object.__setattr__(self, "threshold_mode", ThresholdMode(self.threshold_mode))
        if not 0.0 < self.c < 1.0:
            raise ParameterError("c must lie in (0, 1)")
        if self.t is not None and self.t < 1:
            raise ParameterError("t must be at least 1")
        if self.ell < 2:
            raise ParameterError("ell must be at least 2")
        if not 0.0 < self.quantile < 1.0:
            raise ParameterError("quantile must lie in (0, 1)")
        if self.null_reps < 1 or self.threads < 1:
            raise ParameterError("null_reps and threads must be positive")


@dataclass(frozen=True)
class ClassTerm:
    word: str
    aut: int
    raw_sum: float
    weight: float


@dataclass
class StatisticReport:
    value: float
    normalizer: float
    mean_P_analytic: float
    ell: int
    t: int
    r: float
    model: str
    per_class: list = field(default_factory=list)
    decision: Optional[bool] = None

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in
             ("value", "normalizer", "mean_P_analytic", "ell", "t", "r", "model", "decision")}
        d["per_class"] = [vars(c) for c in self.per_class]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def coloring_seeds(cfg_seed: int, t: int):
    return [task_seed(cfg_seed, k) for k in range(t)]


def _colorings(n_vertices, k, cfg, n_a=None, colorings=None):
    if colorings is not None:
        cols = list(colorings)
        if not cols:
            raise ParameterError("empty coloring list")
        return cols
    t = cfg.t if cfg.t is not None else counting.default_colorings(k)
    return [counting.random_coloring(n_vertices, k, s, n_a) for s in coloring_seeds(cfg.seed, t)]


def _per_class(X, Y, tag, ell, lam, mu, rho, cols, scale, threads):
    fam = enumerate_family(tag, ell)
    dp = counting.dp_cycle_sum if tag is Family.H else counting.dp_bipartite_cycle_sum
    out = []
    for cls in fam:
        vals = ordered_map(lambda col, cls=cls: dp(X, Y, cls, col), cols, threads)
        out.append(ClassTerm(cls.word, cls.aut, scale * pairwise_sum(vals),
                             class_weight(cls, lam, mu, rho)))
    return out


def detect_stat_wigner(pair, lam, mu, rho, cfg: DetectConfig = DetectConfig(),
                       colorings: Optional[Sequence] = None) -> StatisticReport:
    """Color-coded cycle statistic, normalized to unit null variance.

    ``colorings`` overrides the seeded draw (e.g. every coloring, which makes
    the estimate exact).
    """
    X, Y = np.asarray(pair.X, float), np.asarray(pair.Y, float)
    n, ell = X.shape[0], cfg.ell
    if ell < 3:
        raise ParameterError("cycles need ell >= 3")
    if n < ell:
        raise ParameterError("need n >= ell")
    cols = _colorings(n, ell, cfg, colorings=colorings)
    r = counting.colorful_probability(ell)
    b = beta(Family.H, ell, lam, mu, rho)
    vals = ordered_map(
        lambda col: counting.weighted_cycle_sum(X, Y, ell, lam, mu, rho, col), cols, cfg.threads)
    scale = 1.0 / (len(cols) * r)
    norm = 1.0 / math.sqrt(n**ell * b) if b > 0 else 0.0
    value = norm * scale * pairwise_sum(vals)
    per = (_per_class(X, Y, Family.H, ell, lam, mu, rho, cols, scale, cfg.threads)
           if cfg.per_class else [])
    return StatisticReport(float(value), b, math.sqrt(b), ell, len(cols), r, "Wigner", per)


def detect_stat_wishart(pair, lam, mu, rho, cfg: DetectConfig = DetectConfig(ell=3),
                        colorings: Optional[Sequence] = None) -> StatisticReport:
    """Bipartite analogue with palette 2*ell over [n] and [N] jointly."""
    X, Y = np.asarray(pair.X, float), np.asarray(pair.Y, float)
    n, N = X.shape
    ell = cfg.ell
    if n < ell or N < ell:
        raise ParameterError("need n, N >= ell")
    k = 2 * ell
    cols = _colorings(n + N, k, cfg, n_a=n, colorings=colorings)
    r = counting.colorful_probability(k)
    b = beta(Family.G, ell, lam, mu, rho)
    vals = ordered_map(
        lambda col: counting.weighted_bipartite_cycle_sum(X, Y, ell, lam, mu, rho, col),
        cols, cfg.threads)
    scale = 1.0 / (len(cols) * r)
    # n^ell * N^ell computed in log space: both can be large at ell ~ 5
    norm = math.exp(-0.5 * (ell * math.log(n) + ell * math.log(N) + math.log(b))) if b > 0 else 0.0
    value = norm * scale * pairwise_sum(vals)
    gamma = n / N
    per = (_per_class(X, Y, Family.G, ell, lam, mu, rho, cols, scale, cfg.threads)
           if cfg.per_class else [])
    return StatisticReport(float(value), b, math.sqrt(gamma ** (-ell) * b), ell, len(cols), r,
                           "Wishart", per)


def exact_stat_wigner(X, Y, ell, lam, mu, rho) -> float:
    """The uncolored statistic by exhaustive enumeration (tiny n only)."""
    b = beta(Family.H, ell, lam, mu, rho)
    n = np.asarray(X).shape[0]
    terms = [class_weight(c, lam, mu, rho) * counting.brute_force_sum(X, Y, c)
             for c in enumerate_family(Family.H, ell)]
    return math.fsum(terms) / math.sqrt(n**ell * b)


def exact_stat_wishart(X, Y, ell, lam, mu, rho) -> float:
    b = beta(Family.G, ell, lam, mu, rho)
    n, N = np.asarray(X).shape
    terms = [class_weight(c, lam, mu, rho) * counting.brute_force_sum(X, Y, c)
             for c in enumerate_family(Family.G, ell)]
    return math.fsum(terms) / math.sqrt(n**ell * N**ell * b)


def threshold(report: StatisticReport, cfg: DetectConfig, null_calibration=None) -> float:
    if cfg.threshold_mode is ThresholdMode.ANALYTIC:
        if not math.isfinite(report.mean_P_analytic):
            raise ParameterError("analytic threshold needs a finite planted mean")
        return cfg.c * report.mean_P_analytic
    if null_calibration is None or len(null_calibration) == 0:
        raise ParameterError("EmpiricalNull mode needs calibration samples")
    return float(np.quantile(np.asarray(null_calibration, float), cfg.quantile))


def decide(report: StatisticReport, cfg: DetectConfig, null_calibration=None) -> bool:
    """True (planted) when the statistic reaches the threshold."""
    report.decision = bool(report.value >= threshold(report, cfg, null_calibration))
    return report.decision


def auc(pos, neg) -> float:
    """Mann-Whitney estimate of P(pos > neg) with ties counted half."""
    pos, neg = np.asarray(pos, float), np.asarray(neg, float)
    if pos.size == 0 or neg.size == 0:
        raise ParameterError("auc needs both samples")
    from scipy.stats import rankdata

    ranks = rankdata(np.concatenate([pos, neg]))
    u = ranks[: pos.size].sum() - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))
