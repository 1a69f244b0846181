"""Sample summaries: k-statistics, jackknife errors, Kolmogorov-Smirnov distance."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats as sps

__all__ = ["EmpiricalSummary", "empirical_cumulants", "kstats", "ks_critical", "within_se"]

MIN_SAMPLES = 8


def _kstats_from_sums(n, s1, s2, s3, s4):
    """Unbiased k-statistics 1..4 from power sums (arrays broadcast)."""
    k1 = s1 / n
    k2 = (n * s2 - s1**2) / (n * (n - 1))
    k3 = (2 * s1**3 - 3 * n * s1 * s2 + n**2 * s3) / (n * (n - 1) * (n - 2))
    k4 = (-6 * s1**4 + 12 * n * s1**2 * s2 - 3 * n * (n - 1) * s2**2
          - 4 * n * (n + 1) * s1 * s3 + n**2 * (n + 1) * s4) / (n * (n - 1) * (n - 2) * (n - 3))
    return k1, k2, k3, k4


def kstats(values: Sequence[float]) -> tuple[float, float, float, float]:
    """k-statistics of orders 1..4 (values centred first to limit cancellation)."""
    x = np.asarray(values, dtype=float)
    c = float(np.mean(x))
    y = x - c
    sums = [np.sum(y**p) for p in range(1, 5)]
    k1, k2, k3, k4 = _kstats_from_sums(len(y), *sums)
    return float(k1 + c), float(k2), float(k3), float(k4)


def _jackknife_se(values: np.ndarray) -> tuple[float, ...]:
    n = len(values)
    c = float(np.mean(values))
    y = values - c
    pw = [y**p for p in range(1, 5)]
    sums = [np.sum(p) for p in pw]
    loo = _kstats_from_sums(n - 1, *[s - p for s, p in zip(sums, pw)])
    out = []
    for est in loo:
        est = np.asarray(est, dtype=float)
        out.append(float(math.sqrt((n - 1) / n * np.sum((est - est.mean()) ** 2))))
    return tuple(out)


def ks_critical(n: int, alpha: float = 0.01) -> float:
    """Asymptotic one-sample KS critical value; ``1.63 / sqrt(n)`` at 1%."""
    c = {0.01: 1.63, 0.05: 1.36, 0.1: 1.22}.get(alpha)
    if c is None:
        c = math.sqrt(-0.5 * math.log(alpha / 2))
    return c / math.sqrt(n)


def within_se(estimate: float, target: float, se: float, k: float) -> bool:
    """``|estimate - target| <= k se``."""
    return abs(estimate - target) <= k * se


@dataclass
class EmpiricalSummary:
    """k-statistics and diagnostics of a sample of statistic values.

    When ``mean``/``variance`` are given the KS distance is taken after
    standardising with them (theory values); otherwise with the sample's own.
    """

    values: np.ndarray
    mean: Optional[float] = None
    variance: Optional[float] = None
    n: int = field(init=False)
    k: tuple = field(init=False)
    se: tuple = field(init=False)
    ks_distance: float = field(init=False)
    ks_pvalue: float = field(init=False)
    degenerate: bool = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or len(v) < MIN_SAMPLES:
            raise ValueError(f"need a 1-d sample of at least {MIN_SAMPLES} values")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite sample value")
        self.values = v
        self.n = len(v)
        self.degenerate = bool(np.ptp(v) == 0.0)
        if self.degenerate:
            self.k = (float(v[0]), 0.0, 0.0, 0.0)
            self.se = (0.0, 0.0, 0.0, 0.0)
            self.ks_distance = math.nan
            self.ks_pvalue = math.nan
            return
        self.k = kstats(v)
        self.se = _jackknife_se(v)
        mu = self.k[0] if self.mean is None else float(self.mean)
        var = self.k[1] if self.variance is None else float(self.variance)
        if not var > 0:
            raise ValueError("standardising variance must be positive")
        res = sps.kstest((v - mu) / math.sqrt(var), "norm")
        self.ks_distance = float(res.statistic)
        self.ks_pvalue = float(res.pvalue)

    def k_stat(self, order: int) -> float:
        return self.k[order - 1]

    def k_se(self, order: int) -> float:
        return self.se[order - 1]

    def to_dict(self, include_values: bool = False) -> dict:
        d = {
            "n_samples": self.n,
            "k1": self.k[0], "k2": self.k[1], "k3": self.k[2], "k4": self.k[3],
            "se_k1": self.se[0], "se_k2": self.se[1], "se_k3": self.se[2], "se_k4": self.se[3],
            "ks_distance": None if math.isnan(self.ks_distance) else self.ks_distance,
            "ks_pvalue": None if math.isnan(self.ks_pvalue) else self.ks_pvalue,
            "ks_critical_1pct": ks_critical(self.n),
            "degenerate": self.degenerate,
            "standardized_with": "theory" if self.mean is not None or self.variance is not None else "sample",
        }
        if include_values:
            d["values"] = [float(x) for x in self.values]
        return d

    def to_json(self, include_values: bool = False) -> str:
        return json.dumps(self.to_dict(include_values), sort_keys=True)


def empirical_cumulants(values: Sequence[float], mean: Optional[float] = None,
                        variance: Optional[float] = None) -> EmpiricalSummary:
    """:class:`EmpiricalSummary` of ``values`` (``N >= 8``)."""
    return EmpiricalSummary(np.asarray(values, dtype=float), mean=mean, variance=variance)
