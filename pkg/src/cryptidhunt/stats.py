"""Group summaries and two-group comparisons.

The default test is the pooled-variance two-sample Student t with
df = n1 + n2 - 2 and pooled-sd Cohen's d; Welch's correction is
available behind a flag.  Two-tailed p comes from the regularized
incomplete beta evaluated by a continued fraction (Lentz), so the
module has no dependency beyond math -- every number here is checkable
by hand or by quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSummary:
    group: str
    n: int
    mean: float
    sample_sd: float
    median: float
    pass_count: int
    pass_rate: float


@dataclass(frozen=True)
class GroupComparison:
    t_statistic: float
    degrees_of_freedom: float
    p_two_tailed: float
    cohens_d: float
    mean_a: float
    mean_b: float


def _mean(xs):
    return sum(xs) / len(xs)


def _sample_var(xs):
    n = len(xs)
    if n < 2:
        return 0.0
    m = _mean(xs)
    return sum((x - m) ** 2 for x in xs) / (n - 1)


def _median(xs):
    ordered = sorted(xs)
    n = len(ordered)
    mid = n // 2
    if n % 2:
        return float(ordered[mid])
    return (ordered[mid - 1] + ordered[mid]) / 2.0


def group_summary(scores, threshold: float = 1.0, group: str = "") -> GroupSummary:
    """Mean / sample sd (n-1) / median / pass-at-threshold for one group."""
    scores = [float(s) for s in scores]
    if not scores:
        raise StatsError("group summary needs at least one score")
    passes = sum(1 for s in scores if s >= threshold)
    return GroupSummary(
        group=group,
        n=len(scores),
        mean=_mean(scores),
        sample_sd=math.sqrt(_sample_var(scores)),
        median=_median(scores),
        pass_count=passes,
        pass_rate=passes / len(scores),
    )


# -- regularized incomplete beta ------------------------------------------------

_BETA_EPS = 1e-15
_BETA_TINY = 1e-300
_BETA_MAX_ITER = 500


def _betacf(a, b, x):
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_TINY:
        d = _BETA_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise StatsError(f"incomplete beta failed to converge for a={a}, b={b}, x={x}")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), accurate to ~1e-14."""
    if a <= 0 or b <= 0:
        raise StatsError("betainc requires a, b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def p_from_t(t: float, df: float) -> float:
    """Two-tailed tail probability of Student's t."""
    if df < 1:
        raise StatsError("p_from_t needs df >= 1")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return betainc(df / 2.0, 0.5, x)


# -- two-sample comparisons -----------------------------------------------------

def t_from_summary(mean1, sd1, n1, mean2, sd2, n2, welch: bool = False) -> GroupComparison:
    """Two-sample t from published summary statistics."""
    if n1 < 2 or n2 < 2:
        raise StatsError("both groups need n >= 2")
    if sd1 < 0 or sd2 < 0:
        raise StatsError("standard deviations must be >= 0")
    var1, var2 = sd1 * sd1, sd2 * sd2
    diff = mean1 - mean2
    pooled_var = ((n1 - 1) * var1 + (n2 - 1) * var2) / (n1 + n2 - 2)
    if pooled_var == 0.0:
        if diff == 0.0:
            return GroupComparison(0.0, float(n1 + n2 - 2), 1.0, 0.0, mean1, mean2)
        raise StatsError("degenerate variance: zero spread with unequal means")
    pooled_sd = math.sqrt(pooled_var)
    d = diff / pooled_sd
    if welch:
        se2_1, se2_2 = var1 / n1, var2 / n2
        se = math.sqrt(se2_1 + se2_2)
        df = (se2_1 + se2_2) ** 2 / (
            se2_1**2 / (n1 - 1) + se2_2**2 / (n2 - 1)
        )
        t = diff / se
    else:
        df = float(n1 + n2 - 2)
        t = diff / (pooled_sd * math.sqrt(1.0 / n1 + 1.0 / n2))
    return GroupComparison(t, df, p_from_t(t, df), d, mean1, mean2)


def pooled_t(g1, g2, welch: bool = False) -> GroupComparison:
    """Two-sample t on raw scores; pooled-variance Student by default."""
    g1 = [float(x) for x in g1]
    g2 = [float(x) for x in g2]
    if len(g1) < 2 or len(g2) < 2:
        raise StatsError("both groups need n >= 2")
    return t_from_summary(
        _mean(g1), math.sqrt(_sample_var(g1)), len(g1),
        _mean(g2), math.sqrt(_sample_var(g2)), len(g2),
        welch=welch,
    )
