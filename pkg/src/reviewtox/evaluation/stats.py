"""Student t tests with a self-contained t distribution.

The two-sided tail probability uses the regularized incomplete beta function::

    P(|T| >= t) = I_x(df/2, 1/2),   x = df / (df + t^2)

evaluated by the modified Lentz continued fraction.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

_EPS = 1e-15
_TINY = 1e-300


class TTestResult(NamedTuple):
    t: float
    p: float
    df: int


def _betacf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c, d = 1.0, 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > _TINY else _TINY)
    h = d
    for m in range(1, 10_000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta ``I_x(a, b)`` for ``a, b > 0``."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    lbt = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(lbt) * _betacf(a, b, x) / a
    return 1.0 - math.exp(lbt) * _betacf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: float) -> float:
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0
    return min(1.0, betainc(0.5 * df, 0.5, df / (df + t * t)))


def t_cdf(t: float, df: float) -> float:
    tail = 0.5 * t_sf_two_sided(t, df)
    return 1.0 - tail if t >= 0 else tail


def one_sample_t_test(samples: Sequence[float], mu0: float = 0.0) -> TTestResult:
    """Two-sided test of ``mean(samples) == mu0``.

    With zero sample variance t is undefined (nan); p is 1 when every sample
    equals ``mu0`` and 0 otherwise.
    """
    xs = [float(v) for v in samples]
    n = len(xs)
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    mean = math.fsum(xs) / n
    diff = mean - mu0
    var = math.fsum((v - mean) ** 2 for v in xs) / (n - 1)
    if var == 0.0:
        p = 1.0 if all(v == mu0 for v in xs) else 0.0
        return TTestResult(math.nan, p, n - 1)
    t = diff / math.sqrt(var / n)
    return TTestResult(t, t_sf_two_sided(t, n - 1), n - 1)


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-sided paired test on ``a[i] - b[i]``; t > 0 means ``a`` is larger."""
    if len(a) != len(b):
        raise ValueError(f"paired samples differ in length: {len(a)} vs {len(b)}")
    return one_sample_t_test([float(x) - float(y) for x, y in zip(a, b)], 0.0)
