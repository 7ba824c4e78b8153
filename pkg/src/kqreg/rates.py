"""Closed-form learning-rate exponents for additive-kernel quantile SVMs.

Everything here is exact arithmetic on the four regularity parameters

    r     in (0, 1/2]   source-condition smoothness of the target blocks
    beta  > 0           regularization schedule lambda_n = n^(-beta)
    theta in [0, 1]     variance-expectation (noise) exponent
    zeta  in (0, 2)     capacity exponent of the per-block unit balls

The excess risk of the fitted estimator decays as n^(-alpha + eps) where
alpha is the minimum of five competing terms (approximation, sample error,
and their trade-offs through the schedule).  The quantile-specific exponent
2(p+1)/(3(p+2)) arises from theta = p/(p+1), r = 1/2 and the schedule
beta = 4(p+1)/(3(p+2)) in the zeta -> 0 limit, which equalizes all five
terms.  ``p = math.inf`` is accepted everywhere and handled by substituting
the exact limit rather than a large number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "RateParams",
    "RateResult",
    "alpha_general",
    "alpha_quantile",
    "beta_quantile",
    "theta_from_p",
    "beta_es",
    "alpha_es",
    "alpha_es_theta",
    "alpha_sc2",
    "table1",
    "table2",
    "figure_curve",
    "TABLE2_R_GRID",
    "TABLE2_THETA_GRID",
    "TABLE2_ZETA_GRID",
]

TABLE2_R_GRID = (0.5, 0.25, 0.1)
TABLE2_THETA_GRID = (1.0, 0.5, 0.1)
TABLE2_ZETA_GRID = (0.1, 1.0, 1.9)


@dataclass(frozen=True)
class RateParams:
    """Validated (r, beta, theta, zeta) tuple."""

    r: float
    beta: float
    theta: float
    zeta: float

    def __post_init__(self):
        if not (0.0 < self.r <= 0.5):
            raise ValueError(f"r must lie in (0, 1/2], got {self.r}")
        if not (self.beta > 0.0):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not (0.0 <= self.theta <= 1.0):
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")
        if not (0.0 < self.zeta < 2.0):
            raise ValueError(f"zeta must lie in (0, 2), got {self.zeta}")


@dataclass(frozen=True)
class RateResult:
    """Minimum of the five exponent terms and which term is active."""

    value: float
    argmin_term: int  # 1-based index into terms
    terms: tuple[float, float, float, float, float]


def alpha_general(r, beta: float | None = None, theta: float | None = None,
                  zeta: float | None = None) -> RateResult:
    """Excess-risk exponent for schedule n^(-beta): min of five terms.

    Accepts either a :class:`RateParams` or the four scalars.
    """
    p = r if isinstance(r, RateParams) else RateParams(r, beta, theta, zeta)
    denom = 4.0 - 2.0 * p.theta + p.zeta * p.theta
    t1 = p.r * p.beta
    t2 = 0.5 + p.beta * (p.theta * (1.0 + p.r) / 4.0 - (1.0 - p.r) / 2.0)
    t3 = 4.0 / denom - p.beta
    t4 = 2.0 / denom - (1.0 - p.r) * p.beta / 2.0
    t5 = t4 - (p.beta * (1.0 + p.r) * (1.0 - p.theta / 2.0) - 1.0) / 4.0
    terms = (t1, t2, t3, t4, t5)
    idx = min(range(5), key=lambda i: terms[i])
    return RateResult(value=terms[idx], argmin_term=idx + 1, terms=terms)


def _check_p(pavg) -> float:
    p = float(pavg)
    if not (p > 0.0):
        raise ValueError(f"p must be positive (or inf), got {pavg}")
    return p


def alpha_quantile(pavg) -> float:
    """Quantile-regression exponent 2(p+1)/(3(p+2)); 2/3 at p = inf."""
    p = _check_p(pavg)
    if math.isinf(p):
        return 2.0 / 3.0
    return 2.0 * (p + 1.0) / (3.0 * (p + 2.0))


def beta_quantile(pavg) -> float:
    """Schedule exponent 4(p+1)/(3(p+2)) matching alpha_quantile; 4/3 at inf."""
    p = _check_p(pavg)
    if math.isinf(p):
        return 4.0 / 3.0
    return 4.0 * (p + 1.0) / (3.0 * (p + 2.0))


def theta_from_p(pavg, q: float) -> float:
    """Noise exponent min(2/q, p/(p+1)) for p-average type-q quantiles."""
    p = _check_p(pavg)
    if not (q > 1.0):
        raise ValueError(f"q must exceed 1, got {q}")
    frac = 1.0 if math.isinf(p) else p / (p + 1.0)
    return min(2.0 / q, frac)


def _check_single_kernel_args(d, alpha_smooth: float) -> int:
    d = int(d)
    if d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d}")
    if not (alpha_smooth >= 1.0):
        raise ValueError(f"smoothness must be >= 1, got {alpha_smooth}")
    return d


def beta_es(d, alpha_smooth: float, theta: float) -> float:
    """Single-Gaussian-kernel schedule exponent (2a+d)/(2a(2-theta)+d).

    Identically 1 at theta = 1 and tends to 1 as d grows.
    """
    d = _check_single_kernel_args(d, alpha_smooth)
    if not (0.0 <= theta <= 1.0):
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    return (2.0 * alpha_smooth + d) / (2.0 * alpha_smooth * (2.0 - theta) + d)


def alpha_es(d, alpha_smooth: float) -> float:
    """Single-kernel rate exponent 2a/(2a+d); vanishes as d grows."""
    d = _check_single_kernel_args(d, alpha_smooth)
    return 2.0 * alpha_smooth / (2.0 * alpha_smooth + d)


def alpha_es_theta(d, alpha_smooth: float, theta: float) -> float:
    """Noise-adjusted single-kernel exponent 2a/(2a(2-theta)+d)."""
    d = _check_single_kernel_args(d, alpha_smooth)
    if not (0.0 <= theta <= 1.0):
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    return 2.0 * alpha_smooth / (2.0 * alpha_smooth * (2.0 - theta) + d)


def alpha_sc2(pavg, r: float, xi: float) -> float:
    """Comparison exponent for the clipped single-kernel analysis.

    min{(p+1) r / ((p+2) r + (p+1-r) xi), 2r/(r+1)} with the eigenvalue-decay
    parameter xi in (0, 1).
    """
    p = _check_p(pavg)
    if not (0.0 < r <= 1.0):
        raise ValueError(f"r must lie in (0, 1], got {r}")
    if not (0.0 < xi < 1.0):
        raise ValueError(f"xi must lie in (0, 1), got {xi}")
    if math.isinf(p):
        first = r / (r + xi)
    else:
        first = (p + 1.0) * r / ((p + 2.0) * r + (p + 1.0 - r) * xi)
    return min(first, 2.0 * r / (r + 1.0))


def table1() -> list[dict]:
    """Limit exponents of the n^(-beta_ES) schedule as d grows (beta -> 1).

    Rows carry a tri-state ``kind``: 'value' rows have a closed-form limit,
    'zero' rows degenerate to 0, and 'positive' rows are the qualitative grid
    check that the limit stays positive whenever theta > 0 and zeta < 2.
    """
    r_grid = TABLE2_R_GRID
    rows: list[dict] = []
    for theta in (0.1, 0.5, 1.0):
        for zeta in (0.1, 1.0, 1.9):
            for r in r_grid:
                rows.append(
                    {"theta": theta, "zeta": zeta, "r": r, "kind": "positive",
                     "alpha": alpha_general(r, 1.0, theta, zeta).value}
                )
    closed_form = [
        (1.0, 1.0, lambda r: min(r, 1.0 / 3.0)),
        (1.0, 1.5, lambda r: min(r, 1.0 / 7.0)),
        (0.5, 1.0, lambda r: min(r, 1.0 / 7.0)),
    ]
    for theta, zeta, _ in closed_form:
        for r in r_grid:
            rows.append(
                {"theta": theta, "zeta": zeta, "r": r, "kind": "value",
                 "alpha": alpha_general(r, 1.0, theta, zeta).value}
            )
    for r in r_grid:
        rows.append(
            {"theta": 0.0, "zeta": 1.0, "r": r, "kind": "zero",
             "alpha": alpha_general(r, 1.0, 0.0, 1.0).value}
        )
    zeta_edge = 2.0 - 1e-9
    for r in r_grid:
        rows.append(
            {"theta": 1.0, "zeta": zeta_edge, "r": r, "kind": "zero",
             "alpha": alpha_general(r, 1.0, 1.0, zeta_edge).value}
        )
    return rows


def table2() -> list[dict]:
    """27 limit exponents on the (r, theta, zeta) grid at beta = 1."""
    rows = []
    for r in TABLE2_R_GRID:
        for theta in TABLE2_THETA_GRID:
            for zeta in TABLE2_ZETA_GRID:
                rows.append(
                    {"r": r, "theta": theta, "zeta": zeta,
                     "alpha": alpha_general(r, 1.0, theta, zeta).value}
                )
    return rows


def figure_curve(r: float, theta: float, zeta: float, alpha_smooth: float,
                 d_max: int) -> list[tuple[int, float, float]]:
    """Additive-kernel vs single-kernel exponents as the dimension grows.

    For each d, 'ours' evaluates the five-term minimum under that
    dimension's single-kernel schedule beta_ES(d); 'theirs' is the
    single-kernel exponent, which decays to zero.
    """
    if d_max < 1:
        raise ValueError(f"d_max must be >= 1, got {d_max}")
    out = []
    for d in range(1, d_max + 1):
        ours = alpha_general(r, beta_es(d, alpha_smooth, theta), theta, zeta).value
        theirs = alpha_es(d, alpha_smooth)
        out.append((d, ours, theirs))
    return out
