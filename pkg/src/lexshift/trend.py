"""Trend testing for index series.

Estimation chain: OLS on year (centered at the series midpoint), a
permutation Durbin-Watson test on the residuals, a feasible GLS refit via
Prais-Winsten when the test flags positive autocorrelation (p < .05), and
standardized coefficients with HC3 sandwich standard errors.

BIC is reported from the Gaussian likelihood of the (possibly Prais-Winsten
transformed) regression: BIC = n*log(2*pi) + n*log(RSS/n) + n
+ (p + 1)*log(n), with p the number of regression coefficients and the +1
for the error variance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats as sps

from .errors import (
    DegenerateDesignError,
    InsufficientDataError,
    NonStationaryError,
    SingularDesignError,
)
from .indices import IndexSeries

log = logging.getLogger(__name__)

DW_PERMUTATIONS = 10_000
GLS_RHO_TOL = 1e-6
GLS_MAX_ITER = 50


@dataclass(frozen=True)
class CoefStats:
    b: float
    se: float
    t: float
    p: float


@dataclass(frozen=True)
class StdBeta:
    beta: float
    se_hc3: float
    ci95: tuple[float, float]


@dataclass(frozen=True)
class DWResult:
    statistic: float | None
    p: float | None
    perfect_fit: bool = False


@dataclass
class TrendFit:
    model: str
    estimator: str
    terms: tuple[str, ...]
    coefficients: dict[str, CoefStats]
    f_stat: float
    df1: int
    df2: int
    adj_r2: float
    bic: float
    rse: float
    n: int
    dw: DWResult | None = None
    rho: float | None = None
    std_betas: dict[str, StdBeta] = field(default_factory=dict)
    center: float | None = None
    residuals: np.ndarray | None = field(default=None, repr=False)


def _check_design(X: np.ndarray) -> None:
    cond = np.linalg.cond(X)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise SingularDesignError(
            f"design matrix is singular (condition number {cond:.3e})", cond
        )


def _coef_table(
    beta: np.ndarray, se: np.ndarray, dof: int, terms: Sequence[str]
) -> dict[str, CoefStats]:
    table = {}
    for name, b, s in zip(terms, beta, se):
        if s == 0.0:
            t = 0.0 if b == 0.0 else math.copysign(math.inf, b)
            p = 1.0 if b == 0.0 else 0.0
        else:
            t = b / s
            p = 2.0 * float(sps.t.sf(abs(t), dof))
        table[name] = CoefStats(b=float(b), se=float(s), t=float(t), p=p)
    return table


def _gaussian_bic(rss: float, n: int, n_params: int) -> float:
    if rss <= 0.0:
        return -math.inf
    ll = -0.5 * n * (math.log(2.0 * math.pi) + math.log(rss / n) + 1.0)
    return -2.0 * ll + math.log(n) * (n_params + 1)


def _default_terms(p: int) -> tuple[str, ...]:
    if p == 2:
        return ("intercept", "year")
    if p == 3:
        return ("intercept", "year", "year2")
    return ("intercept",) + tuple(f"x{i}" for i in range(1, p))


def ols_fit(
    y: Sequence[float] | np.ndarray,
    X: np.ndarray,
    terms: Sequence[str] | None = None,
) -> TrendFit:
    """Ordinary least squares with classical SEs and overall F.

    X carries the intercept as its first column. Residuals are retained on
    the returned fit for Durbin-Watson diagnostics.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    if y.shape != (n,):
        raise ValueError(f"y has shape {y.shape}, expected ({n},)")
    if n <= p:
        raise InsufficientDataError(f"need more than {p} observations, got {n}")
    terms = tuple(terms) if terms is not None else _default_terms(p)
    _check_design(X)

    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    e = y - X @ beta
    rss = float(e @ e)
    dof = n - p
    sigma2 = rss / dof
    xtx_inv = np.linalg.inv(X.T @ X)
    se = np.sqrt(np.maximum(np.diag(xtx_inv) * sigma2, 0.0))

    tss = float(((y - y.mean()) ** 2).sum())
    k = p - 1
    if tss > 0.0:
        r2 = 1.0 - rss / tss
    else:
        r2 = 0.0
    if k > 0 and r2 < 1.0:
        f_stat = (r2 / k) / ((1.0 - r2) / dof)
    elif k > 0:
        f_stat = math.inf
    else:
        f_stat = 0.0
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / dof if dof > 0 else math.nan

    return TrendFit(
        model="linear" if p == 2 else ("quadratic" if p == 3 else f"{k}-term"),
        estimator="ols",
        terms=terms,
        coefficients=_coef_table(beta, se, dof, terms),
        f_stat=float(f_stat),
        df1=k,
        df2=dof,
        adj_r2=float(adj_r2),
        bic=_gaussian_bic(rss, n, p),
        rse=math.sqrt(sigma2),
        n=n,
        residuals=e,
    )


_PERM_CACHE: dict[tuple[int, int, int], np.ndarray] = {}


def _permutation_indices(n: int, n_permutations: int, seed: int) -> np.ndarray:
    key = (n, n_permutations, seed)
    if key not in _PERM_CACHE:
        if len(_PERM_CACHE) >= 4:
            _PERM_CACHE.pop(next(iter(_PERM_CACHE)))
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, n))))
        _PERM_CACHE[key] = rng.random((n_permutations, n)).argsort(axis=1)
    return _PERM_CACHE[key]


def durbin_watson(
    residuals: Sequence[float] | np.ndarray,
    n_permutations: int = DW_PERMUTATIONS,
    seed: int = 0,
) -> DWResult:
    """Durbin-Watson statistic with a seeded permutation p-value.

    d = sum_t (e_t - e_{t-1})^2 / sum_t e_t^2. The one-sided p-value for
    positive autocorrelation is the proportion of order-permuted residual
    series whose d falls at or below the observed d.
    """
    e = np.asarray(residuals, dtype=float)
    if e.size < 3:
        raise InsufficientDataError(f"Durbin-Watson needs >= 3 residuals, got {e.size}")
    denom = float(e @ e)
    if denom == 0.0:
        return DWResult(statistic=None, p=None, perfect_fit=True)
    d = float((np.diff(e) ** 2).sum() / denom)
    perms = _permutation_indices(e.size, n_permutations, seed)
    permuted = e[perms]
    d_perm = (np.diff(permuted, axis=1) ** 2).sum(axis=1) / denom
    p = float((d_perm <= d).mean())
    return DWResult(statistic=d, p=p)


def _lag1_autocorr(e: np.ndarray) -> float:
    denom = float(e @ e)
    if denom == 0.0:
        return 0.0
    return float((e[1:] @ e[:-1]) / denom)


def _prais_winsten_transform(z: np.ndarray, rho: float) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    out[0] = math.sqrt(1.0 - rho * rho) * z[0]
    out[1:] = z[1:] - rho * z[:-1]
    return out


def gls_ar1_fit(
    y: Sequence[float] | np.ndarray,
    X: np.ndarray,
    terms: Sequence[str] | None = None,
    rho: float | None = None,
    tol: float = GLS_RHO_TOL,
    max_iter: int = GLS_MAX_ITER,
) -> TrendFit:
    """Feasible GLS with AR(1) errors via iterated Prais-Winsten.

    rho is estimated as the lag-1 autocorrelation of the OLS residuals,
    the data transformed, the model refit, and the loop repeated until
    |delta rho| < tol or max_iter. Pass rho explicitly to fix it (no
    iteration). Fit statistics are reported on the transformed regression.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    terms = tuple(terms) if terms is not None else _default_terms(p)

    base = ols_fit(y, X, terms)
    if rho is None:
        rho_hat = _lag1_autocorr(base.residuals)
        for _ in range(max_iter):
            if abs(rho_hat) >= 1.0:
                raise NonStationaryError(f"AR(1) estimate left stationarity: rho={rho_hat}")
            ys = _prais_winsten_transform(y, rho_hat)
            Xs = np.column_stack([_prais_winsten_transform(X[:, j], rho_hat) for j in range(p)])
            beta, *_ = np.linalg.lstsq(Xs, ys, rcond=None)
            rho_new = _lag1_autocorr(y - X @ beta)
            delta = abs(rho_new - rho_hat)
            rho_hat = rho_new
            if delta < tol:
                break
        else:
            log.warning("Prais-Winsten did not converge in %d iterations", max_iter)
    else:
        rho_hat = rho
    if abs(rho_hat) >= 1.0:
        raise NonStationaryError(f"AR(1) estimate left stationarity: rho={rho_hat}")

    ys = _prais_winsten_transform(y, rho_hat)
    Xs = np.column_stack([_prais_winsten_transform(X[:, j], rho_hat) for j in range(p)])
    _check_design(Xs)
    beta, *_ = np.linalg.lstsq(Xs, ys, rcond=None)
    es = ys - Xs @ beta
    rss = float(es @ es)
    dof = n - p
    sigma2 = rss / dof
    xtx_inv = np.linalg.inv(Xs.T @ Xs)
    se = np.sqrt(np.maximum(np.diag(xtx_inv) * sigma2, 0.0))

    # The transformed intercept column is not constant, so the centered-R^2
    # overall F is ill-defined here; report the Wald F of the non-intercept
    # terms instead (equals the classic overall F in the OLS case).
    tss = float(((ys - ys.mean()) ** 2).sum())
    k = p - 1
    r2 = 1.0 - rss / tss if tss > 0.0 else 0.0
    if k > 0:
        bk = beta[1:]
        if sigma2 > 0.0:
            vk = xtx_inv[1:, 1:] * sigma2
            f_stat = float(bk @ np.linalg.solve(vk, bk) / k)
        else:
            f_stat = math.inf if np.any(np.abs(bk) > 0.0) else 0.0
    else:
        f_stat = 0.0

    return TrendFit(
        model=base.model,
        estimator="gls_ar1",
        terms=terms,
        coefficients=_coef_table(beta, se, dof, terms),
        f_stat=float(f_stat),
        df1=k,
        df2=dof,
        adj_r2=float(1.0 - (1.0 - r2) * (n - 1) / dof),
        bic=_gaussian_bic(rss, n, p),
        rse=math.sqrt(sigma2),
        n=n,
        rho=float(rho_hat),
        residuals=y - X @ beta,
    )


def hc3_standardized(
    y: Sequence[float] | np.ndarray,
    X: np.ndarray,
    terms: Sequence[str] | None = None,
) -> dict[str, StdBeta]:
    """Standardized coefficients with HC3 sandwich SEs and 95% CIs.

    y and each non-intercept column are scaled to zero mean and unit sample
    SD (ddof=1), the model refit by OLS, and the covariance estimated as
    (X'X)^-1 X' diag(e_i^2 / (1 - h_ii)^2) X (X'X)^-1. A constant y yields
    all-zero betas. Leverage of 1 is fatal (degenerate design).
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    if n <= p:
        raise InsufficientDataError(f"need more than {p} observations, got {n}")
    terms = tuple(terms) if terms is not None else _default_terms(p)
    _check_design(X)

    ysd = float(y.std(ddof=1))
    if ysd == 0.0:
        return {t: StdBeta(0.0, 0.0, (0.0, 0.0)) for t in terms[1:]}
    ys = (y - y.mean()) / ysd
    Xs = X.astype(float).copy()
    for j in range(1, p):
        sd = float(X[:, j].std(ddof=1))
        if sd == 0.0:
            raise SingularDesignError(f"constant predictor column {terms[j]!r}", math.inf)
        Xs[:, j] = (X[:, j] - X[:, j].mean()) / sd

    xtx_inv = np.linalg.inv(Xs.T @ Xs)
    beta, *_ = np.linalg.lstsq(Xs, ys, rcond=None)
    e = ys - Xs @ beta
    h = np.einsum("ij,jk,ik->i", Xs, xtx_inv, Xs)
    if np.any(h >= 1.0 - 1e-10):
        raise DegenerateDesignError("leverage of 1: HC3 weight undefined")
    w = (e / (1.0 - h)) ** 2
    cov = xtx_inv @ (Xs.T * w) @ Xs @ xtx_inv
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))

    out = {}
    for j, name in enumerate(terms):
        if j == 0:
            continue
        b = float(beta[j])
        s = float(se[j])
        out[name] = StdBeta(beta=b, se_hc3=s, ci95=(b - 1.96 * s, b + 1.96 * s))
    return out


def fit_trend(
    series: IndexSeries,
    model: str = "linear",
    dw_alpha: float = 0.05,
    dw_permutations: int = DW_PERMUTATIONS,
    seed: int = 0,
) -> TrendFit:
    """Full trend test for one index series.

    The predictor is the time unit centered at the series midpoint (mean of
    observed years); the quadratic model adds its square. OLS is the primary
    estimator, switching to GLS-AR1 when the Durbin-Watson permutation
    p-value falls below dw_alpha. Standardized HC3 betas are always computed
    on the OLS route.
    """
    if model not in ("linear", "quadratic"):
        raise ValueError(f"model must be linear or quadratic, got {model!r}")
    k = 1 if model == "linear" else 2
    years = np.asarray(series.years(), dtype=float)
    values = np.asarray(series.values(), dtype=float)
    n = years.size
    if n < k + 2:
        raise InsufficientDataError(
            f"{model} trend needs >= {k + 2} points, series has {n}"
        )
    center = float(years.mean())
    t = years - center
    if model == "linear":
        X = np.column_stack([np.ones(n), t])
        terms = ("intercept", "year")
    else:
        X = np.column_stack([np.ones(n), t, t * t])
        terms = ("intercept", "year", "year2")

    base = ols_fit(values, X, terms)
    dw = durbin_watson(base.residuals, dw_permutations, seed)
    use_gls = (not dw.perfect_fit) and dw.p is not None and dw.p < dw_alpha
    fit = gls_ar1_fit(values, X, terms) if use_gls else base
    fit.model = model
    fit.dw = dw
    fit.center = center
    fit.std_betas = hc3_standardized(values, X, terms)
    return fit
