"""Residual diagnostics: serial correlation, heteroskedasticity, normality, signs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, DegenerateResidualsError, InsufficientObservationsError
from .numerics import chi_square_sf, f_sf, least_squares_solve
from .ols import RegressionResult


@dataclass(frozen=True)
class LmTestResult:
    f_statistic: float
    f_p: float
    f_dof: tuple[int, int]
    obs_r_squared: float
    chi2_p: float
    chi2_dof: int
    lags: int


@dataclass(frozen=True)
class HeteroTestResult:
    f_statistic: float
    f_p: float
    f_dof: tuple[int, int]
    obs_r_squared: float
    chi2_p: float
    chi2_dof: int
    scaled_explained_ss: float
    scaled_p: float


@dataclass(frozen=True)
class NormalityResult:
    skewness: float
    kurtosis: float
    jb_statistic: float
    p: float
    n: int


@dataclass(frozen=True)
class SignCheck:
    name: str
    estimate: float
    expected_sign: int
    passed: bool


@dataclass(frozen=True)
class SignCheckResult:
    checks: tuple[SignCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _usable_residuals(fit: RegressionResult) -> np.ndarray:
    e = np.asarray(fit.residuals, dtype=float)
    if fit.perfect_fit or not np.any(e):
        raise DegenerateResidualsError("residuals are zero (perfect fit); diagnostic undefined")
    return e


def _ssr(X: np.ndarray, y: np.ndarray) -> float:
    beta, _ = least_squares_solve(X, y)
    r = y - X @ beta
    return float(r @ r)


def breusch_godfrey(fit: RegressionResult, lags: int = 2) -> LmTestResult:
    """LM test for serial correlation up to order ``lags``.

    Residuals are regressed on the original design plus their own lags, with
    pre-sample lags set to zero so all n observations are kept.
    """
    if lags < 1:
        raise ConfigurationError("lags must be positive")
    e = _usable_residuals(fit)
    X = fit.design.matrix
    n, k = X.shape
    if n <= k + lags:
        raise InsufficientObservationsError(
            f"Breusch-Godfrey needs n > k + lags (n={n}, k={k}, lags={lags})"
        )
    lagged = np.zeros((n, lags))
    for j in range(1, lags + 1):
        lagged[j:, j - 1] = e[:-j]
    Z = np.hstack([X, lagged])
    ssr_u = _ssr(Z, e)
    ssr_r = _ssr(X, e)
    dev = e - e.mean()
    tss = float(dev @ dev)
    r2 = 1.0 - ssr_u / tss
    df2 = n - k - lags
    f_stat = ((ssr_r - ssr_u) / lags) / (ssr_u / df2)
    obs_r2 = n * r2
    return LmTestResult(
        f_statistic=f_stat,
        f_p=f_sf(max(f_stat, 0.0), lags, df2),
        f_dof=(lags, df2),
        obs_r_squared=obs_r2,
        chi2_p=chi_square_sf(max(obs_r2, 0.0), lags),
        chi2_dof=lags,
        lags=lags,
    )


def breusch_pagan_godfrey(fit: RegressionResult) -> HeteroTestResult:
    """Regress squared residuals on the fit's regressors (with an intercept)."""
    e = _usable_residuals(fit)
    X = fit.design.matrix
    n = X.shape[0]
    const = np.all(X == 1.0, axis=0)
    slopes = X[:, ~const]
    m = slopes.shape[1]
    if m == 0:
        raise ConfigurationError("Breusch-Pagan-Godfrey needs at least one slope regressor")
    Z = np.column_stack([np.ones(n), slopes])
    if n <= m + 1:
        raise InsufficientObservationsError(f"need n > {m + 1} observations, got {n}")
    u = e * e
    beta, _ = least_squares_solve(Z, u)
    fitted = Z @ beta
    resid = u - fitted
    ssr_aux = float(resid @ resid)
    dev = u - u.mean()
    tss = float(dev @ dev)
    ess = max(tss - ssr_aux, 0.0)
    # squared residuals that agree to rounding carry no variance to explain
    if tss <= 1e-24 * float(u @ u):
        r2 = 0.0
        ess = 0.0
    else:
        r2 = ess / tss
    df2 = n - m - 1
    if r2 >= 1.0:
        f_stat = float("inf")
        f_p = 0.0
    else:
        f_stat = (r2 / m) / ((1.0 - r2) / df2)
        f_p = f_sf(f_stat, m, df2)
    sigma2 = float(e @ e) / n
    scaled = ess / (2.0 * sigma2 * sigma2)
    obs_r2 = n * r2
    return HeteroTestResult(
        f_statistic=f_stat,
        f_p=f_p,
        f_dof=(m, df2),
        obs_r_squared=obs_r2,
        chi2_p=chi_square_sf(obs_r2, m),
        chi2_dof=m,
        scaled_explained_ss=scaled,
        scaled_p=chi_square_sf(scaled, m),
    )


def jarque_bera(residuals) -> NormalityResult:
    e = np.asarray(residuals, dtype=float)
    n = e.size
    if n < 4:
        raise InsufficientObservationsError(f"Jarque-Bera needs at least 4 residuals, got {n}")
    d = e - e.mean()
    m2 = float(np.mean(d**2))
    if m2 == 0.0:
        raise DegenerateResidualsError("Jarque-Bera undefined for zero-variance residuals")
    skew = float(np.mean(d**3)) / m2**1.5
    kurt = float(np.mean(d**4)) / m2**2
    jb = n / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0)
    return NormalityResult(skew, kurt, jb, chi_square_sf(jb, 2), n)


def sign_check(fit: RegressionResult, expected: Mapping[str, int]) -> SignCheckResult:
    """Compare coefficient signs to expectations; a zero estimate never matches."""
    checks = []
    for name, sign in expected.items():
        if sign not in (-1, 1):
            raise ConfigurationError(f"expected sign for {name!r} must be +1 or -1")
        est = fit.coefficient(name).estimate
        checks.append(SignCheck(name, est, sign, est * sign > 0))
    return SignCheckResult(tuple(checks))
