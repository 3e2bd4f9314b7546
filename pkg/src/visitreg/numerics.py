"""Least-squares solver and the distribution functions behind every p-value.

The incomplete gamma and beta functions use the usual split between a power
series and a modified-Lentz continued fraction, switching at the point where
the series stops converging quickly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    DomainError,
    InsufficientObservationsError,
    SingularDesignError,
)

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    column_names: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim == 1:
            m = m[:, None]
        names = tuple(self.column_names)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise ConfigurationError("design matrix needs n >= 1 rows and k >= 1 columns")
        if len(names) != m.shape[1]:
            raise ConfigurationError(f"{len(names)} column names for {m.shape[1]} columns")
        if not np.all(np.isfinite(m)):
            raise ConfigurationError("design matrix contains non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "column_names", names)

    @classmethod
    def from_columns(cls, columns: dict[str, Sequence[float]]) -> DesignMatrix:
        names = tuple(columns)
        lengths = {len(c) for c in columns.values()}
        if len(lengths) != 1:
            raise ConfigurationError("design columns must have equal length")
        return cls(names, np.column_stack([np.asarray(c, dtype=float) for c in columns.values()]))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def k(self) -> int:
        return self.matrix.shape[1]


def least_squares_solve(X: DesignMatrix | np.ndarray, y) -> tuple[np.ndarray, np.ndarray]:
    """Solve min ||y - X b|| by Householder QR.

    Returns ``(beta, inv(X'X))``. Rank deficiency raises rather than falling
    back to a pseudo-inverse.
    """
    A = X.matrix if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    y = np.asarray(y, dtype=float)
    n, k = A.shape
    if y.shape != (n,):
        raise ConfigurationError(f"response length {y.shape} does not match design rows {n}")
    if n <= k:
        raise InsufficientObservationsError(f"need more observations than parameters (n={n}, k={k})")
    if np.linalg.matrix_rank(A) < k:
        raise SingularDesignError("design matrix is rank deficient")
    Q, R = np.linalg.qr(A, mode="reduced")
    beta = np.linalg.solve(R, Q.T @ y)
    R_inv = np.linalg.solve(R, np.eye(k))
    return beta, R_inv @ R_inv.T


# -- special functions ------------------------------------------------------


def _gamma_series(a: float, x: float) -> float:
    # lower regularized P(a, x), valid for x < a + 1
    term = total = 1.0 / a
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a: float, x: float) -> float:
    # upper regularized Q(a, x), valid for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def regularized_gamma_p(a: float, x: float) -> float:
    if x < 0 or a <= 0:
        raise DomainError(f"incomplete gamma needs a > 0, x >= 0 (a={a}, x={x})")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cf(a, x)


def regularized_gamma_q(a: float, x: float) -> float:
    if x < 0 or a <= 0:
        raise DomainError(f"incomplete gamma needs a > 0, x >= 0 (a={a}, x={x})")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def _beta_cf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def _beta_front(a: float, b: float, x: float, one_minus_x: float) -> float:
    return math.exp(
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(one_minus_x)
    )


def regularized_beta(a: float, b: float, x: float, one_minus_x: float | None = None) -> float:
    """I_x(a, b). ``one_minus_x`` may be passed to avoid cancellation near 1."""
    if one_minus_x is None:
        one_minus_x = 1.0 - x
    if a <= 0 or b <= 0 or x < 0 or x > 1:
        raise DomainError(f"incomplete beta needs a, b > 0 and 0 <= x <= 1 (x={x})")
    if x == 0:
        return 0.0
    if one_minus_x == 0:
        return 1.0
    front = _beta_front(a, b, x, one_minus_x)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, one_minus_x) / b


# -- distributions ----------------------------------------------------------


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _check_dof(dof: float, name: str = "dof") -> None:
    if not dof >= 1:
        raise DomainError(f"{name} must be >= 1, got {dof}")


def student_t_sf(x: float, dof: float) -> float:
    """Upper tail P(T > x)."""
    _check_dof(dof)
    t2 = x * x
    # P(|T| > |x|) = I_{dof/(dof+x^2)}(dof/2, 1/2)
    two_tail = regularized_beta(dof / 2.0, 0.5, dof / (dof + t2), t2 / (dof + t2))
    return 0.5 * two_tail if x >= 0 else 1.0 - 0.5 * two_tail


def student_t_cdf(x: float, dof: float) -> float:
    return student_t_sf(-x, dof)


def student_t_two_sided_p(x: float, dof: float) -> float:
    return min(1.0, 2.0 * student_t_sf(abs(x), dof))


def chi_square_sf(x: float, dof: float) -> float:
    _check_dof(dof)
    if x < 0:
        raise DomainError(f"chi-square argument must be >= 0, got {x}")
    if dof == 2:
        return math.exp(-x / 2.0)
    return regularized_gamma_q(dof / 2.0, x / 2.0)


def chi_square_cdf(x: float, dof: float) -> float:
    _check_dof(dof)
    if x < 0:
        raise DomainError(f"chi-square argument must be >= 0, got {x}")
    if dof == 2:
        return -math.expm1(-x / 2.0)
    return regularized_gamma_p(dof / 2.0, x / 2.0)


def _f_args(x: float, d1: float, d2: float) -> tuple[float, float]:
    _check_dof(d1, "d1")
    _check_dof(d2, "d2")
    if x < 0:
        raise DomainError(f"F argument must be >= 0, got {x}")
    denom = d1 * x + d2
    return d1 * x / denom, d2 / denom


def f_cdf(x: float, d1: float, d2: float) -> float:
    u, v = _f_args(x, d1, d2)
    return regularized_beta(d1 / 2.0, d2 / 2.0, u, v)


def f_sf(x: float, d1: float, d2: float) -> float:
    u, v = _f_args(x, d1, d2)
    return regularized_beta(d2 / 2.0, d1 / 2.0, v, u)
