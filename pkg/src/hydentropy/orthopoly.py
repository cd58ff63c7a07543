"""Laguerre and Gegenbauer polynomials at extreme parameter values.

The regime of interest is fixed small degree with a parameter alpha of order
the dimension D (up to ~10^3), so recurrences are carried in signed-log form
and Gauss rules keep their weights as log-magnitudes (the total mass of the
weight x^2000 e^-x alone overflows any float).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .logspace import (
    SignedLogReal,
    log_gamma,
    siglog_add,
    siglog_from_values,
    siglog_scale,
)

__all__ = [
    "MAX_DEGREE",
    "PolynomialSpec",
    "GaussRule",
    "eval_laguerre",
    "eval_gegenbauer",
    "laguerre_table",
    "gegenbauer_table",
    "roots",
    "gauss_rule",
]

MAX_DEGREE = 64


@dataclass(frozen=True)
class PolynomialSpec:
    """Family, degree and parameter of a classical orthogonal polynomial."""

    family: Literal["laguerre", "gegenbauer"]
    degree: int
    alpha: float

    def __post_init__(self):
        if self.family not in ("laguerre", "gegenbauer"):
            raise ValueError(f"unknown family {self.family!r}")
        if not 0 <= self.degree <= MAX_DEGREE:
            raise ValueError(f"degree must be in [0, {MAX_DEGREE}], got {self.degree}")
        if self.family == "laguerre" and not self.alpha > -1:
            raise ValueError(f"Laguerre parameter must exceed -1, got {self.alpha}")
        if self.family == "gegenbauer" and not self.alpha > -0.5:
            raise ValueError(f"Gegenbauer parameter must exceed -1/2, got {self.alpha}")


@dataclass(frozen=True)
class GaussRule:
    """Gauss quadrature rule with log-domain weights.

    ``log_weights`` stores ln w_i; the weights of e.g. a generalized
    Gauss-Laguerre rule with alpha ~ 2000 are far beyond float range.
    """

    nodes: np.ndarray
    log_weights: np.ndarray
    exactness_degree: int

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "log_weights", np.asarray(self.log_weights, dtype=float))

    @property
    def count(self) -> int:
        return self.nodes.size


# -- evaluation ------------------------------------------------------------


def laguerre_table(
    degree: int, alpha: float, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Signed-log values of L_degree^(alpha) at an array of points x >= 0.

    Standard three-term recurrence; returns (sign, logmag) arrays.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise ValueError("Laguerre evaluation requires x >= 0")
    s_prev, m_prev = siglog_from_values(np.ones_like(x))
    if degree == 0:
        return s_prev, m_prev
    s_cur, m_cur = siglog_from_values(alpha + 1.0 - x)
    for k in range(1, degree):
        # (k+1) L_{k+1} = (2k+alpha+1-x) L_k - (k+alpha) L_{k-1}
        s_a, m_a = siglog_scale(s_cur, m_cur, 2 * k + alpha + 1.0 - x)
        s_b, m_b = siglog_scale(s_prev, m_prev, np.full_like(x, -(k + alpha)))
        s_new, m_new = siglog_add(s_a, m_a, s_b, m_b)
        m_new = m_new - math.log(k + 1.0)
        s_prev, m_prev, s_cur, m_cur = s_cur, m_cur, s_new, m_new
    return s_cur, m_cur


def gegenbauer_table(
    degree: int, alpha: float, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Signed-log values of C_degree^(alpha) at points x in [-1, 1]."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise ValueError("Gegenbauer evaluation requires |x| <= 1")
    s_prev, m_prev = siglog_from_values(np.ones_like(x))
    if degree == 0:
        return s_prev, m_prev
    s_cur, m_cur = siglog_from_values(2.0 * alpha * x)
    for k in range(1, degree):
        # (k+1) C_{k+1} = 2(k+alpha) x C_k - (k+2 alpha - 1) C_{k-1}
        s_a, m_a = siglog_scale(s_cur, m_cur, 2.0 * (k + alpha) * x)
        s_b, m_b = siglog_scale(s_prev, m_prev, np.full_like(x, -(k + 2 * alpha - 1.0)))
        s_new, m_new = siglog_add(s_a, m_a, s_b, m_b)
        m_new = m_new - math.log(k + 1.0)
        s_prev, m_prev, s_cur, m_cur = s_cur, m_cur, s_new, m_new
    return s_cur, m_cur


def log_laguerre_norm_sq(degree: int, alpha: float) -> float:
    """ln of int_0^inf [L_m^(a)]^2 x^a e^-x dx = Gamma(m+a+1)/m!."""
    return log_gamma(degree + alpha + 1.0) - log_gamma(degree + 1.0)


def log_gegenbauer_norm_sq(degree: int, alpha: float) -> float:
    """ln of int_-1^1 [C_m^(a)]^2 (1-x^2)^(a-1/2) dx.

    h_m = pi 2^(1-2a) Gamma(m+2a) / (m! (m+a) Gamma(a)^2); its reciprocal is
    the orthonormalisation constant (the A(n,l;D) convention).
    """
    m = degree
    return (
        math.log(math.pi)
        + (1.0 - 2.0 * alpha) * math.log(2.0)
        + log_gamma(m + 2.0 * alpha)
        - log_gamma(m + 1.0)
        - math.log(m + alpha)
        - 2.0 * log_gamma(alpha)
    )


def eval_laguerre(
    spec: PolynomialSpec, x: float, orthonormal: bool = False
) -> SignedLogReal:
    """Value of L_m^(alpha)(x), optionally scaled to the orthonormal variant."""
    if spec.family != "laguerre":
        raise ValueError("spec.family must be 'laguerre'")
    if x < 0:
        raise ValueError(f"Laguerre argument must be >= 0, got {x}")
    s, m = laguerre_table(spec.degree, spec.alpha, np.array([x]))
    out = SignedLogReal.from_log(float(m[0]), int(s[0]))
    if orthonormal:
        out = out * SignedLogReal.from_log(-0.5 * log_laguerre_norm_sq(spec.degree, spec.alpha))
    return out


def eval_gegenbauer(
    spec: PolynomialSpec, x: float, orthonormal: bool = False
) -> SignedLogReal:
    """Value of C_m^(alpha)(x) for |x| <= 1, optionally orthonormalised."""
    if spec.family != "gegenbauer":
        raise ValueError("spec.family must be 'gegenbauer'")
    if abs(x) > 1:
        raise ValueError(f"Gegenbauer argument must satisfy |x| <= 1, got {x}")
    s, m = gegenbauer_table(spec.degree, spec.alpha, np.array([x]))
    out = SignedLogReal.from_log(float(m[0]), int(s[0]))
    if orthonormal:
        out = out * SignedLogReal.from_log(-0.5 * log_gegenbauer_norm_sq(spec.degree, spec.alpha))
    return out


# -- Jacobi matrices and roots ----------------------------------------------


def _jacobi_matrix_laguerre(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(n, dtype=float)
    diag = 2.0 * k + alpha + 1.0
    j = np.arange(1, n, dtype=float)
    off = np.sqrt(j * (j + alpha))
    return diag, off

def _jacobi_matrix_jacobi(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    # weight (1-x)^a (1+x)^b on [-1, 1]; monic recurrence coefficients
    k = np.arange(n, dtype=float)
    ab = a + b
    with np.errstate(invalid="ignore", divide="ignore"):
        denom = (2 * k + ab) * (2 * k + ab + 2)
        diag = np.where(denom == 0.0, (b - a) / (ab + 2.0), (b * b - a * a) / denom)
    j = np.arange(1, n, dtype=float)
    s = 2 * j + ab
    bj = 4 * j * (j + a) * (j + b) * (j + ab) / (s * s * (s * s - 1.0))
    return diag, np.sqrt(bj)


def _derivative_table(spec: PolynomialSpec, x: float) -> tuple[int, float]:
    """(sign, logmag) of the derivative of the polynomial at x."""
    if spec.family == "laguerre":
        # d/dx L_m^(a) = -L_{m-1}^(a+1)
        s, mg = laguerre_table(spec.degree - 1, spec.alpha + 1.0, np.array([x]))
        return -int(s[0]), float(mg[0])
    # d/dx C_m^(a) = 2a C_{m-1}^(a+1)
    s, mg = gegenbauer_table(spec.degree - 1, spec.alpha + 1.0, np.array([x]))
    sc = SignedLogReal.from_float(2.0 * spec.alpha)
    return int(s[0]) * sc.sign, float(mg[0]) + sc.logmag


def roots(spec: PolynomialSpec) -> np.ndarray:
    """All real roots of the polynomial, ascending.

    Eigenvalues of the symmetric Jacobi matrix, then one Newton step.  The
    Newton ratio p/p' is formed in log space so huge parameters cannot
    overflow.
    """
    m = spec.degree
    if m < 1:
        raise ValueError("roots requires degree >= 1")
    if spec.family == "laguerre":
        diag, off = _jacobi_matrix_laguerre(spec.alpha, m)
        lo, hi = 0.0, math.inf
    else:
        diag, off = _jacobi_matrix_jacobi(spec.alpha - 0.5, spec.alpha - 0.5, m)
        lo, hi = -1.0, 1.0
    if m == 1:
        nodes = np.array([diag[0]])
    else:
        nodes = eigh_tridiagonal(diag, off, eigvals_only=True)
    table = laguerre_table if spec.family == "laguerre" else gegenbauer_table
    polished = []
    for r in nodes:
        r = float(r)
        s_p, m_p = table(m, spec.alpha, np.array([r]))
        if int(s_p[0]) != 0:
            s_d, m_d = _derivative_table(spec, r)
            if s_d != 0:
                step = int(s_p[0]) * s_d * math.exp(float(m_p[0]) - m_d)
                r = float(np.clip(r - step, lo, hi))
        polished.append(r)
    return np.array(sorted(polished))


# -- Gauss rules -------------------------------------------------------------

_RULE_CACHE: dict[tuple, GaussRule] = {}
_RULE_LOCK = threading.Lock()


def gauss_rule(
    weight: Literal["laguerre", "jacobi", "legendre"],
    count: int,
    *,
    alpha: float = 0.0,
    beta: float = 0.0,
    scale: float = 1.0,
    interval: tuple[float, float] = (-1.0, 1.0),
) -> GaussRule:
    """Golub-Welsch Gauss rule for one of the supported weights.

    laguerre: x^alpha e^(-scale*x) on [0, inf)
    jacobi:   (1-x)^alpha (1+x)^beta on [-1, 1]
    legendre: 1 on ``interval``

    Exactness degree is 2*count - 1.  Weights are returned as logs; rules are
    cached per parameter key and safe for concurrent readers.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    key = (weight, count, float(alpha), float(beta), float(scale), tuple(interval))
    rule = _RULE_CACHE.get(key)
    if rule is not None:
        return rule
    with _RULE_LOCK:
        rule = _RULE_CACHE.get(key)
        if rule is not None:
            return rule
        rule = _build_rule(weight, count, alpha, beta, scale, interval)
        _RULE_CACHE[key] = rule
        return rule


def _build_rule(weight, count, alpha, beta, scale, interval) -> GaussRule:
    if weight == "laguerre":
        if not alpha > -1:
            raise ValueError("generalized Laguerre weight requires alpha > -1")
        if not scale > 0:
            raise ValueError("Laguerre scale must be positive")
        diag, off = _jacobi_matrix_laguerre(alpha, count)
        log_mu0 = log_gamma(alpha + 1.0)
        nodes, logw = _golub_welsch(diag, off, log_mu0)
        # x -> x/scale maps weight x^a e^-x onto x^a e^(-scale x) up to scale^(a+1)
        nodes = nodes / scale
        logw = logw - (alpha + 1.0) * math.log(scale)
        return GaussRule(nodes, logw, 2 * count - 1)
    if weight == "jacobi":
        if not (alpha > -1 and beta > -1):
            raise ValueError("Jacobi weight requires alpha, beta > -1")
        diag, off = _jacobi_matrix_jacobi(alpha, beta, count)
        log_mu0 = (
            (alpha + beta + 1.0) * math.log(2.0)
            + log_gamma(alpha + 1.0)
            + log_gamma(beta + 1.0)
            - log_gamma(alpha + beta + 2.0)
        )
        nodes, logw = _golub_welsch(diag, off, log_mu0)
        nodes = np.clip(nodes, -1.0, 1.0)
        return GaussRule(nodes, logw, 2 * count - 1)
    if weight == "legendre":
        lo, hi = interval
        if not hi > lo:
            raise ValueError("legendre interval must have positive length")
        diag, off = _jacobi_matrix_jacobi(0.0, 0.0, count)
        nodes, logw = _golub_welsch(diag, off, math.log(2.0))
        half = 0.5 * (hi - lo)
        nodes = lo + half * (nodes + 1.0)
        logw = logw + math.log(half)
        return GaussRule(nodes, logw, 2 * count - 1)
    raise ValueError(f"unknown weight family {weight!r}")


def _golub_welsch(
    diag: np.ndarray, off: np.ndarray, log_mu0: float
) -> tuple[np.ndarray, np.ndarray]:
    n = diag.size
    if n == 1:
        return np.array([diag[0]]), np.array([log_mu0])
    vals, vecs = eigh_tridiagonal(diag, off)
    first = vecs[0, :]
    with np.errstate(divide="ignore"):
        logw = log_mu0 + 2.0 * np.log(np.abs(first))
    order = np.argsort(vals)
    return vals[order], logw[order]
