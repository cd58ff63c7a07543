"""Exact (quadrature) evaluation of the entropic functionals.

Everything here reduces to three integral families, all computed in
signed-log form with root splitting:

- the Laguerre norm  N_{n,l}(D,q) = int ([orthonormal L]^2 w)^q x^beta dx,
- Gegenbauer factors int (1-y)^A (1+y)^B |C_m|^{2q} dy  (momentum radial and
  every angular junction),
- the Shannon variants with an extra -log(density) factor.

Entropies are assembled from these through the radial/angular split
R_q[rho] = R_q[radial] + R_q[Y].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from scipy import special as sp

from .hydrogenic import QuantumState, derive, harmonic_norm_sq, log_A_constant
from .logspace import SignedLogReal, log_gamma
from .orthopoly import (
    PolynomialSpec,
    gegenbauer_table,
    laguerre_table,
    log_gegenbauer_norm_sq,
    log_laguerre_norm_sq,
    roots,
)
from .quadrature import (
    ConvergenceError,
    QuadratureSpec,
    QuadResult,
    concave_drop_points,
    integrate_bounded,
    integrate_semi_infinite,
)

__all__ = [
    "EntropyResult",
    "QuadratureSpec",
    "ConvergenceError",
    "laguerre_renyi_norm",
    "angular_factor_exact",
    "angular_shannon_exact",
    "momentum_radial_renyi_exact",
    "renyi_entropy",
    "shannon_exact",
    "tsallis_and_disequilibrium",
    "j1_exact",
    "j2_exact",
]

Space = Literal["position", "momentum"]

#: |q - 1| below which the 1/(1-q) prefactor is considered ill-conditioned.
Q_NEAR_ONE = 1e-4


@dataclass(frozen=True)
class EntropyResult:
    """An entropy value in nats together with its provenance."""

    value: float
    space: Space
    method: Literal["exact", "asymptotic"]
    radial: float
    angular: float
    q: float
    error_estimate: float
    order: int | None = None

    def __post_init__(self):
        if abs((self.radial + self.angular) - self.value) > 1e-9 * max(1.0, abs(self.value)):
            raise ValueError("EntropyResult must satisfy value = radial + angular")


def _effective_spec(spec: QuadratureSpec, D: int) -> QuadratureSpec:
    # prefactor condition numbers grow with D; relax the target accordingly
    if D > 500 and spec.rel_tol < 1e-8:
        return replace(spec, rel_tol=1e-8)
    return spec


def _check_q(q: float, allow_near_one: bool = False) -> None:
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    if not allow_near_one and abs(q - 1.0) < Q_NEAR_ONE:
        raise ValueError(
            f"|q-1| < {Q_NEAR_ONE} is rejected for Renyi entropies; use shannon_exact"
        )


# -- radial position: the Laguerre L_q norm ----------------------------------


def _laguerre_breakpoints(c: float, lam: float, poly_roots: np.ndarray) -> list[float]:
    """Panel seeds for int x^c e^{-lam x} (...) dx: weight drop levels + roots."""
    x_star = max(c, 1e-2) / lam
    logw = lambda x: c * math.log(x) - lam * x
    hi = x_star + (2.0 * math.sqrt(max(c, 1.0)) + 10.0) / lam
    while logw(hi) > logw(x_star) - 55.0:
        hi *= 1.5
    pts = [0.0, x_star, hi]
    pts += concave_drop_points(logw, x_star, 1e-300, hi)
    pts += [float(r) for r in poly_roots]
    return sorted(set(pts))


def laguerre_renyi_norm(
    n: int, l: int, D: int, q: float, spec: QuadratureSpec | None = None
) -> SignedLogReal:
    """The L_q norm N_{n,l}(D,q) of the orthonormal-Laguerre radial factor.

    N = [Gamma(n-l)/Gamma(n+l+D-2)]^q * int_0^inf x^{D+2lq-1} e^{-qx}
        [L_{n-l-1}^{(D+2l-2)}(x)]^{2q} dx, split at the polynomial roots.
    """
    spec = _effective_spec(spec or QuadratureSpec(), D)
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    c = 2 * l * q + D - 1  # exponent of x in the integrand (= beta + q*alpha)
    if not c > -1:
        raise ValueError("convergence condition 2lq + D - 1 > -1 violated")
    m = n - l - 1
    alpha = D + 2 * l - 2

    def logf(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s, mag = laguerre_table(m, alpha, x)
        with np.errstate(divide="ignore"):
            base = c * np.log(x) - q * x
        return (np.abs(s)).astype(np.int8), base + 2.0 * q * mag

    poly_roots = roots(PolynomialSpec("laguerre", m, alpha)) if (m >= 1 and spec.root_splitting) else np.array([])
    pts = _laguerre_breakpoints(c, q, poly_roots)
    res = integrate_semi_infinite(logf, pts, q, spec, left_exponent=c)
    pref = q * (log_gamma(n - l) - log_gamma(n + l + D - 2))
    value = res.value * SignedLogReal.from_log(pref)
    return value


# -- Gegenbauer-type integrals on [-1, 1] -------------------------------------


def _gegenbauer_breakpoints(
    A: float, B: float, poly_roots: np.ndarray
) -> list[float]:
    """Panel seeds for int (1-y)^A (1+y)^B (...) dy on [-1, 1]."""
    pts = {-1.0, 0.0, 1.0}
    pts.update(float(r) for r in poly_roots)
    # guard points so end panels stay short enough for the smooth co-factor
    pts.add(1.0 - min(0.5, 2.0 / max(1.0, abs(B))))
    pts.add(-1.0 + min(0.5, 2.0 / max(1.0, abs(A))))
    if A > 0 and B > 0:
        y_star = (B - A) / (A + B)
        logw = lambda y: A * math.log1p(-y) + B * math.log1p(y)
        pts.add(y_star)
        pts.update(concave_drop_points(logw, y_star, -1.0 + 1e-15, 1.0 - 1e-15))
    return sorted(pts)


def _gegenbauer_power_integral(
    degree: int,
    alpha: float,
    A: float,
    B: float,
    kappa: float,
    spec: QuadratureSpec,
    extra_log_factor=None,
) -> QuadResult:
    """int_-1^1 (1-y)^A (1+y)^B |C_degree^(alpha)(y)|^kappa [factor] dy.

    ``extra_log_factor(y, mag)``, when given, maps the magnitude array and
    returns (sign, magnitude) of the full integrand (used by the Shannon
    integrals which carry a -log(density) factor).
    """

    def logf(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        y = np.clip(y, -1.0 + 5e-324, 1.0 - 1e-17)
        s, mag = gegenbauer_table(degree, alpha, y)
        base = kappa * mag
        if A != 0.0:
            base = base + A * np.log1p(-y)
        if B != 0.0:
            base = base + B * np.log1p(y)
        sign = np.abs(s).astype(np.int8)
        if extra_log_factor is not None:
            return extra_log_factor(y, sign, base, mag)
        return sign, base

    poly_roots = (
        roots(PolynomialSpec("gegenbauer", degree, alpha))
        if (degree >= 1 and spec.root_splitting)
        else np.array([])
    )
    pts = _gegenbauer_breakpoints(A, B, poly_roots)
    return integrate_bounded(logf, pts, spec, end_exponents=(B, A))


def angular_factor_exact(
    state: QuantumState, q: float, spec: QuadratureSpec | None = None
) -> SignedLogReal:
    """The angular entropic moment Lambda_{l,{mu}} = int |Y|^{2q} dOmega.

    Degree-zero factors (inside constant runs of the chain) telescope into
    Gamma ratios; only junctions of the run-length chain need quadrature, so
    the cost is independent of D for ns/circular states.
    """
    value, _ = _angular_factor_with_error(state, q, spec)
    return value


def _angular_factor_with_error(
    state: QuantumState, q: float, spec: QuadratureSpec | None = None
) -> tuple[SignedLogReal, float]:
    spec = _effective_spec(spec or QuadratureSpec(), state.D)
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    D = state.D
    n2 = harmonic_norm_sq(state)
    log_total = math.log(2.0 * math.pi) + q * n2.log()  # N^2q = (N^2)^q
    rel_err = 0.0
    alpha = lambda j: 0.5 * (D - j - 1)

    for value, j_first, j_last in _interior_pair_runs(state):
        v = abs(value)
        count = j_last - j_first + 1
        u_first = alpha(j_first) + q * v
        u_last = alpha(j_last) + q * v
        log_total += (
            0.5 * count * math.log(math.pi)
            + log_gamma(u_last + 0.5)
            - log_gamma(u_first + 1.0)
        )
    for j, mu_j, mu_next in _junction_triples(state):
        a_j = alpha(j)
        degree = mu_j - mu_next
        s_exp = q * mu_next + a_j - 0.5
        res = _gegenbauer_power_integral(
            degree, a_j + mu_next, s_exp, s_exp, 2.0 * q, spec
        )
        log_total += res.value.log()
        rel_err += res.rel_error
    return SignedLogReal.from_log(log_total), rel_err


def _interior_pair_runs(state: QuantumState):
    from .hydrogenic import _interior_runs

    return _interior_runs(state)


def _junction_triples(state: QuantumState):
    from .hydrogenic import _junctions

    return _junctions(state)


def momentum_radial_renyi_exact(
    n: int,
    l: int,
    D: int,
    q: float,
    spec: QuadratureSpec | None = None,
    Z: float = 1.0,
) -> float:
    """Radial momentum Renyi entropy R_q[M_{n,l}] by root-split quadrature.

    R = -D log(eta/Z) + (1/(1-q)) [ q log A(n,l;D) + log I_{n,l}(q,D) ],
    I = int_-1^1 (1-y)^{lq-1+D/2} (1+y)^{(l+1)q-1+(q-1/2)D} |C|^{2q} dy.
    """
    spec = _effective_spec(spec or QuadratureSpec(), D)
    _check_q(q)
    eta = n + 0.5 * (D - 3)
    res = _momentum_I_integral(n, l, D, q, spec)
    logA = log_A_constant(n, l, D)
    r = -D * math.log(eta / Z) + (q * logA + res.value.log()) / (1.0 - q)
    return r


def _momentum_I_integral(
    n: int, l: int, D: int, q: float, spec: QuadratureSpec
) -> QuadResult:
    A = l * q - 1.0 + 0.5 * D
    B = (l + 1.0) * q - 1.0 + (q - 0.5) * D
    if not (A > -1 and B > -1):
        raise ValueError("momentum integrand exponents must exceed -1")
    alpha = l + 0.5 * (D - 1.0)
    return _gegenbauer_power_integral(n - l - 1, alpha, A, B, 2.0 * q, spec)


# -- assembled entropies ------------------------------------------------------


def _radial_position_renyi(
    state: QuantumState, q: float, spec: QuadratureSpec
) -> tuple[float, float]:
    p = derive(state)
    norm = laguerre_renyi_norm(state.n, state.l, state.D, q, spec)
    value = state.D * math.log(p.lam) + (norm.log() - q * math.log(2.0 * p.eta)) / (1.0 - q)
    err = abs(1.0 / (1.0 - q)) * spec.rel_tol
    return value, err


def renyi_entropy(
    state: QuantumState,
    q: float,
    space: Space,
    spec: QuadratureSpec | None = None,
) -> EntropyResult:
    """Total Renyi entropy R_q in the requested space, exact engine."""
    spec = _effective_spec(spec or QuadratureSpec(), state.D)
    _check_q(q)
    lam_factor, lam_err = _angular_factor_with_error(state, q, spec)
    angular = lam_factor.log() / (1.0 - q)
    ang_err = (lam_err + spec.rel_tol) / abs(1.0 - q)
    if space == "position":
        radial, rad_err = _radial_position_renyi(state, q, spec)
    elif space == "momentum":
        radial = momentum_radial_renyi_exact(
            state.n, state.l, state.D, q, spec, Z=state.Z
        )
        rad_err = abs(1.0 / (1.0 - q)) * spec.rel_tol
    else:
        raise ValueError(f"unknown space {space!r}")
    return EntropyResult(
        value=radial + angular,
        space=space,
        method="exact",
        radial=radial,
        angular=angular,
        q=q,
        error_estimate=rad_err + ang_err,
    )


def shannon_exact(
    state: QuantumState, space: Space, spec: QuadratureSpec | None = None
) -> EntropyResult:
    """Shannon entropy S = -int rho log rho by direct quadrature.

    Used solely to test the conjectured large-D formulas; the angular part
    uses the same per-factor decomposition with digamma closed forms on
    constant runs.
    """
    spec = _effective_spec(spec or QuadratureSpec(), state.D)
    angular, ang_err = angular_shannon_exact(state, spec)
    if space == "position":
        radial, rad_err = _radial_position_shannon(state, spec)
    elif space == "momentum":
        radial, rad_err = _radial_momentum_shannon(state, spec)
    else:
        raise ValueError(f"unknown space {space!r}")
    return EntropyResult(
        value=radial + angular,
        space=space,
        method="exact",
        radial=radial,
        angular=angular,
        q=1.0,
        error_estimate=rad_err + ang_err,
    )


def _radial_position_shannon(
    state: QuantumState, spec: QuadratureSpec
) -> tuple[float, float]:
    p = derive(state)
    D, l = state.D, state.l
    m = state.n - state.l - 1
    alpha = D + 2 * l - 2
    log_norm = -0.5 * log_laguerre_norm_sq(m, alpha)  # orthonormal scaling, logs
    c = D + 2 * l - 1.0

    def logf(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = np.maximum(x, 5e-324)
        s, mag = laguerre_table(m, alpha, x)
        nmag = mag + log_norm  # orthonormal polynomial magnitude
        base = c * np.log(x) - x + 2.0 * nmag
        factor = x - 2.0 * nmag
        if l > 0:
            factor = factor - 2.0 * l * np.log(x)
        sign = np.sign(factor).astype(np.int8) * np.abs(s).astype(np.int8)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = base + np.log(np.abs(factor))
        out = np.where(factor == 0.0, -np.inf, out)
        return sign, out

    poly_roots = roots(PolynomialSpec("laguerre", m, alpha)) if m >= 1 else np.array([])
    pts = _laguerre_breakpoints(c, 1.0, poly_roots)
    res = integrate_semi_infinite(logf, pts, 1.0, spec, left_exponent=c)
    value = D * math.log(p.lam) + math.log(2.0 * p.eta) + _slr_to_float_scaled(
        res.value, -math.log(2.0 * p.eta)
    )
    return value, max(res.rel_error, spec.rel_tol)


def _slr_to_float_scaled(value: SignedLogReal, log_scale: float) -> float:
    if value.is_zero:
        return 0.0
    return value.sign * math.exp(value.logmag + log_scale)


def _radial_momentum_shannon(
    state: QuantumState, spec: QuadratureSpec
) -> tuple[float, float]:
    D, l, n = state.D, state.l, state.n
    p = derive(state)
    m = n - l - 1
    alpha = l + 0.5 * (D - 1.0)
    logA = log_A_constant(n, l, D)
    A1 = l + 0.5 * D - 1.0
    B1 = l + 0.5 * D

    def extra(y, sign, base, mag):
        # -log of the y-dependent part of M^2 (raw Gegenbauer convention)
        factor = -(D + l + 1.0) * np.log1p(y) - 2.0 * mag
        if l > 0:
            factor = factor - l * np.log1p(-y)
        with np.errstate(divide="ignore", invalid="ignore"):
            fsign = np.where(np.isnan(factor), 0, np.sign(factor)).astype(np.int8)
            out = base + np.log(np.abs(factor))
        out = np.where(fsign == 0, -np.inf, out)
        return (sign * fsign).astype(np.int8), out

    res = _gegenbauer_power_integral(m, alpha, A1, B1, 2.0, spec, extra_log_factor=extra)
    value = (
        -D * math.log(p.eta / state.Z)
        - logA
        + _slr_to_float_scaled(res.value, logA)
    )
    return value, max(res.rel_error, spec.rel_tol)


def angular_shannon_exact(
    state: QuantumState, spec: QuadratureSpec | None = None
) -> tuple[float, float]:
    """Exact angular Shannon entropy S[Y] and its error estimate."""
    spec = _effective_spec(spec or QuadratureSpec(), state.D)
    D = state.D
    n2 = harmonic_norm_sq(state)
    total = -n2.log()
    err = 0.0
    alpha = lambda j: 0.5 * (D - j - 1)

    for value, j_first, j_last in _interior_pair_runs(state):
        v = abs(value)
        if v == 0:
            continue
        u_first = alpha(j_first) + v
        u_last = alpha(j_last) + v
        # telescoped sum of v [psi(u+1/2) - psi(u+1)] over half-integer steps
        total -= v * (float(sp.digamma(u_last + 0.5)) - float(sp.digamma(u_first + 1.0)))
    for j, mu_j, mu_next in _junction_triples(state):
        a_j = alpha(j)
        degree = mu_j - mu_next
        geg_alpha = a_j + mu_next
        s_exp = mu_next + a_j - 0.5
        z_res = _gegenbauer_power_integral(degree, geg_alpha, s_exp, s_exp, 2.0, spec)

        def extra(y, sign, base, mag, _v=mu_next):
            factor = 2.0 * mag
            if _v > 0:
                factor = factor + _v * (np.log1p(-y) + np.log1p(y))
            with np.errstate(divide="ignore", invalid="ignore"):
                fsign = np.where(np.isnan(factor), 0, np.sign(factor)).astype(np.int8)
                out = base + np.log(np.abs(factor))
            out = np.where(fsign == 0, -np.inf, out)
            return (sign * fsign).astype(np.int8), out

        e_res = _gegenbauer_power_integral(
            degree, geg_alpha, s_exp, s_exp, 2.0, spec, extra_log_factor=extra
        )
        if not e_res.value.is_zero:
            total -= _slr_to_float_scaled(e_res.value, -z_res.value.log())
        err += z_res.rel_error + e_res.rel_error
    return total, err + spec.rel_tol


def tsallis_and_disequilibrium(
    state: QuantumState,
    q: float,
    space: Space,
    spec: QuadratureSpec | None = None,
) -> tuple[float, float]:
    """Tsallis entropy T_q (from R_q) and the disequilibrium exp(-R_2)."""
    _check_q(q)
    r_q = renyi_entropy(state, q, space, spec).value
    exponent = (1.0 - q) * r_q
    if exponent > 700.0:
        tsallis = math.inf if q < 1 else -math.inf
    else:
        tsallis = math.expm1(exponent) / (1.0 - q)
    r_2 = renyi_entropy(state, 2.0, space, spec).value
    return tsallis, math.exp(-r_2)


# -- theorem functionals (quadrature oracles) ---------------------------------


def j1_exact(
    sigma: float,
    lam: float,
    kappa: float,
    m: int,
    alpha: float,
    spec: QuadratureSpec | None = None,
) -> SignedLogReal:
    """Quadrature of J_1 = int_0^inf x^{alpha+sigma-1} e^{-lam x} |L_m^(alpha)|^kappa dx."""
    spec = spec or QuadratureSpec()
    if not lam > 0:
        raise ValueError("lam must be positive")
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    c = alpha + sigma - 1.0
    if not c > -1:
        raise ValueError("need alpha + sigma - 1 > -1 for convergence at 0")

    def logf(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s, mag = laguerre_table(m, alpha, x)
        with np.errstate(divide="ignore"):
            base = c * np.log(x) - lam * x + kappa * mag
        return np.abs(s).astype(np.int8), base

    poly_roots = roots(PolynomialSpec("laguerre", m, alpha)) if m >= 1 else np.array([])
    pts = _laguerre_breakpoints(max(c, 0.0), lam, poly_roots)
    res = integrate_semi_infinite(logf, pts, lam, spec, left_exponent=c)
    return res.value


def j2_exact(
    a: float,
    b: float,
    c: float,
    d: float,
    kappa: float,
    m: int,
    alpha: float,
    spec: QuadratureSpec | None = None,
) -> SignedLogReal:
    """Quadrature of J_2 = int_-1^1 (1-x)^{c a+a} (1+x)^{d a+b} |C_m^(alpha)|^kappa dx."""
    spec = spec or QuadratureSpec()
    A = c * alpha + a
    B = d * alpha + b
    if not (A > -1 and B > -1):
        raise ValueError("endpoint exponents must exceed -1")
    res = _gegenbauer_power_integral(m, alpha, A, B, kappa, spec)
    return res.value
