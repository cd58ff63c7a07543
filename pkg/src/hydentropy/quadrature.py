"""Adaptive log-domain Gauss quadrature with root splitting.

Integrands here look like x^2000 e^{-2x} |polynomial|^{2q}: values overflow
floats and |.|^{2q} has kinks at polynomial roots.  The engine therefore

- evaluates everything as (sign, log magnitude) arrays,
- splits the domain at caller-supplied breakpoints (polynomial roots and
  drop levels of the concave log-weight),
- uses Gauss-Legendre inside, matched Gauss-Jacobi rules on end panels with
  fractional endpoint exponents, and a scaled Gauss-Laguerre tail,
- refines by panel bisection until the summed panel-error estimate meets the
  requested relative tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .logspace import SignedLogReal, combine
from .orthopoly import gauss_rule

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "ConvergenceError",
    "integrate_bounded",
    "integrate_semi_infinite",
    "concave_drop_points",
]

LogIntegrand = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

_NEG_INF = float("-inf")


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts, refinement budget and target tolerance."""

    base_nodes: int = 64
    max_levels: int = 10
    rel_tol: float = 1e-10
    root_splitting: bool = True

    def __post_init__(self):
        if self.base_nodes < 2:
            raise ValueError("base_nodes must be >= 2")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")


@dataclass(frozen=True)
class QuadResult:
    value: SignedLogReal
    rel_error: float
    panels: int


class ConvergenceError(RuntimeError):
    """Tolerance not reached; carries the best estimate and its error bound."""

    def __init__(self, message: str, best: SignedLogReal, rel_error: float):
        super().__init__(message)
        self.best = best
        self.rel_error = rel_error


def _signed_logsumexp(signs: np.ndarray, mags: np.ndarray) -> SignedLogReal:
    live = signs != 0
    if not np.any(live):
        return SignedLogReal.zero()
    mags = mags[live]
    signs = signs[live]
    shift = float(np.max(mags))
    if shift == _NEG_INF:
        return SignedLogReal.zero()
    acc = float(np.sum(signs * np.exp(mags - shift)))
    if acc == 0.0:
        return SignedLogReal.zero()
    return SignedLogReal(1 if acc > 0 else -1, shift + math.log(abs(acc)))


def _logadd(a: float, b: float) -> float:
    if a == _NEG_INF:
        return b
    if b == _NEG_INF:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


@dataclass
class _Panel:
    a: float
    b: float
    value: SignedLogReal
    depth: int
    # endpoint exponents active on this panel (0.0 means plain Legendre)
    gamma_left: float = 0.0
    gamma_right: float = 0.0


def _panel_value(
    logf: LogIntegrand,
    a: float,
    b: float,
    nodes: int,
    gamma_left: float,
    gamma_right: float,
) -> SignedLogReal:
    h = b - a
    if h <= 0:
        return SignedLogReal.zero()
    if gamma_left != 0.0 and gamma_right != 0.0:
        raise ValueError("a panel may carry at most one singular endpoint")
    if gamma_left != 0.0:
        rule = gauss_rule("jacobi", nodes, alpha=0.0, beta=gamma_left)
        x = a + 0.5 * h * (rule.nodes + 1.0)
        s, m = logf(x)
        # divide out (x-a)^gamma, absorbed exactly by the Jacobi weight
        m = m - gamma_left * np.log(np.maximum(x - a, 5e-324))
        scale = (gamma_left + 1.0) * math.log(0.5 * h)
    elif gamma_right != 0.0:
        rule = gauss_rule("jacobi", nodes, alpha=gamma_right, beta=0.0)
        x = a + 0.5 * h * (rule.nodes + 1.0)
        s, m = logf(x)
        m = m - gamma_right * np.log(np.maximum(b - x, 5e-324))
        scale = (gamma_right + 1.0) * math.log(0.5 * h)
    else:
        rule = gauss_rule("legendre", nodes)
        x = a + 0.5 * h * (rule.nodes + 1.0)
        s, m = logf(x)
        scale = math.log(0.5 * h)
    return _signed_logsumexp(s, m + rule.log_weights + scale)


def integrate_bounded(
    logf: LogIntegrand,
    breakpoints: Sequence[float],
    spec: QuadratureSpec,
    end_exponents: tuple[float, float] = (0.0, 0.0),
) -> QuadResult:
    """Adaptive integration over [breakpoints[0], breakpoints[-1]].

    ``end_exponents = (gl, gr)``: the integrand behaves like (x-lo)^gl near
    the left end and (hi-x)^gr near the right end; matched Gauss-Jacobi end
    panels make fractional exponents spectrally convergent.
    """
    pts = sorted(set(float(p) for p in breakpoints))
    if len(pts) < 2:
        raise ValueError("need at least two breakpoints")
    gl, gr = end_exponents
    if len(pts) == 2 and gl != 0.0 and gr != 0.0:
        pts = [pts[0], 0.5 * (pts[0] + pts[1]), pts[1]]

    panels: list[_Panel] = []
    for a, b in zip(pts[:-1], pts[1:]):
        pg_l = gl if a == pts[0] else 0.0
        pg_r = gr if b == pts[-1] else 0.0
        panels.append(
            _Panel(a, b, _panel_value(logf, a, b, spec.base_nodes, pg_l, pg_r), 0, pg_l, pg_r)
        )

    return _refine(logf, panels, spec)


def _refine(logf: LogIntegrand, panels: list[_Panel], spec: QuadratureSpec) -> QuadResult:
    n = spec.base_nodes
    done: list[tuple[SignedLogReal, float]] = []  # (value, err logmag)
    work = panels
    total_mag = _total_mag(panels, done)

    for _ in range(spec.max_levels):
        if not work:
            break
        next_work: list[_Panel] = []
        for p in work:
            mid = 0.5 * (p.a + p.b)
            if mid <= p.a or mid >= p.b:
                # interval at float resolution; accept with its own size as error
                done.append((p.value, p.value.logmag))
                continue
            left = _Panel(p.a, mid, _panel_value(logf, p.a, mid, n, p.gamma_left, 0.0), p.depth + 1, p.gamma_left, 0.0)
            right = _Panel(mid, p.b, _panel_value(logf, mid, p.b, n, 0.0, p.gamma_right), p.depth + 1, 0.0, p.gamma_right)
            refined = left.value + right.value
            err = (p.value - refined).abs().logmag
            # width-proportional share of the global budget
            share = math.log(spec.rel_tol) + total_mag + math.log((p.b - p.a) / _span(panels)) - math.log(4.0)
            if err <= share or refined.is_zero:
                done.append((refined, err))
            elif _negligible(left.value, right.value, total_mag, spec):
                done.append((refined, _logadd(err, refined.abs().logmag - 34.0)))
            else:
                next_work.extend([left, right])
        work = next_work
        total_mag = _total_mag(work, done)

    for p in work:  # depth budget exhausted: keep values, charge a crude error
        done.append((p.value, p.value.logmag + math.log(1e-6)))

    err_mag = _NEG_INF
    vals = [v for v, _ in done]
    value = combine(vals, mode="sum") if vals else SignedLogReal.zero()
    for _, e in done:
        err_mag = _logadd(err_mag, e)
    if value.is_zero:
        rel = 0.0 if err_mag == _NEG_INF else math.inf
    else:
        rel = math.exp(err_mag - value.logmag) if err_mag != _NEG_INF else 0.0
    result = QuadResult(value, rel, len(done))
    if rel > spec.rel_tol * 8.0:
        raise ConvergenceError(
            f"quadrature reached relative error {rel:.3e} (target {spec.rel_tol:.1e})",
            value,
            rel,
        )
    return result


def _span(panels: list[_Panel]) -> float:
    return max(p.b for p in panels) - min(p.a for p in panels)


def _total_mag(work: list[_Panel], done: list[tuple[SignedLogReal, float]]) -> float:
    mag = _NEG_INF
    for p in work:
        if not p.value.is_zero:
            mag = _logadd(mag, p.value.logmag)
    for v, _ in done:
        if not v.is_zero:
            mag = _logadd(mag, v.logmag)
    return mag if mag != _NEG_INF else 0.0


def _negligible(
    left: SignedLogReal, right: SignedLogReal, total_mag: float, spec: QuadratureSpec
) -> bool:
    mag = _NEG_INF
    for v in (left, right):
        if not v.is_zero:
            mag = _logadd(mag, v.logmag)
    return mag < total_mag + math.log(spec.rel_tol) - 34.0  # e^-34 ~ 1.7e-15 margin


def integrate_semi_infinite(
    logf: LogIntegrand,
    breakpoints: Sequence[float],
    decay: float,
    spec: QuadratureSpec,
    left_exponent: float = 0.0,
) -> QuadResult:
    """Integrate over [breakpoints[0], inf).

    The bounded part up to breakpoints[-1] uses the panel engine; the tail
    uses scaled Gauss-Laguerre against the known exponential decay rate
    (integrand ~ smooth * e^{-decay x}), with node doubling until stable.
    """
    if decay <= 0:
        raise ValueError("tail decay rate must be positive")
    pts = sorted(set(float(p) for p in breakpoints))
    bounded = integrate_bounded(logf, pts, spec, end_exponents=(left_exponent, 0.0))

    t0 = pts[-1]
    prev: SignedLogReal | None = None
    tail = SignedLogReal.zero()
    tail_err_mag = _NEG_INF
    nodes = spec.base_nodes
    for _ in range(max(2, spec.max_levels // 2)):
        rule = gauss_rule("laguerre", nodes, alpha=0.0, scale=1.0)
        x = t0 + rule.nodes / decay
        s, m = logf(x)
        # h(x) = f(x) e^{decay x}; integral = e^{-decay t0}/decay * sum w h
        m = m + decay * (x - t0)
        tail = _signed_logsumexp(s, m + rule.log_weights - decay * t0 - math.log(decay))
        if prev is not None:
            diff = (tail - prev).abs()
            tail_err_mag = diff.logmag if not diff.is_zero else _NEG_INF
            # absolute target: tolerance relative to the whole integral
            base = bounded.value + tail
            if diff.is_zero or (
                not base.is_zero
                and tail_err_mag <= base.abs().logmag + math.log(spec.rel_tol) - math.log(4.0)
            ):
                break
        prev = tail
        nodes *= 2

    total = bounded.value + tail
    err_mag = tail_err_mag
    if not bounded.value.is_zero:
        err_mag = _logadd(err_mag, bounded.value.logmag + math.log(max(bounded.rel_error, 1e-300)))
    rel = math.exp(err_mag - total.logmag) if (not total.is_zero and err_mag != _NEG_INF) else 0.0
    if rel > spec.rel_tol * 8.0:
        raise ConvergenceError(
            f"semi-infinite quadrature reached relative error {rel:.3e}", total, rel
        )
    return QuadResult(total, rel, bounded.panels + 1)


def concave_drop_points(
    logw: Callable[[float], float],
    x_star: float,
    lo: float,
    hi: float,
    drops: Sequence[float] = (1.0, 4.0, 9.0, 16.0, 25.0, 36.0, 50.0),
) -> list[float]:
    """Level points of a concave log-weight around its maximiser.

    Returns x with logw(x_star) - logw(x) = drop, for each drop, on both
    sides (where they fall inside (lo, hi)).  Used to seed panels so that the
    level-0 pass already resolves sharply peaked weights.
    """
    x_star = min(max(x_star, lo), hi)
    w_star = logw(x_star)
    points: list[float] = []
    for side in (-1, 1):
        bound = lo if side < 0 else hi
        if x_star == bound:
            continue
        for drop in drops:
            target = w_star - drop
            a, b = (x_star, bound) if side > 0 else (bound, x_star)
            # logw is monotone between x_star and the bound: bisect
            fa = logw(a) - target
            fb = logw(b) - target
            if fa * fb > 0:
                continue
            for _ in range(80):
                mid = 0.5 * (a + b)
                fm = logw(mid) - target
                if fa * fm <= 0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
            points.append(0.5 * (a + b))
    return points
