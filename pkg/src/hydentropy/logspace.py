"""Signed log-domain arithmetic and log-domain special functions.

Quantities like Gamma(D + n + l - 2)^q overflow double precision as soon as
D is a few hundred, so every intermediate value in this package is carried as
(sign, log |value|).  This module provides the scalar container, exact-zero
handling, products and max-shifted sums, and accurate log-gamma /
log-Pochhammer helpers used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
from scipy import special as sp

__all__ = [
    "SignedLogReal",
    "log_gamma",
    "log_pochhammer",
    "combine",
]

_NEG_INF = float("-inf")


@dataclass(frozen=True)
class SignedLogReal:
    """A real number stored as (sign, natural log of absolute value).

    ``sign`` is -1, 0 or +1; ``sign == 0`` represents exactly zero and the
    stored ``logmag`` is then meaningless (kept at -inf canonically).
    """

    sign: int
    logmag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")
        if self.sign == 0 and self.logmag != _NEG_INF:
            object.__setattr__(self, "logmag", _NEG_INF)

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> "SignedLogReal":
        return cls(0, _NEG_INF)

    @classmethod
    def one(cls) -> "SignedLogReal":
        return cls(1, 0.0)

    @classmethod
    def from_float(cls, value: float) -> "SignedLogReal":
        if value == 0.0:
            return cls.zero()
        if math.isnan(value):
            raise ValueError("cannot represent NaN")
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def from_log(cls, logmag: float, sign: int = 1) -> "SignedLogReal":
        if sign == 0 or logmag == _NEG_INF:
            return cls.zero()
        return cls(sign, logmag)

    # -- accessors --------------------------------------------------------

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.logmag)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def log(self) -> float:
        """Natural log of the value; requires a strictly positive value."""
        if self.sign <= 0:
            raise ValueError("log of a non-positive SignedLogReal")
        return self.logmag

    # -- arithmetic -------------------------------------------------------

    def __mul__(self, other: "SignedLogReal") -> "SignedLogReal":
        if self.sign == 0 or other.sign == 0:
            return SignedLogReal.zero()
        return SignedLogReal(self.sign * other.sign, self.logmag + other.logmag)

    def __truediv__(self, other: "SignedLogReal") -> "SignedLogReal":
        if other.sign == 0:
            raise ZeroDivisionError("division by exact zero")
        if self.sign == 0:
            return SignedLogReal.zero()
        return SignedLogReal(self.sign * other.sign, self.logmag - other.logmag)

    def __neg__(self) -> "SignedLogReal":
        if self.sign == 0:
            return self
        return SignedLogReal(-self.sign, self.logmag)

    def __add__(self, other: "SignedLogReal") -> "SignedLogReal":
        return combine([self, other], mode="sum")

    def __sub__(self, other: "SignedLogReal") -> "SignedLogReal":
        return combine([self, -other], mode="sum")

    def scaled(self, factor: float) -> "SignedLogReal":
        """Multiply by an ordinary float."""
        return self * SignedLogReal.from_float(factor)

    def abs(self) -> "SignedLogReal":
        if self.sign == 0:
            return self
        return SignedLogReal(1, self.logmag)

    def powi(self, k: int) -> "SignedLogReal":
        """Integer power (sign handled exactly)."""
        if self.sign == 0:
            return SignedLogReal.one() if k == 0 else SignedLogReal.zero()
        sign = self.sign if k % 2 else 1
        return SignedLogReal(sign, self.logmag * k)

    def pow(self, p: float) -> "SignedLogReal":
        """Real power; the base must be positive (or zero with p > 0)."""
        if self.sign == 0:
            if p > 0:
                return SignedLogReal.zero()
            if p == 0:
                return SignedLogReal.one()
            raise ZeroDivisionError("0 to a negative power")
        if self.sign < 0:
            raise ValueError("real power of a negative value")
        return SignedLogReal(1, self.logmag * p)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"SignedLogReal(sign={self.sign}, logmag={self.logmag})"


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0.

    Relative error <= 1e-14 up to x = 1e6 (scipy's Lanczos-type gammaln).
    """
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return float(sp.gammaln(x))


def log_pochhammer(x: float, a: float) -> float:
    """ln of the Pochhammer symbol (x)_a = Gamma(x+a)/Gamma(x).

    Computed without the cancellation blow-up of subtracting two large
    log-gammas when a << x: small integer shifts use the explicit
    sum of ln(x+k), small relative shifts a Taylor series in psi-functions.
    """
    if not x > 0:
        raise ValueError(f"log_pochhammer requires x > 0, got {x}")
    if not x + a > 0:
        raise ValueError(f"log_pochhammer requires x + a > 0, got x+a={x + a}")
    if a == 0.0:
        return 0.0
    if a == int(a) and 0 < a <= 64:
        return float(np.sum(np.log(x + np.arange(int(a), dtype=float))))
    # Direct difference is accurate once the shift is a decent fraction of x.
    if abs(a) >= 1e-3 * x:
        return float(sp.gammaln(x + a) - sp.gammaln(x))
    # Taylor series about x: a*psi(x) + a^2/2 psi'(x) + ...; converges fast
    # because |a|/x < 1e-3 here.
    psis = [float(sp.digamma(x))] + [float(sp.polygamma(k, x)) for k in (1, 2, 3)]
    total = 0.0
    term = 1.0
    for k, d in enumerate(psis, start=1):
        term *= a
        total += d * term / math.factorial(k)
    return total


def combine(
    terms: Iterable[SignedLogReal], mode: Literal["product", "sum"]
) -> SignedLogReal:
    """Combine SignedLogReal values as an exact product or a max-shifted sum.

    The sum uses a single max-shift (not pairwise) so results are independent
    of how callers batch the terms; an exact cancellation or a sum whose
    shifted total underflows returns the exact zero.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("combine requires a non-empty list of terms")
    if mode == "product":
        sign = 1
        logmag = 0.0
        for t in terms:
            if t.sign == 0:
                return SignedLogReal.zero()
            sign *= t.sign
            logmag += t.logmag
        return SignedLogReal(sign, logmag)
    if mode != "sum":
        raise ValueError(f"unknown mode {mode!r}")
    live = [t for t in terms if t.sign != 0]
    if not live:
        return SignedLogReal.zero()
    shift = max(t.logmag for t in live)
    if shift == _NEG_INF:
        return SignedLogReal.zero()
    acc = 0.0
    for t in live:
        acc += t.sign * math.exp(t.logmag - shift)
    if acc == 0.0:
        return SignedLogReal.zero()
    return SignedLogReal(1 if acc > 0 else -1, shift + math.log(abs(acc)))


# -- vectorised helpers (internal) ----------------------------------------
#
# Hot loops (polynomial recurrences over quadrature nodes) carry arrays of
# (sign, logmag) pairs instead of scalar objects.


def siglog_from_values(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split an ordinary float array into (sign, log|value|) arrays."""
    values = np.asarray(values, dtype=float)
    sign = np.sign(values).astype(np.int8)
    with np.errstate(divide="ignore"):
        mag = np.where(values == 0.0, _NEG_INF, np.log(np.abs(values)))
    return sign, mag


def siglog_add(
    s1: np.ndarray, m1: np.ndarray, s2: np.ndarray, m2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise signed-log addition with per-element max shift."""
    shift = np.maximum(m1, m2)
    shift = np.where(np.isneginf(shift), 0.0, shift)
    v = s1 * np.exp(m1 - shift) + s2 * np.exp(m2 - shift)
    sign = np.sign(v).astype(np.int8)
    with np.errstate(divide="ignore"):
        mag = np.where(v == 0.0, _NEG_INF, shift + np.log(np.abs(v)))
    return sign, mag


def siglog_scale(
    s: np.ndarray, m: np.ndarray, factor: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise multiplication of a signed-log array by a float array."""
    fs, fm = siglog_from_values(np.asarray(factor, dtype=float))
    return (s * fs).astype(np.int8), m + fm
