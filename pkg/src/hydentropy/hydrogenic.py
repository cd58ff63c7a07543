"""D-dimensional hydrogenic bound states and their radial densities.

A state is (D, Z, n, l, mu-chain); the mu chain of D-1 angular quantum
numbers is stored run-length compressed since D can reach 10^4 while the
physically interesting chains (ns, circular) are a single run.  All derived
densities are returned in signed-log form and omit the angular |Y|^2 factor;
full-space quantities are assembled in :mod:`hydentropy.entropic_exact`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator

from .logspace import SignedLogReal, log_gamma
from .orthopoly import (
    PolynomialSpec,
    eval_gegenbauer,
    eval_laguerre,
    log_gegenbauer_norm_sq,
)

__all__ = [
    "QuantumState",
    "DerivedParams",
    "ValidationError",
    "derive",
    "position_radial_density",
    "momentum_radial_density",
    "harmonic_norm_sq",
    "log_gegenbauer_orthonorm_const",
    "parse_state",
]


class ValidationError(ValueError):
    """A quantum-number chain violates its defining inequalities."""


@dataclass(frozen=True)
class QuantumState:
    """Hydrogenic state (D, Z, n, l, {mu}).

    ``mu_runs`` is a tuple of (value, count) pairs covering mu_1..mu_{D-1}
    in order; mu_1 = l and the chain is non-increasing, except that the very
    last entry may be negative with |mu_{D-1}| <= mu_{D-2}.
    """

    D: int
    Z: float
    n: int
    l: int
    mu_runs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.D < 2:
            raise ValidationError(f"D must be >= 2, got {self.D}")
        if not self.Z > 0:
            raise ValidationError(f"Z must be positive, got {self.Z}")
        if self.n < 1:
            raise ValidationError(f"n must be >= 1, got {self.n}")
        if not 0 <= self.l <= self.n - 1:
            raise ValidationError(f"l must satisfy 0 <= l <= n-1, got l={self.l}, n={self.n}")
        runs = tuple((int(v), int(c)) for v, c in self.mu_runs)
        object.__setattr__(self, "mu_runs", runs)
        total = sum(c for _, c in runs)
        if total != self.D - 1:
            raise ValidationError(
                f"mu chain must have D-1 = {self.D - 1} entries, got {total}"
            )
        if any(c < 1 for _, c in runs):
            raise ValidationError("mu run counts must be >= 1")
        values = [v for v, _ in runs]
        if values[0] != self.l:
            raise ValidationError(f"mu_1 must equal l = {self.l}, got {values[0]}")
        for i, (prev, cur) in enumerate(zip(values[:-1], values[1:])):
            last_run = i + 1 == len(values) - 1
            if cur > prev:
                raise ValidationError(
                    f"mu chain must be non-increasing: run {i + 2} value {cur} > {prev}"
                )
            if cur < 0:
                if not (last_run and runs[i + 1][1] == 1):
                    raise ValidationError(
                        "only the final chain entry may be negative (single entry)"
                    )
                if abs(cur) > prev:
                    raise ValidationError(
                        f"|mu_(D-1)| = {abs(cur)} exceeds mu_(D-2) = {prev}"
                    )

    # -- chain views -------------------------------------------------------

    @property
    def m_quantum(self) -> int:
        """mu_{D-1}, the azimuthal quantum number (sign kept)."""
        return self.mu_runs[-1][0]

    def mu_pairs(self) -> Iterator[tuple[int, int, int]]:
        """Yield (j, mu_j, mu_{j+1}) for j = 1..D-2, |.| applied to mu_{D-1}.

        Densities and entropies depend on mu_{D-1} only through its modulus.
        """
        j = 0
        runs = self.mu_runs
        for idx, (value, count) in enumerate(runs):
            for k in range(count):
                j += 1
                if j > self.D - 2:
                    return
                nxt = value if k + 1 < count else runs[idx + 1][0]
                if j + 1 == self.D - 1:
                    nxt = abs(nxt)
                yield j, value, nxt

    def run_segments(self) -> list[tuple[int, int, int]]:
        """(value, j_first, j_last) for each run, in j = 1..D-1 indexing."""
        out = []
        j = 1
        for value, count in self.mu_runs:
            out.append((value, j, j + count - 1))
            j += count
        return out

    def is_ns(self) -> bool:
        return self.l == 0 and len(self.mu_runs) == 1

    def is_circular(self) -> bool:
        return (
            self.l == self.n - 1
            and len(self.mu_runs) == 1
            and self.mu_runs[0][0] == self.n - 1
        )

    def is_constant_chain(self) -> bool:
        return len(self.mu_runs) == 1 and self.mu_runs[0][0] >= 0


@dataclass(frozen=True)
class DerivedParams:
    """Spectroscopic parameters derived from a state."""

    eta: float
    L: float
    lam: float
    energy: float
    D: int

    def alpha(self, j: int) -> float:
        """alpha_j = (D - j - 1)/2 for j = 1..D-2."""
        if not 1 <= j <= self.D - 2:
            raise ValueError(f"j must be in [1, {self.D - 2}], got {j}")
        return 0.5 * (self.D - j - 1)


def derive(state: QuantumState) -> DerivedParams:
    """Compute eta, L, lambda and the energy of the discrete level."""
    eta = state.n + 0.5 * (state.D - 3)
    L = state.l + 0.5 * (state.D - 3)
    lam = eta / (2.0 * state.Z)
    energy = -state.Z**2 / (2.0 * eta**2)
    return DerivedParams(eta=eta, L=L, lam=lam, energy=energy, D=state.D)


def position_radial_density(state: QuantumState, r: float) -> SignedLogReal:
    """rho_{n,l}(r) = lambda^-D/(2 eta) x^{2l} e^-x [orthonormal Laguerre]^2.

    x = r/lambda; the angular |Y|^2 factor is not included.
    """
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    p = derive(state)
    x = r / p.lam
    alpha = state.D + 2 * state.l - 2
    lag = eval_laguerre(
        PolynomialSpec("laguerre", state.n - state.l - 1, alpha), x, orthonormal=True
    )
    log_pref = -state.D * math.log(p.lam) - math.log(2.0 * p.eta)
    log_weight = 2.0 * state.l * math.log(x) - x
    return lag.powi(2) * SignedLogReal.from_log(log_pref + log_weight)


def momentum_radial_density(state: QuantumState, mom: float) -> SignedLogReal:
    """M^2_{n,l}(p): squared radial momentum wavefunction (no |Y|^2)."""
    if not mom > 0:
        raise ValueError(f"p must be positive, got {mom}")
    p = derive(state)
    pt = mom / state.Z
    u2 = (p.eta * pt) ** 2
    y = (1.0 - u2) / (1.0 + u2)
    geg = eval_gegenbauer(
        PolynomialSpec("gegenbauer", state.n - state.l - 1, p.L + 1.0), y
    )
    logmag = (
        log_K_squared(state)
        + state.l * math.log(u2)
        - (2.0 * p.L + 4.0) * math.log1p(u2)
    )
    return geg.powi(2) * SignedLogReal.from_log(logmag)


def log_A_constant(n: int, l: int, D: int) -> float:
    """ln A(n,l;D), the orthonormalisation constant of the momentum
    Gegenbauer with weight (1-y^2)^(alpha-1/2), alpha = l + (D-1)/2."""
    alpha = l + 0.5 * (D - 1.0)
    return -log_gegenbauer_norm_sq(n - l - 1, alpha)


def log_gegenbauer_orthonorm_const(n: int, l: int, D: int) -> float:
    """Alias kept close to the wavefunction formulas: same as log_A_constant."""
    return log_A_constant(n, l, D)


def log_K_squared(state: QuantumState) -> float:
    """ln K^2_{n,l}: squared normalisation of the momentum radial factor.

    K^2 = (eta/Z)^D * A(n,l;D) * 2^(D+2l+1).
    """
    p = derive(state)
    return (
        state.D * math.log(p.eta / state.Z)
        + log_A_constant(state.n, state.l, state.D)
        + (state.D + 2 * state.l + 1) * math.log(2.0)
    )


def harmonic_norm_sq(state: QuantumState) -> SignedLogReal:
    """Squared hyperspherical-harmonic normalisation N^2_{l,{mu}}.

    The product over j = 1..D-2 telescopes within each constant run of the
    chain (the per-step factors are ratios of Gammas at half-integer shifts),
    so the cost is O(number of runs), not O(D).
    """
    D = state.D
    if D == 2:
        return SignedLogReal.from_log(-math.log(2.0 * math.pi))
    logtot = -math.log(2.0 * math.pi)
    alpha = lambda j: 0.5 * (D - j - 1)

    for j, mu_j, mu_next in _junctions(state):
        # general factor of the product, evaluated directly
        a = alpha(j)
        logtot += (
            math.log(a + mu_j)
            + log_gamma(mu_j - mu_next + 1.0)
            + 2.0 * log_gamma(a + mu_next)
            - math.log(math.pi)
            - (1.0 - 2.0 * a - 2.0 * mu_next) * math.log(2.0)
            - log_gamma(2.0 * a + mu_j + mu_next)
        )
    for value, j_first, j_last in _interior_runs(state):
        # within a run the factor reduces to Gamma(a_j+v+1)/(sqrt(pi) Gamma(a_j+v+1/2))
        v = abs(value)
        count = j_last - j_first + 1
        a_first, a_last = alpha(j_first), alpha(j_last)
        logtot += (
            -0.5 * count * math.log(math.pi)
            + log_gamma(a_first + v + 1.0)
            - log_gamma(a_last + v + 0.5)
        )
    return SignedLogReal.from_log(logtot)


def _junctions(state: QuantumState) -> list[tuple[int, int, int]]:
    """(j, mu_j, mu_{j+1}) at run boundaries, for j in 1..D-2."""
    out = []
    segs = state.run_segments()
    for (v1, _, j_last), (v2, _, _) in zip(segs[:-1], segs[1:]):
        j = j_last  # mu_j = v1, mu_{j+1} = v2
        if j <= state.D - 2:
            v2a = abs(v2) if j + 1 == state.D - 1 else v2
            out.append((j, v1, v2a))
    return out


def _interior_runs(state: QuantumState) -> list[tuple[int, int, int]]:
    """Maximal index ranges j where mu_j == mu_{j+1} (both inside one run).

    Returned as (value, j_first, j_last) with j ranging over 1..D-2.
    """
    out = []
    for value, j_first, j_last in state.run_segments():
        # pairs (j, j+1) fully inside this run: j = j_first .. j_last-1
        a, b = j_first, min(j_last - 1, state.D - 2)
        if b >= a:
            out.append((value, a, b))
    return out


# -- state text format -------------------------------------------------------

_RUN_RE = re.compile(r"^(-?\d+)x(\d+)$")


def parse_state(text: str) -> QuantumState:
    """Parse the CLI state format: ``D=<int> Z=<float> n=<int> l=<int> mu=<runs>``.

    ``runs`` is either comma-separated ``<value>x<count>`` pairs, or the
    shorthands ``ns`` (all-zero chain) and ``circular`` (all n-1).
    """
    fields: dict[str, str] = {}
    for token in text.split():
        if "=" not in token:
            raise ValidationError(f"malformed state token {token!r}")
        key, _, value = token.partition("=")
        fields[key.strip()] = value.strip()
    missing = {"D", "n", "l", "mu"} - set(fields)
    if missing:
        raise ValidationError(f"state spec missing fields: {sorted(missing)}")
    D = int(fields["D"])
    Z = float(fields.get("Z", "1"))
    n = int(fields["n"])
    l = int(fields["l"])
    mu = fields["mu"]
    runs = expand_mu_shorthand(mu, D, n, l)
    return QuantumState(D=D, Z=Z, n=n, l=l, mu_runs=runs)


def expand_mu_shorthand(mu: str, D: int, n: int, l: int) -> tuple[tuple[int, int], ...]:
    if mu == "ns":
        if l != 0:
            raise ValidationError("mu=ns requires l = 0")
        return ((0, D - 1),)
    if mu == "circular":
        if l != n - 1:
            raise ValidationError("mu=circular requires l = n - 1")
        return ((n - 1, D - 1),)
    runs = []
    for part in mu.split(","):
        match = _RUN_RE.match(part.strip())
        if not match:
            raise ValidationError(f"malformed mu run {part!r} (expected <value>x<count>)")
        runs.append((int(match.group(1)), int(match.group(2))))
    return tuple(runs)
