"""The shape functional S(Q) and its constrained minimisation.

Shapes are handled through their increments Qhat on 1..K (the monotone tail
function is in bijection with its increment sequence).  S(Q) =
sum_k Qhat(k) (log(Qhat(k)/Qhat*(k)) - 1) with the convention 0 log 0 = 0.
Minimisation over {Qhat >= 0, sum_k k Qhat(k) = 1} is solved exactly through
the scalar Lagrangian dual: stationarity forces Qhat = Qhat* e^(-lambda k),
leaving a single monotone root for lambda.

In the condensed regime the truncated dual root sits below zero and the
constraint mass piles up at k = K; that boundary mass is the finite-K shadow
of the escaping minimising sequences and is reported, never suppressed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import PrecisionError, ValidationError
from .thermo import (
    REGIME_CONDENSED,
    SystemParams,
    solve_alpha,
    thermal_factor,
)

_MASS_ATOL = 1e-7


@dataclass(frozen=True, eq=False)
class TruncatedShape:
    """Increments Qhat(1..K) of a shape truncated at length K.

    Elements representing genuine shapes carry constraint mass
    sum_k k Qhat(k) == 1; anything lighter must be flagged `relaxed`
    (truncations of infinite shapes, diagnostic vectors).
    """

    qhat: np.ndarray
    relaxed: bool = False

    def __post_init__(self) -> None:
        arr = np.asarray(self.qhat, dtype=np.float64).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "qhat", arr)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("qhat must be a nonempty 1-d sequence")
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValidationError("qhat entries must be finite and >= 0")
        mass = self.constraint_mass
        if mass > 1.0 + _MASS_ATOL:
            raise ValidationError(f"constraint mass {mass} exceeds 1")
        if not self.relaxed and abs(mass - 1.0) > _MASS_ATOL:
            raise ValidationError(
                f"constraint mass {mass} != 1; pass relaxed=True for partial shapes"
            )

    @property
    def K(self) -> int:
        return int(self.qhat.size)

    @property
    def constraint_mass(self) -> float:
        return float(np.arange(1, self.qhat.size + 1, dtype=np.float64) @ self.qhat)


def qhat_star_array(params: SystemParams, K: int) -> np.ndarray:
    """Reference increments Qhat*(k) = c / k^(1+d/2) for k = 1..K."""
    if K < 1:
        raise ValidationError(f"K must be >= 1, got {K}")
    c = 1.0 / (params.rho * thermal_factor(params.d, params.beta))
    ks = np.arange(1, K + 1, dtype=np.float64)
    return c * ks ** (-(1.0 + params.d / 2.0))


def functional_S(shape: TruncatedShape, params: SystemParams) -> float:
    """Truncated S(Q) = sum_{k<=K} Qhat(k) (log(Qhat(k)/Qhat*(k)) - 1).

    Zero increments contribute zero (x log x -> 0).  The sum is finite and
    exact up to float rounding; no tolerance applies.
    """
    qh = shape.qhat
    qs = qhat_star_array(params, shape.K)
    pos = qh > 0
    terms = np.zeros_like(qh)
    terms[pos] = qh[pos] * (np.log(qh[pos] / qs[pos]) - 1.0)
    return float(np.sum(terms))


class EntropyDecomposition(NamedTuple):
    q: float
    q_star: float
    relative_entropy: float
    reconstructed_S: float


def entropy_decomposition(
    shape: TruncatedShape, params: SystemParams
) -> EntropyDecomposition:
    """Split S(Q) = q H(P|P*) + q log(q/q*) - q over the truncation window.

    P = Qhat/q and P* = Qhat*/q* are the normalised increment profiles;
    H is their relative entropy.  reconstructed_S must agree with
    functional_S to float precision.
    """
    qh = shape.qhat
    qs = qhat_star_array(params, shape.K)
    q = float(np.sum(qh))
    if q <= 0.0:
        raise ValidationError("decomposition needs total increment mass q > 0")
    q_star = float(np.sum(qs))
    p = qh / q
    p_star = qs / q_star
    pos = p > 0
    h = float(np.sum(p[pos] * np.log(p[pos] / p_star[pos])))
    reconstructed = q * h + q * math.log(q / q_star) - q
    return EntropyDecomposition(q, q_star, h, reconstructed)


def _log_constraint_mass(lam: float, log_base: np.ndarray, ks: np.ndarray) -> float:
    """log sum_k k Qhat*(k) e^(-lambda k), overflow-safe."""
    x = log_base - lam * ks
    m = float(np.max(x))
    return m + math.log(float(np.sum(np.exp(x - m))))


@dataclass(frozen=True)
class MinimizeResult:
    """Exact dual solution of the truncated constrained minimisation."""

    shape: TruncatedShape
    lam: float
    s_value: float
    boundary_mass: float  # K * Qhat(K), the constraint mass on the last site
    constraint_residual: float
    diagnostics: dict = field(default_factory=dict)


def minimize_S(params: SystemParams, K: int, tol: float = 1e-10) -> MinimizeResult:
    """Minimise truncated S over {Qhat >= 0, sum_k k Qhat(k) = 1}.

    Stationarity gives Qhat(k) = Qhat*(k) e^(-lambda k); lambda solves the
    scalar constraint by bisection (lambda < 0 is allowed: the truncated
    problem is always feasible).  In the normal regime lambda approaches the
    root of the density equation as K grows; in the condensed regime lambda
    approaches 0 from below and mass concentrates at k = K.
    """
    if K < 100:
        raise ValidationError(f"K must be >= 100, got {K}")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    qs = qhat_star_array(params, K)
    ks = np.arange(1, K + 1, dtype=np.float64)
    log_base = np.log(ks * qs)

    f0 = _log_constraint_mass(0.0, log_base, ks)
    if f0 > 0.0:
        lo, hi = 0.0, 1.0
        while _log_constraint_mass(hi, log_base, ks) > 0.0:
            hi *= 2.0
            if hi > 1e6:
                raise PrecisionError("failed to bracket the dual variable above 0")
    elif f0 < 0.0:
        hi, lo = 0.0, -1.0 / K
        while _log_constraint_mass(lo, log_base, ks) < 0.0:
            lo *= 2.0
            if lo < -1e6:
                raise PrecisionError("failed to bracket the dual variable below 0")
    else:
        lo = hi = 0.0

    lam = 0.5 * (lo + hi)
    residual = math.expm1(_log_constraint_mass(lam, log_base, ks))
    for _ in range(300):
        if abs(residual) <= tol:
            break
        if residual > 0.0:
            lo = lam
        else:
            hi = lam
        nxt = 0.5 * (lo + hi)
        if nxt == lam or nxt == lo or nxt == hi:
            break
        lam = nxt
        residual = math.expm1(_log_constraint_mass(lam, log_base, ks))
    if abs(residual) > tol:
        raise PrecisionError(f"dual bisection stalled at residual {residual}")

    qh = qs * np.exp(-lam * ks)
    shape = TruncatedShape(qh, relaxed=False)
    s_value = float(np.sum(qh * (-lam * ks - 1.0)))
    return MinimizeResult(
        shape=shape,
        lam=lam,
        s_value=s_value,
        boundary_mass=float(K * qh[-1]),
        constraint_residual=residual,
        diagnostics={"bracket": (lo, hi), "K": K},
    )


def minimizing_sequence(
    n: int, params: SystemParams, K: int | None = None
) -> TruncatedShape:
    """The condensed-phase sequence element Q_n: Qhat* plus a bump at k = n.

    Qhat_n(n) = Qhat*(n) + (rho - rho_c)/(n rho); everywhere else Qhat_n =
    Qhat*.  Its full-series constraint mass is exactly 1; the truncation at K
    is flagged relaxed.  Only defined in the condensed regime.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    sol = solve_alpha(params)
    if sol.regime != REGIME_CONDENSED:
        raise ValidationError(
            f"minimizing sequences exist only in the condensed regime, not {sol.regime}"
        )
    if K is None:
        K = max(2 * n, 1000)
    if K < n:
        raise ValidationError(f"truncation K={K} must cover the bump at n={n}")
    qh = qhat_star_array(params, K).copy()
    qh[n - 1] += (params.rho - sol.rho_c) / (n * params.rho)
    return TruncatedShape(qh, relaxed=True)


def minimizing_sequence_s_closed_form(
    n: int, params: SystemParams, tol: float = 1e-12
) -> float:
    """Closed-form S(Q_n): S(Q*) - eps + (Qhat*(n) + eps) log(1 + eps/Qhat*(n)).

    Here eps = (rho - rho_c)/(n rho) and S(Q*) is the condensed-phase entropy
    infimum.  S(Q_n) decreases to S(Q*) as n grows, exhibiting that the
    infimum is approached but never attained.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    sol = solve_alpha(params, tol)
    if sol.regime != REGIME_CONDENSED:
        raise ValidationError(
            f"minimizing sequences exist only in the condensed regime, not {sol.regime}"
        )
    c = 1.0 / (params.rho * thermal_factor(params.d, params.beta))
    qstar_n = c * float(n) ** (-(1.0 + params.d / 2.0))
    eps = (params.rho - sol.rho_c) / (n * params.rho)
    return sol.chi - eps + (qstar_n + eps) * math.log1p(eps / qstar_n)
