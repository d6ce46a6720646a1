"""Exact finite-n canonical normalisation as a weighted sum over partitions.

Each partition (cycle type) carries weight
prod_k |V|^r_k / (r_k! k^r_k) * (4 pi beta k)^(-d r_k / 2),
one volume factor per cycle.  A brute-force sum over all n! permutations
serves as the independent oracle for small n; the free-space heat-kernel mass
is used per cycle, with the confinement correction exposed as a bracketing
diagnostic rather than folded into the weights.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import CapError, ValidationError
from .partitions import EXHAUSTIVE_CAP, Partition, iter_parts, partition_count
from .thermo import SystemParams, chi

BRUTE_FORCE_CAP = 9
EXPECTATION_CAP = 40


def _require_n(params: SystemParams) -> int:
    if params.n is None:
        raise ValidationError("this operation needs params.n set")
    return params.n


def _cycle_log_constants(params: SystemParams, n: int) -> list[float]:
    """c[k] = log|V| - log k - (d/2) log(4 pi beta k), for k = 0..n (c[0] unused)."""
    log_v = math.log(params.volume)
    d_half = params.d / 2.0
    four_pi_beta = 4.0 * math.pi * params.beta
    c = [0.0] * (n + 1)
    for k in range(1, n + 1):
        c[k] = log_v - math.log(k) - d_half * math.log(four_pi_beta * k)
    return c


def log_weight(lam: Partition, params: SystemParams) -> float:
    """Natural-log ensemble weight of one partition.

    sum_k [ r_k log|V| - log(r_k!) - r_k log k - (d/2) r_k log(4 pi beta k) ].
    """
    n = _require_n(params)
    if lam.n != n:
        raise ValidationError(f"partition of {lam.n} does not match params.n={n}")
    c = _cycle_log_constants(params, n)
    w = 0.0
    for k, r in lam.occupations:
        w += r * c[k] - math.lgamma(r + 1)
    return w


def _logsumexp(values: Iterable[float]) -> float:
    arr = np.asarray(list(values), dtype=np.float64)
    m = float(np.max(arr))
    return m + math.log(float(np.sum(np.exp(arr - m))))


def brute_force_log_Z(params: SystemParams) -> float:
    """Oracle: the permutation-sum normalisation, iterating all n! elements.

    Each permutation contributes the product over its cycles of
    |V| (4 pi beta k)^(-d/2); the total is divided by n!.
    """
    n = _require_n(params)
    if n > BRUTE_FORCE_CAP:
        raise CapError(
            f"brute force is capped at n <= {BRUTE_FORCE_CAP} (n! blowup), got {n}"
        )
    log_v = math.log(params.volume)
    d_half = params.d / 2.0
    four_pi_beta = 4.0 * math.pi * params.beta
    t = [0.0] * (n + 1)
    for k in range(1, n + 1):
        t[k] = log_v - d_half * math.log(four_pi_beta * k)

    per_perm = []
    for perm in itertools.permutations(range(n)):
        seen = [False] * n
        w = 0.0
        for i in range(n):
            if seen[i]:
                continue
            length = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            w += t[length]
        per_perm.append(w)
    return _logsumexp(per_perm) - math.lgamma(n + 1)


def exact_log_Z(params: SystemParams, confinement: str = "free") -> float:
    """log of the partition-sum normalisation, streamed over all of P_n.

    Stable log-sum-exp with max shift; weights span hundreds of orders of
    magnitude by n ~ 60.  confinement="lower" multiplies every cycle weight
    by the bracketing factor (1 - e^(-d n / 4 beta)); "free" is the
    free-space heat-kernel mass.
    """
    n = _require_n(params)
    if n > EXHAUSTIVE_CAP:
        raise CapError(f"exact enumeration is capped at n <= {EXHAUSTIVE_CAP}, got {n}")
    if confinement not in ("free", "lower"):
        raise ValidationError(f"unknown confinement mode {confinement!r}")
    c = _cycle_log_constants(params, n)
    if confinement == "lower":
        shift = math.log1p(-math.exp(-params.d * n / (4.0 * params.beta)))
        c = [ck + shift for ck in c]
    lg = [math.lgamma(r + 1) for r in range(n + 1)]

    weights = np.empty(partition_count(n), dtype=np.float64)
    idx = 0
    for parts in iter_parts(n):
        w = 0.0
        cur = parts[0]
        cnt = 0
        for p in parts:
            if p == cur:
                cnt += 1
            else:
                w += cnt * c[cur] - lg[cnt]
                cur = p
                cnt = 1
        w += cnt * c[cur] - lg[cnt]
        weights[idx] = w
        idx += 1
    m = float(np.max(weights))
    return m + math.log(float(np.sum(np.exp(weights - m))))


def confinement_correction_bound(k: int, params: SystemParams) -> tuple[float, float]:
    """Bracketing factors for the mass of one k-cycle under confinement.

    (4 pi beta k)^(-d/2) (1 - e^(-d n/4 beta)) <= mass <= (4 pi beta k)^(-d/2).
    """
    n = _require_n(params)
    if k < 1:
        raise ValidationError(f"cycle length k must be >= 1, got {k}")
    upper = (4.0 * math.pi * params.beta * k) ** (-params.d / 2.0)
    lower = upper * (1.0 - math.exp(-params.d * n / (4.0 * params.beta)))
    return lower, upper


def confinement_log_Z_bracket(params: SystemParams) -> dict[str, float]:
    """Free-space log Z with its worst-case confinement shift.

    The lower evaluation multiplies every cycle by the bracketing factor; the
    shift can never exceed n |log(1 - e^(-d n/4 beta))| because a partition
    has at most n cycles.
    """
    n = _require_n(params)
    upper = exact_log_Z(params, confinement="free")
    lower = exact_log_Z(params, confinement="lower")
    max_shift = n * abs(math.log1p(-math.exp(-params.d * n / (4.0 * params.beta))))
    return {"log_z": upper, "log_z_lower": lower, "max_shift": max_shift}


@dataclass(frozen=True)
class WeightedEnsemble:
    """All partitions of n with their log weights and the normalisation."""

    params: SystemParams
    log_weights: dict[Partition, float]
    log_Z: float

    def probability(self, lam: Partition) -> float:
        return math.exp(self.log_weights[lam] - self.log_Z)


def weighted_ensemble(params: SystemParams) -> WeightedEnsemble:
    """Materialise the distribution over P_n (small n only)."""
    n = _require_n(params)
    if n > EXPECTATION_CAP:
        raise CapError(
            f"materialised ensembles are capped at n <= {EXPECTATION_CAP}, got {n}"
        )
    c = _cycle_log_constants(params, n)
    table: dict[Partition, float] = {}
    from .partitions import enumerate_partitions

    for lam in enumerate_partitions(n):
        w = 0.0
        for k, r in lam.occupations:
            w += r * c[k] - math.lgamma(r + 1)
        table[lam] = w
    log_z = _logsumexp(table.values())
    return WeightedEnsemble(params=params, log_weights=table, log_Z=log_z)


def mu_N_expected_shape(params: SystemParams) -> np.ndarray:
    """Exact expectations E[Qhat(k)] = E[r_k]/n for k = 1..n.

    Computed by the full weighted sum; sum_k k E[Qhat(k)] = 1 holds pathwise.
    """
    n = _require_n(params)
    if n > EXPECTATION_CAP:
        raise CapError(
            f"exact expectations are capped at n <= {EXPECTATION_CAP}, got {n}"
        )
    log_z = exact_log_Z(params)
    c = _cycle_log_constants(params, n)
    lg = [math.lgamma(r + 1) for r in range(n + 1)]
    expected_r = np.zeros(n + 1, dtype=np.float64)
    total_prob = 0.0
    for parts in iter_parts(n):
        w = 0.0
        cur = parts[0]
        cnt = 0
        runs = []
        for p in parts:
            if p == cur:
                cnt += 1
            else:
                w += cnt * c[cur] - lg[cnt]
                runs.append((cur, cnt))
                cur = p
                cnt = 1
        w += cnt * c[cur] - lg[cnt]
        runs.append((cur, cnt))
        prob = math.exp(w - log_z)
        total_prob += prob
        for k, r in runs:
            expected_r[k] += prob * r
    if abs(total_prob - 1.0) > 1e-10:
        raise ValidationError(
            f"ensemble probabilities sum to {total_prob}, expected 1"
        )
    return expected_r[1:] / n


class ScanRow(NamedTuple):
    n: int
    log_z_per_n: float
    neg_chi: float
    gap: float


def convergence_scan(
    params_base: SystemParams, n_list: list[int], tol: float = 1e-10
) -> list[ScanRow]:
    """(1/n) log Z_n against its limit -chi, volume rescaled as n/rho per row.

    The gap shrinks with n; its size at small n is a regression fixture, not
    a limit statement.
    """
    neg_chi = -chi(params_base, tol)
    rows = []
    for n in n_list:
        p = params_base.with_n(int(n))
        lz = exact_log_Z(p) / n
        rows.append(ScanRow(n=int(n), log_z_per_n=lz, neg_chi=neg_chi, gap=lz - neg_chi))
    return rows
