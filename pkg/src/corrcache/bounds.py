"""Analytic rate-memory bounds under uniform demands.

Lower bound: cut-set argument weighted by the probability of seeing at least
``l`` distinct requests.  Upper bound: expected rate of the compressed
random-fractional scheme with the caching distribution optimized per memory
size, capped by the expected number of distinct requests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import comb, stirling2

from .library import GroupedLibrary, kappa_of, library_entropy

__all__ = [
    "DistinctDemandPmf",
    "BoundCurve",
    "distinct_pmf",
    "lower_bound",
    "lambda_ell",
    "psi",
    "mbar",
    "upper_bound",
    "uncorrelated_rate",
    "lower_bound_curve",
    "upper_bound_curve",
]


@dataclass(frozen=True)
class DistinctDemandPmf:
    """Law of the number of distinct files among ``n`` uniform requests out of ``m``.

    ``exact[j - 1]`` is the probability of exactly ``j`` distinct requests.
    """

    n: int
    m: int
    exact: tuple[Fraction, ...]

    @property
    def pmf(self) -> np.ndarray:
        return np.array([float(x) for x in self.exact])

    def tail_exact(self, ell: int) -> Fraction:
        """P(at least ``ell`` distinct requests)."""
        if ell < 1:
            return Fraction(1)
        return sum(self.exact[ell - 1:], Fraction(0))

    def tail(self, ell: int) -> float:
        return float(self.tail_exact(ell))


def distinct_pmf(n: int, m: int) -> DistinctDemandPmf:
    """Exact pmf, ``C(m, j) S(n, j) j! / m^n`` with Stirling numbers of the second kind."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    total = m ** n
    probs = []
    for j in range(1, min(n, m) + 1):
        ways = math.comb(m, j) * int(stirling2(n, j, exact=True)) * math.factorial(j)
        probs.append(Fraction(ways, total))
    return DistinctDemandPmf(n, m, tuple(probs))


def lower_bound(n: int, m: int, M: float, H_lib_units, F_units) -> float:
    """Cut-set lower bound on the expected rate, in file units.

    ``max_l P_l [H - l M F]^+ / (floor(m / l) F)`` over ``l = 1..min(n, m)``.
    """
    if M < 0:
        raise ValueError("negative memory")
    pm = distinct_pmf(n, m)
    H = float(H_lib_units)
    F = float(F_units)
    best = 0.0
    for ell in range(1, min(n, m) + 1):
        val = pm.tail(ell) * max(H - ell * M * F, 0.0) / ((m // ell) * F)
        best = max(best, val)
    return best


def _check_pm(pM) -> None:
    arr = np.asarray(pM, dtype=float)
    if np.any(arr < -1e-12) or np.any(arr > 1 + 1e-9):
        raise ValueError(f"p*M must lie in [0, 1], got {pM}")


def lambda_ell(p, M: float, n: int, ell: int):
    """``(pM)^(l-1) (1-pM)^(n-l+1)`` with ``0^0 = 1``; vectorized over ``p``."""
    if not 1 <= ell <= n:
        raise ValueError(f"ell={ell} outside 1..{n}")
    pM = np.asarray(p, dtype=float) * M
    _check_pm(pM)
    pM = np.clip(pM, 0.0, 1.0)
    # numpy's power already gives 0**0 == 1
    out = np.power(pM, ell - 1) * np.power(1.0 - pM, n - ell + 1)
    return float(out) if out.ndim == 0 else out


def _coded_sum(pM: np.ndarray, n: int) -> np.ndarray:
    ells = np.arange(1, n + 1)
    coeff = comb(n, ells)
    x = pM[..., None]
    terms = coeff * np.power(x, ells - 1) * np.power(1.0 - x, n - ells + 1)
    return terms.sum(axis=-1)


def psi(delta, p_I, p_P, M: float, n: int):
    """Expected compressed-scheme rate for per-class caching fractions ``p_I``, ``p_P``.

    Vectorized over ``p_I`` and ``p_P`` (broadcast together).
    """
    pI = np.asarray(p_I, dtype=float) * M
    pP = np.asarray(p_P, dtype=float) * M
    _check_pm(pI)
    _check_pm(pP)
    pI, pP = np.broadcast_arrays(np.clip(pI, 0.0, 1.0), np.clip(pP, 0.0, 1.0))
    out = _coded_sum(pI, n) + float(delta) * _coded_sum(pP, n)
    return float(out) if out.ndim == 0 else out


def mbar(m: int, n: int) -> float:
    """Expected number of distinct files among ``n`` uniform requests."""
    return m * (1.0 - (1.0 - 1.0 / m) ** n)


def uncorrelated_rate(n: int, m: int, M: float) -> float:
    """Correlation-unaware coded multicast bound with uniform caching ``p = 1/m``."""
    return min(psi(0.0, 1.0 / m, 0.0, M, n), mbar(m, n))


def upper_bound(n: int, m: int, M: float, lib: GroupedLibrary) -> float:
    """Infimum over the library's correlation levels of ``min(psi*, mbar)``.

    Candidates are the generating ``delta`` of the grouped library (with the
    ensemble size it induces) and the uncorrelated fallback ``kappa = 1``.
    Once the cache holds the whole compressed library the rate is zero.
    """
    from .placement import InfeasibleDistribution, optimize_distribution_uniform

    if m != lib.m:
        raise ValueError("library size mismatch")
    cap = mbar(m, n)
    candidates = [uncorrelated_rate(n, m, M)]
    if lib.kappa > 1:
        delta = lib.delta
        kappa = kappa_of(lib, delta)
        if M * lib.file_units >= library_entropy(lib):
            candidates.append(0.0)
        else:
            try:
                p_I, p_P = optimize_distribution_uniform(n, m, M, float(delta), kappa)
            except InfeasibleDistribution:
                pass
            else:
                candidates.append(min(psi(float(delta), p_I, p_P, M, n), cap))
    return min(candidates)


@dataclass(frozen=True)
class BoundCurve:
    kind: str
    points: tuple[tuple[float, float], ...]


def lower_bound_curve(n: int, lib: GroupedLibrary, Ms) -> BoundCurve:
    H = library_entropy(lib)
    return BoundCurve("lower", tuple((float(M), lower_bound(n, lib.m, M, H, lib.file_units)) for M in Ms))


def upper_bound_curve(n: int, lib: GroupedLibrary, Ms) -> BoundCurve:
    return BoundCurve("upper", tuple((float(M), upper_bound(n, lib.m, M, lib)) for M in Ms))
