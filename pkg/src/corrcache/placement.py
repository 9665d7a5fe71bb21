"""Random fractional cache placement on a (compressed) library."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence, TextIO

import numpy as np
from scipy.optimize import minimize_scalar

from .bounds import mbar, psi
from .compressor import CompressedLibrary

__all__ = [
    "PacketizedLibrary",
    "CachingDistribution",
    "CacheConfiguration",
    "InfeasibleDistribution",
    "packetize",
    "validate_distribution",
    "optimize_distribution_uniform",
    "grouped_distribution",
    "full_distribution",
    "fill_caches",
    "caches_from_packets",
]

log = logging.getLogger(__name__)

_EPS = 1e-9


class InfeasibleDistribution(ValueError):
    """No caching distribution satisfies the cache constraint."""


@dataclass(frozen=True)
class PacketizedLibrary:
    clib: CompressedLibrary
    b_units: int
    packet_count: Mapping[int, int]
    offset: Mapping[int, int]
    total_packets: int

    @property
    def files(self) -> range:
        return self.clib.library.files

    def index(self, f: int, i: int) -> int:
        """Global 0-based index of packet ``i`` (1-based) of file ``f``."""
        if not 1 <= i <= self.packet_count[f]:
            raise ValueError(f"file {f} has no packet {i}")
        return self.offset[f] + i - 1

    def packet_id(self, idx: int) -> tuple[int, int]:
        """Inverse of :meth:`index`."""
        f = int(self._file_of[idx])
        return f, idx - self.offset[f] + 1

    @property
    def _file_of(self) -> np.ndarray:
        arr = self.__dict__.get("_file_of_arr")
        if arr is None:
            arr = np.empty(self.total_packets, dtype=np.int64)
            for f in self.files:
                arr[self.offset[f]:self.offset[f] + self.packet_count[f]] = f
            object.__setattr__(self, "_file_of_arr", arr)
        return arr

    def packet_range(self, f: int) -> np.ndarray:
        return np.arange(self.offset[f], self.offset[f] + self.packet_count[f])


def packetize(clib: CompressedLibrary, b_units: int) -> PacketizedLibrary:
    """Split every compressed file into packets of ``b_units`` units."""
    if b_units < 1:
        raise ValueError("packet length must be positive")
    counts, offsets = {}, {}
    pos = 0
    for f in clib.library.files:
        size = clib.compressed_entropy[f]
        if size % b_units:
            raise ValueError(f"packet length {b_units} does not divide file {f} ({size} units)")
        counts[f] = size // b_units
        offsets[f] = pos
        pos += counts[f]
    return PacketizedLibrary(clib, b_units, counts, offsets, pos)


@dataclass(frozen=True)
class CachingDistribution:
    p: Mapping[int, float]


def _weight(clib: CompressedLibrary, f: int) -> float:
    # P-files occupy their compressed share of a file
    if f in clib.i_files:
        return 1.0
    return clib.compressed_entropy[f] / clib.library.file_units


def validate_distribution(p: Mapping[int, float], clib: CompressedLibrary, M: float) -> list[str]:
    """Return a list of violations (empty when ``p`` is admissible).

    The cache constraint is ``sum_I p_f + delta sum_P p_f = 1`` with every
    ``p_f`` in ``[0, 1/M]``.  When the cache can hold the whole compressed
    library the sum is only required to be at most 1.
    """
    problems = []
    files = set(clib.library.files)
    if set(p) != files:
        problems.append(f"distribution covers files {sorted(set(p) ^ files)} incorrectly")
        return problems
    cap = math.inf if M == 0 else 1.0 / M
    for f in sorted(files):
        if p[f] < -_EPS or p[f] > cap + _EPS:
            problems.append(f"range: p[{f}]={p[f]:.6g} outside [0, {cap:.6g}]")
    total = sum(p[f] * _weight(clib, f) for f in files)
    fits = M * clib.library.file_units >= clib.total_units
    if fits:
        if total > 1 + _EPS:
            problems.append(f"sum: cache constraint total {total:.9g} > 1")
    elif abs(total - 1.0) > _EPS:
        problems.append(f"sum: cache constraint total {total:.9g} != 1")
    return problems


def grouped_distribution(clib: CompressedLibrary, p_I: float, p_P: float) -> dict[int, float]:
    return {f: (p_I if f in clib.i_files else p_P) for f in clib.library.files}


def full_distribution(clib: CompressedLibrary, M: float) -> dict[int, float]:
    """Cache everything; valid once the compressed library fits in memory."""
    return {f: 1.0 / M for f in clib.library.files}


def optimize_distribution_uniform(n: int, m: int, M: float, delta: float, kappa: int,
                                  grid: int = 10_000, trace: TextIO | None = None) -> tuple[float, float]:
    """Caching fractions ``(p_I, p_P)`` minimizing the expected rate.

    Searches the segment ``p_I + delta (kappa - 1) p_P = kappa / m`` with both
    fractions in ``[0, 1/M]``: a uniform grid over ``p_P`` followed by a
    bounded scalar refinement around the best grid point.  If ``trace`` is
    given, the grid ``(p_P, psi)`` pairs are written to it as CSV.
    """
    if M < 0 or M > m:
        raise ValueError(f"M={M} outside [0, {m}]")
    if kappa < 1:
        raise ValueError("kappa must be positive")
    if kappa == 1:
        if M > 0 and 1.0 / m > 1.0 / M + _EPS:
            raise InfeasibleDistribution("p_I = 1/m exceeds 1/M")
        return 1.0 / m, 0.0
    target = kappa / m
    slope = delta * (kappa - 1)
    if M == 0:
        # every distribution gives the same (empty) caches
        p = target / (1 + slope)
        return p, p
    cap = 1.0 / M
    lo = max(0.0, (target - cap) / slope)
    hi = min(cap, target / slope)
    if lo > hi + _EPS:
        raise InfeasibleDistribution(
            f"no p_P in [0, {cap:.6g}] keeps p_I = {target:.6g} - {slope:.6g} p_P within [0, {cap:.6g}]")
    hi = max(hi, lo)

    def p_I_of(pP):
        return np.clip(target - slope * np.asarray(pP), 0.0, cap)

    def objective(pP):
        return psi(delta, p_I_of(pP), pP, M, n)

    xs = np.linspace(lo, hi, grid)
    ys = objective(xs)
    if trace is not None:
        w = csv.writer(trace)
        w.writerow(["p_P", "psi"])
        w.writerows((f"{x:.9g}", f"{y:.9g}") for x, y in zip(xs, ys))
    k = int(np.argmin(ys))
    best_x, best_y = float(xs[k]), float(ys[k])
    if hi > lo:
        a, b = float(xs[max(k - 1, 0)]), float(xs[min(k + 1, grid - 1)])
        res = minimize_scalar(lambda x: float(objective(x)), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-14})
        if res.success and res.fun < best_y:
            best_x, best_y = float(res.x), float(res.fun)
    cap_rate = mbar(m, n)
    if best_y > cap_rate:
        log.debug("psi*=%.4g above mbar=%.4g at M=%g", best_y, cap_rate, M)
    return float(p_I_of(best_x)), best_x


@dataclass(frozen=True)
class CacheConfiguration:
    """Cached packets per receiver, as a read-only boolean ``(n, packets)`` mask."""

    plib: PacketizedLibrary
    M: float
    mask: np.ndarray

    @property
    def n(self) -> int:
        return self.mask.shape[0]

    def packets(self, u: int) -> list[tuple[int, int]]:
        """Sorted ``(file, packet)`` ids cached at receiver ``u`` (1-based)."""
        return [self.plib.packet_id(int(i)) for i in np.flatnonzero(self.mask[u - 1])]

    def has(self, u: int, f: int, i: int) -> bool:
        return bool(self.mask[u - 1, self.plib.index(f, i)])

    def cached_units(self, u: int) -> int:
        return int(self.mask[u - 1].sum()) * self.plib.b_units

    def dump(self) -> str:
        lines = []
        for u in range(1, self.n + 1):
            toks = " ".join(f"{f}:{i}" for f, i in self.packets(u))
            lines.append(f"u{u}: {toks}")
        return "\n".join(lines) + "\n"


def _cache_count(frac: float, count: int) -> int:
    return min(count, int(math.floor(frac * count + _EPS)))


def fill_caches(plib: PacketizedLibrary, p: Mapping[int, float], M: float, n: int,
                seed: int) -> CacheConfiguration:
    """Each receiver stores ``floor(p_f M * packets(f))`` random packets of every file.

    The packets picked for receiver ``u`` and file ``f`` depend only on
    ``(seed, u, f)``.
    """
    problems = validate_distribution(p, plib.clib, M)
    if problems:
        raise ValueError("invalid caching distribution: " + "; ".join(problems))
    mask = np.zeros((n, plib.total_packets), dtype=bool)
    lost = 0
    for f in plib.files:
        count = plib.packet_count[f]
        frac = p[f] * M
        k = _cache_count(frac, count)
        lost += frac * count - k
        if k == 0:
            continue
        base = plib.offset[f]
        for u in range(n):
            rng = np.random.default_rng([seed, u + 1, f])
            mask[u, base + rng.choice(count, size=k, replace=False)] = True
    if lost > _EPS:
        log.debug("floor rounding left %.3g packets per receiver unused", lost)
    mask.setflags(write=False)
    cfg = CacheConfiguration(plib, M, mask)
    return cfg


def caches_from_packets(plib: PacketizedLibrary, M: float,
                        per_receiver: Sequence[Sequence[tuple[int, int]]]) -> CacheConfiguration:
    """Build a cache configuration from explicit ``(file, packet)`` lists."""
    mask = np.zeros((len(per_receiver), plib.total_packets), dtype=bool)
    for u, pkts in enumerate(per_receiver):
        for f, i in pkts:
            mask[u, plib.index(f, i)] = True
    mask.setflags(write=False)
    return CacheConfiguration(plib, M, mask)
