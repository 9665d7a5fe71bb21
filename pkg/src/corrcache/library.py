"""Grouped correlated file libraries.

A library of ``m`` files is split into consecutive groups of ``kappa`` files.
Every file in a group is the concatenation of a segment shared by the whole
group and a private segment of ``delta * F`` units, so that

    H(W_f) = F,   H(W_f | W_f') = delta * F   (same group),

and files from different groups are independent.  All entropies are counted
in integer "units"; one unit is ``unit_bits`` bits once the library is
realized.

File ids are 1-based throughout the package.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "GroupedLibrary",
    "BitLibrary",
    "as_fraction",
    "build_grouped_library",
    "realize_bits",
    "joint_entropy",
    "is_delta_correlated",
    "delta_ensemble",
    "kappa_of",
    "library_entropy",
    "library_to_config",
    "library_from_config",
]


def as_fraction(x) -> Fraction:
    """Exact rational for ``x``; floats go through their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class GroupedLibrary:
    m: int
    kappa: int
    delta: Fraction
    file_units: int
    q: tuple[float, ...]
    q_mode: str = "uniform"

    @property
    def private_units(self) -> int:
        """Units of a file not shared with its group (its conditional entropy)."""
        if self.kappa == 1:
            return self.file_units
        return int(self.delta * self.file_units)

    @property
    def shared_units(self) -> int:
        return self.file_units - self.private_units

    @property
    def n_groups(self) -> int:
        return self.m // self.kappa

    @property
    def groups(self) -> tuple[tuple[int, ...], ...]:
        k = self.kappa
        return tuple(tuple(range(g * k + 1, (g + 1) * k + 1)) for g in range(self.n_groups))

    @property
    def files(self) -> range:
        return range(1, self.m + 1)

    def group_of(self, f: int) -> int:
        """0-based group index of file ``f``."""
        self._check_file(f)
        return (f - 1) // self.kappa

    def _check_file(self, f: int) -> None:
        if not 1 <= f <= self.m:
            raise ValueError(f"file id {f} outside 1..{self.m}")


def build_grouped_library(m: int, kappa: int, delta, file_units: int,
                          q: Sequence[float] | None = None) -> GroupedLibrary:
    """Build a grouped library with consecutive groups ``{1..kappa}, ...``.

    Parameters
    ----------
    m : int
        Number of files.
    kappa : int
        Group size; must divide ``m``.  With ``kappa == 1`` the files are
        independent and ``delta`` is ignored.
    delta : rational-like
        Fraction of a file that is private, in (0, 1].
    file_units : int
        Entropy of every file, in units.
    q : sequence of float, optional
        Demand distribution. Uniform if omitted.
    """
    if m < 1 or kappa < 1:
        raise ValueError("m and kappa must be positive")
    if m % kappa:
        raise ValueError(f"kappa={kappa} does not divide m={m}")
    if file_units < 1:
        raise ValueError("file_units must be positive")
    delta = as_fraction(delta)
    if kappa > 1:
        if not 0 < delta <= 1:
            raise ValueError(f"delta must lie in (0, 1], got {delta}")
        if (delta * file_units).denominator != 1:
            raise ValueError(f"delta*file_units = {delta * file_units} is not an integer")
    if q is None:
        q_t = tuple([1.0 / m] * m)
        mode = "uniform"
    else:
        q_t = tuple(float(x) for x in q)
        if len(q_t) != m:
            raise ValueError(f"q has {len(q_t)} entries, expected {m}")
        if min(q_t) < 0 or abs(sum(q_t) - 1.0) > 1e-12:
            raise ValueError("q must be a probability vector")
        mode = "custom"
    return GroupedLibrary(m=m, kappa=kappa, delta=delta, file_units=file_units, q=q_t, q_mode=mode)


@dataclass(frozen=True)
class BitLibrary:
    """A realization of a grouped library as 0/1 ``uint8`` arrays."""

    library: GroupedLibrary
    unit_bits: int
    shared: tuple[np.ndarray, ...]
    private: tuple[np.ndarray, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def bits(self, f: int) -> np.ndarray:
        """Full content of file ``f`` (shared segment then private segment)."""
        out = self._cache.get(f)
        if out is None:
            g = self.library.group_of(f)
            out = np.concatenate([self.shared[g], self.private[f - 1]])
            out.setflags(write=False)
            self._cache[f] = out
        return out

    def shared_bits(self, f: int) -> np.ndarray:
        return self.shared[self.library.group_of(f)]

    def private_bits(self, f: int) -> np.ndarray:
        return self.private[f - 1]


def _stream(seed: int, kind: int, index: int, nbits: int) -> np.ndarray:
    rng = np.random.default_rng([seed, kind, index])
    a = rng.integers(0, 2, size=nbits, dtype=np.uint8)
    a.setflags(write=False)
    return a


def realize_bits(lib: GroupedLibrary, seed: int, unit_bits: int = 8) -> BitLibrary:
    """Draw i.i.d. uniform bits for every segment.

    Each shared segment is keyed by ``(seed, 0, group)`` and each private
    segment by ``(seed, 1, file)``, so the result depends on nothing else.
    """
    shared = tuple(_stream(seed, 0, g, lib.shared_units * unit_bits) for g in range(lib.n_groups))
    private = tuple(_stream(seed, 1, f, lib.private_units * unit_bits) for f in lib.files)
    return BitLibrary(lib, unit_bits, shared, private)


def joint_entropy(lib: GroupedLibrary, subset: Iterable[int]) -> int:
    """Joint entropy, in units, of the files in ``subset``."""
    subset = set(subset)
    if not subset:
        raise ValueError("joint entropy of an empty set")
    counts: dict[int, int] = {}
    for f in subset:
        g = lib.group_of(f)
        counts[g] = counts.get(g, 0) + 1
    return sum(lib.shared_units + c * lib.private_units for c in counts.values())


def is_delta_correlated(lib: GroupedLibrary, f: int, f_prime: int, delta_thresh) -> bool:
    if f == f_prime:
        raise ValueError("a file is not compared with itself")
    bound = (1 + as_fraction(delta_thresh)) * lib.file_units
    return joint_entropy(lib, (f, f_prime)) <= bound


def delta_ensemble(lib: GroupedLibrary, f: int, delta_thresh,
                   active_set: Iterable[int] | None = None) -> frozenset[int]:
    """``f`` together with every file of ``active_set`` that is delta-correlated with it."""
    active = set(lib.files) if active_set is None else set(active_set)
    if f not in active:
        raise ValueError(f"file {f} is not in the active set")
    # only same-group files can share entropy, but test every candidate anyway
    return frozenset({f} | {g for g in active if g != f and is_delta_correlated(lib, f, g, delta_thresh)})


def kappa_of(lib: GroupedLibrary, delta_thresh) -> int:
    """Smallest delta-ensemble size over all files (the ensemble counts the file itself)."""
    return _kappa_of(lib, as_fraction(delta_thresh))


@lru_cache(maxsize=64)
def _kappa_of(lib: GroupedLibrary, delta_thresh: Fraction) -> int:
    return min(len(delta_ensemble(lib, f, delta_thresh)) for f in lib.files)


def library_entropy(lib: GroupedLibrary) -> int:
    return joint_entropy(lib, lib.files)


def library_to_config(lib: GroupedLibrary, seed: int) -> str:
    """Flat ``key=value`` description of a library (the bits are regenerated from ``seed``)."""
    lines = [
        f"m={lib.m}",
        f"kappa={lib.kappa}",
        f"delta={lib.delta}",
        f"file_units={lib.file_units}",
        f"q_mode={lib.q_mode}",
        f"seed={seed}",
    ]
    return "\n".join(lines) + "\n"


def library_from_config(cfg: Mapping[str, str]) -> tuple[GroupedLibrary, int]:
    if cfg.get("q_mode", "uniform") != "uniform":
        raise ValueError(f"unsupported q_mode {cfg['q_mode']!r}")
    lib = build_grouped_library(int(cfg["m"]), int(cfg["kappa"]), Fraction(cfg["delta"]),
                                int(cfg["file_units"]))
    return lib, int(cfg.get("seed", 0))
