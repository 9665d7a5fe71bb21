"""Correlation-aware library compression.

Files are greedily split into reference files ("I-files", kept at full
entropy) and files compressed against a reference ("P-files").  At each
round the active file whose delta-ensemble is most likely to be requested by
at least one receiver becomes an I-file; the rest of its ensemble become
P-files referencing it and the whole ensemble leaves the active set.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .library import GroupedLibrary, as_fraction, delta_ensemble, is_delta_correlated, library_entropy

__all__ = [
    "CompressedLibrary",
    "aggregate_popularity",
    "partition_library",
    "compressed_from_references",
    "uncompressed",
    "manifest",
    "is_lossless",
]


@dataclass(frozen=True)
class CompressedLibrary:
    library: GroupedLibrary
    i_files: frozenset[int]
    p_files: frozenset[int]
    reference: Mapping[int, int]
    compressed_entropy: Mapping[int, int]
    delta_used: Fraction

    @property
    def total_units(self) -> int:
        return sum(self.compressed_entropy.values())

    def role(self, f: int) -> str:
        return "I" if f in self.i_files else "P"

    def check(self) -> None:
        """Raise ``ValueError`` if a structural invariant is broken."""
        lib = self.library
        F = lib.file_units
        if self.i_files | self.p_files != set(lib.files) or self.i_files & self.p_files:
            raise ValueError("I-files and P-files must partition the library")
        if set(self.reference) != set(self.p_files):
            raise ValueError("every P-file needs exactly one reference")
        for f in self.i_files:
            if self.compressed_entropy[f] != F:
                raise ValueError(f"I-file {f} is not stored at full entropy")
        for f, ref in self.reference.items():
            if ref not in self.i_files:
                raise ValueError(f"P-file {f} references non-I-file {ref}")
            if self.compressed_entropy[f] > self.delta_used * F:
                raise ValueError(f"P-file {f} exceeds delta*F")
        if self.total_units > lib.m * F:
            raise ValueError("compressed library larger than the original")


def aggregate_popularity(lib: GroupedLibrary, n: int, delta_thresh,
                         active_set: Iterable[int], f: int) -> float:
    """Probability that at least one of ``n`` receivers asks for a file in the
    delta-ensemble of ``f`` (restricted to ``active_set``)."""
    if n < 1:
        raise ValueError("need at least one receiver")
    mass = sum(lib.q[g - 1] for g in delta_ensemble(lib, f, delta_thresh, active_set))
    return 1.0 - (1.0 - mass) ** n


def partition_library(lib: GroupedLibrary, n: int, delta_thresh) -> CompressedLibrary:
    """Greedy I-file/P-file split; ties in aggregate popularity go to the lowest file id."""
    delta_thresh = as_fraction(delta_thresh)
    if not 0 < delta_thresh <= 1:
        raise ValueError(f"delta threshold must lie in (0, 1], got {delta_thresh}")
    if n < 1:
        raise ValueError("need at least one receiver")
    # pairwise correlation does not depend on the active set, so test each pair once
    correlated = {f: set() for f in lib.files}
    for f in lib.files:
        for g in range(f + 1, lib.m + 1):
            if is_delta_correlated(lib, f, g, delta_thresh):
                correlated[f].add(g)
                correlated[g].add(f)

    active = set(lib.files)
    reference: dict[int, int] = {}
    while active:
        best, best_pop = None, -1.0
        for f in sorted(active):
            mass = lib.q[f - 1] + sum(lib.q[g - 1] for g in correlated[f] & active)
            pop = 1.0 - (1.0 - mass) ** n
            if pop > best_pop:
                best, best_pop = f, pop
        ens = {best} | (correlated[best] & active)
        for g in ens - {best}:
            reference[g] = best
        active -= ens
    return compressed_from_references(lib, reference, delta_thresh)


def compressed_from_references(lib: GroupedLibrary, reference: Mapping[int, int],
                               delta_thresh) -> CompressedLibrary:
    """Compressed library for an explicit P-file -> I-file assignment."""
    delta_thresh = as_fraction(delta_thresh)
    p_files = frozenset(reference)
    i_files = frozenset(lib.files) - p_files
    sizes = {f: lib.file_units for f in i_files}
    for f, ref in reference.items():
        if not is_delta_correlated(lib, f, ref, delta_thresh):
            raise ValueError(f"file {f} is not {delta_thresh}-correlated with {ref}")
        sizes[f] = lib.private_units if lib.group_of(f) == lib.group_of(ref) else lib.file_units
    clib = CompressedLibrary(lib, i_files, p_files, dict(reference), sizes, delta_thresh)
    clib.check()
    return clib


def uncompressed(lib: GroupedLibrary) -> CompressedLibrary:
    """Every file as an I-file at full entropy; what correlation-unaware schemes cache."""
    files = frozenset(lib.files)
    return CompressedLibrary(lib, files, frozenset(), {}, {f: lib.file_units for f in files},
                             Fraction(0))


def manifest(clib: CompressedLibrary) -> str:
    """One line per file: ``id role reference size``; ``-`` for no reference."""
    lines = []
    for f in clib.library.files:
        ref = clib.reference.get(f)
        lines.append(f"{f} {clib.role(f)} {'-' if ref is None else ref} {clib.compressed_entropy[f]}")
    return "\n".join(lines) + "\n"


def is_lossless(clib: CompressedLibrary) -> bool:
    return clib.total_units == library_entropy(clib.library)
