"""Delivery rates of the correlation-aware scheme and the correlation-unaware baselines.

All rates are in file units: transmitted units divided by the file size.
The baselines cache from the library with every file kept at full entropy
(see :func:`corrcache.compressor.uncompressed`) under uniform ``p = 1/m``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .delivery import Coloring, ConflictGraph, build_conflict_graph, color_graph
from .placement import CacheConfiguration

__all__ = [
    "CodedDelivery",
    "coded_delivery",
    "rate_comp_cacm",
    "rate_lcu",
    "rate_lcnm",
    "scheme_rapcm",
]


@dataclass(frozen=True)
class CodedDelivery:
    graph: ConflictGraph
    coloring: Coloring
    rate: float


def coded_delivery(demand: Sequence[int], caches: CacheConfiguration,
                   policy: str = "degree", seed: int | None = None) -> CodedDelivery:
    """Conflict graph plus greedy coloring for one demand."""
    graph = build_conflict_graph(demand, caches)
    coloring = color_graph(graph, policy, seed)
    plib = caches.plib
    rate = coloring.num_colors * plib.b_units / plib.clib.library.file_units
    return CodedDelivery(graph, coloring, rate)


def rate_comp_cacm(demand, caches, policy="degree", seed=None) -> float:
    if not caches.plib.clib.p_files and caches.plib.clib.library.kappa > 1:
        raise ValueError("expected a compressed library")
    return coded_delivery(demand, caches, policy, seed).rate


def _missing(u: int, f: int, caches: CacheConfiguration) -> np.ndarray:
    rng = caches.plib.packet_range(f)
    return rng[~caches.mask[u - 1, rng]]


def _require_uncompressed(caches: CacheConfiguration) -> None:
    if caches.plib.clib.p_files:
        raise ValueError("baselines run on the uncompressed library")


def rate_lcu(demand: Sequence[int], caches: CacheConfiguration) -> float:
    """Unicast: every receiver gets its own copy of each missing packet."""
    _require_uncompressed(caches)
    plib = caches.plib
    total = sum(len(_missing(u, f, caches)) for u, f in enumerate(demand, start=1))
    return total * plib.b_units / plib.clib.library.file_units


def rate_lcnm(demand: Sequence[int], caches: CacheConfiguration) -> float:
    """Naive multicast: each packet missing at some requester is sent once, uncoded."""
    _require_uncompressed(caches)
    plib = caches.plib
    total = 0
    for f in sorted(set(demand)):
        who = [u for u, g in enumerate(demand, start=1) if g == f]
        rng = plib.packet_range(f)
        total += int((~caches.mask[np.ix_([u - 1 for u in who], rng)]).any(axis=0).sum())
    return total * plib.b_units / plib.clib.library.file_units


def scheme_rapcm(demand: Sequence[int], caches: CacheConfiguration,
                 policy: str = "degree", seed: int | None = None) -> float:
    """Random popularity caching with coded multicast (every file an I-file)."""
    _require_uncompressed(caches)
    return coded_delivery(demand, caches, policy, seed).rate
