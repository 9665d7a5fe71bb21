"""Coded multicast delivery: conflict graph, greedy coloring, XOR encoding, decoding.

A vertex is a ``(packet, receiver)`` pair where the receiver needs a packet
it does not hold.  Two vertices conflict when they carry different packets
and at least one receiver lacks the other's packet; vertices with the same
color can then be XOR-ed into one transmission that every involved receiver
can decode from its cache.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .compressor import CompressedLibrary
from .library import BitLibrary
from .placement import CacheConfiguration, PacketizedLibrary

__all__ = [
    "DecodeError",
    "ConflictGraph",
    "Coloring",
    "MulticastCodeword",
    "PacketStore",
    "ReceiverCache",
    "required_packets",
    "build_conflict_graph",
    "greedy_color",
    "cover_color",
    "color_graph",
    "encode",
    "decode",
    "dump_instance",
]


class DecodeError(RuntimeError):
    """A receiver could not recover a packet it needs."""


def _check_demand(demand: Sequence[int], caches: CacheConfiguration) -> None:
    if len(demand) != caches.n:
        raise ValueError(f"demand has {len(demand)} entries for {caches.n} receivers")
    m = caches.plib.clib.library.m
    for f in demand:
        if not 1 <= f <= m:
            raise ValueError(f"requested file {f} outside 1..{m}")


def required_packets(u: int, f_u: int, caches: CacheConfiguration) -> np.ndarray:
    """Global indices of the packets receiver ``u`` is missing for file ``f_u``.

    A P-file request also needs the missing packets of its reference I-file.
    """
    plib = caches.plib
    files = [f_u]
    ref = plib.clib.reference.get(f_u)
    if ref is not None:
        files.append(ref)
    idx = np.concatenate([plib.packet_range(f) for f in files])
    return idx[~caches.mask[u - 1, idx]]


@dataclass(frozen=True)
class ConflictGraph:
    """Vertices of a delivery instance; the conflict matrix is built on first use.

    ``holds[u - 1, k]`` tells whether receiver ``u`` caches the packet of
    vertex ``k``.
    """

    packets: np.ndarray      # global packet index per vertex
    receivers: np.ndarray    # 1-based receiver per vertex
    holds: np.ndarray        # (n, V) bool

    @property
    def size(self) -> int:
        return len(self.packets)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Symmetric bool conflict matrix with an empty diagonal."""
        has = self.holds[self.receivers - 1]   # has[i, j]: receiver of i holds packet of j
        adj = (self.packets[:, None] != self.packets[None, :]) & ~(has & has.T)
        adj.setflags(write=False)
        return adj

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def edges(self) -> list[tuple[int, int]]:
        a, b = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(a.tolist(), b.tolist()))


def build_conflict_graph(demand: Sequence[int], caches: CacheConfiguration) -> ConflictGraph:
    _check_demand(demand, caches)
    parts, owners = [], []
    for u, f in enumerate(demand, start=1):
        need = required_packets(u, f, caches)
        parts.append(need)
        owners.append(np.full(len(need), u, dtype=np.int64))
    packets = np.concatenate(parts)
    receivers = np.concatenate(owners)
    holds = caches.mask[:, packets]
    holds.setflags(write=False)
    return ConflictGraph(packets, receivers, holds)


@dataclass(frozen=True)
class Coloring:
    colors: np.ndarray
    num_colors: int

    def classes(self) -> list[np.ndarray]:
        """Vertex indices per color, colors ascending."""
        order = np.argsort(self.colors, kind="stable")
        bounds = np.searchsorted(self.colors[order], np.arange(self.num_colors + 1))
        return [order[bounds[c]:bounds[c + 1]] for c in range(self.num_colors)]

    def is_proper(self, graph: ConflictGraph) -> bool:
        same = self.colors[:, None] == self.colors[None, :]
        return not bool((same & graph.adjacency).any())


def _order(graph: ConflictGraph, policy: str, seed: int | None) -> np.ndarray:
    if policy == "degree":
        # descending degree, then packet index, then receiver
        return np.lexsort((graph.receivers, graph.packets, -graph.degrees))
    if policy == "random":
        return np.random.default_rng(seed).permutation(graph.size)
    raise ValueError(f"unknown coloring policy {policy!r}")


def greedy_color(graph: ConflictGraph, policy: str = "degree", seed: int | None = None) -> Coloring:
    """First-fit coloring along a vertex order.

    ``policy="degree"`` visits vertices by decreasing conflict degree with
    ties broken by packet then receiver; ``policy="random"`` uses a seeded
    random order.  Each vertex takes the smallest color unused by its
    already colored neighbours.
    """
    V = graph.size
    colors = np.full(V, -1, dtype=np.int64)
    if V == 0:
        return Coloring(colors, 0)
    adj = graph.adjacency
    used = np.zeros(V + 1, dtype=bool)
    ncolors = 0
    for v in _order(graph, policy, seed):
        nc = colors[adj[v]]
        nc = nc[nc >= 0]
        used[nc] = True
        c = int(np.argmin(used[:ncolors + 1]))
        used[nc] = False
        colors[v] = c
        ncolors = max(ncolors, c + 1)
    return Coloring(colors, ncolors)


def _popcounts(N: int) -> np.ndarray:
    x = np.arange(N)
    out = np.zeros(N, dtype=np.int64)
    while x.any():
        out += x & 1
        x = x >> 1
    return out


def cover_color(graph: ConflictGraph) -> Coloring:
    """Color by packing receivers into XOR groups over caching patterns.

    A vertex of receiver ``u`` whose packet is cached at the receiver set
    ``T`` can share a transmission with a receiver set ``S`` only if
    ``S - {u}`` is contained in ``T``.  Packets wanted by several receivers
    are placed first, each with the largest compatible group; the remaining
    vertices are then grouped greedily, always forming the largest feasible
    receiver set and spending the least widely cached packets.  Cost grows
    like ``2**n`` per transmission, so ``n`` is limited to 16.
    """
    n = graph.holds.shape[0]
    if n > 16:
        raise ValueError("cover coloring supports at most 16 receivers")
    V = graph.size
    colors = np.full(V, -1, dtype=np.int64)
    if V == 0:
        return Coloring(colors, 0)
    N = 1 << n
    subsets = np.arange(N)
    popc = _popcounts(N)
    pattern = (graph.holds.T.astype(np.int64) << np.arange(n)).sum(axis=1)
    owner = graph.receivers - 1

    by_packet = np.argsort(graph.packets, kind="stable")
    uniq, starts, counts = np.unique(graph.packets[by_packet], return_index=True, return_counts=True)
    groups = {int(p): by_packet[a:a + c] for p, a, c in zip(uniq, starts, counts) if c > 1}
    shared = set(groups)

    # singles bucketed by (receiver, pattern), each bucket in ascending vertex order
    cnt = np.zeros((n, N), dtype=np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    for v in range(V - 1, -1, -1):
        if int(graph.packets[v]) in shared:
            continue
        key = (int(owner[v]), int(pattern[v]))
        buckets.setdefault(key, []).append(v)
        cnt[key] += 1
    avail = cnt.copy()   # avail[u, A]: singles of u whose pattern contains A
    for i in range(n):
        lo = subsets[(subsets >> i) & 1 == 0]
        avail[:, lo] += avail[:, lo | (1 << i)]
    without = [subsets & ~(1 << w) for w in range(n)]
    member = [((subsets >> w) & 1).astype(bool) for w in range(n)]

    def feasible(cands: np.ndarray, skip: int) -> np.ndarray:
        ok = np.ones(len(cands), dtype=bool)
        for w in range(n):
            if skip >> w & 1:
                continue
            inside = (cands >> w) & 1 == 1
            ok &= ~inside | (avail[w, cands & ~(1 << w)] > 0)
        return ok

    def take(w: int, need: int) -> int:
        fits = np.flatnonzero((cnt[w] > 0) & ((subsets & need) == need))
        t = int(fits[np.argmin(popc[fits])])   # argmin keeps the lowest pattern on ties
        cnt[w, t] -= 1
        avail[w, (subsets & ~t) == 0] -= 1
        return buckets[(w, t)].pop()

    def pick(cands: np.ndarray) -> int:
        sizes = popc[cands]
        return int(cands[np.flatnonzero(sizes == sizes.max())[0]])

    color = 0
    for p in sorted(shared):
        verts = groups[p]
        R = int(np.bitwise_or.reduce(1 << owner[verts]))
        T = int(pattern[verts[0]])
        subs = subsets[(subsets & ~T) == 0]
        cands = np.unique(subs | R)
        S = pick(cands[feasible(cands, R)])
        colors[verts] = color
        for w in range(n):
            if (S >> w & 1) and not (R >> w & 1):
                colors[take(w, S & ~(1 << w))] = color
        color += 1

    remaining = int(cnt.sum())
    while remaining:
        ok = np.ones(N, dtype=bool)
        ok[0] = False
        for w in range(n):
            ok &= ~member[w] | (avail[w, without[w]] > 0)
        S = pick(subsets[ok])
        if popc[S] == 1:
            # nothing left can be combined
            rest = np.flatnonzero(colors < 0)
            colors[rest] = color + np.arange(len(rest))
            color += len(rest)
            break
        for w in range(n):
            if S >> w & 1:
                colors[take(w, S & ~(1 << w))] = color
                remaining -= 1
        color += 1
    return Coloring(colors, color)


def color_graph(graph: ConflictGraph, policy: str = "degree", seed: int | None = None) -> Coloring:
    """Dispatch to :func:`greedy_color` or, for ``policy="cover"``, :func:`cover_color`."""
    if policy == "cover":
        return cover_color(graph)
    return greedy_color(graph, policy, seed)


class PacketStore:
    """Contents of every compressed packet as rows of a 0/1 matrix."""

    def __init__(self, plib: PacketizedLibrary, bitlib: BitLibrary):
        lib = plib.clib.library
        if bitlib.library != lib:
            raise ValueError("bit library realizes a different library")
        self.plib = plib
        self.bitlib = bitlib
        width = plib.b_units * bitlib.unit_bits
        rows = [compressed_bits(plib.clib, bitlib, f).reshape(plib.packet_count[f], width)
                for f in lib.files]
        self.rows = np.vstack(rows)
        self.rows.setflags(write=False)

    def __getitem__(self, idx) -> np.ndarray:
        return self.rows[idx]


def compressed_bits(clib: CompressedLibrary, bitlib: BitLibrary, f: int) -> np.ndarray:
    """The stored form of file ``f``: full content for I-files, the part not
    predictable from the reference for P-files."""
    ref = clib.reference.get(f)
    lib = clib.library
    if ref is None or lib.group_of(ref) != lib.group_of(f):
        return bitlib.bits(f)
    return bitlib.private_bits(f)


class ReceiverCache:
    """What receiver ``u`` can read: only the packets marked in its cache row."""

    def __init__(self, caches: CacheConfiguration, store: PacketStore, u: int):
        self.u = u
        self._row = caches.mask[u - 1]
        self._store = store

    def __contains__(self, idx: int) -> bool:
        return bool(self._row[idx])

    def __getitem__(self, idx: int) -> np.ndarray:
        if not self._row[idx]:
            raise KeyError(idx)
        return self._store[idx]


@dataclass(frozen=True)
class MulticastCodeword:
    """One XOR payload per color; ``header[c]`` lists the packets combined in it."""

    header: tuple[tuple[int, ...], ...]
    payloads: tuple[np.ndarray, ...]
    b_units: int
    file_units: int

    @property
    def num_transmissions(self) -> int:
        return len(self.payloads)

    @property
    def length_units(self) -> int:
        return self.num_transmissions * self.b_units

    @property
    def rate(self) -> float:
        return self.length_units / self.file_units

    @cached_property
    def classes_of(self) -> dict[int, list[int]]:
        """Packet index -> colors whose payload contains it."""
        out: dict[int, list[int]] = {}
        for c, members in enumerate(self.header):
            for p in members:
                out.setdefault(p, []).append(c)
        return out


def encode(graph: ConflictGraph, coloring: Coloring, store: PacketStore) -> MulticastCodeword:
    if not coloring.is_proper(graph):
        raise ValueError("coloring is not proper")
    header, payloads = [], []
    for members in coloring.classes():
        pkts = np.unique(graph.packets[members])
        header.append(tuple(int(p) for p in pkts))
        payloads.append(np.bitwise_xor.reduce(store[pkts], axis=0))
    lib = store.plib.clib.library
    return MulticastCodeword(tuple(header), tuple(payloads), store.plib.b_units, lib.file_units)


def _recover(idx: int, codeword: MulticastCodeword, cache: ReceiverCache) -> np.ndarray:
    for c in codeword.classes_of.get(idx, ()):
        members, payload = codeword.header[c], codeword.payloads[c]
        others = [p for p in members if p != idx]
        if all(p in cache for p in others):
            out = payload.copy()
            for p in others:
                out ^= cache[p]
            return out
    raise DecodeError(f"receiver {cache.u} cannot recover packet {idx}")


def _assemble(f: int, plib: PacketizedLibrary, codeword: MulticastCodeword,
              cache: ReceiverCache) -> np.ndarray:
    chunks = []
    for idx in plib.packet_range(f):
        idx = int(idx)
        chunks.append(cache[idx] if idx in cache else _recover(idx, codeword, cache))
    return np.concatenate(chunks) if chunks else np.empty(0, dtype=np.uint8)


def decode(u: int, f_u: int, codeword: MulticastCodeword, cache: ReceiverCache,
           plib: PacketizedLibrary) -> np.ndarray:
    """Reconstruct the original bits of file ``f_u`` at receiver ``u``."""
    if cache.u != u:
        raise ValueError("cache belongs to another receiver")
    clib = plib.clib
    own = _assemble(f_u, plib, codeword, cache)
    ref = clib.reference.get(f_u)
    if ref is None:
        return own
    lib = clib.library
    if lib.group_of(ref) != lib.group_of(f_u):
        return own
    ref_bits = _assemble(ref, plib, codeword, cache)
    unit_bits = len(ref_bits) // lib.file_units
    return np.concatenate([ref_bits[:lib.shared_units * unit_bits], own])


def dump_instance(graph: ConflictGraph, coloring: Coloring, plib: PacketizedLibrary) -> str:
    """Line-oriented description of a delivery instance for fixture diffs."""
    lines = [f"vertices {graph.size}"]
    for k in range(graph.size):
        f, i = plib.packet_id(int(graph.packets[k]))
        lines.append(f"v {k} {f}:{i} u{int(graph.receivers[k])} c{int(coloring.colors[k])}")
    edges = graph.edges()
    lines.append(f"edges {len(edges)}")
    lines.extend(f"e {a} {b}" for a, b in edges)
    rate = coloring.num_colors * plib.b_units / plib.clib.library.file_units
    lines.append(f"colors {coloring.num_colors}")
    lines.append(f"rate {rate:.6f}")
    return "\n".join(lines) + "\n"
