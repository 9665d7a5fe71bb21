from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corrcache.compressor import partition_library, uncompressed
from corrcache.delivery import (
    Coloring,
    DecodeError,
    MulticastCodeword,
    PacketStore,
    ReceiverCache,
    build_conflict_graph,
    color_graph,
    cover_color,
    decode,
    dump_instance,
    encode,
    greedy_color,
    required_packets,
)
from corrcache.library import build_grouped_library, realize_bits
from corrcache.placement import fill_caches, grouped_distribution, optimize_distribution_uniform, packetize


def labels(graph, coloring, plib):
    out = []
    for members in coloring.classes():
        out.append(sorted((plib.packet_id(int(graph.packets[k])), int(graph.receivers[k])) for k in members))
    return sorted(out)


def brute_adjacency(graph, mask):
    V = graph.size
    adj = np.zeros((V, V), dtype=bool)
    for a in range(V):
        for b in range(V):
            pa, pb = graph.packets[a], graph.packets[b]
            ua, ub = graph.receivers[a], graph.receivers[b]
            if a == b or pa == pb:
                continue
            adj[a, b] = not (mask[ua - 1, pb] and mask[ub - 1, pa])
    return adj


def test_required_packets_include_reference(walk):
    plib = walk.plib
    need = required_packets(1, 1, walk)
    assert [plib.packet_id(int(i)) for i in need] == [(2, 2), (2, 3), (2, 4)]
    need = required_packets(2, 2, walk)
    assert [plib.packet_id(int(i)) for i in need] == [(2, 1), (2, 3), (2, 4)]


@pytest.mark.parametrize("policy", ["degree", "cover"])
def test_walkthrough_codeword(walk, policy):
    graph = build_conflict_graph((1, 2), walk)
    coloring = color_graph(graph, policy)
    assert coloring.is_proper(graph)
    assert coloring.num_colors == 3
    got = labels(graph, coloring, walk.plib)
    assert got == sorted([
        [((2, 1), 2), ((2, 2), 1)],
        [((2, 3), 1), ((2, 3), 2)],
        [((2, 4), 1), ((2, 4), 2)],
    ])


def test_walkthrough_dump(walk):
    graph = build_conflict_graph((1, 2), walk)
    text = dump_instance(graph, greedy_color(graph), walk.plib)
    assert text.startswith("vertices 6\n")
    assert text.endswith("colors 3\nrate 0.750000\n")


def test_adjacency_matches_pairwise_rule(hundred_lib):
    clib = partition_library(hundred_lib, 10, Fraction(1, 5))
    plib = packetize(clib, 20)
    p = grouped_distribution(clib, *optimize_distribution_uniform(10, 100, 30, 0.2, 2))
    caches = fill_caches(plib, p, 30, 10, 3)
    rng = np.random.default_rng(0)
    graph = build_conflict_graph(tuple(rng.integers(1, 101, 10)), caches)
    assert np.array_equal(graph.adjacency, brute_adjacency(graph, caches.mask))


def test_random_order_is_seeded(walk):
    graph = build_conflict_graph((1, 2), walk)
    a, b = greedy_color(graph, "random", 4), greedy_color(graph, "random", 4)
    assert np.array_equal(a.colors, b.colors) and a.is_proper(graph)
    with pytest.raises(ValueError):
        greedy_color(graph, "alphabetical")


def test_improper_coloring_rejected(walk):
    graph = build_conflict_graph((1, 2), walk)
    bits = realize_bits(walk.plib.clib.library, 1)
    store = PacketStore(walk.plib, bits)
    single = Coloring(np.zeros(graph.size, dtype=np.int64), 1)
    assert not single.is_proper(graph)
    with pytest.raises(ValueError):
        encode(graph, single, store)


def test_missing_transmission_is_a_decode_error(walk):
    graph = build_conflict_graph((1, 2), walk)
    bits = realize_bits(walk.plib.clib.library, 1)
    store = PacketStore(walk.plib, bits)
    cw = encode(graph, greedy_color(graph), store)
    cut = MulticastCodeword(cw.header[:-1], cw.payloads[:-1], cw.b_units, cw.file_units)
    with pytest.raises(DecodeError):
        decode(1, 1, cut, ReceiverCache(walk, store, 1), walk.plib)
    with pytest.raises(ValueError):
        decode(2, 2, cw, ReceiverCache(walk, store, 1), walk.plib)


def test_receiver_reads_only_its_cache(walk):
    store = PacketStore(walk.plib, realize_bits(walk.plib.clib.library, 1))
    cache = ReceiverCache(walk, store, 1)
    with pytest.raises(KeyError):
        cache[walk.plib.index(2, 2)]


def _instance(m, kappa, delta_den, M, n, packets, lib_seed, cache_seed, demand_seed, compressed):
    lib = build_grouped_library(m, kappa, Fraction(1, delta_den), delta_den * packets)
    clib = partition_library(lib, n, lib.delta) if compressed else uncompressed(lib)
    plib = packetize(clib, 1)
    if compressed:
        p = grouped_distribution(clib, *optimize_distribution_uniform(n, m, M, float(lib.delta), kappa))
    else:
        p = {f: 1 / m for f in lib.files}
    caches = fill_caches(plib, p, M, n, cache_seed)
    demand = tuple(int(x) for x in np.random.default_rng(demand_seed).integers(1, m + 1, n))
    return lib, plib, caches, demand, realize_bits(lib, lib_seed, 3)


@settings(max_examples=60, deadline=None)
@given(
    shape=st.sampled_from([(4, 2), (6, 3), (8, 2), (12, 4)]),
    delta_den=st.sampled_from([2, 4, 5]),
    n=st.integers(1, 5),
    packets=st.integers(1, 6),
    mem=st.floats(0, 1),
    seeds=st.tuples(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1)),
    policy=st.sampled_from(["degree", "random", "cover"]),
    compressed=st.booleans(),
)
def test_every_receiver_recovers_its_file(shape, delta_den, n, packets, mem, seeds, policy, compressed):
    m, kappa = shape
    # keep M inside the range where the optimizer's segment is nonempty
    M = round(mem * m / (1 + 1 / delta_den) / kappa, 3) if compressed else round(mem * m, 3)
    lib, plib, caches, demand, bits = _instance(m, kappa, delta_den, M, n, packets, *seeds, compressed)
    graph = build_conflict_graph(demand, caches)
    coloring = color_graph(graph, policy, seeds[0])
    assert coloring.is_proper(graph)
    if policy != "cover" and graph.size:
        assert coloring.num_colors <= 1 + graph.degrees.max()
    cw = encode(graph, coloring, PacketStore(plib, bits))
    store = PacketStore(plib, bits)
    for u, f in enumerate(demand, start=1):
        assert np.array_equal(decode(u, f, cw, ReceiverCache(caches, store, u), plib), bits.bits(f))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8))
def test_cover_never_worse_than_one_color_per_packet(seed, n):
    lib, plib, caches, demand, _ = _instance(10, 2, 5, 2.0, n, 4, 0, seed, seed + 1, True)
    graph = build_conflict_graph(demand, caches)
    coloring = cover_color(graph)
    assert coloring.is_proper(graph)
    assert coloring.num_colors <= len(np.unique(graph.packets))
