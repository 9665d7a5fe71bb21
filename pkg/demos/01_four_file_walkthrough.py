# Four files in two correlated pairs, two receivers, one file of cache each.
# Walks through compression, placement and a single coded delivery by hand.
from fractions import Fraction

import numpy as np

from corrcache.compressor import manifest, partition_library
from corrcache.delivery import PacketStore, ReceiverCache, build_conflict_graph, decode, encode, greedy_color
from corrcache.library import is_delta_correlated, joint_entropy, realize_bits
from corrcache.placement import fill_caches, packetize, validate_distribution
from corrcache.worked import WALKTHROUGH_SEED, example_compressed, example_distribution, example_library

lib = example_library()           # F = 8 units, a quarter of every file is private
print("groups:", lib.groups)
print("H(W1, W2) =", joint_entropy(lib, [1, 2]), "units;  H(W1, W3) =", joint_entropy(lib, [1, 3]))
print("1 ~ 2 at delta=1/4?", is_delta_correlated(lib, 1, 2, Fraction(1, 4)))

# The greedy split breaks popularity ties toward the lowest id ...
print(manifest(partition_library(lib, 2, Fraction(1, 4))))
# ... the walkthrough keeps files 2 and 4 whole instead; any tie-break is as good.
clib = example_compressed(lib)
print(manifest(clib))

# Packets of 2 units: P-files are one packet, I-files four.
plib = packetize(clib, 2)
p = example_distribution()
print("constraint violations:", validate_distribution(p, clib, 1) or "none")
caches = fill_caches(plib, p, 1, 2, WALKTHROUGH_SEED)
print(caches.dump())

# u1 wants file 1, so it needs the rest of file 2 as well; u2 wants file 2.
graph = build_conflict_graph((1, 2), caches)
coloring = greedy_color(graph)
for members in coloring.classes():
    print("color:", [(plib.packet_id(int(graph.packets[k])), int(graph.receivers[k])) for k in members])

bits = realize_bits(lib, seed=1, unit_bits=8)
store = PacketStore(plib, bits)
cw = encode(graph, coloring, store)
print("transmissions:", cw.num_transmissions, " rate:", cw.rate)
for u, f in [(1, 1), (2, 2)]:
    got = decode(u, f, cw, ReceiverCache(caches, store, u), plib)
    print(f"u{u} gets W{f} back:", np.array_equal(got, bits.bits(f)))
