"""The four-file, two-receiver walkthrough.

Files 1, 2 share 3/4 of their content, as do files 3, 4.  File 2 and file 4
are kept whole and split into four packets; files 1 and 3 are reduced to
their private quarter (one packet).  With one file of memory each receiver
keeps both private quarters and one packet of each reference file.
"""
from __future__ import annotations

from fractions import Fraction

from .compressor import CompressedLibrary, compressed_from_references, uncompressed
from .delivery import PacketStore, ReceiverCache, decode, encode
from .library import GroupedLibrary, build_grouped_library, realize_bits
from .placement import CacheConfiguration, caches_from_packets, packetize
from .schemes import coded_delivery

__all__ = [
    "WALKTHROUGH_SEED",
    "example_library",
    "example_compressed",
    "example_distribution",
    "walkthrough_caches",
    "rapcm_caches",
    "demo_text",
]

# fill_caches(..., seed=WALKTHROUGH_SEED) on the example reproduces walkthrough_caches()
WALKTHROUGH_SEED = 256


def example_library(file_units: int = 8) -> GroupedLibrary:
    return build_grouped_library(4, 2, Fraction(1, 4), file_units)


def example_compressed(lib: GroupedLibrary | None = None) -> CompressedLibrary:
    """Files 2 and 4 as references, 1 and 3 compressed against them."""
    lib = lib or example_library()
    return compressed_from_references(lib, {1: 2, 3: 4}, Fraction(1, 4))


def example_distribution() -> dict[int, float]:
    return {1: 1.0, 2: 0.25, 3: 1.0, 4: 0.25}


def walkthrough_caches(clib: CompressedLibrary | None = None) -> CacheConfiguration:
    clib = clib or example_compressed()
    plib = packetize(clib, clib.library.file_units // 4)
    return caches_from_packets(plib, 1, [
        [(1, 1), (2, 1), (3, 1), (4, 1)],
        [(1, 1), (2, 2), (3, 1), (4, 2)],
    ])


def rapcm_caches(lib: GroupedLibrary | None = None) -> CacheConfiguration:
    """Uncompressed files, a quarter of each cached: packet 1 at receiver 1, packet 2 at receiver 2."""
    lib = lib or example_library()
    plib = packetize(uncompressed(lib), lib.file_units // 4)
    return caches_from_packets(plib, 1, [
        [(f, 1) for f in lib.files],
        [(f, 2) for f in lib.files],
    ])


def _label(plib, idx: int) -> str:
    f, i = plib.packet_id(idx)
    if plib.packet_count[f] == 1:
        return f"W{f}"
    return f"W{f}{i}"


def demo_text(demand=(1, 2), seed: int = 7) -> str:
    lines = []
    caches = walkthrough_caches()
    plib = caches.plib
    lines.append("Compressed library (id role reference units):")
    for f in plib.files:
        ref = plib.clib.reference.get(f)
        lines.append(f"  {f} {plib.clib.role(f)} {'-' if ref is None else ref} {plib.clib.compressed_entropy[f]}")
    lines.append("Cache configuration:")
    for u in (1, 2):
        toks = ", ".join(_label(plib, plib.index(f, i)) for f, i in caches.packets(u))
        lines.append(f"  u{u}: {{{toks}}}")

    res = coded_delivery(demand, caches, "degree")
    bitlib = realize_bits(plib.clib.library, seed)
    store = PacketStore(plib, bitlib)
    cw = encode(res.graph, res.coloring, store)
    sent = ", ".join(" + ".join(_label(plib, p) for p in members) for members in cw.header)
    lines.append(f"Demand {tuple(demand)}: Comp-CACM sends [{sent}]")
    lines.append(f"Comp-CACM rate {cw.rate:.2f}")
    for u, f in enumerate(demand, start=1):
        ok = (decode(u, f, cw, ReceiverCache(caches, store, u), plib) == bitlib.bits(f)).all()
        lines.append(f"  u{u} recovers W{f}: {'ok' if ok else 'MISMATCH'}")

    plain = rapcm_caches()
    rap = coded_delivery(demand, plain, "degree")
    lines.append(f"RAP/CM rate {rap.rate:.2f}")
    return "\n".join(lines) + "\n"
