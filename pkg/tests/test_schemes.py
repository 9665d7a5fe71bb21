import itertools

import numpy as np
import pytest

from corrcache.compressor import uncompressed
from corrcache.placement import fill_caches, packetize
from corrcache.schemes import coded_delivery, rate_comp_cacm, rate_lcnm, rate_lcu, scheme_rapcm


def test_comp_rate_on_example(walk):
    assert rate_comp_cacm((1, 2), walk) == 0.75
    assert rate_comp_cacm((1, 2), walk, "cover") == 0.75


def test_rap_on_example_distinct_demands(rap_fixture):
    for d in itertools.product(range(1, 5), repeat=2):
        if d[0] != d[1]:
            assert scheme_rapcm(d, rap_fixture) == 1.25, d


def test_rap_on_example_same_file_needs_fewer(rap_fixture):
    # both want file f: W_f1 + W_f2 serves both, the two shared missing packets go uncoded
    for f in range(1, 5):
        assert scheme_rapcm((f, f), rap_fixture) == 0.75


def test_baselines_on_example(rap_fixture):
    assert rate_lcu((1, 2), rap_fixture) == 1.5
    assert rate_lcnm((1, 2), rap_fixture) == 1.5
    assert rate_lcnm((3, 3), rap_fixture) == 1.0
    assert rate_lcu((3, 3), rap_fixture) == 1.5


def test_baselines_refuse_compressed_library(walk):
    with pytest.raises(ValueError):
        rate_lcu((1, 2), walk)
    with pytest.raises(ValueError):
        scheme_rapcm((1, 2), walk)


def test_zero_memory_rates(ex_lib):
    plib = packetize(uncompressed(ex_lib), 2)
    caches = fill_caches(plib, {f: 0.25 for f in ex_lib.files}, 0, 3, 0)
    demand = (1, 1, 4)
    assert rate_lcu(demand, caches) == 3.0
    assert rate_lcnm(demand, caches) == 2.0
    assert scheme_rapcm(demand, caches) == 2.0


def test_scheme_ordering_on_random_instances(hundred_lib):
    plib = packetize(uncompressed(hundred_lib), 10)
    p = {f: 0.01 for f in hundred_lib.files}
    rng = np.random.default_rng(5)
    for M in (5, 20, 40):
        caches = fill_caches(plib, p, M, 10, int(rng.integers(1 << 30)))
        demand = tuple(int(x) for x in rng.integers(1, 101, 10))
        coded = coded_delivery(demand, caches, "cover").rate
        assert coded <= rate_lcnm(demand, caches) + 1e-12 <= rate_lcu(demand, caches) + 2e-12


def test_naive_multicast_monotone_in_cache(hundred_lib):
    from corrcache.placement import caches_from_packets

    plib = packetize(uncompressed(hundred_lib), 20)
    rng = np.random.default_rng(8)
    for _ in range(20):
        demand = tuple(int(x) for x in rng.integers(1, 11, 5))
        held = [[(f, int(i)) for f in range(1, 11) for i in rng.choice(np.arange(1, 11), 3, replace=False)]
                for _ in range(5)]
        grown = [h + [(int(rng.integers(1, 11)), int(rng.integers(1, 11)))] for h in held]
        small = rate_lcnm(demand, caches_from_packets(plib, 3, held))
        big = rate_lcnm(demand, caches_from_packets(plib, 3, [sorted(set(g)) for g in grown]))
        assert big <= small
