from fractions import Fraction

import numpy as np
import pytest

from corrcache.library import (
    as_fraction,
    build_grouped_library,
    delta_ensemble,
    is_delta_correlated,
    joint_entropy,
    kappa_of,
    library_entropy,
    library_from_config,
    library_to_config,
    realize_bits,
)
from corrcache.config import parse_kv


def test_groups_are_consecutive(ex_lib):
    assert ex_lib.groups == ((1, 2), (3, 4))
    assert [ex_lib.group_of(f) for f in ex_lib.files] == [0, 0, 1, 1]
    assert ex_lib.shared_units == 6 and ex_lib.private_units == 2


@pytest.mark.parametrize("args", [(5, 2, "1/4", 8), (4, 2, "1/3", 8), (4, 2, 0, 8), (4, 2, "5/4", 8),
                                  (4, 0, "1/4", 8), (4, 2, "1/4", 0)])
def test_bad_libraries_rejected(args):
    with pytest.raises(ValueError):
        build_grouped_library(*args)


def test_custom_popularity_checked():
    with pytest.raises(ValueError):
        build_grouped_library(4, 2, "1/4", 8, q=[0.5, 0.5, 0.5, 0.0])
    lib = build_grouped_library(4, 2, "1/4", 8, q=[0.4, 0.3, 0.2, 0.1])
    assert lib.q_mode == "custom"


def test_float_delta_is_exact():
    assert as_fraction(0.2) == Fraction(1, 5)
    assert build_grouped_library(100, 2, 0.2, 200).private_units == 40


def test_independent_files_when_kappa_is_one():
    lib = build_grouped_library(6, 1, "1/2", 10)
    assert lib.private_units == 10
    assert library_entropy(lib) == 60
    assert not is_delta_correlated(lib, 1, 2, "1/2")
    assert kappa_of(lib, "1/2") == 1


def test_entropies(ex_lib):
    assert joint_entropy(ex_lib, [1]) == 8
    assert joint_entropy(ex_lib, [1, 2]) == 10      # (1 + delta) F
    assert joint_entropy(ex_lib, [2, 3]) == 16
    assert library_entropy(ex_lib) == 20
    with pytest.raises(ValueError):
        joint_entropy(ex_lib, [])


def test_correlation_threshold(ex_lib):
    assert is_delta_correlated(ex_lib, 1, 2, "1/4")
    assert not is_delta_correlated(ex_lib, 1, 2, "1/8")
    assert not is_delta_correlated(ex_lib, 1, 3, "1/4")
    # a loose enough threshold makes independent files "correlated" too
    assert is_delta_correlated(ex_lib, 1, 3, 1)
    with pytest.raises(ValueError):
        is_delta_correlated(ex_lib, 2, 2, "1/4")


def test_ensembles(ex_lib):
    assert delta_ensemble(ex_lib, 1, "1/4") == {1, 2}
    assert delta_ensemble(ex_lib, 1, "1/4", active_set={1, 3, 4}) == {1}
    assert kappa_of(ex_lib, "1/4") == 2
    with pytest.raises(ValueError):
        delta_ensemble(ex_lib, 1, "1/4", active_set={2, 3})


def test_realized_bits_have_the_stated_structure(ex_lib):
    bits = realize_bits(ex_lib, seed=3, unit_bits=8)
    w1, w2, w3 = bits.bits(1), bits.bits(2), bits.bits(3)
    assert w1.shape == (64,) and w1.dtype == np.uint8
    assert np.array_equal(w1[:48], w2[:48])
    assert not np.array_equal(w1[48:], w2[48:])
    assert not np.array_equal(w1[:48], w3[:48])
    assert set(np.unique(w1)) <= {0, 1}


def test_realization_is_keyed_by_seed(ex_lib):
    a, b, c = realize_bits(ex_lib, 5), realize_bits(ex_lib, 5), realize_bits(ex_lib, 6)
    assert all(np.array_equal(a.bits(f), b.bits(f)) for f in ex_lib.files)
    assert not np.array_equal(a.bits(1), c.bits(1))


def test_segments_do_not_depend_on_library_size():
    # the stream for file 1 is keyed only by (seed, kind, index)
    small = realize_bits(build_grouped_library(4, 2, "1/4", 8), 9)
    big = realize_bits(build_grouped_library(40, 2, "1/4", 8), 9)
    assert np.array_equal(small.bits(1), big.bits(1))


def test_config_roundtrip(ex_lib):
    text = library_to_config(ex_lib, 42)
    lib, seed = library_from_config(parse_kv(text))
    assert lib == ex_lib and seed == 42
