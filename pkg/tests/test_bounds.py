from fractions import Fraction

import numpy as np
import pytest

from corrcache.bounds import (
    distinct_pmf,
    lower_bound,
    lower_bound_curve,
    mbar,
    psi,
    uncorrelated_rate,
    upper_bound,
    upper_bound_curve,
)
from corrcache.library import build_grouped_library, library_entropy


def test_pmf_sums_to_one():
    for n, m in [(10, 100), (7, 3), (1, 1)]:
        assert sum(distinct_pmf(n, m).exact) == 1
    pm = distinct_pmf(10, 100)
    assert pm.tail_exact(0) == 1 and pm.tail(1) == 1.0
    assert float(sum((j + 1) * p for j, p in enumerate(pm.exact))) == pytest.approx(mbar(100, 10))


def test_lower_bound_vanishes_once_library_fits(hundred_lib):
    H = library_entropy(hundred_lib)
    assert H == 60 * 200
    assert lower_bound(10, 100, 60, H, 200) == 0.0
    assert lower_bound(10, 100, 59, H, 200) > 0.0
    ms = np.arange(0, 101, 5)
    lb = [lower_bound(10, 100, M, H, 200) for M in ms]
    assert all(a >= b for a, b in zip(lb, lb[1:]))


def test_psi_zero_memory_and_full_memory():
    assert psi(0.2, 1 / 60, 1 / 60, 0, 10) == pytest.approx(12.0)
    assert psi(0.2, 1 / 60, 1 / 60, 60, 10) == pytest.approx(0.0, abs=1e-12)


def test_psi_rejects_overfull_caches():
    with pytest.raises(ValueError):
        psi(0.2, 0.1, 0.0, 20, 10)


def test_upper_bound_hundred_file_values(hundred_lib):
    # optimum at p_I = p_P = 1/60, so the bound is 1.2 * coded_sum(M / 60)
    x = 20 / 60
    want = 1.2 * (1 - x) / x * (1 - (1 - x) ** 10)
    assert upper_bound(10, 100, 20, hundred_lib) == pytest.approx(want, rel=1e-9)
    assert upper_bound(10, 100, 0, hundred_lib) == pytest.approx(mbar(100, 10))
    assert upper_bound(10, 100, 60, hundred_lib) == 0.0
    assert upper_bound(10, 100, 80, hundred_lib) == 0.0


def test_upper_bound_never_above_uncorrelated(hundred_lib):
    for M in range(0, 101, 10):
        assert upper_bound(10, 100, M, hundred_lib) <= uncorrelated_rate(10, 100, M) + 1e-12


def test_sandwich_is_consistent(hundred_lib):
    H = library_entropy(hundred_lib)
    for M in range(0, 101, 2):
        assert lower_bound(10, 100, M, H, 200) <= upper_bound(10, 100, M, hundred_lib) + 1e-12


def test_curves(ex_lib):
    lo = lower_bound_curve(2, ex_lib, [0, 1, 2])
    hi = upper_bound_curve(2, ex_lib, [0, 1, 2])
    assert lo.kind == "lower" and hi.kind == "upper"
    assert lo.points[0] == (0.0, pytest.approx(0.9375))
    assert all(l[1] <= h[1] + 1e-12 for l, h in zip(lo.points, hi.points))


def test_independent_library_uses_plain_bound():
    lib = build_grouped_library(10, 1, Fraction(1), 10)
    assert upper_bound(3, 10, 4, lib) == pytest.approx(uncorrelated_rate(3, 10, 4))
    with pytest.raises(ValueError):
        upper_bound(3, 11, 4, lib)
