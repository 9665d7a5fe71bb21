# The hundred-file setting: how the optimal caching split and the analytic
# curves behave as the cache grows.
from fractions import Fraction

import numpy as np

from corrcache.bounds import lower_bound, mbar, psi, uncorrelated_rate, upper_bound
from corrcache.library import build_grouped_library, library_entropy
from corrcache.placement import optimize_distribution_uniform

n, m = 10, 100
lib = build_grouped_library(m, 2, Fraction(1, 5), 200)
H = library_entropy(lib)
print("library entropy:", H / lib.file_units, "files; expected distinct requests:", round(mbar(m, n), 4))

# psi is convex along the cache-constraint segment, so the grid search
# lands on the equal split p_I = p_P = 1/60 whenever that is feasible.
for M in (5, 20, 40, 55):
    p_I, p_P = optimize_distribution_uniform(n, m, M, 0.2, 2)
    print(f"M={M:>2}  p_I={p_I:.6f}  p_P={p_P:.6f}  psi={psi(0.2, p_I, p_P, M, n):.4f}")

print("\n  M   lower   upper   no-correlation")
for M in np.arange(0, 101, 10):
    print(f"{M:>3}  {lower_bound(n, m, M, H, lib.file_units):6.3f}  {upper_bound(n, m, M, lib):6.3f}"
          f"  {uncorrelated_rate(n, m, M):6.3f}")

# At M=20 the correlation-aware bound is well under the unaware one
print("\nratio at M=20:", round(uncorrelated_rate(n, m, 20) / upper_bound(n, m, 20, lib), 3))
