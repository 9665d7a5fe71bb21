# A reduced Monte-Carlo sweep of all four schemes, written to CSV and SVG.
# Set CORRCACHE_WORKERS to spread trials over processes; output is identical.
import sys

from corrcache.config import ExperimentConfig
from corrcache.harness import emit_csv, run_experiment
from corrcache.plot import plot_svg

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 20
cfg = ExperimentConfig(sweep=tuple(float(M) for M in range(0, 101, 10)), trials=trials)
table = run_experiment(cfg)

print(f"{'M':>4} " + " ".join(f"{s:>12}" for s in table.series))
for M in cfg.sweep:
    print(f"{M:>4g} " + " ".join(f"{table.value(M, s):12.3f}" for s in table.series))

emit_csv(table, "rate_memory.csv")
plot_svg(table, "rate_memory.svg")
print("wrote rate_memory.csv and rate_memory.svg")
