"""Correlation-aware cache-aided coded multicast.

Receivers with local caches request files from a library whose files are
pairwise correlated.  The library is compressed into reference files and
files stored relative to a reference, packets are cached at random
according to an optimized distribution, and the demand is served with an
XOR code obtained by coloring a conflict graph.

Typical use::

    from corrcache import ExperimentConfig, run_experiment, emit_csv
    table = run_experiment(ExperimentConfig(trials=50, sweep=(0, 20, 40, 60)))
    emit_csv(table, "rates.csv")
"""
from .bounds import distinct_pmf, lambda_ell, lower_bound, mbar, psi, upper_bound
from .compressor import (
    CompressedLibrary,
    compressed_from_references,
    is_lossless,
    manifest,
    partition_library,
    uncompressed,
)
from .config import ConfigError, ExperimentConfig, load_config
from .delivery import (
    Coloring,
    ConflictGraph,
    DecodeError,
    MulticastCodeword,
    PacketStore,
    ReceiverCache,
    build_conflict_graph,
    color_graph,
    cover_color,
    decode,
    encode,
    greedy_color,
)
from .harness import RateMemoryTable, TrialFailure, emit_csv, read_csv, run_experiment
from .library import BitLibrary, GroupedLibrary, build_grouped_library, realize_bits
from .placement import (
    CacheConfiguration,
    InfeasibleDistribution,
    PacketizedLibrary,
    caches_from_packets,
    fill_caches,
    optimize_distribution_uniform,
    packetize,
    validate_distribution,
)
from .plot import plot_svg
from .schemes import coded_delivery, rate_comp_cacm, rate_lcnm, rate_lcu, scheme_rapcm

__version__ = "0.1.0"
