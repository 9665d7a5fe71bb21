"""Monte-Carlo rate-memory sweeps.

Every ``(M, trial)`` pair gets its own seeds, derived from the master seed by
counter, so results do not depend on how trials are spread over workers.
Within a trial all schemes see the same demand, the same library realization
and the same cache seed.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .bounds import lower_bound, upper_bound
from .compressor import CompressedLibrary, partition_library, uncompressed
from .config import ExperimentConfig
from .delivery import DecodeError, PacketStore, ReceiverCache, decode, encode
from .library import GroupedLibrary, build_grouped_library, library_entropy, realize_bits
from .placement import (
    InfeasibleDistribution,
    PacketizedLibrary,
    fill_caches,
    full_distribution,
    grouped_distribution,
    optimize_distribution_uniform,
    packetize,
)
from .schemes import coded_delivery, rate_lcnm, rate_lcu

__all__ = [
    "Row",
    "RateMemoryTable",
    "TrialFailure",
    "run_experiment",
    "trial_seeds",
    "emit_csv",
    "format_csv",
    "read_csv",
    "bounds_table",
    "worker_count",
]

log = logging.getLogger(__name__)

WORKERS_ENV = "CORRCACHE_WORKERS"
HEADER = ["M", "series", "mean_rate", "stderr", "trials"]


class TrialFailure(RuntimeError):
    """A receiver failed to decode; ``seeds`` reproduces the trial."""

    def __init__(self, message: str, seeds: tuple):
        super().__init__(f"{message} (reproduce with seeds {seeds})")
        self.seeds = seeds


@dataclass(frozen=True)
class Row:
    M: float
    series: str
    mean: float
    stderr: float
    trials: int


@dataclass
class RateMemoryTable:
    rows: list[Row]
    m: int | None = None
    # (M, trial, demand, {series: rate}) per simulated trial
    details: list[tuple] = field(default_factory=list, repr=False)

    @property
    def series(self) -> list[str]:
        return sorted({r.series for r in self.rows})

    def curve(self, series: str) -> tuple[np.ndarray, np.ndarray]:
        pts = sorted((r.M, r.mean) for r in self.rows if r.series == series)
        return np.array([p[0] for p in pts]), np.array([p[1] for p in pts])

    def value(self, M: float, series: str) -> float:
        for r in self.rows:
            if r.series == series and math.isclose(r.M, M, abs_tol=1e-9):
                return r.mean
        raise KeyError((M, series))


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, workers)


def trial_seeds(master_seed: int, M: float, trial: int) -> tuple[int, int, int, int]:
    """``(library, cache, demand, coloring)`` seeds for one trial."""
    key = [master_seed, int(round(M * 1000)), trial]
    ss = np.random.SeedSequence(key)
    return tuple(int(x) for x in ss.generate_state(4, dtype=np.uint32))


@dataclass(frozen=True)
class _Setup:
    lib: GroupedLibrary
    clib: CompressedLibrary
    comp: PacketizedLibrary
    plain: PacketizedLibrary


@lru_cache(maxsize=8)
def _setup(cfg: ExperimentConfig) -> _Setup:
    lib = build_grouped_library(cfg.m, cfg.kappa, cfg.delta, cfg.file_units)
    clib = partition_library(lib, cfg.n, cfg.delta) if cfg.kappa > 1 else uncompressed(lib)
    return _Setup(lib, clib, packetize(clib, cfg.b_units), packetize(uncompressed(lib), cfg.b_units))


def comp_distribution(cfg: ExperimentConfig, clib: CompressedLibrary, M: float) -> dict[int, float]:
    """Caching distribution used by the compressed scheme at memory ``M``."""
    if M > 0 and M * cfg.file_units >= clib.total_units:
        return full_distribution(clib, M)
    kappa = cfg.kappa if clib.p_files else 1
    try:
        p_I, p_P = optimize_distribution_uniform(cfg.n, cfg.m, M, float(cfg.delta), kappa)
    except InfeasibleDistribution:
        return full_distribution(clib, M)
    return grouped_distribution(clib, p_I, p_P)


def _verify(lib, bits_seed, cfg, plib, caches, delivery, demand, seeds):
    bitlib = realize_bits(lib, bits_seed, cfg.unit_bits)
    store = PacketStore(plib, bitlib)
    codeword = encode(delivery.graph, delivery.coloring, store)
    for u, f in enumerate(demand, start=1):
        try:
            got = decode(u, f, codeword, ReceiverCache(caches, store, u), plib)
        except DecodeError as exc:
            raise TrialFailure(str(exc), seeds) from None
        if not np.array_equal(got, bitlib.bits(f)):
            raise TrialFailure(f"receiver {u} decoded file {f} incorrectly", seeds)


def _run_trial(cfg: ExperimentConfig, M: float, trial: int) -> tuple[tuple[int, ...], dict[str, float]]:
    st = _setup(cfg)
    lib_seed, cache_seed, demand_seed, color_seed = trial_seeds(cfg.seed, M, trial)
    seeds = (cfg.seed, M, trial, lib_seed, cache_seed, demand_seed, color_seed)
    rng = np.random.default_rng(demand_seed)
    demand = tuple(int(x) for x in rng.choice(np.arange(1, cfg.m + 1), size=cfg.n, p=np.array(st.lib.q)))
    rates: dict[str, float] = {}

    if "comp-cacm" in cfg.schemes:
        caches = fill_caches(st.comp, comp_distribution(cfg, st.clib, M), M, cfg.n, cache_seed)
        res = coded_delivery(demand, caches, cfg.coloring, color_seed)
        if cfg.verify:
            _verify(st.lib, lib_seed, cfg, st.comp, caches, res, demand, seeds)
        rates["comp-cacm"] = res.rate

    baselines = [s for s in ("rap-cm", "lc-u", "lc-nm") if s in cfg.schemes]
    if baselines:
        uniform = {f: 1.0 / cfg.m for f in st.lib.files}
        caches = fill_caches(st.plain, uniform, M, cfg.n, cache_seed)
        if "rap-cm" in cfg.schemes:
            res = coded_delivery(demand, caches, cfg.coloring, color_seed)
            if cfg.verify:
                _verify(st.lib, lib_seed, cfg, st.plain, caches, res, demand, seeds)
            rates["rap-cm"] = res.rate
        if "lc-u" in cfg.schemes:
            rates["lc-u"] = rate_lcu(demand, caches)
        if "lc-nm" in cfg.schemes:
            rates["lc-nm"] = rate_lcnm(demand, caches)
    return demand, rates


def _run_task(args):
    cfg, M, trial = args
    return _run_trial(cfg, M, trial)


def bounds_table(cfg: ExperimentConfig) -> list[Row]:
    """Analytic bound rows for every swept memory size."""
    st = _setup(cfg)
    H = library_entropy(st.lib)
    rows = []
    for M in cfg.sweep:
        if "lower" in cfg.bounds:
            rows.append(Row(M, "lower-bound", lower_bound(cfg.n, cfg.m, M, H, cfg.file_units), 0.0, 0))
        if "upper" in cfg.bounds:
            rows.append(Row(M, "upper-bound", upper_bound(cfg.n, cfg.m, M, st.lib), 0.0, 0))
    return rows


def _summarize(values: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    err = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return mean, err


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> RateMemoryTable:
    """Simulate every enabled scheme at every swept ``M`` and add the analytic bounds."""
    cfg.validate()
    workers = worker_count(workers)
    tasks = [(cfg, M, t) for M in cfg.sweep for t in range(cfg.trials)] if cfg.schemes else []
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_run_task(t) for t in tasks]

    details = []
    rows = []
    for M in cfg.sweep:
        per_series: dict[str, list[float]] = {s: [] for s in cfg.schemes}
        for (_, tM, t), (demand, rates) in zip(tasks, results):
            if tM != M:
                continue
            details.append((M, t, demand, rates))
            for s, r in rates.items():
                per_series[s].append(r)
        for s in cfg.schemes:
            mean, err = _summarize(per_series[s])
            rows.append(Row(M, s, mean, err, len(per_series[s])))
    rows.extend(bounds_table(cfg))
    return RateMemoryTable(rows, cfg.m, details)


def _sorted_rows(rows: Sequence[Row]) -> list[Row]:
    return sorted(rows, key=lambda r: (r.M, r.series))


def format_csv(table: RateMemoryTable) -> str:
    """CSV text with rows sorted by ``(M, series)`` and fixed six-decimal rates."""
    if not table.rows:
        raise ValueError("refusing to write an empty table")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in _sorted_rows(table.rows):
        w.writerow([f"{r.M:g}", r.series, f"{r.mean:.6f}", f"{r.stderr:.6f}", r.trials])
    return buf.getvalue()


def emit_csv(table: RateMemoryTable, path) -> None:
    text = format_csv(table)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def read_csv(path) -> RateMemoryTable:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        rows = [Row(float(d["M"]), d["series"], float(d["mean_rate"]), float(d["stderr"]), int(d["trials"]))
                for d in reader]
    return RateMemoryTable(rows)
