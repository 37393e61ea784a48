"""Monte Carlo gamma sweeps, critical-point search and CSV output.

Every grid point reuses the same sampled inputs (common random numbers), so
the curves are smooth in gamma and a sweep is a pure function of its config.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .channels import choi_of
from .protocols import COUPLINGS, simulate_batch
from .sampling import (
    DEFAULT_SEED,
    Distribution,
    Kind,
    SampleSpec,
    sample_state,
    sample_unitary_channel,
)

PROTOCOLS = tuple(COUPLINGS)
CSV_HEADER = (
    "gamma",
    "n",
    "fid_noisy_mean",
    "fid_noisy_se",
    "fid_purified_mean",
    "fid_purified_se",
    "p_success_mean",
    "p_success_se",
)
THREADS_ENV = "ADPURIFY_THREADS"


def default_grid(steps: int = 51, gamma_min: float = 0.0, gamma_max: float = 0.5) -> tuple[float, ...]:
    return tuple(float(g) for g in np.linspace(gamma_min, gamma_max, steps))


def default_spec(protocol: str, seed: int = DEFAULT_SEED) -> SampleSpec:
    if protocol == "state_1q":
        return SampleSpec(Kind.SINGLE_QUBIT_STATE, Distribution.UNIFORM_ALPHA, seed)
    if protocol == "channel_1anc":
        return SampleSpec(Kind.UNITARY_CHANNEL, Distribution.HAAR_COMPLEX, seed)
    if protocol == "pair_2anc":
        return SampleSpec(Kind.TWO_QUBIT_STATE, Distribution.HAAR_REAL, seed)
    raise ValueError(f"unknown protocol {protocol!r}; choose from {PROTOCOLS}")


@dataclass(frozen=True)
class SweepConfig:
    protocol: str
    gamma_grid: tuple[float, ...] = field(default_factory=default_grid)
    samples_per_point: int = 1000
    sample_spec: SampleSpec | None = None
    post_select_label: str | None = None

    def __post_init__(self):
        if self.protocol not in COUPLINGS:
            raise ValueError(f"unknown protocol {self.protocol!r}; choose from {PROTOCOLS}")
        grid = tuple(float(g) for g in self.gamma_grid)
        if not grid:
            raise ValueError("gamma grid is empty")
        if any(not 0.0 <= g <= 1.0 for g in grid):
            raise ValueError("gamma grid values must lie in [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("gamma grid must be strictly increasing")
        if self.samples_per_point < 1:
            raise ValueError("samples_per_point must be positive")
        spec = self.sample_spec or default_spec(self.protocol)
        n_anc = len(COUPLINGS[self.protocol])
        label = self.post_select_label or "0" * n_anc
        if len(label) != n_anc or set(label) - {"0", "1"}:
            raise ValueError(f"post-select label {label!r} does not fit protocol {self.protocol!r}")
        if self.protocol == "state_1q" and spec.kind is not Kind.SINGLE_QUBIT_STATE:
            raise ValueError("state_1q needs single-qubit input states")
        if self.protocol != "state_1q" and spec.kind is Kind.SINGLE_QUBIT_STATE:
            raise ValueError(f"{self.protocol} needs two-qubit inputs or channels")
        object.__setattr__(self, "gamma_grid", grid)
        object.__setattr__(self, "sample_spec", spec)
        object.__setattr__(self, "post_select_label", label)


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    n: int
    fid_noisy_mean: float
    fid_noisy_se: float
    fid_purified_mean: float
    fid_purified_se: float
    p_success_mean: float
    p_success_se: float


def sample_inputs(spec: SampleSpec, count: int) -> np.ndarray:
    """Amplitude vectors of the first ``count`` inputs, one per row.

    Channel specs are turned into the (pure) Choi state of each sampled unitary.
    """
    if spec.kind is Kind.UNITARY_CHANNEL:
        rows = [choi_of(sample_unitary_channel(spec, i)).state.amplitudes for i in range(count)]
    else:
        rows = [sample_state(spec, i).amplitudes for i in range(count)]
    return np.array(rows)


def _mean_se(values: Iterable[float]) -> tuple[float, float]:
    vals = [float(v) for v in values]
    n = len(vals)
    if n == 0:
        return math.nan, math.nan
    mean = math.fsum(vals) / n
    var = math.fsum((v - mean) ** 2 for v in vals) / n
    return mean, math.sqrt(var / n)


def evaluate_point(protocol: str, inputs: np.ndarray, gamma: float, label: str) -> SweepRow:
    res = simulate_batch(protocol, inputs, gamma)
    out = res.outcomes[label]
    fid_after = out.fidelity_after[~np.isnan(out.fidelity_after)]
    noisy = _mean_se(res.fidelity_before)
    purified = _mean_se(fid_after)
    success = _mean_se(out.probability)
    return SweepRow(float(gamma), int(inputs.shape[0]), *noisy, *purified, *success)


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        env = os.environ.get(THREADS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    return workers


def run_sweep(config: SweepConfig, workers: int | None = None) -> list[SweepRow]:
    """One :class:`SweepRow` per grid point, in grid order.

    Grid points are spread over ``workers`` threads (default: ``ADPURIFY_THREADS``
    or the CPU count); results do not depend on the worker count.
    """
    inputs = sample_inputs(config.sample_spec, config.samples_per_point)
    args = [(config.protocol, inputs, g, config.post_select_label) for g in config.gamma_grid]
    n_workers = min(worker_count(workers), len(args))
    if n_workers == 1:
        return [evaluate_point(*a) for a in args]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(lambda a: evaluate_point(*a), args))


class NoCrossing(ValueError):
    pass


def critical_gamma(config: SweepConfig, threshold: float = 0.99, tol: float = 1e-3) -> float:
    """Gamma at which the mean purified fidelity falls to ``threshold``.

    Bisection on [0, 1]; every probe uses the same samples. The grid of
    ``config`` is ignored.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    inputs = sample_inputs(config.sample_spec, config.samples_per_point)

    def fid(g: float) -> float:
        return evaluate_point(config.protocol, inputs, g, config.post_select_label).fid_purified_mean

    lo, hi = 0.0, 1.0
    if not fid(lo) > threshold:
        raise NoCrossing(f"mean purified fidelity at gamma=0 does not exceed {threshold}")
    if fid(hi) > threshold:
        raise NoCrossing(f"mean purified fidelity stays above {threshold} on [0, 1]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fid(mid) > threshold:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _fmt(value: float) -> str:
    return f"{value:.12f}"


def format_rows(rows: Sequence[SweepRow]) -> str:
    if not rows:
        raise ValueError("no rows to write")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(
            [_fmt(r.gamma), str(r.n)]
            + [_fmt(getattr(r, f.name)) for f in fields(SweepRow)[2:]]
        )
    return buf.getvalue()


def write_rows(rows: Sequence[SweepRow], destination: str | os.PathLike | IO[str]) -> int:
    """Write the sweep CSV; returns the number of UTF-8 bytes written."""
    text = format_rows(rows)
    data = text.encode("utf-8")
    if isinstance(destination, (str, os.PathLike)):
        Path(destination).write_bytes(data)
    else:
        destination.write(text)
    return len(data)


def read_rows(source: str | os.PathLike | IO[str]) -> list[SweepRow]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_rows(fh)
    reader = csv.reader(source)
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    return [
        SweepRow(float(r[0]), int(r[1]), *(float(x) for x in r[2:]))
        for r in reader
    ]


FIGURES = {4: "state_1q", 5: "channel_1anc", 6: "pair_2anc"}


def figure_config(figure: int, seed: int = DEFAULT_SEED, samples: int = 1000) -> SweepConfig:
    protocol = FIGURES[figure]
    return SweepConfig(protocol, default_grid(), samples, default_spec(protocol, seed))
