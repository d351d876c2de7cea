"""Ensemble experiments over smooth integers: per-n Gaussian tail error
sweeps, ensemble-averaged tails, concentration of the law's spread, and the
arcsine profile of divisor counting functions.

Every run returns a RunResult whose rows serialize deterministically: the
same config always produces byte-identical CSV and JSON, so outputs can be
diffed across machines and backends.
"""

from __future__ import annotations

import dataclasses
import json
import random
from dataclasses import dataclass
from math import asin, exp, pi, sqrt

import numpy as np

from friabilis._backend import BACKEND, kernels
from friabilis.arith import enumerate_smooth
from friabilis.divdist import (
    additive_fk,
    exact_law,
    model_mean_additive,
    moments,
    nudge_off_atom,
)
from friabilis.errors import ConfigError
from friabilis.perron import gaussian_tail
from friabilis.saddle import make_context

SCHEMA_VERSION = 1


def _as_float_grid(values) -> tuple[float, ...]:
    grid = tuple(float(v) for v in values)
    if not grid:
        raise ConfigError("grid must be non-empty")
    return grid


def _check_range(x: int, y: int) -> None:
    if x < 2:
        raise ConfigError("x must be >= 2")
    if y < 2:
        raise ConfigError("y must be >= 2")


@dataclass(frozen=True)
class RunResult:
    """Rows (dataclass instances, one type per run kind) plus a meta dict."""

    rows: tuple
    meta: dict

    @property
    def header(self) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(type(self.rows[0])))

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"# schema={SCHEMA_VERSION}\n")
            fh.write(",".join(self.header) + "\n")
            for row in self.rows:
                cells = (
                    _csv_cell(getattr(row, name)) for name in self.header
                )
                fh.write(",".join(cells) + "\n")

    def to_json(self) -> str:
        payload = {
            "meta": self.meta,
            "rows": [dataclasses.asdict(r) for r in self.rows],
        }
        return json.dumps(payload, sort_keys=True)


def _csv_cell(value) -> str:
    # repr of a float is its shortest exact round-trip form, which makes the
    # byte-identical-output guarantee independent of print formatting
    if isinstance(value, float):
        return repr(value)
    return str(value)


# -- per-n Gaussian tail error sweep ----------------------------------------


@dataclass(frozen=True)
class CltRunConfig:
    """Sweep P(D_n >= mean + z sigma_n) against the Gaussian tail.

    For each n the error is weighted by w_n / (1 + z^4); errors above C are
    counted as exceptional.  n with w_n below w_min are skipped, and each z
    is only tested on n with z <= B w_n^{1/4} (B is a run_clt argument).
    When more than sample_cap smooth n are in range, a seed-determined
    uniform sample of exactly sample_cap of them is used instead.
    """

    x: int
    y: int
    z_grid: tuple[float, ...]
    C: float = 10.0
    w_min: float = 0.0
    seed: int = 0
    sample_cap: int = 200_000

    def __post_init__(self):
        _check_range(self.x, self.y)
        grid = _as_float_grid(self.z_grid)
        if any(z < 0 for z in grid):
            raise ConfigError("z_grid entries must be >= 0")
        object.__setattr__(self, "z_grid", grid)
        if self.C <= 0:
            raise ConfigError("C must be positive")
        if self.w_min < 0:
            raise ConfigError("w_min must be >= 0")
        if self.sample_cap < 1:
            raise ConfigError("sample_cap must be >= 1")


@dataclass(frozen=True)
class CltRow:
    z: float
    n_tested: int
    exceptional_count: int
    exceptional_fraction: float
    median_normalized_error: float
    max_normalized_error: float
    nudged: int


def _reservoir(stream, cap: int, seed: int):
    """Uniform sample of cap items from a stream of unknown length.

    Returns (selected, total).  Classic reservoir replacement; the RNG is
    local to the call so identical (stream, cap, seed) give identical
    samples.
    """
    rng = random.Random(seed)
    selected = []
    total = 0
    for item in stream:
        total += 1
        if len(selected) < cap:
            selected.append(item)
        else:
            j = rng.randrange(total)
            if j < cap:
                selected[j] = item
    return selected, total


def run_clt(config: CltRunConfig, *, B: float = 1.0) -> RunResult:
    """Gaussian tail quality across S(x, y), one output row per z."""
    if B <= 0:
        raise ConfigError("B must be positive")
    stream = (f for f in enumerate_smooth(config.x, config.y) if f.n > 1)
    selected, total = _reservoir(stream, config.sample_cap, config.seed)
    selected.sort(key=lambda f: f.n)

    zs = config.z_grid
    errors: list[list[float]] = [[] for _ in zs]
    exceptional = [0] * len(zs)
    nudged_counts = [0] * len(zs)
    for f in selected:
        mom = moments(f)
        if mom.w < config.w_min:
            continue
        z_cap = B * mom.w**0.25
        active = [i for i, z in enumerate(zs) if z <= z_cap]
        if not active:
            continue
        law = exact_law(f)
        half_log_n = 0.5 * f.log_n
        for i in active:
            z = zs[i]
            t, nudged = nudge_off_atom(law, half_log_n + z * mom.sigma)
            err = (
                abs(law.upper_tail(t) / gaussian_tail(z) - 1.0)
                * mom.w
                / (1.0 + z**4)
            )
            errors[i].append(err)
            exceptional[i] += err > config.C
            nudged_counts[i] += nudged

    rows = []
    for i, z in enumerate(zs):
        errs = errors[i]
        rows.append(
            CltRow(
                z=z,
                n_tested=len(errs),
                exceptional_count=exceptional[i],
                exceptional_fraction=exceptional[i] / len(errs) if errs else 0.0,
                median_normalized_error=float(np.median(errs)) if errs else 0.0,
                max_normalized_error=max(errs) if errs else 0.0,
                nudged=nudged_counts[i],
            )
        )
    meta = {
        "schema": SCHEMA_VERSION,
        "kind": "clt",
        "backend": BACKEND,
        "x": config.x,
        "y": config.y,
        "z_grid": list(zs),
        "C": config.C,
        "B": B,
        "w_min": config.w_min,
        "seed": config.seed,
        "sample_cap": config.sample_cap,
        "psi_gt1": total,
        "n_selected": len(selected),
        "sampled": total > config.sample_cap,
        # medians and maxima are computed exactly, not sketched
        "quantile_rank_error": 0.0,
    }
    return RunResult(rows=tuple(rows), meta=meta)


# -- ensemble-averaged tails -------------------------------------------------


@dataclass(frozen=True)
class AverageRunConfig:
    """Average P(D_n >= half log n + z sigma_bar) over all of S(x, y).

    The threshold scale is the ensemble sigma_bar(x, y), the same for every
    n, which is what makes the average a function of (x, y, z) alone.  The
    z range is capped at c5 * u_bar^{1/5}; past that the ensemble average
    is no longer governed by the Gaussian profile and the run refuses to
    pretend otherwise.  Negative z is fine (the exact law answers directly).
    """

    x: int
    y: int
    z_grid: tuple[float, ...]
    c5: float = 1.0

    def __post_init__(self):
        _check_range(self.x, self.y)
        object.__setattr__(self, "z_grid", _as_float_grid(self.z_grid))
        if self.c5 <= 0:
            raise ConfigError("c5 must be positive")


@dataclass(frozen=True)
class AverageRow:
    z: float
    n_count: int
    mean_tail: float
    gaussian: float
    normalized_gap: float
    nudged: int


def run_average(config: AverageRunConfig) -> RunResult:
    """Ensemble average of exact tails vs the Gaussian, one row per z.

    The gap column is |mean - Phi(z)| * u_bar / ((1 + z^4) Phi(z)), the
    natural scale on which the average should sit near a constant.
    """
    ctx = make_context(config.x, config.y)
    z_cap = config.c5 * ctx.u_bar ** 0.2
    for z in config.z_grid:
        if abs(z) > z_cap:
            raise ConfigError(
                f"|z| = {abs(z)} exceeds the admissible cap {z_cap}"
            )
    sigma_bar = ctx.sigma_bar

    zs = config.z_grid
    sums = [0.0] * len(zs)
    nudged_counts = [0] * len(zs)
    count = 0
    for f in enumerate_smooth(config.x, config.y):
        count += 1
        law = exact_law(f)
        half_log_n = 0.5 * f.log_n
        for i, z in enumerate(zs):
            t, nudged = nudge_off_atom(law, half_log_n + z * sigma_bar)
            sums[i] += law.upper_tail(t)
            nudged_counts[i] += nudged

    rows = []
    for i, z in enumerate(zs):
        mean_tail = sums[i] / count if count else 0.0
        gauss = gaussian_tail(z)
        gap = abs(mean_tail - gauss) * ctx.u_bar / ((1.0 + z**4) * gauss)
        rows.append(
            AverageRow(
                z=z,
                n_count=count,
                mean_tail=mean_tail,
                gaussian=gauss,
                normalized_gap=gap,
                nudged=nudged_counts[i],
            )
        )
    meta = {
        "schema": SCHEMA_VERSION,
        "kind": "average",
        "backend": BACKEND,
        "x": config.x,
        "y": config.y,
        "z_grid": list(zs),
        "c5": config.c5,
        "u": ctx.u,
        "u_bar": ctx.u_bar,
        "sigma_bar": sigma_bar,
        "psi": count,
    }
    return RunResult(rows=tuple(rows), meta=meta)


# -- concentration of sigma_n around the ensemble scale ----------------------


@dataclass(frozen=True)
class ConcentrationRunConfig:
    """Concentration of the additive statistics f_k around their model
    means A_{f_k}(x, y), plus the spread of sigma_n around sigma_bar.

    f_k(n) sums (nu log p)^k over p^nu || n; k = 0 is omega.  thresholds
    may include 0, where the row degenerates to the fraction of n whose
    f_k misses its model mean at all.
    """

    x: int
    y: int
    k_list: tuple[int, ...] = (0, 1, 2)
    thresholds: tuple[float, ...] = (0.1, 0.25, 0.5)
    bins: int = 40

    def __post_init__(self):
        _check_range(self.x, self.y)
        ks = tuple(int(k) for k in self.k_list)
        if not ks:
            raise ConfigError("k_list must be non-empty")
        if any(not 0 <= k <= 8 for k in ks):
            raise ConfigError("each k must lie in 0..8")
        object.__setattr__(self, "k_list", ks)
        grid = _as_float_grid(self.thresholds)
        if any(d < 0 for d in grid):
            raise ConfigError("thresholds must be >= 0")
        object.__setattr__(self, "thresholds", grid)
        if self.bins < 1:
            raise ConfigError("bins must be >= 1")


@dataclass(frozen=True)
class ConcentrationRow:
    k: int
    delta: float
    fraction: float
    shape: float


def run_concentration(config: ConcentrationRunConfig) -> RunResult:
    """Fractions of n in S(x, y) with |f_k(n)/A_{f_k} - 1| > delta.

    One row per (k, delta).  The shape column exp(-delta^2 u_bar) is the
    reference decay profile reported alongside for comparison; no rate
    assertion is made.  The meta carries a histogram of sigma_n/sigma_bar.
    """
    ctx = make_context(config.x, config.y)
    sigma_bar = ctx.sigma_bar
    model_means = {k: model_mean_additive(ctx, k) for k in config.k_list}

    fk_ratios: dict[int, list[float]] = {k: [] for k in config.k_list}
    sigma_ratios = []
    for f in enumerate_smooth(config.x, config.y):
        for k in config.k_list:
            fk_ratios[k].append(additive_fk(f, k) / model_means[k])
        if f.n > 1:
            sigma_ratios.append(moments(f).sigma / sigma_bar)

    rows = []
    for k in config.k_list:
        dev = np.abs(np.array(fk_ratios[k]) - 1.0)
        for d in config.thresholds:
            rows.append(
                ConcentrationRow(
                    k=k,
                    delta=d,
                    fraction=float(np.mean(dev > d)),
                    shape=exp(-d * d * ctx.u_bar),
                )
            )
    sig = np.array(sigma_ratios)
    counts, edges = np.histogram(sig, bins=config.bins)
    meta = {
        "schema": SCHEMA_VERSION,
        "kind": "concentration",
        "backend": BACKEND,
        "x": config.x,
        "y": config.y,
        "k_list": list(config.k_list),
        "thresholds": list(config.thresholds),
        "bins": config.bins,
        "u_bar": ctx.u_bar,
        "sigma_bar": sigma_bar,
        "model_means": {str(k): model_means[k] for k in config.k_list},
        "psi": len(fk_ratios[config.k_list[0]]),
        "sigma_histogram": {
            "edges": [float(e) for e in edges],
            "counts": [int(c) for c in counts],
        },
    }
    return RunResult(rows=tuple(rows), meta=meta)


# -- arcsine profile over all integers ---------------------------------------


@dataclass(frozen=True)
class ArcsineRow:
    v: float
    empirical: float
    limit: float
    gap: float


def arcsine_check(x: int, vs) -> RunResult:
    """Mean of #{d | n : d <= n^v} / tau(n) over n <= x, against the
    arcsine law (2/pi) arcsin sqrt(v).

    Runs over all integers up to x (no smoothness restriction); the sieve
    kernels carry the whole computation.
    """
    x = int(x)
    if x < 1:
        raise ConfigError("x must be >= 1")
    grid = _as_float_grid(vs)
    if any(not 0.0 < v <= 1.0 for v in grid):
        raise ConfigError("each v must lie in (0, 1]")
    tau = kernels.tau_sieve(x)[1:].astype(np.float64)
    rows = []
    for v in grid:
        counts = kernels.small_divisor_count_sieve(x, v)[1:]
        empirical = float(np.mean(counts / tau))
        limit = 2.0 / pi * asin(sqrt(v))
        rows.append(
            ArcsineRow(v=v, empirical=empirical, limit=limit, gap=abs(empirical - limit))
        )
    meta = {
        "schema": SCHEMA_VERSION,
        "kind": "arcsine",
        "backend": BACKEND,
        "x": x,
        "vs": list(grid),
    }
    return RunResult(rows=tuple(rows), meta=meta)
