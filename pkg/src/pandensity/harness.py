"""Monte-Carlo experiment harness.

Runs repeated seeded trials of the three estimators over synthetic
streams, aggregating empirical error probability, MSE and bias per
(variant, eps, m) grid point.  Seeds are derived by mixing the base seed
with the grid-point parameters and repetition index, so results are
deterministic, schedule-independent, and stable under grid extension.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import bounds
from .distinct_sampling import PpdsEstimator
from .estimators import StaticEstimator, Variant
from .mechanisms import PrivacyBudget
from .streamgen import Stream, StreamSpec, generate, true_density

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "ExperimentResult",
    "derive_seed",
    "run_trial",
    "run_experiment",
    "write_csv",
    "load_config",
]

CSV_HEADER = ["variant", "eps", "m", "alpha", "reps", "err_prob", "mse", "bias", "mse_bound"]

_VARIANT_ORDER = {Variant.DWORK: 0, Variant.OPTBERN: 1, Variant.PPDS: 2}
_STREAM_TAG = 0x5354_5245_414D_5345  # namespace tag for stream seeds


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def derive_seed(base: int, *parts) -> int:
    """Mix a base seed with grid-point parameters via repeated splitmix64.

    Floats are mixed by their bit pattern, so a grid point's seed depends
    only on its own parameters; adding grid points never perturbs others.
    """
    z = _splitmix64(base & 0xFFFFFFFFFFFFFFFF)
    for p in parts:
        if isinstance(p, float):
            p = struct.unpack("<Q", struct.pack("<d", p))[0]
        elif isinstance(p, str):
            p = int.from_bytes(p.encode()[:8].ljust(8, b"\0"), "little")
        z = _splitmix64(z ^ (int(p) & 0xFFFFFFFFFFFFFFFF))
    return z


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one Monte-Carlo comparison."""

    variants: tuple[Variant, ...]
    stream: StreamSpec
    eps_grid: tuple[float, ...]
    samples: tuple[int, ...]
    alpha: float
    reps: int
    base_seed: int
    output: str = "results.csv"
    fixed_stream: bool = False
    figures: bool = True

    def __post_init__(self):
        if not self.variants:
            raise ValueError("at least one variant required")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if not self.eps_grid:
            raise ValueError("eps grid must be nonempty")
        for e in self.eps_grid:
            if not 0.0 < e <= 0.5:
                raise ValueError(f"eps grid values must lie in (0, 1/2], got {e}")
        if not self.samples:
            raise ValueError("sample size set must be nonempty")
        for m in self.samples:
            if m < 1:
                raise ValueError(f"sample sizes must be >= 1, got {m}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")


@dataclass(frozen=True)
class ResultRow:
    variant: Variant
    eps: float
    m: int
    alpha: float
    reps: int
    err_prob: float
    mse: float
    bias: float
    mse_bound: float


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    rows: tuple[ResultRow, ...]


def _run_full(variant: Variant, stream_ids: np.ndarray, universe_size: int,
              m: int, eps: float, seed: int) -> tuple[float, int]:
    budget = PrivacyBudget(eps)
    if variant is Variant.PPDS:
        est = PpdsEstimator(universe_size, m, budget, seed=seed)
        est.feed(stream_ids)
        return est.estimate().value, est.level
    est = StaticEstimator(variant, universe_size, m, budget, seed=seed)
    est.feed(stream_ids)
    return est.estimate().value, 0


def run_trial(variant, stream, universe_size: int, m: int, eps: float, seed: int) -> float:
    """One estimator execution over a stream; deterministic per inputs."""
    v = Variant.parse(variant)
    ids = stream.ids if isinstance(stream, Stream) else np.asarray(stream, dtype=np.int64)
    return _run_full(v, ids, universe_size, m, eps, seed)[0]


def _stream_for_rep(config: ExperimentConfig, rep: int) -> Stream:
    # streams are keyed by repetition only, so all grid points of a
    # repetition see the same stream (paired comparisons) and extending
    # the grid leaves existing points untouched
    rep_key = 0 if config.fixed_stream else rep
    seed = derive_seed(config.base_seed, _STREAM_TAG, rep_key)
    return generate(replace(config.stream, seed=seed))


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """All grid points, R repetitions each; aggregation order is fixed by
    repetition index so parallel and serial schedules agree."""
    streams: list[Stream] = []
    densities: list[float] = []
    for rep in range(config.reps):
        s = _stream_for_rep(config, rep)
        streams.append(s)
        densities.append(true_density(s, config.stream.universe_size))

    rows: list[ResultRow] = []
    variants = sorted(set(config.variants), key=_VARIANT_ORDER.__getitem__)
    for variant in variants:
        for eps in sorted(config.eps_grid):
            for m in sorted(config.samples):
                errors = np.empty(config.reps)
                levels = np.zeros(config.reps, dtype=np.int64)
                for rep in range(config.reps):
                    seed = derive_seed(config.base_seed, variant.value, eps, m, rep)
                    value, level = _run_full(
                        variant, streams[rep].ids, config.stream.universe_size,
                        m, eps, seed,
                    )
                    errors[rep] = value - densities[rep]
                    levels[rep] = level
                if variant is Variant.PPDS:
                    bound = float(np.mean([
                        bounds.ppds_mse_bound(int(l), config.stream.universe_size, eps)
                        for l in levels
                    ]))
                else:
                    bound = bounds.mse_bound(variant, m, eps)
                rows.append(ResultRow(
                    variant=variant,
                    eps=eps,
                    m=m,
                    alpha=config.alpha,
                    reps=config.reps,
                    err_prob=float(np.mean(np.abs(errors) >= config.alpha)),
                    mse=float(np.mean(errors**2)),
                    bias=float(np.mean(errors)),
                    mse_bound=bound,
                ))
    return ExperimentResult(config=config, rows=tuple(rows))


def write_csv(result: ExperimentResult, path: str | Path) -> None:
    """Fixed schema, one row per grid point, deterministic order."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for r in result.rows:
                writer.writerow([
                    r.variant.value,
                    repr(r.eps),
                    r.m,
                    repr(r.alpha),
                    r.reps,
                    repr(r.err_prob),
                    repr(r.mse),
                    repr(r.bias),
                    repr(r.mse_bound),
                ])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse a flat key=value config file into an ExperimentConfig."""
    path = Path(path)
    raw: dict[str, str] = {}
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            raw[key.strip()] = value.strip()

    def require(key: str) -> str:
        if key not in raw:
            raise ValueError(f"{path}: missing required key {key!r}")
        return raw[key]

    def parse_bool(key: str, default: bool) -> bool:
        v = raw.get(key)
        if v is None:
            return default
        if v.lower() in _TRUE:
            return True
        if v.lower() in _FALSE:
            return False
        raise ValueError(f"{path}: key {key!r} must be boolean, got {v!r}")

    universe = int(require("universe"))
    variants = tuple(Variant.parse(v.strip()) for v in require("variants").split(","))
    spec = StreamSpec(
        distribution=raw.get("dist", "uniform"),
        universe_size=universe,
        length=int(require("length")),
        seed=0,  # per-repetition seeds are derived by the harness
        exponent=float(raw.get("zipf_s", "1.0")),
    )
    if "samples" in raw:
        samples = tuple(int(s) for s in raw["samples"].split(","))
    elif "sample_fracs" in raw:
        fracs = [float(s) for s in raw["sample_fracs"].split(",")]
        for f in fracs:
            if not 0.0 < f <= 1.0:
                raise ValueError(f"{path}: sample fractions must lie in (0, 1], got {f}")
        samples = tuple(max(1, round(f * universe)) for f in fracs)
    else:
        raise ValueError(f"{path}: need either 'samples' or 'sample_fracs'")
    return ExperimentConfig(
        variants=variants,
        stream=spec,
        eps_grid=tuple(float(e) for e in require("eps").split(",")),
        samples=samples,
        alpha=float(require("alpha")),
        reps=int(require("reps")),
        base_seed=int(require("seed")),
        output=raw.get("out", "results.csv"),
        fixed_stream=parse_bool("fixed_stream", False),
        figures=parse_bool("figures", True),
    )
