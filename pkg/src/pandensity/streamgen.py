"""Synthetic stream generation, exact ground truth, and stream file I/O.

Streams are sequences of user ids in [1, U], either uniform or Zipf
(finite-support normalization).  The text file format carries one update
per line: ``<id>`` for an insert or ``<id>,<+1|-1>`` for signed updates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["StreamSpec", "Stream", "generate", "true_density", "read_stream", "write_stream"]


@dataclass(frozen=True)
class StreamSpec:
    """Description of a synthetic stream."""

    distribution: str  # "uniform" or "zipf"
    universe_size: int
    length: int
    seed: int
    exponent: float = 1.0  # Zipf only

    def __post_init__(self):
        if self.distribution not in ("uniform", "zipf"):
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.universe_size < 1:
            raise ValueError(f"universe size must be >= 1, got {self.universe_size}")
        if self.length < 0:
            raise ValueError(f"length must be >= 0, got {self.length}")
        if self.distribution == "zipf" and not self.exponent > 0:
            raise ValueError(f"Zipf exponent must be > 0, got {self.exponent}")


@dataclass(frozen=True)
class Stream:
    """A stream of updates: ids in [1, U], signs in {+1, -1} (all +1 for
    plain insert streams)."""

    ids: np.ndarray
    signs: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64)
        object.__setattr__(self, "ids", ids)
        if self.signs is None:
            object.__setattr__(self, "signs", np.ones(ids.size, dtype=np.int8))
        else:
            signs = np.asarray(self.signs, dtype=np.int8)
            if signs.shape != ids.shape:
                raise ValueError("signs must match ids in length")
            if signs.size and not np.isin(signs, (-1, 1)).all():
                raise ValueError("signs must be +1 or -1")
            object.__setattr__(self, "signs", signs)
        if ids.size and ids.min() < 1:
            raise ValueError("user ids must be >= 1")

    def __len__(self) -> int:
        return int(self.ids.size)

    @property
    def insert_only(self) -> bool:
        return bool((self.signs == 1).all())


def generate(spec: StreamSpec) -> Stream:
    """T i.i.d. draws per the spec; byte-deterministic per seed."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    if spec.length == 0:
        return Stream(np.empty(0, dtype=np.int64))
    if spec.distribution == "uniform":
        ids = rng.integers(1, spec.universe_size + 1, size=spec.length, dtype=np.int64)
    else:
        # exact finite-support Zipf: cumulative table + binary search
        weights = np.arange(1, spec.universe_size + 1, dtype=np.float64) ** (-spec.exponent)
        cdf = np.cumsum(weights)
        cdf /= cdf[-1]
        ids = np.searchsorted(cdf, rng.random(spec.length), side="right") + 1
        ids = ids.astype(np.int64)
    return Stream(ids)


def true_density(stream: Stream | np.ndarray, universe_size: int) -> float:
    """Exact density: distinct appearing ids divided by the universe size.

    For signed streams, a user counts as appearing when its accumulated
    state is positive at the end.
    """
    if isinstance(stream, Stream):
        ids, signs = stream.ids, stream.signs
    else:
        ids = np.asarray(stream, dtype=np.int64)
        signs = None
    if ids.size == 0:
        return 0.0
    if ids.min() < 1 or ids.max() > universe_size:
        raise ValueError("stream contains ids outside the universe")
    if signs is None or (signs == 1).all():
        return float(np.unique(ids).size) / universe_size
    counts = np.zeros(universe_size + 1, dtype=np.int64)
    np.add.at(counts, ids, signs)
    return float((counts > 0).sum()) / universe_size


def write_stream(stream: Stream, path: str | Path) -> None:
    """One update per line; inserts as bare ids, deletes as ``id,-1``."""
    path = Path(path)
    lines = []
    for uid, sign in zip(stream.ids.tolist(), stream.signs.tolist()):
        lines.append(str(uid) if sign == 1 else f"{uid},-1")
    path.write_text("\n".join(lines) + ("\n" if lines else ""))


def parse_stream_lines(lines) -> Stream:
    """Parse stream-file lines; raises ValueError with the 1-based line
    number on malformed input."""
    ids: list[int] = []
    signs: list[int] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        try:
            uid = int(parts[0])
            sign = 1
            if len(parts) == 2:
                sign = int(parts[1])
            elif len(parts) > 2:
                raise ValueError
            if uid < 1 or sign not in (1, -1):
                raise ValueError
        except ValueError:
            raise ValueError(
                f"parse error at line {lineno}: expected '<id>' or '<id>,<+1|-1>' "
                f"with id >= 1, got {raw.rstrip()!r}"
            ) from None
        ids.append(uid)
        signs.append(sign)
    return Stream(np.asarray(ids, dtype=np.int64), np.asarray(signs, dtype=np.int8))


def read_stream(path: str | Path) -> Stream:
    path = Path(path)
    with path.open() as fh:
        return parse_stream_lines(fh)
