"""Static-sampling pan-private density estimators.

One state machine covers both variants: the conventional estimator
(uniform init bits, update bias 1/2 + eps/4) and the budget-tight variant
(tanh-tuned Bernoulli pair).  The state is a fixed random sample of users
plus one random bit per sampled user; the final estimate debiases the bit
mean and adds Laplace output noise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .mechanisms import (
    BernoulliPair,
    NoiseSource,
    PrivacyBudget,
    make_dwork_pair,
    make_optimal_pair,
)

__all__ = ["Variant", "DensityEstimate", "StaticEstimator", "sample_without_replacement"]


class Variant(str, enum.Enum):
    DWORK = "dwork"
    OPTBERN = "optbern"
    PPDS = "ppds"

    @classmethod
    def parse(cls, name: "Variant | str") -> "Variant":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"unknown variant {name!r}; expected dwork, optbern or ppds") from None


@dataclass(frozen=True)
class DensityEstimate:
    """A single density output.  Deliberately unclamped: values outside
    [0, 1] preserve unbiasedness; clamp only for display."""

    value: float
    variant: Variant
    m: int
    epsilon: float


def sample_without_replacement(universe_size: int, k: int, src: NoiseSource) -> np.ndarray:
    """k distinct user ids drawn uniformly from [1, universe_size].

    Partial Fisher-Yates over a virtual [0, U) array: O(k) memory, seeded
    and reproducible.  Returns ids in draw order.
    """
    if not 1 <= k <= universe_size:
        raise ValueError(f"need 1 <= k <= U, got k={k}, U={universe_size}")
    if k == universe_size:
        return np.arange(1, universe_size + 1, dtype=np.int64)
    js = src.integers(np.arange(k, dtype=np.int64), universe_size)
    swaps: dict[int, int] = {}
    out = np.empty(k, dtype=np.int64)
    for i, j in enumerate(js.tolist()):
        out[i] = swaps.get(j, j)
        swaps[j] = swaps.get(i, i)
    return out + 1


class StaticEstimator:
    """Pan-private density estimator over a fixed random subset of users.

    Single-owner mutable; run independent instances (with independent
    seeds) for parallelism.
    """

    def __init__(
        self,
        variant: Variant | str,
        universe_size: int,
        sample_size: int,
        budget: PrivacyBudget,
        seed: int | None = None,
        source: NoiseSource | None = None,
    ):
        self.variant = Variant.parse(variant)
        if self.variant is Variant.PPDS:
            raise ValueError("PPDS is an adaptive estimator; use PpdsEstimator")
        if universe_size < 1:
            raise ValueError(f"universe size must be >= 1, got {universe_size}")
        if not 1 <= sample_size <= universe_size:
            raise ValueError(
                f"sample size must lie in [1, U], got m={sample_size}, U={universe_size}"
            )
        self.universe_size = int(universe_size)
        self.m = int(sample_size)
        self.budget = budget.require_paper_regime()
        self._src = source if source is not None else NoiseSource(seed)
        if self.variant is Variant.DWORK:
            self.pair: BernoulliPair = make_dwork_pair(self.budget)
        else:
            self.pair = make_optimal_pair(self.budget)

        ids = sample_without_replacement(self.universe_size, self.m, self._src)
        self._ids = ids
        order = np.argsort(ids, kind="stable")
        self._sorted_ids = ids[order]
        self._sorted_pos = order  # position in bit array per sorted id
        self._bits = self._src.bernoullis(self.pair.p_init, self.m)

    def reset(self) -> None:
        """Re-draw every bit from Bernoulli(p_init), restoring the freshly
        constructed state distribution.  Keeps the tracked sample and the
        noise source; meant for repeated simulation runs over a fixed
        sample."""
        self._bits = self._src.bernoullis(self.pair.p_init, self.m)

    # -- state access -------------------------------------------------

    @property
    def sampled_users(self) -> np.ndarray:
        return self._ids.copy()

    def snapshot_state(self) -> tuple[np.ndarray, np.ndarray]:
        """Copy of (sampled user ids, bit array); the intrusion surface."""
        return self._ids.copy(), self._bits.copy()

    def _index_of(self, user: int) -> int | None:
        pos = int(np.searchsorted(self._sorted_ids, user))
        if pos < self.m and self._sorted_ids[pos] == user:
            return int(self._sorted_pos[pos])
        return None

    def _check_user(self, user: int) -> None:
        if not 1 <= user <= self.universe_size:
            raise ValueError(f"user id {user} outside universe [1, {self.universe_size}]")

    # -- stream updates -----------------------------------------------

    def observe(self, user: int) -> None:
        """Process one appearance: a tracked user's bit is re-drawn from
        Bernoulli(p_upd), unconditionally on every appearance."""
        self._check_user(user)
        idx = self._index_of(user)
        if idx is not None:
            self._bits[idx] = self._src.bernoulli(self.pair.p_upd)

    def observe_delete(self, user: int) -> None:
        """Process one deletion: a tracked user's bit is re-drawn from
        Bernoulli(p_init), restoring the never-seen marginal."""
        self._check_user(user)
        idx = self._index_of(user)
        if idx is not None:
            self._bits[idx] = self._src.bernoulli(self.pair.p_init)

    def feed(self, users: np.ndarray) -> None:
        """Process a whole insert-only stream at once.

        Since every appearance re-draws the bit i.i.d., the final bit of a
        tracked user that appears k >= 1 times is distributed Bernoulli(p_upd)
        for every k; drawing once per appearing user is distributionally
        identical and vectorizes.  Use observe()/observe_delete() for
        update-by-update processing or for streams with deletions.
        """
        users = np.asarray(users, dtype=np.int64)
        if users.size == 0:
            return
        if users.min() < 1 or users.max() > self.universe_size:
            raise ValueError("stream contains ids outside the universe")
        pos = np.searchsorted(self._sorted_ids, users)
        pos[pos == self.m] = 0
        hits = self._sorted_ids[pos] == users
        mask = np.zeros(self.m, dtype=bool)
        mask[self._sorted_pos[pos[hits]]] = True
        touched = np.nonzero(mask)[0]
        if touched.size:
            self._bits[touched] = self._src.bernoullis(self.pair.p_upd, touched.size)

    # -- output --------------------------------------------------------

    def estimate(self) -> DensityEstimate:
        """Debiased density estimate plus Laplace(0, 1/(eps m)) output noise.

        Repeatable for simulation convenience; each call draws fresh noise.
        No privacy claim is made about repeated outputs (the guarantee
        covers a single output).
        """
        eps = self.budget.epsilon
        b_mean = float(self._bits.sum()) / self.m
        if self.variant is Variant.DWORK:
            value = (4.0 / eps) * (b_mean - 0.5)
        else:
            t = math.tanh(eps / 2.0)
            value = (b_mean - 0.5 + 0.5 * t) / t
        value += self._src.laplace(1.0 / (eps * self.m))
        return DensityEstimate(value=value, variant=self.variant, m=self.m, epsilon=eps)
