"""Pan-private distinct sampling: level hash plus the adaptive estimator.

Users map through a linear hash to a trailing-zeros level (level i with
probability 2^-(i+1)); the sample keeps only users at or above the current
level and halves its admissible universe whenever the size bound is hit.
Membership updates use the tanh-tuned Bernoulli pair, so presence in the
sample carries exactly the allocated differential-privacy budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimators import DensityEstimate, Variant
from .mechanisms import NoiseSource, PrivacyBudget, make_optimal_pair

__all__ = [
    "FmHashParams",
    "PpdsEstimator",
    "new_fm_hash",
    "trailing_zeros",
    "hash_level",
]


@dataclass(frozen=True)
class FmHashParams:
    """Linear level hash h(u) = (alpha*u + beta) mod 2^q; level = trailing
    zeros of h(u).  alpha odd makes h a bijection on residues, so the level
    law Prob(level = i) = 2^-(i+1) holds exactly for i < q."""

    q: int
    alpha: int
    beta: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if not (1 <= self.alpha < 2**self.q) or self.alpha % 2 == 0:
            raise ValueError(f"alpha must be odd in [1, 2^q - 1], got {self.alpha}")
        if not 0 <= self.beta < 2**self.q:
            raise ValueError(f"beta must lie in [0, 2^q - 1], got {self.beta}")


def trailing_zeros(x: int, q: int) -> int:
    """Trailing zero bits of x, with trailing_zeros(0) = q.

    The zero convention keeps levels inside [0, q]: h(u) = 0 occurs for
    exactly one residue and gets the top level, so Prob(level = i) stays
    2^-(i+1) for every i < q.
    """
    if not 0 <= x < 2**q:
        raise ValueError(f"x must lie in [0, 2^q), got x={x}, q={q}")
    if x == 0:
        return q
    return (x & -x).bit_length() - 1


def new_fm_hash(universe_size: int, src: NoiseSource | int | None = None) -> FmHashParams:
    """Draw hash parameters for a universe: q = ceil(log2 U), alpha odd
    uniform in [1, 2^q - 1], beta uniform in [0, 2^q - 1].

    q is floored at 1 so the odd-alpha range is nonempty for U = 1.
    """
    if universe_size < 1:
        raise ValueError(f"universe size must be >= 1, got {universe_size}")
    if not isinstance(src, NoiseSource):
        src = NoiseSource(src)
    q = max(1, math.ceil(math.log2(universe_size)))
    alpha = 2 * int(src.integers(0, 2 ** (q - 1))) + 1
    beta = int(src.integers(0, 2**q))
    return FmHashParams(q=q, alpha=alpha, beta=beta)


def hash_level(params: FmHashParams, user: int) -> int:
    """Level of one user; deterministic per (params, user)."""
    if user < 1:
        raise ValueError(f"user id must be >= 1, got {user}")
    h = (params.alpha * user + params.beta) % (2**params.q)
    return trailing_zeros(h, params.q)


def _levels_vector(params: FmHashParams, universe_size: int) -> np.ndarray:
    """Levels of all users 1..U as an int64 array."""
    mask = (1 << params.q) - 1
    u = np.arange(1, universe_size + 1, dtype=np.uint64)
    h = (np.uint64(params.alpha) * u + np.uint64(params.beta)) & np.uint64(mask)
    lsb = h & (~h + np.uint64(1))
    levels = np.zeros(universe_size, dtype=np.int64)
    nz = h != 0
    levels[nz] = np.log2(lsb[nz].astype(np.float64)).round().astype(np.int64)
    levels[~nz] = params.q
    return levels


class PpdsEstimator:
    """Adaptive pan-private density estimator with level-based eviction.

    Initialization scans the full universe once (offline), admitting each
    qualifying user with probability p_init.  Stream updates flip membership
    with the p_upd pair.  Whenever the sample reaches its bound m, every
    member at the current level is evicted and the level increments, until
    the bound is restored; retained members always sit strictly above the
    old level.
    """

    def __init__(
        self,
        universe_size: int,
        sample_bound: int,
        budget: PrivacyBudget,
        seed: int | None = None,
        source: NoiseSource | None = None,
        hash_params: FmHashParams | None = None,
    ):
        if universe_size < 1:
            raise ValueError(f"universe size must be >= 1, got {universe_size}")
        if sample_bound < 2:
            raise ValueError(f"sample bound must be >= 2, got {sample_bound}")
        self.universe_size = int(universe_size)
        self.m = int(sample_bound)
        self.budget = budget.require_paper_regime()
        self.pair = make_optimal_pair(self.budget)
        self._src = source if source is not None else NoiseSource(seed)
        self.hash = hash_params if hash_params is not None else new_fm_hash(universe_size, self._src)
        if universe_size > 2**self.hash.q:
            raise ValueError(
                f"hash too narrow: U={universe_size} > 2^q={2 ** self.hash.q}"
            )
        self._levels = _levels_vector(self.hash, universe_size)
        self._levels_list: list[int] | None = None
        self.level = 0
        self._members: dict[int, int] = {}
        self._init_scan()

    # -- construction ---------------------------------------------------

    def _evict(self) -> None:
        # Runs until the bound is restored; each pass removes every member
        # at level <= current level, then increments the level.
        while len(self._members) >= self.m:
            if self.level >= self.hash.q:
                raise RuntimeError(
                    f"level exceeded q={self.hash.q} with the sample still full; "
                    "sample bound unreachable"
                )
            cut = self.level
            # mutate in place: feed() holds an alias to the dict
            drop = [u for u, l in self._members.items() if l <= cut]
            for u in drop:
                del self._members[u]
            self.level = cut + 1

    def _init_scan(self) -> None:
        # Sequential scan of u = 1..U, vectorized between eviction events.
        # Admission coins are pre-drawn for every user; only qualifying
        # users consume theirs in the sequential semantics, and since coins
        # are i.i.d. the resulting distribution is identical.
        coins = self._src.uniforms(self.universe_size) < self.pair.p_init
        levels = self._levels
        idx = 0
        while idx < self.universe_size:
            admit = coins[idx:] & (levels[idx:] >= self.level)
            running = len(self._members) + np.cumsum(admit)
            trigger = np.nonzero(running >= self.m)[0]
            if trigger.size == 0:
                take = np.nonzero(admit)[0] + idx
                self._members.update(zip((take + 1).tolist(), levels[take].tolist()))
                break
            k = int(trigger[0])
            take = np.nonzero(admit[: k + 1])[0] + idx
            self._members.update(zip((take + 1).tolist(), levels[take].tolist()))
            self._evict()
            idx += k + 1

    # -- state access -----------------------------------------------------

    @property
    def sample(self) -> frozenset[int]:
        return frozenset(self._members)

    def snapshot_state(self) -> tuple[frozenset[int], int]:
        """Copy of (member ids, current level); the intrusion surface."""
        return frozenset(self._members), self.level

    def user_level(self, user: int) -> int:
        self._check_user(user)
        return int(self._levels[user - 1])

    def _check_user(self, user: int) -> None:
        if not 1 <= user <= self.universe_size:
            raise ValueError(f"user id {user} outside universe [1, {self.universe_size}]")

    # -- stream updates ----------------------------------------------------

    def observe(self, user: int) -> None:
        """Process one appearance, exactly as the stream phase prescribes:
        present users are removed with probability 1 - p_upd on every
        appearance; absent qualifying users are admitted with probability
        p_upd, then the eviction step runs if the bound was reached."""
        self._check_user(user)
        if user in self._members:
            if self._src.uniform() < 1.0 - self.pair.p_upd:
                del self._members[user]
        else:
            lev = int(self._levels[user - 1])
            if lev >= self.level:
                if self._src.uniform() < self.pair.p_upd:
                    self._members[user] = lev
            if len(self._members) >= self.m:
                self._evict()

    def feed(self, users: np.ndarray) -> None:
        """Process a whole insert-only stream update by update."""
        users = np.asarray(users, dtype=np.int64)
        if users.size == 0:
            return
        if users.min() < 1 or users.max() > self.universe_size:
            raise ValueError("stream contains ids outside the universe")
        if self._levels_list is None:
            self._levels_list = self._levels.tolist()
        members = self._members
        levels = self._levels_list
        rand = self._src._rng.random
        p_upd = self.pair.p_upd
        p_remove = 1.0 - p_upd
        bound = self.m
        for u in users.tolist():
            if u in members:
                if rand() < p_remove:
                    del members[u]
            else:
                lev = levels[u - 1]
                if lev >= self.level:
                    if rand() < p_upd:
                        members[u] = lev
                if len(members) >= bound:
                    self._evict()

    # -- output -------------------------------------------------------------

    def estimate(self) -> DensityEstimate:
        """Debiased level-scaled density plus Laplace(0, 2^L/(eps U)) noise.

        Unclamped; repeated calls draw fresh noise (single-output privacy
        semantics, as for the static estimators).
        """
        eps = self.budget.epsilon
        t = math.tanh(eps / 2.0)
        scaled = (2.0**self.level) * len(self._members) / self.universe_size
        value = (scaled - 0.5 + 0.5 * t) / t
        value += self._src.laplace((2.0**self.level) / (eps * self.universe_size))
        return DensityEstimate(value=value, variant=Variant.PPDS, m=self.m, epsilon=eps)
