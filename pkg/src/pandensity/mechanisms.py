"""Primitive randomized mechanisms shared by all estimators.

Provides privacy-budget validation, the two Bernoulli state-distribution
pairs (the conventional one and the budget-tight tanh-tuned one), their
differential-privacy ratio accounting, and seeded Laplace / Bernoulli
sampling primitives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PrivacyBudget",
    "BernoulliPair",
    "NoiseSource",
    "make_dwork_pair",
    "make_optimal_pair",
    "state_privacy_ratios",
    "actual_budget",
    "laplace_sample",
    "bernoulli_sample",
]

PAPER_REGIME_MAX_EPSILON = 0.5

# Slack for the ratio certificate check: the tanh-tuned pair satisfies the
# bound with equality, so a strict float comparison would be flaky.
_CERT_RTOL = 1e-9


@dataclass(frozen=True)
class PrivacyBudget:
    """A validated privacy parameter epsilon.

    The estimators require ``epsilon <= 1/2`` (their guarantees are proved
    in that regime).  The bounds module may probe larger budgets; build
    those with :meth:`relaxed`, which records that the budget is out of the
    supported regime.
    """

    epsilon: float
    paper_regime: bool = True

    def __post_init__(self):
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be a positive finite real, got {self.epsilon}")
        if self.paper_regime and self.epsilon > PAPER_REGIME_MAX_EPSILON:
            raise ValueError(
                f"epsilon={self.epsilon} exceeds {PAPER_REGIME_MAX_EPSILON}; "
                "use PrivacyBudget.relaxed() if this is intentional"
            )

    @classmethod
    def relaxed(cls, epsilon: float) -> "PrivacyBudget":
        """Budget without the epsilon <= 1/2 restriction (bound probing only)."""
        return cls(epsilon, paper_regime=epsilon <= PAPER_REGIME_MAX_EPSILON)

    def require_paper_regime(self) -> "PrivacyBudget":
        if not self.paper_regime:
            raise ValueError(
                f"epsilon={self.epsilon} is outside the supported regime (<= 1/2)"
            )
        return self


@dataclass(frozen=True)
class BernoulliPair:
    """The (init, update) Bernoulli state distributions of an estimator.

    ``p_init`` is the marginal of a tracked user's state when the user never
    appeared, ``p_upd`` when it appeared at least once.  The pair carries the
    budget it was built for; construction verifies the DP ratio certificate
    e^-eps <= (1-p_upd)/(1-p_init) <= p_upd/p_init <= e^eps.
    """

    p_init: float
    p_upd: float
    center: float
    half_gap: float
    epsilon: float

    def __post_init__(self):
        if not (0.0 < self.p_init <= self.p_upd < 1.0):
            raise ValueError(
                f"need 0 < p_init <= p_upd < 1, got ({self.p_init}, {self.p_upd})"
            )
        if self.half_gap < 0:
            raise ValueError(f"half_gap must be >= 0, got {self.half_gap}")
        if not (0.0 < self.center <= 0.8):
            raise ValueError(f"center must lie in (0, 4/5], got {self.center}")
        r0, r1 = state_privacy_ratios(self)
        hi = math.exp(self.epsilon) * (1.0 + _CERT_RTOL)
        lo = math.exp(-self.epsilon) * (1.0 - _CERT_RTOL)
        if not (lo <= r0 and r1 <= hi):
            raise ValueError(
                f"pair ({self.p_init}, {self.p_upd}) violates the eps={self.epsilon} "
                f"ratio certificate: R0={r0}, R1={r1}"
            )


class NoiseSource:
    """Seeded deterministic randomness with a Laplace override hook.

    A single owner may draw uniforms, Bernoulli bits and Laplace noise.
    Identical seeds give identical draw sequences.  ``force_laplace``
    queues values that the next Laplace draws return verbatim, which lets
    tests pin the output-noise term; production code never queues.
    """

    def __init__(self, seed: int | None = None):
        if seed is None:
            seed = int.from_bytes(np.random.SeedSequence().generate_state(2).tobytes(), "little")
        self.seed = int(seed)
        self._rng = np.random.Generator(np.random.PCG64(self.seed))
        self._forced: list[float] = []

    def uniform(self) -> float:
        """One draw from Uniform[0, 1)."""
        return self._rng.random()

    def uniforms(self, n: int) -> np.ndarray:
        return self._rng.random(n)

    def integers(self, low, high) -> np.ndarray:
        """Uniform integers in [low, high); low may be an array."""
        return self._rng.integers(low, high)

    def force_laplace(self, value: float) -> None:
        """Make the next Laplace draw return ``value`` exactly."""
        self._forced.append(float(value))

    def laplace(self, scale: float) -> float:
        """Draw from Laplace(0, scale) via inverse CDF on one uniform.

        One uniform maps to one Laplace draw, so seeded replay is exact on
        any platform sharing the uniform generator.
        """
        if not (scale > 0 and math.isfinite(scale)):
            raise ValueError(f"Laplace scale must be positive, got {scale}")
        if self._forced:
            return self._forced.pop(0)
        u = self._rng.random() - 0.5
        return -scale * math.copysign(1.0, u) * math.log1p(-2.0 * abs(u))

    def bernoulli(self, p: float) -> int:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"Bernoulli parameter must lie in [0, 1], got {p}")
        return int(self._rng.random() < p)

    def bernoullis(self, p: float, n: int) -> np.ndarray:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"Bernoulli parameter must lie in [0, 1], got {p}")
        return (self._rng.random(n) < p).astype(np.uint8)


def make_dwork_pair(budget: PrivacyBudget) -> BernoulliPair:
    """The conventional pair: Bernoulli(1/2) vs Bernoulli(1/2 + eps/4)."""
    eps = budget.require_paper_regime().epsilon
    return BernoulliPair(
        p_init=0.5,
        p_upd=0.5 + eps / 4.0,
        center=0.5 + eps / 8.0,
        half_gap=eps / 8.0,
        epsilon=eps,
    )


def make_optimal_pair(budget: PrivacyBudget, c: float = 0.5) -> BernoulliPair:
    """The budget-tight pair: Bernoulli(c(1 -+ tanh(eps/2))).

    The half-gap x = tanh(eps/2) * c is the largest gap for which the pair
    still satisfies the eps ratio certificate; at c = 1/2 both ratios hit
    e^{+-eps} exactly.  Valid for c in (0, 4/5] when eps <= 1/2.
    """
    eps = budget.require_paper_regime().epsilon
    if not (0.0 < c <= 0.8):
        raise ValueError(f"c must lie in (0, 4/5], got {c}")
    t = math.tanh(eps / 2.0)
    return BernoulliPair(
        p_init=c * (1.0 - t),
        p_upd=c * (1.0 + t),
        center=c,
        half_gap=c * t,
        epsilon=eps,
    )


def state_privacy_ratios(pair: BernoulliPair) -> tuple[float, float]:
    """(R0, R1) = ((1-p_upd)/(1-p_init), p_upd/p_init)."""
    r0 = (1.0 - pair.p_upd) / (1.0 - pair.p_init)
    r1 = pair.p_upd / pair.p_init
    return r0, r1


def actual_budget(pair: BernoulliPair) -> float:
    """The smallest eps for which the pair is eps-DP: max |log R(b)|.

    Evaluated as log1p((a - b)/b) instead of log(a/b): the subtraction
    is exact for ratios below 2, so this avoids the cancellation log
    suffers when the ratio is close to 1.
    """
    d = pair.p_upd - pair.p_init
    return max(
        abs(math.log1p(d / pair.p_init)),
        abs(math.log1p(-d / (1.0 - pair.p_init))),
    )


def laplace_sample(scale: float, src: NoiseSource) -> float:
    """One draw from Laplace(0, scale); honors the source's override queue."""
    return src.laplace(scale)


def bernoulli_sample(p: float, src: NoiseSource) -> int:
    """1 with probability p, else 0."""
    return src.bernoulli(p)
