"""Joint outcome distributions for measurement sequences, plus a sampler.

Alice measures one of six fixed three-observable sequences; optionally Bob
measures a single partner observable.  The exact joint distribution over
±1 outcomes is obtained by enumerating every branch of the Lüders update
tree (8 leaves without Bob, 16 with), never by sampling.  The sampler
exists only to emulate a finite-shot experiment and draws whole outcome
tuples from the exact joint distribution by inverse CDF.

Reproducibility contract: randomness comes from a SplitMix64 counter
stream.  Draw ``i`` (0-based) of the stream with seed ``s`` is::

    u_i = mix64((s + (i + 1) * GOLDEN) mod 2^64) >> 11) * 2^-53

with ``GOLDEN = 0x9E3779B97F4A7C15`` and ``mix64`` the standard SplitMix64
finalizer.  Because each draw depends only on (seed, i), splitting a shot
range across workers and concatenating the results is bit-identical to a
single pass.  The mapping is frozen by unit tests and will not change
between releases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .observables import BOB_LABELS, OBSERVABLES, SEQUENCES
from .pauli import PauliString
from .states import DensityState, ZERO_PROBABILITY_TOL, luders_update

PROBABILITY_SUM_TOL = 1e-10

_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SequenceSpec:
    """One run configuration: an Alice sequence and an optional Bob observable."""

    sequence: str
    bob: str | None = None

    def __post_init__(self):
        if self.sequence not in SEQUENCES:
            raise ValueError(
                f"unknown sequence {self.sequence!r}; expected one of {tuple(SEQUENCES)}"
            )
        if self.bob is not None and self.bob not in BOB_LABELS:
            raise ValueError(
                f"unknown Bob observable {self.bob!r}; expected one of {BOB_LABELS}"
            )

    @property
    def alice_labels(self) -> tuple[str, str, str]:
        return SEQUENCES[self.sequence]

    @property
    def n_outcomes(self) -> int:
        return 3 if self.bob is None else 4


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact joint distribution over ±1 outcome tuples for one spec.

    Entries hold only outcomes with nonzero probability; probabilities are
    nonnegative and sum to 1 within ``PROBABILITY_SUM_TOL``.
    """

    spec: SequenceSpec
    entries: dict[tuple[int, ...], float]

    def __post_init__(self):
        total = 0.0
        for outcomes, prob in self.entries.items():
            if len(outcomes) != self.spec.n_outcomes:
                raise ValueError(
                    f"outcome tuple {outcomes} does not match spec length {self.spec.n_outcomes}"
                )
            if any(o not in (1, -1) for o in outcomes):
                raise ValueError(f"outcomes must be ±1, got {outcomes}")
            if prob < -1e-12:
                raise ValueError(f"negative probability {prob} for {outcomes}")
            total += prob
        if abs(total - 1.0) > PROBABILITY_SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")


class ShotRecord(NamedTuple):
    spec: SequenceSpec
    outcomes: tuple[int, ...]
    shot_index: int
    seed: int


def sequence_distribution(rho: DensityState, spec: SequenceSpec) -> OutcomeDistribution:
    """Exact outcome distribution by branch enumeration of the Lüders tree.

    Alice's three observables are measured in sequence order, then Bob's
    (if present).  Branches whose probability falls below the zero
    threshold are pruned.
    """
    if rho.n_qubits != 4:
        raise ValueError(f"sequences are defined on 4 qubits, state has {rho.n_qubits}")
    chain: list[PauliString] = [OBSERVABLES[lab].pauli for lab in spec.alice_labels]
    if spec.bob is not None:
        chain.append(OBSERVABLES[spec.bob].pauli)

    branches: list[tuple[float, DensityState, tuple[int, ...]]] = [(1.0, rho, ())]
    for obs in chain:
        grown = []
        for weight, state, outcomes in branches:
            for outcome in (1, -1):
                prob, post = luders_update(state, obs, outcome)
                joint = weight * prob
                if post is None or joint < ZERO_PROBABILITY_TOL:
                    continue
                grown.append((joint, post, outcomes + (outcome,)))
        branches = grown

    entries = {outcomes: weight for weight, _, outcomes in branches}
    return OutcomeDistribution(spec=spec, entries=entries)


def product_expectation(dist: OutcomeDistribution) -> float:
    """Expectation of the product of the three Alice outcomes."""
    value = sum(p * (o[0] * o[1] * o[2]) for o, p in dist.entries.items())
    return float(value)


def conditional_pair_expectation(dist: OutcomeDistribution, alice_position: int) -> float:
    """Expectation of (Alice outcome at ``alice_position``) x (Bob outcome).

    Args:
        dist: Distribution from a spec that included a Bob observable.
        alice_position: 1-based slot within the Alice sequence.

    Raises:
        ValueError: If the spec had no Bob observable or the position is
            not 1, 2 or 3.
    """
    if dist.spec.bob is None:
        raise ValueError("distribution was built without a Bob observable")
    if alice_position not in (1, 2, 3):
        raise ValueError(f"alice_position must be 1, 2 or 3, got {alice_position}")
    value = sum(p * (o[alice_position - 1] * o[3]) for o, p in dist.entries.items())
    return float(value)


def alice_marginal(dist: OutcomeDistribution, position: int) -> dict[int, float]:
    """Marginal distribution of the Alice outcome at a 1-based position."""
    if position not in (1, 2, 3):
        raise ValueError(f"position must be 1, 2 or 3, got {position}")
    marginal = {1: 0.0, -1: 0.0}
    for outcomes, prob in dist.entries.items():
        marginal[outcomes[position - 1]] += prob
    return marginal


def bob_marginal(dist: OutcomeDistribution) -> dict[int, float]:
    """Marginal distribution of Bob's outcome."""
    if dist.spec.bob is None:
        raise ValueError("distribution was built without a Bob observable")
    marginal = {1: 0.0, -1: 0.0}
    for outcomes, prob in dist.entries.items():
        marginal[outcomes[3]] += prob
    return marginal


def _mix64(z: int) -> int:
    """SplitMix64 finalizer (public-domain constants)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *indices: int) -> int:
    """Fold sub-stream indices into a base seed; stable across releases."""
    state = seed & _MASK64
    for index in indices:
        state = _mix64((state + (index + 1) * _GOLDEN) & _MASK64)
    return state


def uniform01(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Draws ``start .. start+count-1`` of the uniform [0, 1) stream for ``seed``."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK64) + counters * np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def sample_outcomes(
    dist: OutcomeDistribution, shots: int, seed: int, first_shot: int = 0
) -> np.ndarray:
    """Draw outcome tuples i.i.d. from the distribution.

    Cells are ordered by sorted outcome tuple and selected by inverse CDF,
    so results for a given (seed, shot index) never depend on how a shot
    range is partitioned.

    Returns:
        int8 array of shape (shots, tuple length) with ±1 entries.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    cells = sorted(dist.entries)
    cumulative = np.cumsum([dist.entries[c] for c in cells])
    cumulative[-1] = 1.0  # guard against rounding just below 1
    draws = uniform01(seed, shots, start=first_shot)
    picks = np.searchsorted(cumulative, draws, side="right")
    table = np.array(cells, dtype=np.int8)
    return table[picks]


def sample(rho: DensityState, spec: SequenceSpec, shots: int, seed: int) -> list[ShotRecord]:
    """Simulate ``shots`` runs of one setting; bit-reproducible for a seed."""
    dist = sequence_distribution(rho, spec)
    rows = sample_outcomes(dist, shots, seed).tolist()
    return [
        ShotRecord(spec=spec, outcomes=tuple(row), shot_index=i, seed=seed)
        for i, row in enumerate(rows)
    ]
