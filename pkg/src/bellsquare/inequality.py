"""Assembly of the combined inequality from exact or sampled data.

The combined value omega = chi + S compares against the local-model bound
16, where chi sums the six sequence products (the γcC product entering
with a minus sign) and S sums twelve conditional Alice-Bob correlators.

Two S variants are first-class everywhere:

* ``abs``: the sum of absolute values of the twelve correlators.
* ``signed``: the sum with each correlator weighted by its ideal-state
  correlation sign, so every term contributes +1 at visibility 1.

Both variants are computed and reported because the exhaustive
hidden-variable scan gives them different classical bounds (16 for
signed, 18 for abs); see :mod:`bellsquare.hv_models`.

For the noisy preparation the signed S value is the polynomial
``4V + 8V**2`` in the visibility V while chi stays pinned at 6, so the
combined value crosses 16 at ``V = (sqrt(21) - 1) / 4 ≈ 0.8956``.  The
closed-form threshold ``visibility_threshold`` generalizes this to an
observed chi value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .observables import CHI_SIGNS, S_TERMS, SEQUENCE_ORDER
from .sequences import (
    SequenceSpec,
    conditional_pair_expectation,
    derive_seed,
    product_expectation,
    sample_outcomes,
    sequence_distribution,
)
from .states import DensityState, four_qubit_state

NONCONTEXTUAL_CHI_BOUND = 4.0
LOCAL_OMEGA_BOUND = 16.0

S_VARIANTS = ("abs", "signed")


@dataclass(frozen=True)
class ChiTerms:
    """The six per-sequence product expectations, keyed by sequence name."""

    terms: Mapping[str, float]

    @property
    def chi(self) -> float:
        return float(sum(CHI_SIGNS[name] * self.terms[name] for name in SEQUENCE_ORDER))


@dataclass(frozen=True)
class STerms:
    """The twelve conditional correlators, keyed like ``"BB'|ABC"``."""

    terms: Mapping[str, float]

    @property
    def s_abs(self) -> float:
        return float(sum(abs(self.terms[t.key]) for t in S_TERMS))

    @property
    def s_signed(self) -> float:
        return float(sum(t.sign * self.terms[t.key] for t in S_TERMS))


@dataclass(frozen=True)
class InequalityReport:
    """All inequality ingredients for one state, both S variants."""

    chi_terms: ChiTerms
    s_terms: STerms
    chi: float
    s_abs: float
    s_signed: float
    omega_abs: float
    omega_signed: float
    chi_bound: float = NONCONTEXTUAL_CHI_BOUND
    omega_bound: float = LOCAL_OMEGA_BOUND

    @property
    def violated_abs(self) -> bool:
        return self.omega_abs > self.omega_bound

    @property
    def violated_signed(self) -> bool:
        return self.omega_signed > self.omega_bound

    @property
    def chi_violated(self) -> bool:
        return self.chi > self.chi_bound


def evaluate_chi(rho: DensityState) -> ChiTerms:
    """Per-sequence product expectations through the Lüders tree.

    Each sequence's operator product is ±Identity, so every term is
    exactly ±1 for any state; the engine computes it from the sequential
    distribution rather than assuming it.
    """
    terms = {}
    for name in SEQUENCE_ORDER:
        dist = sequence_distribution(rho, SequenceSpec(name))
        terms[name] = product_expectation(dist)
    return ChiTerms(terms=terms)


def evaluate_s(rho: DensityState, variant: str) -> tuple[STerms, float]:
    """The twelve conditional correlators and their ``variant`` total.

    Args:
        rho: Four-qubit state.
        variant: ``"abs"`` or ``"signed"``.
    """
    if variant not in S_VARIANTS:
        raise ValueError(f"variant must be one of {S_VARIANTS}, got {variant!r}")
    terms = {}
    for term in S_TERMS:
        dist = sequence_distribution(rho, SequenceSpec(term.sequence, term.bob))
        terms[term.key] = conditional_pair_expectation(dist, term.position)
    s_terms = STerms(terms=terms)
    total = s_terms.s_abs if variant == "abs" else s_terms.s_signed
    return s_terms, total


def omega(rho: DensityState) -> InequalityReport:
    """Full inequality report for a state; both S variants are included."""
    chi_terms = evaluate_chi(rho)
    s_terms, _ = evaluate_s(rho, "signed")
    chi = chi_terms.chi
    s_abs = s_terms.s_abs
    s_signed = s_terms.s_signed
    return InequalityReport(
        chi_terms=chi_terms,
        s_terms=s_terms,
        chi=chi,
        s_abs=s_abs,
        s_signed=s_signed,
        omega_abs=chi + s_abs,
        omega_signed=chi + s_signed,
    )


def visibility_threshold(chi_expt: float) -> float:
    """Minimum visibility for violating the bound 16 at an observed chi.

    Returns ``(sqrt(33 - 2*chi_expt) - 1) / 4``, the positive root of
    ``8V^2 + 4V + (chi_expt - 16) = 0``.

    Raises:
        ValueError: If ``chi_expt`` lies outside [-6, 6].
    """
    x = float(chi_expt)
    if not -6.0 <= x <= 6.0:
        raise ValueError(f"chi_expt must lie in [-6, 6], got {chi_expt}")
    return (math.sqrt(33.0 - 2.0 * x) - 1.0) / 4.0


def fidelity_from_visibility(visibility: float) -> float:
    """Fidelity of the noisy pair with the ideal singlet: sqrt(3V + 1) / 2."""
    v = float(visibility)
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {visibility}")
    return math.sqrt(3.0 * v + 1.0) / 2.0


@dataclass(frozen=True)
class SweepRow:
    visibility: float
    chi: float
    s_abs: float
    s_signed: float
    omega_abs: float
    omega_signed: float


@dataclass(frozen=True)
class SweepResult:
    """Inequality values over a visibility grid.

    ``crossing_bracket`` is the first grid interval on which the selected
    variant's omega crosses the bound 16 (None if it never does), and
    ``crossing`` is that root refined by bisection on the exact engine.
    """

    variant: str
    rows: tuple[SweepRow, ...]
    crossing_bracket: tuple[float, float] | None
    crossing: float | None


def sweep(v_grid, variant: str = "signed") -> SweepResult:
    """Evaluate the inequality on an ascending visibility grid."""
    if variant not in S_VARIANTS:
        raise ValueError(f"variant must be one of {S_VARIANTS}, got {variant!r}")
    grid = [float(v) for v in v_grid]
    if not grid:
        raise ValueError("v_grid must not be empty")
    if any(not 0.0 <= v <= 1.0 for v in grid):
        raise ValueError("grid values must lie in [0, 1]")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly ascending")

    rows = []
    for v in grid:
        report = omega(four_qubit_state(v))
        rows.append(
            SweepRow(
                visibility=v,
                chi=report.chi,
                s_abs=report.s_abs,
                s_signed=report.s_signed,
                omega_abs=report.omega_abs,
                omega_signed=report.omega_signed,
            )
        )

    pick = (lambda r: r.omega_abs) if variant == "abs" else (lambda r: r.omega_signed)
    bracket = None
    for prev, curr in zip(rows, rows[1:]):
        if pick(prev) < LOCAL_OMEGA_BOUND <= pick(curr):
            bracket = (prev.visibility, curr.visibility)
            break
    crossing = None
    if bracket is not None:
        crossing = find_violation_threshold(variant, lo=bracket[0], hi=bracket[1])
    return SweepResult(variant=variant, rows=tuple(rows), crossing_bracket=bracket, crossing=crossing)


def find_violation_threshold(
    variant: str = "signed", lo: float = 0.0, hi: float = 1.0, tol: float = 1e-10
) -> float:
    """Visibility where the engine's omega(V) reaches 16, by bisection.

    Requires omega(lo) <= 16 <= omega(hi) for the selected variant.
    """
    if variant not in S_VARIANTS:
        raise ValueError(f"variant must be one of {S_VARIANTS}, got {variant!r}")

    def excess(v: float) -> float:
        report = omega(four_qubit_state(v))
        value = report.omega_abs if variant == "abs" else report.omega_signed
        return value - LOCAL_OMEGA_BOUND

    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo > 0 or f_hi < 0:
        raise ValueError(f"omega - 16 does not change sign on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


@dataclass(frozen=True)
class TermEstimate:
    """Finite-shot estimate of one inequality ingredient.

    ``sigma`` is the binomial standard error sqrt((1 - exact^2) / n)
    evaluated at the exact value; it is zero for deterministic terms,
    in which case the estimate must match exactly.
    """

    key: str
    exact: float
    estimate: float
    sigma: float
    n_shots: int

    @property
    def z_score(self) -> float:
        if self.sigma == 0.0:
            return 0.0 if self.estimate == self.exact else math.inf
        return (self.estimate - self.exact) / self.sigma


@dataclass(frozen=True)
class SampledInequality:
    """All 18 inequality ingredients estimated from seeded sampling."""

    visibility: float
    shots_per_setting: int
    seed: int
    chi_terms: dict[str, TermEstimate]
    s_terms: dict[str, TermEstimate]
    chi: float
    s_abs: float
    s_signed: float
    omega_abs: float
    omega_signed: float
    exact: InequalityReport = field(repr=False)

    @property
    def max_abs_z(self) -> float:
        scores = [abs(t.z_score) for t in self.chi_terms.values()]
        scores += [abs(t.z_score) for t in self.s_terms.values()]
        return max(scores)

    def within(self, n_sigma: float = 5.0) -> bool:
        return self.max_abs_z <= n_sigma


def estimate_inequality(visibility: float, shots: int, seed: int) -> SampledInequality:
    """Finite-shot estimates of all inequality ingredients.

    Runs the twelve (sequence, Bob observable) settings with ``shots``
    samples each, on sub-streams derived from ``seed`` by setting index.
    Each sequence appears in two settings; its chi term pools the Alice
    outcomes of both.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rho = four_qubit_state(visibility)

    s_estimates: dict[str, TermEstimate] = {}
    pooled_products: dict[str, list[np.ndarray]] = {name: [] for name in SEQUENCE_ORDER}
    chi_exact: dict[str, float] = {}

    for index, term in enumerate(S_TERMS):
        spec = SequenceSpec(term.sequence, term.bob)
        dist = sequence_distribution(rho, spec)
        outcomes = sample_outcomes(dist, shots, derive_seed(seed, index))
        pair = outcomes[:, term.position - 1] * outcomes[:, 3]
        exact = conditional_pair_expectation(dist, term.position)
        s_estimates[term.key] = TermEstimate(
            key=term.key,
            exact=exact,
            estimate=float(pair.mean()),
            sigma=math.sqrt(max(1.0 - exact * exact, 0.0) / shots),
            n_shots=shots,
        )
        pooled_products[term.sequence].append(
            outcomes[:, 0] * outcomes[:, 1] * outcomes[:, 2]
        )
        chi_exact[term.sequence] = product_expectation(dist)

    chi_estimates: dict[str, TermEstimate] = {}
    for name in SEQUENCE_ORDER:
        products = np.concatenate(pooled_products[name])
        exact = chi_exact[name]
        chi_estimates[name] = TermEstimate(
            key=name,
            exact=exact,
            estimate=float(products.mean()),
            sigma=math.sqrt(max(1.0 - exact * exact, 0.0) / products.size),
            n_shots=int(products.size),
        )

    chi = float(sum(CHI_SIGNS[n] * chi_estimates[n].estimate for n in SEQUENCE_ORDER))
    s_abs = float(sum(abs(s_estimates[t.key].estimate) for t in S_TERMS))
    s_signed = float(sum(t.sign * s_estimates[t.key].estimate for t in S_TERMS))
    return SampledInequality(
        visibility=float(visibility),
        shots_per_setting=shots,
        seed=seed,
        chi_terms=chi_estimates,
        s_terms=s_estimates,
        chi=chi,
        s_abs=s_abs,
        s_signed=s_signed,
        omega_abs=chi + s_abs,
        omega_signed=chi + s_signed,
        exact=omega(rho),
    )
