"""Turns raw survey ratings into gold-standard benchmarks.

The cleaning pipeline runs, in order: outlier-participant removal, downer
removal, score aggregation (direct means and the probit-based contextual
conversion), and the outlier-pair filter for the contextual task.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    ConfigError,
    MissingDataError,
    UndefinedAgreementError,
    ValidationError,
)
from .model import (
    STANDARD_VARIANTS,
    Benchmark,
    DirectRating,
    GoldScore,
    IdentifierPair,
    IndirectRating,
)


@dataclass(frozen=True)
class CleaningConfig:
    """Thresholds for the three cleaning filters.

    tau: max allowed mean absolute deviation (unit scale) from the other
    participants' means; theta: max allowed gap between direct and contextual
    similarity; downer_gain: relative agreement improvement that flags a
    participant as a downer.
    """

    tau: float
    theta: float
    downer_gain: float = 0.10

    def __post_init__(self):
        if not self.tau > 0:
            raise ConfigError(f"tau must be > 0, got {self.tau}")
        if not 0 < self.theta <= 1:
            raise ConfigError(f"theta must be in (0,1], got {self.theta}")
        if not self.downer_gain > 0:
            raise ConfigError(f"downer_gain must be > 0, got {self.downer_gain}")


@dataclass
class AgreementReport:
    ira_relatedness: float
    ira_similarity: float
    participants_removed_outlier: int
    participants_removed_downer: int
    pairs_removed: int

    def as_dict(self) -> dict:
        return {
            "ira_relatedness": self.ira_relatedness,
            "ira_similarity": self.ira_similarity,
            "participants_removed_outlier": self.participants_removed_outlier,
            "participants_removed_downer": self.participants_removed_downer,
            "pairs_removed": self.pairs_removed,
        }


def likert_to_unit(rating: int) -> float:
    """Map a 1-5 Likert rating onto [0,1]."""
    if not isinstance(rating, int) or not 1 <= rating <= 5:
        raise ValidationError(f"Likert rating must be an integer in 1..5, got {rating!r}")
    return (rating - 1) / 4


def aggregate_direct(ratings: Iterable[DirectRating]) -> dict[str, tuple[float, float]]:
    """Per pair, the arithmetic mean of unit-scaled relatedness and similarity."""
    sums: dict[str, list[float]] = {}
    for rating in ratings:
        entry = sums.setdefault(rating.pair_id, [0.0, 0.0, 0.0])
        entry[0] += likert_to_unit(rating.relatedness)
        entry[1] += likert_to_unit(rating.similarity)
        entry[2] += 1.0
    return {pid: (rel / n, sim / n) for pid, (rel, sim, n) in sums.items()}


# ── Krippendorff's alpha (interval difference function) ──────────


def krippendorff_alpha(table: Mapping[str, Mapping[str, float]]) -> float:
    """Krippendorff's alpha with the interval metric delta(a,b) = (a-b)^2.

    ``table`` maps participant -> {item: value}; cells may be missing.
    Computed via the coincidence matrix over pairable values (values of items
    rated by at least two participants).
    """
    by_item: dict[str, list[float]] = {}
    for cells in table.values():
        for item, value in cells.items():
            by_item.setdefault(item, []).append(float(value))

    coincidence: dict[tuple[float, float], float] = {}
    n_pairable = 0
    for values in by_item.values():
        m = len(values)
        if m < 2:
            continue
        n_pairable += m
        weight = 1.0 / (m - 1)
        for i in range(m):
            for j in range(m):
                if i != j:
                    key = (values[i], values[j])
                    coincidence[key] = coincidence.get(key, 0.0) + weight

    if n_pairable == 0:
        raise UndefinedAgreementError("no pairable values (no item has two ratings)")

    marginals: dict[float, float] = {}
    for (c, _k), weight in coincidence.items():
        marginals[c] = marginals.get(c, 0.0) + weight

    observed = sum(weight * (c - k) ** 2 for (c, k), weight in coincidence.items()) / n_pairable
    expected = sum(
        marginals[c] * marginals[k] * (c - k) ** 2
        for c in marginals
        for k in marginals
    ) / (n_pairable * (n_pairable - 1))

    if expected == 0.0:
        raise UndefinedAgreementError("all pairable values identical; expected disagreement is 0")
    return 1.0 - observed / expected


def _rating_tables(
    ratings: Iterable[DirectRating],
) -> tuple[dict[str, dict[str, float]], dict[str, dict[str, float]]]:
    """Participant x pair tables of unit-scaled values, one per rating kind.

    A participant with several ratings for one pair contributes their mean.
    """
    rel_sums: dict[str, dict[str, list[float]]] = {}
    sim_sums: dict[str, dict[str, list[float]]] = {}
    for rating in ratings:
        for sums, value in (
            (rel_sums, likert_to_unit(rating.relatedness)),
            (sim_sums, likert_to_unit(rating.similarity)),
        ):
            cell = sums.setdefault(rating.participant, {}).setdefault(rating.pair_id, [0.0, 0.0])
            cell[0] += value
            cell[1] += 1.0
    rel = {p: {pid: s / n for pid, (s, n) in cells.items()} for p, cells in rel_sums.items()}
    sim = {p: {pid: s / n for pid, (s, n) in cells.items()} for p, cells in sim_sums.items()}
    return rel, sim


# ── Filter 1: outlier participants ───────────────────────────────


def remove_outlier_participants(
    ratings: Sequence[DirectRating], tau: float
) -> tuple[list[DirectRating], set[str]]:
    """Drop participants whose ratings deviate from everyone else's by more than tau.

    Per participant and rated pair: the absolute difference between their
    unit-scaled rating and the mean of all other participants' ratings for
    that pair; these differences are averaged per participant, separately for
    relatedness and similarity, and the two averages are averaged again.
    Pairs rated only by the participant contribute nothing.
    """
    rel_table, sim_table = _rating_tables(ratings)

    removed: set[str] = set()
    for participant in rel_table:
        deviations: list[float] = []
        for table in (rel_table, sim_table):
            diffs: list[float] = []
            for pair_id, own in table[participant].items():
                others = [
                    cells[pair_id]
                    for p, cells in table.items()
                    if p != participant and pair_id in cells
                ]
                if others:
                    diffs.append(abs(own - sum(others) / len(others)))
            if diffs:
                deviations.append(sum(diffs) / len(diffs))
        if deviations and sum(deviations) / len(deviations) > tau:
            removed.add(participant)

    retained = [r for r in ratings if r.participant not in removed]
    return retained, removed


# ── Filter 2: downer participants ────────────────────────────────


def _relative_gain(with_p: float, without_p: float) -> float:
    """Relative agreement improvement from removing a participant.

    Signed-magnitude form so a negative baseline behaves sanely; for a zero
    baseline any strict increase counts as infinite improvement.
    """
    if with_p == 0.0:
        return math.inf if without_p > 0 else 0.0
    return (without_p - with_p) / abs(with_p)


def remove_downers(
    ratings: Sequence[DirectRating], gain: float
) -> tuple[list[DirectRating], set[str]]:
    """Drop participants whose removal raises either agreement coefficient by
    at least ``gain`` (relative).

    Single non-iterated pass: every candidate is evaluated against the full
    incoming cohort, so the result does not depend on evaluation order.
    """
    rel_table, sim_table = _rating_tables(ratings)
    if not rel_table:
        return list(ratings), set()

    removed: set[str] = set()
    for table in (rel_table, sim_table):
        alpha_all = krippendorff_alpha(table)
        for participant in table:
            rest = {p: cells for p, cells in table.items() if p != participant}
            alpha_without = krippendorff_alpha(rest)
            if _relative_gain(alpha_all, alpha_without) >= gain:
                removed.add(participant)

    retained = [r for r in ratings if r.participant not in removed]
    return retained, removed


# ── Contextual similarity via signal detection ───────────────────

# Coefficients of the Acklam rational approximation to the standard normal
# quantile; one Halley refinement step brings it near machine precision.
_ICDF_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
           1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_ICDF_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
           6.680131188771972e+01, -1.328068155288572e+01)
_ICDF_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
           -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_ICDF_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
           3.754408661907416e+00)
_ICDF_P_LOW = 0.02425


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF, accurate to well below 1e-9 on (0,1)."""
    if not 0.0 < p < 1.0:
        raise ValidationError(f"quantile argument must be in (0,1), got {p}")
    a, b, c, d = _ICDF_A, _ICDF_B, _ICDF_C, _ICDF_D
    if p < _ICDF_P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
             / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0))
    elif p <= 1.0 - _ICDF_P_LOW:
        q = p - 0.5
        r = q * q
        x = ((((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
             / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0))
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -((((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
              / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0))
    # Halley refinement against the exact CDF.
    error = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = error * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


def sdt_contextual_scores(
    ratings: Iterable[IndirectRating],
    expected_pairs: Iterable[str] | None = None,
) -> dict[str, float]:
    """Convert forced-choice counts into contextual similarities in [0,1].

    Per pair, the proportion of answers agreeing with the context owner is
    smoothed to (x+0.5)/(n+1), mapped to a distance |quantile(p)|, and the
    distances are min-max normalized and inverted across all pairs: an even
    split (distance 0) scores 1, the most lopsided pair scores 0.
    """
    counts: dict[str, list[int]] = {}
    for rating in ratings:
        entry = counts.setdefault(rating.pair_id, [0, 0])
        entry[0] += 1
        if rating.chosen == rating.context_owner:
            entry[1] += 1

    if expected_pairs is not None:
        missing = sorted(set(expected_pairs) - set(counts))
        if missing:
            raise MissingDataError(f"pairs without indirect ratings: {missing[:5]}")
    if not counts:
        return {}

    distances = {
        pid: abs(normal_quantile((x + 0.5) / (n + 1)))
        for pid, (n, x) in counts.items()
    }
    d_min = min(distances.values())
    d_max = max(distances.values())
    if d_max == d_min:
        return {pid: 1.0 for pid in distances}
    return {pid: 1.0 - (d - d_min) / (d_max - d_min) for pid, d in distances.items()}


# ── Filter 3: outlier pairs ──────────────────────────────────────


def remove_outlier_pairs(
    direct_sim: Mapping[str, float],
    contextual_sim: Mapping[str, float],
    theta: float,
) -> set[str]:
    """Pairs kept in the contextual task: direct/contextual gap at most theta
    (inclusive). The relatedness and similarity tasks keep all pairs."""
    retained: set[str] = set()
    for pair_id, ctx in contextual_sim.items():
        if pair_id not in direct_sim:
            raise MissingDataError(f"pair {pair_id} has no direct similarity")
        if abs(direct_sim[pair_id] - ctx) <= theta:
            retained.add(pair_id)
    return retained


# ── Full pipeline ────────────────────────────────────────────────


def build_benchmark(
    direct: Sequence[DirectRating],
    indirect: Sequence[IndirectRating],
    pairs: Mapping[str, IdentifierPair],
    cfg: CleaningConfig,
) -> tuple[Benchmark, AgreementReport]:
    """Run the full cleaning pipeline and assemble the benchmark.

    Removed participants lose both their direct and indirect ratings. Pair
    order in the result follows first appearance in the direct ratings.
    Contextual similarity is absent for pairs dropped by the outlier-pair
    filter (and for pairs that never received indirect ratings).
    """
    kept_direct, removed_outliers = remove_outlier_participants(direct, cfg.tau)
    kept_direct, removed_downers = remove_downers(kept_direct, cfg.downer_gain)
    removed = removed_outliers | removed_downers
    kept_indirect = [r for r in indirect if r.participant not in removed]

    means = aggregate_direct(kept_direct)
    if not means:
        raise MissingDataError("no direct ratings survived cleaning")

    contextual = sdt_contextual_scores(
        r for r in kept_indirect if r.pair_id in means
    )
    direct_sim = {pid: sim for pid, (_rel, sim) in means.items()}
    retained_ctx = remove_outlier_pairs(direct_sim, contextual, cfg.theta)

    order: list[str] = []
    seen: set[str] = set()
    for rating in direct:
        if rating.pair_id in means and rating.pair_id not in seen:
            order.append(rating.pair_id)
            seen.add(rating.pair_id)

    scores = []
    for pair_id in order:
        if pair_id not in pairs:
            raise MissingDataError(f"no identifier pair registered for {pair_id}")
        rel, sim = means[pair_id]
        ctx = contextual.get(pair_id) if pair_id in retained_ctx else None
        scores.append(GoldScore(pairs[pair_id], rel, sim, ctx))

    rel_table, sim_table = _rating_tables(kept_direct)
    report = AgreementReport(
        ira_relatedness=krippendorff_alpha(rel_table),
        ira_similarity=krippendorff_alpha(sim_table),
        participants_removed_outlier=len(removed_outliers),
        participants_removed_downer=len(removed_downers),
        pairs_removed=len(contextual) - len(retained_ctx),
    )
    variant = next(
        (name for name, (tau, theta) in STANDARD_VARIANTS.items()
         if (tau, theta) == (cfg.tau, cfg.theta)),
        "custom",
    )
    return Benchmark(variant=variant, tau=cfg.tau, theta=cfg.theta, scores=scores), report
